"""Curvature of the PQKT connection: Ricci forms, scalar curvatures and identities.

Everything is evaluated in an adapted frame ``g(e_i, e_j) = eps_i delta_ij``
so that traces are explicit signed sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connections import EXISTENCE_TOL, existence_residuals
from .errors import NoPQKTStructureError, UnsupportedDimensionError, UnsupportedOrderError
from .frameview import FrameView, cyclic3, maxabs
from .geometry import curvature_vec, ext_d, jform_jet, local_geometry
from .tensor import CYCLIC, EPS, type_4form_residual

#: default tolerance deciding whether the torsion is parallel
PARALLEL_TOL = 1e-9


def curvature(conn, g=None):
    """``R(X, Y) Z = [nabla_X, nabla_Y] Z - nabla_[X,Y] Z`` from ``Gamma`` and its derivative.

    Returns ``R[x, y, z, a]`` (vector valued) or, with ``g``, the ``(0,4)``
    tensor ``R(X, Y, Z, V) = g(R(X, Y) Z, V)``.
    """
    jet = getattr(conn, "jet", conn)
    if jet.order < 1:
        raise UnsupportedOrderError("curvature needs the first derivatives of the connection")
    Rv = curvature_vec(jet.truncate(1)).value
    if g is None:
        return Rv
    return np.einsum("xyzf,fv->xyzv", Rv, np.asarray(getattr(g, "value", g)))


@dataclass(frozen=True)
class CurvatureData:
    """Curvature tensors and traces in adapted-frame components."""

    R: np.ndarray
    Rg: np.ndarray
    rho: tuple
    rho_g: tuple
    ric: np.ndarray
    ric_g: np.ndarray
    rho_star: tuple
    scal: float
    scal_g: float
    scal_alpha: tuple
    scal_g_alpha: tuple
    scal_ab: np.ndarray
    scal_g_ab: np.ndarray
    scal_P: float
    scal_g_P: float


@dataclass(frozen=True)
class AuxTensors:
    """``dT``, the Bianchi projector ``B``, the symmetry defect ``D`` and ``L_a``."""

    dT: np.ndarray
    B: np.ndarray
    D: np.ndarray
    L_alpha: tuple


@dataclass(frozen=True)
class _Pointwise:
    """Frame components of the first-order data entering the identities."""

    V: FrameView
    n: int
    T: np.ndarray
    nT: np.ndarray
    ngT: np.ndarray
    t: np.ndarray
    nt: np.ndarray
    dt: np.ndarray
    delta_t: float
    delta_T: np.ndarray
    omega: tuple
    d_omega: tuple
    F: tuple


def omega_jets(G):
    """Jets of ``omega_a`` from the Lee forms (the closed form of the 1-form system).

    ``omega_b = 1/2 eps_a J_b (theta_c - theta_b + theta_a / (1 - n))
    + eps_b theta_{a,c} / (2 (1 - n))`` for each cyclic ``(a, b, c)``.
    """
    n = G.n
    if n < 2:
        raise UnsupportedDimensionError("the closed form of omega needs n >= 2")
    k = G.theta[0].order
    th = [x.truncate(k) for x in G.theta]
    out = [None] * 3
    for a, b, c in CYCLIC:
        inner = th[c] - th[b] + th[a] * (1.0 / (1 - n))
        out[b] = (jform_jet(G.J[b].truncate(k), inner) * (0.5 * EPS[a])
                  + G.theta_cross[a][c].truncate(k) * (EPS[b] / (2 * (1 - n))))
    return out


def _pointwise(G):
    V = FrameView(G.frame, [j.value for j in G.J])
    c = V.cov
    om = omega_jets(G)
    return _Pointwise(
        V=V, n=G.n, T=c(G.T.value), nT=c(G.nabla_T.value), ngT=c(G.nabla_g_T.value),
        t=c(G.t.value), nt=c(G.nabla_t.value), dt=c(G.dt.value),
        delta_t=float(G.delta_t.value), delta_T=c(G.delta_T.value),
        omega=tuple(c(w.value) for w in om), d_omega=tuple(c(ext_d(w).value) for w in om),
        F=tuple(c(f.value) for f in G.F),
    )


def _require_pqkt(G):
    if G.n < 2:
        raise UnsupportedDimensionError("the curvature identities need n >= 2")
    res = max(existence_residuals(G))
    if res > EXISTENCE_TOL:
        raise NoPQKTStructureError(f"no PQKT connection at p (existence residual {res:.3e})")


def ricci_data(G, V=None) -> CurvatureData:
    """Ricci forms, Ricci tensors and scalar curvatures of ``nabla`` and ``nabla^g``."""
    V = V or FrameView(G.frame, [j.value for j in G.J])
    R = V.cov(G.R.value)
    Rg = V.cov(G.Rg.value)
    s = V.s
    rho = tuple(0.5 * V.tr(R, 2, 3, a) for a in range(3))
    rho_g = tuple(0.5 * V.tr(Rg, 2, 3, a) for a in range(3))
    ric = np.einsum("ixyi,i->xy", R, s)
    ric_g = np.einsum("ixyi,i->xy", Rg, s)
    scal_ab = np.array([[EPS[a] * V.tr(rho[a], 0, 1, b) for b in range(3)] for a in range(3)])
    scal_g_ab = np.array([[EPS[a] * V.tr(rho_g[a], 0, 1, b) for b in range(3)] for a in range(3)])
    return CurvatureData(
        R=R, Rg=Rg, rho=rho, rho_g=rho_g, ric=ric, ric_g=ric_g,
        rho_star=tuple(V.jslot(rho_g[a], a, 1) for a in range(3)),
        scal=float(np.einsum("ii,i->", ric, s)), scal_g=float(np.einsum("ii,i->", ric_g, s)),
        scal_alpha=tuple(float(-V.tr(ric, 0, 1, a)) for a in range(3)),
        scal_g_alpha=tuple(float(-V.tr(ric_g, 0, 1, a)) for a in range(3)),
        scal_ab=scal_ab, scal_g_ab=scal_g_ab,
        scal_P=float(np.mean(np.diag(scal_ab))), scal_g_P=float(np.mean(np.diag(scal_g_ab))),
    )


def aux_tensors(G, data: CurvatureData | None = None, V=None) -> AuxTensors:
    V = V or FrameView(G.frame, [j.value for j in G.J])
    data = data or ricci_data(G, V)
    R = data.R
    T = V.cov(G.T.value)
    s = V.s
    L = tuple(np.einsum("xik,yik,i,k->xy", T, V.jslot(T, a, 1), s, s) for a in range(3))
    return AuxTensors(dT=V.cov(G.dT.value), B=cyclic3(R),
                      D=R - np.einsum("zuxy->xyzu", R), L_alpha=L)


def curvature_bundle(S, p, geom=None):
    """``(G, FrameView, CurvatureData, AuxTensors)`` at ``p`` (third-order jets)."""
    G = local_geometry(S, p, 3, geom)
    _require_pqkt(G)
    V = FrameView(G.frame, [j.value for j in G.J])
    data = ricci_data(G, V)
    return G, V, data, aux_tensors(G, data, V)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


def verify_curvature_identities(S, p, geom=None):
    """One residual per curvature identity at ``p`` (max over frame components)."""
    G, V, cd, aux = curvature_bundle(S, p, geom)
    P = _pointwise(G)
    n = S.n
    s = V.s
    js, jj, tr = V.jslot, V.jj, V.tr
    rho, rhog, Ric, Ricg = cd.rho, cd.rho_g, cd.ric, cd.ric_g
    R, Rg, B, D, dT = cd.R, cd.Rg, aux.B, aux.D, aux.dT
    T, nT, nt, dt = P.T, P.nT, P.nt, P.dt
    T2 = V.norm2_3(T)
    t2 = V.norm2_1(P.t)
    dTa = [tr(dT, 2, 3, a) for a in range(3)]
    gT = V.gTT(T, T)
    out = {}

    def put(key, *vals):
        out[key] = max(out.get(key, 0.0), maxabs(*vals))

    Rend = np.einsum("xyzf,f->xyfz", R, s)
    for a, b, c in CYCLIC:
        ea, eb, ec = EPS[a], EPS[b], EPS[c]
        Ja = V.J[a]
        comm = np.einsum("xyfz,zk->xyfk", Rend, Ja) - np.einsum("fz,xyzk->xyfk", Ja, Rend)
        rhs = (1 / n) * (-ea * np.einsum("xy,fk->xyfk", rho[c], V.J[b])
                         + ea * np.einsum("xy,fk->xyfk", rho[b], V.J[c]))
        put("eq.11", comm - rhs)
        wb = np.outer(P.omega[b], P.omega[c]) - np.outer(P.omega[c], P.omega[b])
        put("eq.12", ec * rho[a] - n * (P.d_omega[a] + ea * wb))

        rXJY = [js(rho[q], q, 1) for q in range(3)]
        dXJY = [js(dTa[q], q, 1) for q in range(3)]
        put("eq.ti20", n * ea * rXJY[a] + eb * rXJY[b] + ec * rXJY[c]
            - (n * Ric + n / 4 * ea * dXJY[a] - n * nt))
        put("eq.ti22", (n - 1) * ea * rXJY[a]
            - (n * (n - 1) / (n + 2) * (Ric - nt)
               + n / (4 * (n + 2)) * ((n + 1) * ea * dXJY[a] - eb * dXJY[b] - ec * dXJY[c])))
        put("eq.21.2", jj(rho[a], b, b) + eb * rho[a] + ec * js(rho[c], b, 0) + ec * js(rho[c], b, 1))
        put("eq.22.2", ea * rXJY[a] + ea * js(rho[a], a, 0) + n / (n + 1) * (dt + ea * jj(dt, a, a)))
        put("eq.22.3", ea * js(rhog[a], a, 1) + ea * js(rhog[a], a, 0)
            + (n - 1) / (2 * (n + 1)) * (dt + ea * jj(dt, a, a)))
        put("eq.21", (n - 1) * (ea * rXJY[a] - eb * rXJY[b]) - n / 4 * (ea * dXJY[a] - eb * dXJY[b]))
        put("eq.nov2", 4 * (n - 1) / n * (ea * rXJY[a] - eb * rXJY[b]) - (ea * dXJY[a] - eb * dXJY[b]))

        # Ricci forms through the Bianchi projector and the symmetry defect
        Ba = tr(B, 2, 3, a)
        Da = tr(D, 1, 2, a)
        ric_yjx = js(Ric, a, 1).T
        ric_xjy = js(Ric, a, 1)
        put("eq.16", rho[a] - (-0.5 * ric_yjx + 0.5 * ric_xjy + 0.5 * Ba
                               + (1 / (2 * n)) * (-ea * js(rho[b], c, 0).T + ea * js(rho[b], c, 0)
                                                   - ea * js(rho[c], b, 0) + ea * js(rho[c], b, 0).T)))
        cross = js(rho[b], c, 1) + js(rho[b], c, 1).T - js(rho[c], b, 1) - js(rho[c], b, 1).T
        put("eq.19", Da + ric_yjx + ric_xjy + ea / n * cross)
        put("eq.20", n * ea * rXJY[a] + eb * rXJY[b] + ec * rXJY[c]
            - (n * Ric + n / 2 * ea * js(Ba, a, 1) + n / 2 * ea * js(Da, a, 1)))
        L = aux.L_alpha
        put("eq.e21.1", jj(L[a], b, b) + eb * L[a] + ec * js(L[c], b, 0) + ec * js(L[c], b, 1))

        rJXY = [js(rho[q], q, 0) for q in range(3)]
        lhs = (2 * (ea * rXJY[a] + ea * rJXY[a]) - ea * (jj(Ric, a, a) - jj(Ric, a, a).T) - (Ric - Ric.T)
               + (1 / n) * (eb * rXJY[b] + eb * rJXY[b] + ec * rXJY[c] + ec * rJXY[c]
                            - jj(rho[b], a, c) - jj(rho[b], c, a) + jj(rho[c], a, b) + jj(rho[c], b, a)))
        put("eq.22.21", lhs - (-2 * (dt + ea * jj(dt, a, a)) + P.delta_T + ea * jj(P.delta_T, a, a)))
        put("eq.22.22", ec * jj(rho[a], c, b) + eb * rJXY[a] + rJXY[c] + ec * jj(rho[c], a, b))
        put("eq.22.23", ec * jj(rho[a], b, c) + eb * rXJY[a] + rXJY[c] + ec * jj(rho[c], b, a))
        l24 = ea * rXJY[a] + ea * rJXY[a]
        put("eq.22.24", l24 - (ec * rJXY[c] + ec * rXJY[c] + jj(rho[c], a, b) + jj(rho[c], b, a)
                               + jj(rho[a], c, b) + jj(rho[a], b, c)))
        put("eq.22.25", l24 - (eb * rJXY[b] + eb * rXJY[b] - jj(rho[b], a, c) - jj(rho[b], c, a)
                               - jj(rho[a], c, b) - jj(rho[a], b, c)))
        put("eq.22.26", 2 * l24 - (ec * rJXY[c] + ec * rXJY[c] + eb * rJXY[b] + eb * rXJY[b]
                                   + jj(rho[c], a, b) + jj(rho[c], b, a)
                                   - jj(rho[b], a, c) - jj(rho[b], c, a)))
        # Riemannian *-Ricci form against the PQKT Ricci form
        nt_swap = np.einsum("uv,ux,vy->xy", nt, V.J[a], V.J[a]).T
        tJT = np.einsum("xyk,k,k->xy", js(T, a, 1), s, V.compose(P.t, a))
        LL = np.einsum("xik,yik,i,k->xy", T, js(js(T, a, 0), a, 1), s, s)
        put("eq.rn2", ea * js(rhog[a], a, 1)
            - (ea * rXJY[a] + 0.5 * nt - 0.5 * ea * nt_swap + 0.5 * ea * tJT + 0.25 * ea * LL))

        # trace identities of the torsion
        put("eq.l1.1", tr(js(nT, a, 1), 2, 3, a) + 2 * ea * nt)
        put("eq.l1.2a", tr(tr(dT, 0, 1, a), 0, 1, a) - (8 * ea * P.delta_t - 8 * ea * t2 + 4 / 3 * ea * T2))
        put("eq.l1.2b", tr(tr(dT, 0, 1, b), 0, 1, c))
        put("lem.3.3a", np.einsum("ijk,ijk,i,j,k->", T, jj(T, c, b), s, s, s))
        put("lem.3.3b", np.einsum("ijk,ijk,i,j,k->", T, jj(T, b, b), s, s, s) + EPS[b] / 3 * T2)
        put("eq.tir2", Da + js(nt, a, 1) + js(nt, a, 1).T)
        put("eq.tir4", Ba + Da - 0.5 * dTa[a] + 2 * js(nt, a, 1))

    # scalar curvatures
    sab = cd.scal_ab
    sgab = cd.scal_g_ab
    put("eq.22.4", [sab[a, a] - sab[b, b] for a, b, _ in CYCLIC],
        [sab[a, b] for a in range(3) for b in range(3) if a != b])
    put("eq.pq1", [sgab[a, a] - (cd.scal_P - P.delta_t + t2 - T2 / 12) for a in range(3)])
    put("eq.pq1.b", [-EPS[c] * sgab[a, b] - cd.scal_alpha[c] for a, b, c in CYCLIC])
    put("prop.4.10.a", cd.scal_g - ((n + 2) / n * cd.scal_P - 3 * P.delta_t + 2 * t2 - T2 / 12))
    put("prop.4.10.b", cd.scal_g_P - (cd.scal_P - P.delta_t + t2 - T2 / 12))
    put("prop.4.10.c", cd.scal - ((n + 2) / n * cd.scal_P - 3 * P.delta_t + 2 * t2 - T2 / 3))
    put("eq.r5", cd.scal_g - cd.scal - T2 / 4)
    put("eq.r5.ricci", Ricg - Ric - 0.5 * P.delta_T - 0.25 * np.einsum("xik,yik,i,k->xy", T, T, s, s))
    put("ricci.skew", Ric - Ric.T + P.delta_T)

    # first Bianchi identity and the torsion derivatives
    put("eq.15", Rg - (R - 0.5 * nT + 0.5 * nT.transpose(1, 0, 2, 3) - 0.5 * gT
                       - 0.25 * np.einsum("yzxu->xyzu", gT) - 0.25 * np.einsum("zxyu->xyzu", gT)))
    put("eq.sof", P.ngT - nT - 0.5 * cyclic3(gT))
    put("eq.13", dT - (cyclic3(nT + gT) - np.einsum("uxyz->xyzu", nT) + cyclic3(gT)))
    put("eq.13.two-path", dT - V.cov(ext_d(G.T.truncate(1)).value))
    put("eq.14", B - cyclic3(nT + gT))
    put("eq.tir1", D - (0.5 * nT - 0.5 * nT.transpose(1, 0, 2, 3) - 0.5 * np.einsum("zuxy->xyzu", nT)
                        + 0.5 * np.einsum("uzxy->xyzu", nT)))
    return out


def informational(S, p, geom=None):
    """Quantities reported but never asserted.

    ``scal.alpha.pairing`` compares ``Scal_a`` with half the signed pairing
    of ``dt`` and ``F_a``; the pairing normalization is not fixed, so the
    value is only reported.
    """
    G, V, cd, _ = curvature_bundle(S, p, geom)
    dt = V.cov(G.dt.value)
    F = [V.cov(f.value) for f in G.F]
    return {
        "scal.alpha.pairing": max(abs(cd.scal_alpha[a] - 0.5 * V.pair2(dt, F[a])) for a in range(3)),
        "scal.P": cd.scal_P,
        "scal.g.P": cd.scal_g_P,
    }


# ---------------------------------------------------------------------------
# parallel torsion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParallelTorsionReport:
    applicable: bool
    nabla_T: float
    dT_22: bool
    lam: float | None
    residuals: dict


def parallel_torsion_checks(S, p, geom=None, tol=PARALLEL_TOL):
    """Identities valid when ``nabla T = 0``; not applicable otherwise.

    With ``dT`` of type (2,2) for every ``J_a`` also ``eps_a rho_a(X, J_a Y)
    = lambda g(X, Y)``, ``lambda`` estimated by the trace.
    """
    G, V, cd, aux = curvature_bundle(S, p, geom)
    nT = V.cov(G.nabla_T.value)
    size = maxabs(nT)
    if size > tol:
        return ParallelTorsionReport(False, size, False, None, {})
    T = V.cov(G.T.value)
    dT = aux.dT
    gT = V.gTT(T, T)
    res = {
        "eq.17": maxabs(aux.B - 0.5 * dT, cyclic3(gT) - 0.5 * dT),
        "eq.17.D": maxabs(aux.D),
    }
    dTa = [V.tr(dT, 2, 3, a) for a in range(3)]
    dXJY = [V.jslot(dTa[a], a, 1) for a in range(3)]
    res["eq.24"] = maxabs(dXJY[0] - dXJY[1], dXJY[1] + dXJY[2])
    res["eq.24p"] = maxabs(*[dXJY[a] + V.jslot(dTa[a], a, 0) for a in range(3)])
    type22 = max(maxabs(type_4form_residual(dT, V.J[a], EPS[a])) for a in range(3))
    res["eq.26.9"] = type22
    lam = None
    if type22 < tol:
        n = S.n
        gf = np.diag(V.s)
        lams = [EPS[a] * V.tr(cd.rho[a], 0, 1, a) / (4 * n) for a in range(3)]
        lam = float(np.mean(lams))
        res["eq.27"] = maxabs(*[EPS[a] * V.jslot(cd.rho[a], a, 1) - lam * gf for a in range(3)])
    return ParallelTorsionReport(True, size, type22 < tol, lam, res)
