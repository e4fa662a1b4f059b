"""Conformal rescaling ``g -> f g`` and transport of the PQKT connection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connections import ConnectionJet, TorsionData, one_form_system, pqkt_connection
from .errors import NonPositiveFactorError, ShapeError
from .frameview import FrameView
from .geometry import jform_jet, local_geometry, wedge12_jet
from .jet import Jet, jeinsum, reciprocal_jet
from .model import ParaHermitianStructure
from .poly import PolyField, eval_jet
from .tensor import CYCLIC, EPS, wedge12


def _max(x):
    return float(np.max(np.abs(x), initial=0.0))


def _jf(J, v):
    return -np.asarray(v) @ J


@dataclass(frozen=True)
class ConformalFactor:
    """A polynomial factor checked positive at the sample points."""

    f: PolyField
    points: np.ndarray

    def __post_init__(self):
        vals = [self.f(p) for p in self.points]
        bad = [i for i, v in enumerate(vals) if not v > 0]
        if bad:
            raise NonPositiveFactorError(
                f"conformal factor is not positive at sample point {bad[0]} (value {vals[bad[0]]!r})")


def rescale(S: ParaHermitianStructure, f, points=None) -> ParaHermitianStructure:
    """``(f g, J_1, J_2, J_3)``; the ``J``'s are unchanged."""
    from .catalog import model_to_spec, sample_points

    m = S.dim
    if not isinstance(f, PolyField):
        f = PolyField.from_list(m, f)
    if f.dim != m:
        raise ShapeError("conformal factor lives on a chart of the wrong dimension")
    pts = sample_points(S.n) if points is None else np.asarray(points, dtype=float)
    ConformalFactor(f, pts)
    factor = f if S.factor is None else S.factor * f
    params = {"base": model_to_spec(S), "factor": f.to_list()}
    return ParaHermitianStructure(S.n, S.g0, S.J0, coframe=S.coframe, frame=S.frame,
                                  factor=factor, kind="conformal", params=params)


def _factor_jet(f, p, order):
    if isinstance(f, Jet):
        if f.rank != 0:
            raise ShapeError("a conformal factor jet must be scalar")
        if f.order < order:
            raise ShapeError(f"factor jet of order {f.order}, need {order}")
        fj = f.truncate(order)
    else:
        fj = eval_jet(f, p, order)
    if not float(fj.value) > 0:
        raise NonPositiveFactorError(f"conformal factor is not positive at p (value {float(fj.value)!r})")
    return fj


def reciprocal_factor(f, p, order):
    """Jet of ``1/f`` (for transporting back)."""
    return reciprocal_jet(_factor_jet(f, p, order))


def torsion_twist(df: Jet, g: Jet, J) -> Jet:
    """``sum_a eps_a J_a df ^ F_a`` with ``F_a = g(., J_a .)`` of the base metric."""
    k = df.order
    out = None
    for a in range(3):
        Ja = J[a].truncate(k)
        F = jeinsum("xc,cy->xy", g.truncate(k), Ja)
        term = wedge12_jet(jform_jet(Ja, df), F) * EPS[a]
        out = term if out is None else out + term
    return out


def _torsion_data(T3, gbar, J):
    ginv = np.linalg.inv(gbar)
    ta = tuple(0.5 * EPS[a] * np.einsum("xcd,df,cf->x", T3, J[a], ginv) for a in range(3))
    t = -0.5 * EPS[0] * (np.einsum("ucd,df,cf->u", T3, J[0], ginv) @ J[0])
    return TorsionData(np.einsum("xyz,za->xya", T3, ginv), T3, ta, t)


def transport_pqkt(S, conn: ConnectionJet, T, f, p):
    """The PQKT connection of ``f g`` from the one of ``g``.

    ``gbar(nablabar_X Y, Z) = f g(nabla_X Y, Z) + 1/2 (df(X) g(Y,Z) + df(Y) g(X,Z)
    - df(Z) g(X,Y)) - 1/2 sum_a eps_a (J_a df ^ F_a)(X, Y, Z)``.

    ``T`` is the torsion 3-form of ``conn`` (a value or a :class:`TorsionData`)
    and ``f`` a polynomial or a scalar jet.  Returns the transported
    connection (same jet order as ``conn``) and its torsion data.
    """
    p = np.asarray(p, dtype=float)
    gam = conn.jet
    k = gam.order
    g, J = S.jets(p, k)
    fj = _factor_jet(f, p, k + 1)
    df = fj.deriv()
    f0 = fj.truncate(k)
    lowered = jeinsum(",xya,az->xyz", f0, gam, g)
    sym = (jeinsum("x,yz->xyz", df, g) + jeinsum("y,xz->xyz", df, g)
           - jeinsum("z,xy->xyz", df, g))
    W = torsion_twist(df, g, J)
    L = lowered + (sym - W) * 0.5
    gbar_inv = jeinsum(",ab->ab", reciprocal_jet(f0), _inverse(g))
    gamma = jeinsum("xyz,za->xya", L, gbar_inv)
    T3 = T.T3 if isinstance(T, TorsionData) else np.asarray(T, dtype=float)
    Jv = [j.value for j in J]
    Tbar = float(f0.value) * T3 - W.value
    out = ConnectionJet(gamma, None, "pqkt-transported")
    return out, _torsion_data(Tbar, float(f0.value) * g.value, Jv)


def _inverse(g: Jet) -> Jet:
    from .jet import invert_jet

    return invert_jet(g)


# ---------------------------------------------------------------------------
# transport laws
# ---------------------------------------------------------------------------


def conformal_identities(S, f, p, Gbase=None, Gbar=None, Sbar=None):
    """Residuals of the conformal transport laws at ``p`` (frame components of ``f g``).

    ``S`` must carry a PQKT structure and ``f`` be a polynomial factor.
    """
    p = np.asarray(p, dtype=float)
    n = S.n
    Sbar = rescale(S, f, points=p[None, :]) if Sbar is None else Sbar
    G = local_geometry(S, p, 2, Gbase)
    H = local_geometry(Sbar, p, 2, Gbar)
    V = FrameView(H.frame, [j.value for j in H.J])
    J = [j.value for j in G.J]
    fj = eval_jet(f, p, 2)
    f0 = float(fj.value)
    df = fj.deriv().value
    u = df / f0
    F = [x.value for x in G.F]
    out = {}

    conn, td = pqkt_connection(S, p, G)
    connbar, tdbar = pqkt_connection(Sbar, p, H)
    moved, tdmoved = transport_pqkt(S, conn, td, f, p)
    out["eq.z1"] = _max(V.vec2(moved.gamma - connbar.gamma))
    out["eq.z1.torsion"] = _max(V.cov(tdmoved.T3 - tdbar.T3))
    twist = sum(EPS[a] * wedge12(_jf(J[a], df), F[a]) for a in range(3))
    out["eq.z4"] = _max(V.cov(tdbar.T3 - f0 * td.T3 + twist))
    out["eq.z5"] = _max(V.cov(tdbar.t - td.t + (2 * n + 1) * u))

    dap, dapb = [x.value for x in G.dalphaF_plus], [x.value for x in H.dalphaF_plus]
    out["eq.z2.dF"] = max(_max(V.cov(dapb[a] + EPS[a] * wedge12(_jf(J[a], df), F[a]) - f0 * dap[a]))
                          for a in range(3))
    out["eq.z2.theta"] = max(_max(V.cov(H.theta[a].value - G.theta[a].value - (2 * n - 1) * u))
                             for a in range(3))
    worst = 0.0
    for a, b, c in CYCLIC:
        d = H.theta_cross[a][c].value - G.theta_cross[a][c].value - EPS[c] * _jf(J[b], u)
        worst = max(worst, _max(V.cov(d)))
    out["eq.z2.theta-cross"] = worst

    sysb = one_form_system(Sbar, connbar, p, H)
    sys0 = one_form_system(S, conn, p, G)
    wK = wA = wW = 0.0
    for a, b, c in CYCLIC:
        wK = max(wK, _max(V.cov(sysb.K[a] - sys0.K[a] + 2 * EPS[a] * _jf(J[b], u))))
        wA = max(wA, _max(V.cov(sysb.A[a] - sys0.A[a])))
        wW = max(wW, _max(V.cov(sysb.omega[a] - sys0.omega[a] + EPS[c] * _jf(J[a], u))))
    out["eq.z3.K"] = wK
    out["eq.z3.A"] = wA
    out["eq.z3.omega"] = wW
    return out


def round_trip_residual(S, f, p, Gbase=None):
    """Transport by ``f`` and back by ``1/f``; max coefficient and torsion drift."""
    p = np.asarray(p, dtype=float)
    G = local_geometry(S, p, 2, Gbase)
    conn, td = pqkt_connection(S, p, G)
    Sbar = rescale(S, f, points=p[None, :])
    there, tdt = transport_pqkt(S, conn, td, f, p)
    back, tdb = transport_pqkt(Sbar, there, tdt, reciprocal_factor(f, p, conn.jet.order + 1), p)
    V = FrameView(G.frame, [j.value for j in G.J])
    drift = max(_max(V.vec2(back.gamma - conn.gamma)), _max(V.cov(tdb.T3 - td.T3)))
    if back.jet.order >= 1:
        drift = max(drift, _max(back.jet.data[1] - conn.jet.data[1]))
    return drift
