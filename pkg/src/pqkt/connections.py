"""Every connection of the theory and the 1-form systems attached to them.

Levi-Civita, the torsion-free ``nabla^0``, the complex-product connection
``nabla^CP`` preserving ``H``, the canonical ``nabla^P`` preserving the
bundle ``P``, and the unique PQKT connection.  Coefficients are stored as
``Gamma[x, y, a] = (nabla_{e_x} e_y)^a`` in chart coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (NoPQKTStructureError, NotParaquaternionicError, ShapeError,
                     UnsupportedDimensionError)
from .frameview import FrameView
from .geometry import cov_deriv, local_geometry, nijenhuis_components, torsion_of
from .jet import Jet, jeinsum
from .tensor import CYCLIC, EPS, alternation, check_3form_type, vv_apply, vv_slot, wedge12

PRESERVE_TOL = 1e-8
EXISTENCE_TOL = 1e-8


def _max(x):
    return float(np.max(np.abs(x), initial=0.0))


def _jf(J, v):
    """``(J v)(X) = -v(J X)`` for a 1-form value."""
    return -np.asarray(v) @ J


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConnectionJet:
    """Connection coefficients with their derivatives at a point.

    ``jet`` holds ``Gamma[x, y, a]`` and, at order >= 1, its first
    derivatives ``dgamma[x, y, a, l] = d_l Gamma^a_{xy}``.  ``omega`` are the
    ``sp(1)`` 1-forms (as jets) when the connection preserves ``P``.
    """

    jet: Jet
    omega: tuple | None = None
    name: str = ""

    @property
    def gamma(self):
        return self.jet.value

    @property
    def dgamma(self):
        if self.jet.order < 1:
            return None
        return self.jet.deriv().value

    @property
    def dim(self):
        return self.jet.dim

    def torsion(self):
        """``T(X, Y)^a`` as ``[x, y, a]``."""
        return self.gamma - self.gamma.transpose(1, 0, 2)


@dataclass(frozen=True, eq=False)
class TorsionData:
    """Torsion of a connection: vector-valued ``T_vec``, lowered ``T3`` and its 1-forms."""

    T_vec: np.ndarray
    T3: np.ndarray
    t_alpha: tuple | None = None
    t: np.ndarray | None = None

    def is_skew(self, tol=1e-9):
        T = self.T3
        scale = max(1.0, _max(T))
        return (_max(T + T.transpose(1, 0, 2)) <= tol * scale
                and _max(T + T.transpose(0, 2, 1)) <= tol * scale)


def _as_connection(gamma: Jet, name, omega=None):
    return ConnectionJet(gamma, tuple(omega) if omega is not None else None, name)


# ---------------------------------------------------------------------------
# basic connections
# ---------------------------------------------------------------------------


def levi_civita(S, p, order=1, geom=None) -> ConnectionJet:
    """Levi-Civita coefficients (jet of the requested order, at most 2)."""
    if order > 2:
        raise ShapeError("Levi-Civita jets are available up to order 2")
    G = local_geometry(S, p, order + 1, geom)
    return _as_connection(G.gamma_lc.truncate(order), "levi-civita")


def metricity_residual(conn: ConnectionJet, g: Jet):
    """``max |(nabla g)|`` at the point."""
    gam = conn.jet.truncate(0)
    return _max(cov_deriv(g.truncate(1), gam, "dd").value)


def complex_product_connection(S, p, geom=None):
    """``nabla^CP`` and its torsion ``T^H`` (bracket expression)."""
    G = local_geometry(S, p, 2, geom)
    conn = _as_connection(G.gamma_cp, "complex-product")
    TH = G.TH.value
    return conn, TorsionData(TH, np.einsum("xya,az->xyz", TH, G.g.value))


def nabla0(S, p, geom=None) -> ConnectionJet:
    """The torsion-free connection with ``nabla^CP = nabla^0 + 1/2 T^H``."""
    G = local_geometry(S, p, 2, geom)
    return _as_connection(G.gamma_0, "nabla0")


def nabla_J_values(conn: ConnectionJet, J: list):
    """``(nabla_d J_a)`` as ``[d, i, j]`` at the point, for each ``a``."""
    gam = conn.jet.truncate(0)
    return [cov_deriv(Ja.truncate(1), gam, "ud").value for Ja in J]


def extract_omega(nJ, J, n):
    """Least-squares ``omega`` with ``nabla J_a = omega_b J_c + eps_c omega_c J_b``.

    Returns ``(omega, residual)``; the residual measures how far ``nabla``
    is from preserving the paraquaternionic bundle.
    """
    m = J[0].shape[0]
    # unknowns: omega_0..omega_2 (each m); equations: all components of nabla J_a
    A = np.zeros((3, m, m, m, 3, m))
    rhs = np.stack(nJ)
    eye = np.eye(m)
    for a, b, c in CYCLIC:
        A[a, :, :, :, b, :] += np.einsum("dk,ij->dijk", eye, J[c])
        A[a, :, :, :, c, :] += EPS[c] * np.einsum("dk,ij->dijk", eye, J[b])
    M = A.reshape(3 * m ** 3, 3 * m)
    sol, *_ = np.linalg.lstsq(M, rhs.ravel(), rcond=None)
    res = _max(M @ sol - rhs.ravel())
    return [sol[k * m:(k + 1) * m] for k in range(3)], res


def preservation_residual(conn: ConnectionJet, J, n):
    return extract_omega(nabla_J_values(conn, J), [j.value for j in J], n)[1]


# ---------------------------------------------------------------------------
# the canonical P-connection
# ---------------------------------------------------------------------------


def _b_forms(T: Jet, J, n):
    """``b_a(X) = tr(J_a T(X, .)) / (2n - 1)`` for a vector-valued torsion jet."""
    return [jeinsum("ca,xca->x", J[a].truncate(T.order), T) * (1.0 / (2 * n - 1))
            for a in range(3)]


def _vv_slot_j(P: Jet, J: Jet, slot):
    return jeinsum("bx,bya->xya", J, P) if slot == 0 else jeinsum("by,xba->xya", J, P)


def _vv_apply_j(J: Jet, P: Jet):
    return jeinsum("ab,xyb->xya", J, P)


def _one_form_endo(form: Jet, J: Jet):
    """``form(X) J Y`` as ``[x, y, a]``."""
    return jeinsum("x,ay->xya", form, J)


def canonical_p_connection(conn: ConnectionJet, S, p, geom=None, tol=PRESERVE_TOL):
    """``nabla^P`` built from a connection preserving ``P``.

    ``nabla^P = nabla + sum_a (eps_a b_a - 1/3 eps_a (b o J_a)) (x) J_a
    - 1/12 sum_a (T - eps_a T(J_a, J_a) + eps_a J_a T(., J_a) + eps_a J_a T(J_a, .))``
    with ``b = sum_a eps_a b_a o J_a``.  Returns the connection, its torsion
    and the structure 1-forms ``a^H_a`` of ``H``.
    """
    G = local_geometry(S, p, 2, geom)
    n = S.n
    res = preservation_residual(conn, G.J, n)
    if res > tol * max(1.0, _max(conn.gamma)):
        raise NotParaquaternionicError(f"input connection does not preserve P (residual {res:.3e})")
    gam = conn.jet
    k = gam.order
    J = [j.truncate(k) for j in G.J]
    T = gam - gam.transpose(1, 0, 2)
    b_a = _b_forms(T, J, n)
    b = sum((jeinsum("y,yx->x", b_a[a], J[a]) * EPS[a] for a in range(1, 3)),
            jeinsum("y,yx->x", b_a[0], J[0]) * EPS[0])
    out = gam
    for a in range(3):
        coef = b_a[a] * EPS[a] - jeinsum("y,yx->x", b, J[a]) * (EPS[a] / 3.0)
        out = out + _one_form_endo(coef, J[a])
        twist = (T - _vv_slot_j(_vv_slot_j(T, J[a], 0), J[a], 1) * EPS[a]
                 + _vv_apply_j(J[a], _vv_slot_j(T, J[a], 1)) * EPS[a]
                 + _vv_apply_j(J[a], _vv_slot_j(T, J[a], 0)) * EPS[a])
        out = out - twist * (1.0 / 12.0)
    connP = _as_connection(out, "canonical-P")
    TP = connP.torsion()
    aH = structure_forms(G.TH.value, [j.value for j in G.J], n)
    return connP, TorsionData(TP, np.einsum("xya,az->xyz", TP, G.g.value)), aH


def structure_forms(TH, J, n):
    """``a^H_a(X) = tr(J_a T^H(X, .)) / (2n - 1)``."""
    return [np.einsum("ca,xca->x", J[a], TH) / (2 * n - 1) for a in range(3)]


def alternation_CH(aH, J):
    """``d(C^H)`` with ``C^H = sum_a eps_a a^H_a (x) J_a``."""
    return sum(EPS[a] * alternation(aH[a], J[a]) for a in range(3))


def integrability_residual(S, p, geom=None):
    """``|T^P|`` (frame components) for ``nabla^P`` built from ``nabla^CP``."""
    G = local_geometry(S, p, 2, geom)
    cp, _ = complex_product_connection(S, p, G)
    _, TP, _ = canonical_p_connection(cp, S, p, G)
    V = FrameView(G.frame, [j.value for j in G.J])
    return _max(V.vec2(TP.T_vec))


# ---------------------------------------------------------------------------
# the PQKT connection
# ---------------------------------------------------------------------------


def existence_residuals(G, V=None):
    """Per-triple residual of the PQKT existence condition (frame components)."""
    V = V or FrameView(G.frame, [j.value for j in G.J])
    J = [j.value for j in G.J]
    F = [f.value for f in G.F]
    K = [k.value for k in G.K]
    dap = [x.value for x in G.dalphaF_plus]
    out = []
    for a, b, c in CYCLIC:
        rhs = 0.5 * (EPS[c] * wedge12(K[a], F[b]) - EPS[b] * wedge12(_jf(J[b], K[b]), F[a])
                     - EPS[a] * wedge12(K[b] - _jf(J[a], K[a]), F[c]))
        out.append(_max(V.cov(dap[a] - dap[b] - rhs)))
    return out


def pqkt_existence_residual(S, p, geom=None):
    if S.n < 2:
        raise UnsupportedDimensionError("the PQKT existence condition needs n >= 2")
    G = local_geometry(S, p, 2, geom)
    return max(existence_residuals(G))


def pqkt_connection(S, p, geom=None, tol=EXISTENCE_TOL):
    """The unique metric ``P``-connection with (1,2)+(2,1) skew torsion.

    ``nabla = nabla^g + 1/2 T`` with ``T = (d_a F_a)^+ - 1/2 (eps_a J_a K_a ^ F_c
    + eps_c K_a ^ F_b)``.  Raises if the existence condition fails at ``p``.
    """
    if S.n < 2:
        raise UnsupportedDimensionError("the PQKT connection formula is singular for n = 1")
    G = local_geometry(S, p, 2, geom)
    res = max(existence_residuals(G))
    if res > tol:
        raise NoPQKTStructureError(f"existence condition fails at p (residual {res:.3e})")
    conn = _as_connection(G.gamma_pqkt, "pqkt", G.omega_pqkt)
    return conn, torsion_forms(G.T.value, S, p, G)


def torsion_forms(T3, S, p, geom=None):
    """``t_a(X) = eps_a/2 sum eps_i T(X, e_i, J_a e_i)`` and ``t = J_a t_a``."""
    G = local_geometry(S, p, 1, geom)
    T3 = np.asarray(T3, dtype=float)
    J = [j.value for j in G.J]
    ginv = G.ginv.value
    ta = tuple(0.5 * EPS[a] * np.einsum("xcd,df,cf->x", T3, J[a], ginv) for a in range(3))
    tr = np.einsum("ucd,df,cf->u", T3, J[0], ginv)
    t = -0.5 * EPS[0] * (tr @ J[0])
    Tv = np.einsum("xyz,za->xya", T3, ginv)
    return TorsionData(Tv, T3, ta, t)


def prop_j_t_residual(td: TorsionData, J, frame=None):
    """``max(|J1 t1 - J2 t2|, |J2 t2 - J3 t3|)``, in frame components if given."""
    Jt = [_jf(J[a], td.t_alpha[a]) for a in range(3)]
    if frame is not None:
        Jt = [frame.covariant(x) for x in Jt]
    return max(_max(Jt[0] - Jt[1]), _max(Jt[1] - Jt[2]))


# ---------------------------------------------------------------------------
# independent linear-algebra oracle
# ---------------------------------------------------------------------------


def skew3_basis(m):
    """Basis of totally skew 3-tensors, one per index triple ``i < j < k``."""
    trip = list(itertools.combinations(range(m), 3))
    basis = np.zeros((len(trip), m, m, m))
    for r, (i, j, k) in enumerate(trip):
        for perm, sg in (((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
                         ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1)):
            basis[(r,) + perm] = sg
    return basis


@dataclass
class LinearSolveResult:
    T3: np.ndarray
    omega: list
    nullity: int
    residual: float
    singular_values: np.ndarray = field(repr=False, default=None)


def pqkt_linear_solve(S, p, geom=None):
    """Solve for ``(T, omega)`` pointwise by linear algebra.

    Unknowns are a totally skew 3-form ``T`` (so ``nabla = nabla^g + 1/2 T`` is
    metric with skew torsion) and three 1-forms ``omega``.  Equations: every
    component of ``nabla J_a - omega_b J_c - eps_c omega_c J_b`` and of the
    (1,2)+(2,1) type condition on ``T`` for each ``J_a``.  The nullity of the
    system is the dimension of the solution space of the homogeneous part.
    """
    G = local_geometry(S, p, 1, geom)
    m = S.dim
    J = [G.J[a].value for a in range(3)]
    gi = G.ginv.value
    dJ = [G.J[a].deriv().value.transpose(2, 0, 1) for a in range(3)]  # [d, i, j]
    GL = G.gamma_lc.value
    basis = skew3_basis(m)

    def nj_lin(Gam, a):
        return np.einsum("dza,zb->dab", Gam, J[a]) - np.einsum("dbz,az->dab", Gam, J[a])

    def type_res(T, a):
        Ja = J[a]
        return (np.einsum("...uvz,ux,vy->...xyz", T, Ja, Ja) + np.einsum("...uyw,ux,wz->...xyz", T, Ja, Ja)
                + np.einsum("...xvw,vy,wz->...xyz", T, Ja, Ja) + EPS[a] * T)

    Gam = 0.5 * np.einsum("rxyk,ka->rxya", basis, gi)
    cols_T = np.concatenate(
        [np.stack([nj_lin(Gam_r, a).ravel() for Gam_r in Gam]) for a in range(3)]
        + [type_res(basis, a).reshape(len(basis), -1) for a in range(3)], axis=1)
    cols_w = []
    for b in range(3):
        for d in range(m):
            w = np.zeros(m)
            w[d] = 1.0
            blocks = []
            for a, bb, c in CYCLIC:
                blk = np.zeros((m, m, m))
                if bb == b:
                    blk -= np.einsum("d,ij->dij", w, J[c])
                if c == b:
                    blk -= EPS[c] * np.einsum("d,ij->dij", w, J[bb])
                blocks.append(blk.ravel())
            cols_w.append(np.concatenate(blocks + [np.zeros(3 * m ** 3)]))
    A = np.concatenate([cols_T, np.stack(cols_w)]).T
    rhs = np.concatenate([(dJ[a] + nj_lin(GL, a)).ravel() for a in range(3)] + [np.zeros(3 * m ** 3)])
    sol, *_ = np.linalg.lstsq(A, -rhs, rcond=None)
    sv = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    T3 = np.einsum("r,rxyz->xyz", sol[:len(basis)], basis)
    omega = list(sol[len(basis):].reshape(3, m))
    return LinearSolveResult(T3, omega, A.shape[1] - rank, _max(A @ sol + rhs), sv)


# ---------------------------------------------------------------------------
# 1-form system
# ---------------------------------------------------------------------------


@dataclass
class OneFormSystem:
    omega: list
    A: list
    C: list
    K: list | None
    theta: list
    theta_cross: list
    residuals: dict


def one_form_system(S, conn: ConnectionJet, p, geom=None, tol=PRESERVE_TOL):
    """``omega`` extracted from ``nabla J``, with ``A``, ``C``, ``K`` and Lee data.

    ``residuals`` holds the decomposition residual and, for ``n >= 2``, the
    agreement of the extracted ``omega`` with the closed form built from the
    Lee forms.
    """
    G = local_geometry(S, p, 2, geom)
    n = S.n
    Jv = [j.value for j in G.J]
    om, res = extract_omega(nabla_J_values(conn, G.J), Jv, n)
    if res > tol * max(1.0, _max(conn.gamma)):
        raise NotParaquaternionicError(f"nabla J is not in span(J_b, J_c) (residual {res:.3e})")
    A = [None] * 3
    C = [None] * 3
    for a, b, c in CYCLIC:
        A[a] = om[b] - EPS[a] * _jf(Jv[a], om[c])
        C[a] = om[b] + EPS[a] * _jf(Jv[a], om[c])
    th = [x.value for x in G.theta]
    tc = [[G.theta_cross[a][b].value for b in range(3)] for a in range(3)]
    residuals = {"eq.1": res}
    K = None
    if n >= 2:
        K = [k.value for k in G.K]
        residuals["eq.c7"] = max(_max(om[b] - omega_closed_form(th, tc, Jv, n, a)) for a, b, c in CYCLIC)
    return OneFormSystem(om, A, C, K, th, tc, residuals)


def omega_closed_form(th, tc, J, n, a):
    """``omega_b = eps_a/2 J_b(theta_c - theta_b + theta_a/(1-n)) + eps_b theta_{a,c}/(2(1-n))``."""
    _, b, c = CYCLIC[a]
    return (0.5 * EPS[a] * _jf(J[b], th[c] - th[b] + th[a] / (1 - n))
            + EPS[b] * tc[a][c] / (2 * (1 - n)))


# ---------------------------------------------------------------------------
# residual suites
# ---------------------------------------------------------------------------


def perturbed_p_connection(base: ConnectionJet, J, seed=0):
    """``base + sum_a phi_a (x) J_a`` with seeded random ``phi`` (value only).

    Adding ``sp(1)``-valued terms keeps a ``P``-preserving connection
    ``P``-preserving and changes its torsion.
    """
    m = base.dim
    rng = np.random.default_rng(seed)
    phi = rng.normal(size=(3, m))
    gam = base.gamma + sum(np.einsum("x,ay->xya", phi[a], J[a]) for a in range(3))
    return ConnectionJet(Jet([gam], m), None, "perturbed")


def _omega_combo(w, J, a):
    """``2 eps_b w_a + eps_b w_c o J_b - eps_a w_b o J_c``."""
    _, b, c = CYCLIC[a]
    return 2 * EPS[b] * w[a] + EPS[b] * (w[c] @ J[b]) - EPS[a] * (w[b] @ J[c])


def _torsion_twist_sum(T, J):
    """``sum_a (T + eps_a T(J_a X, J_a Y) - eps_a J_a T(J_a X, Y) - eps_a J_a T(X, J_a Y))``."""
    out = np.zeros_like(T)
    for a in range(3):
        out += (T + EPS[a] * vv_slot(vv_slot(T, J[a], 0), J[a], 1)
                - EPS[a] * vv_apply(J[a], vv_slot(T, J[a], 0))
                - EPS[a] * vv_apply(J[a], vv_slot(T, J[a], 1)))
    return out


def hypercomplex_identities(G, V):
    """Residuals for ``nabla^CP``, ``nabla^0`` and ``nabla^P`` at one point."""
    S, p = G.S, G.p
    n = S.n
    J = [j.value for j in G.J]
    TH = G.TH.value
    out = {}
    cp, _ = complex_product_connection(S, p, G)
    out["eq.tt1.2"] = _max(V.vec2(torsion_of(G.gamma_cp).value - TH))
    out["prop.2.1"] = max(_max(V.mixed(x, "dud")) for x in nabla_J_values(cp, G.J))
    n0 = nabla0(S, p, G)
    out["rem.nabla0.torsion-free"] = _max(V.vec2(n0.torsion()))
    worst = 0.0
    for a, nj in enumerate(nabla_J_values(n0, G.J)):
        comm = np.einsum("xcb,cy->xyb", TH, J[a]) - np.einsum("bc,xyc->xyb", J[a], TH)
        worst = max(worst, _max(V.vec2(nj.transpose(0, 2, 1) + 0.5 * comm)))
    out["rem.nabla0.J"] = worst
    out["rem.nabla0.split"] = _max(V.vec2(G.gamma_cp.value - G.gamma_0.value - 0.5 * TH))

    connP, TP, aH = canonical_p_connection(cp, S, p, G)
    CH = alternation_CH(aH, J)
    out["prop.2.4"] = preservation_residual(connP, G.J, n)
    out["eq.tt1.6"] = _max(V.vec2(TP.T_vec - TH - CH))
    out["eq.tt1.3"] = _max(V.frame.covariant(sum(EPS[a] * (aH[a] @ J[a]) for a in range(3))))
    # the same identities for a torsionful P-connection
    pert = perturbed_p_connection(cp, J, seed=11)
    w, _ = extract_omega(nabla_J_values(pert, G.J), J, n)
    T = pert.torsion()
    s = sum(alternation(_omega_combo(w, J, a), J[a]) for a in range(3))
    out["eq.tt1.7"] = _max(V.vec2(6 * TH + s - _torsion_twist_sum(T, J)))
    b = structure_forms(T, J, n)
    worst = 0.0
    for a, bb, c in CYCLIC:
        rhs = -_omega_combo(w, J, a) + (2 * EPS[a] * b[a] + b[bb] @ J[c] - b[c] @ J[bb])
        worst = max(worst, _max(V.frame.covariant(3 * EPS[a] * aH[a] - rhs)))
    out["eq.tt1.9"] = worst
    bsum = sum(EPS[a] * (b[a] @ J[a]) for a in range(3))
    six_tp = _torsion_twist_sum(T, J) + 6 * sum(
        alternation(EPS[a] * (b[a] - (bsum @ J[a]) / 3.0), J[a]) for a in range(3))
    _, TPp, _ = canonical_p_connection(pert, S, p, G)
    out["eq.tt1.8"] = _max(V.vec2(6 * TPp.T_vec - six_tp))
    return out


def p_connection_input_dependence(G, V=None, seed=11):
    """How ``nabla^P`` reacts to replacing ``nabla^CP`` by another P-connection.

    Returns the preservation residual of the output and ``|T^P - T^H - d(C^H)|``
    for the inputs ``nabla^CP + sum phi_a (x) J_a`` and ``nabla^CP + psi (x) Id``.
    Both inputs preserve ``P``; the construction reproduces the canonical
    connection only for ``nabla^CP`` itself.
    """
    S, p = G.S, G.p
    V = V or FrameView(G.frame, [j.value for j in G.J])
    J = [j.value for j in G.J]
    m = S.dim
    cp, _ = complex_product_connection(S, p, G)
    TH = G.TH.value
    CH = alternation_CH(structure_forms(TH, J, S.n), J)
    psi = np.random.default_rng(seed).normal(size=m)
    inputs = {
        "sp1": perturbed_p_connection(cp, J, seed=seed),
        "identity": ConnectionJet(Jet([cp.gamma + np.einsum("x,ay->xya", psi, np.eye(m))], m),
                                  None, "identity-shift"),
    }
    out = {}
    for name, conn in inputs.items():
        connP, TP, _ = canonical_p_connection(conn, S, p, G)
        out[name] = {"preserves": preservation_residual(connP, G.J, S.n),
                     "torsion": _max(V.vec2(TP.T_vec - TH - CH))}
    return out


def torsion_free_p_identities(G, V, tol=1e-9):
    """Checks needing a torsion-free ``P``-connection; ``None`` when ``T^P != 0``."""
    S, p = G.S, G.p
    J = [j.value for j in G.J]
    cp, _ = complex_product_connection(S, p, G)
    connP, TP, aH = canonical_p_connection(cp, S, p, G)
    if _max(V.vec2(TP.T_vec)) > tol:
        return None
    w, _ = extract_omega(nabla_J_values(connP, G.J), J, S.n)
    s = sum(alternation(_omega_combo(w, J, a), J[a]) for a in range(3))
    out = {"eq.tt1.10": _max(V.vec2(6 * G.TH.value + s))}
    # the alternative torsion-free connection nabla^CP + sum eps_a a^H_a (x) J_a
    alt = cp.gamma + sum(EPS[a] * np.einsum("x,ay->xya", aH[a], J[a]) for a in range(3))
    out["thm.2.5.torsion-free"] = _max(V.vec2(alt - alt.transpose(1, 0, 2)))
    return out


def pqkt_identities(G, V):
    """Residuals of the PQKT connection and its 1-form system at one point."""
    S, p = G.S, G.p
    n = S.n
    J = [j.value for j in G.J]
    F = [f.value for f in G.F]
    out = {}
    conn, td = pqkt_connection(S, p, G, tol=np.inf)
    out["thm.3.2.metric"] = metricity_residual(conn, G.g)
    T3 = td.T3
    out["thm.3.2.skew"] = _max(V.cov(T3 + T3.transpose(1, 0, 2))) + _max(V.cov(T3 + T3.transpose(0, 2, 1)))
    out["thm.3.2.type"] = max(check_3form_type(T3, J[a], EPS[a], frame=V.frame) for a in range(3))
    nJ = nabla_J_values(conn, G.J)
    om, res = extract_omega(nJ, J, n)
    out["eq.1"] = res
    out["eq.5"] = max(_max(V.cov(G.pqkt_torsion_from(a).value - T3)) for a in range(3))
    out["prop.3.1"] = prop_j_t_residual(td, J, V.frame)
    Tv = td.T_vec
    worst = 0.0
    for a in range(3):
        Ja = J[a]
        T02 = 0.25 * (Tv + EPS[a] * np.einsum("ux,vy,uvk->xyk", Ja, Ja, Tv)
                      - EPS[a] * np.einsum("ak,ux,uyk->xya", Ja, Ja, Tv)
                      - EPS[a] * np.einsum("ak,vy,xvk->xya", Ja, Ja, Tv))
        worst = max(worst, _max(V.vec2(T02)))
    out["eq.tr1"] = worst

    sysf = one_form_system(S, conn, p, G, tol=np.inf)
    th, tc, K, A, C = sysf.theta, sysf.theta_cross, sysf.K, sysf.A, sysf.C
    ta = td.t_alpha
    cov1 = V.frame.covariant
    r = {k: 0.0 for k in ("eq.c2", "eq.c4", "eq.c5", "eq.c6", "eq.c7", "cor.3.3",
                          "eq.per1", "eq.per2", "eq.6", "eq.9", "eq.2", "eq.i2", "eq.7")}
    dFp = [G.dF_split[a][0].value for a in range(3)]
    ngJ = [x.value for x in G.nabla_J(G.gamma_lc)]
    g = G.g.value
    for a, b, c in CYCLIC:
        jf = lambda q, v: _jf(J[q], v)  # noqa: E731
        upd = lambda key, val: r.__setitem__(key, max(r[key], _max(val)))  # noqa: E731
        upd("eq.c2", cov1(K[a] - C[a]))
        Jt = jf(a, ta[a])
        upd("eq.c4", cov1(Jt + th[a] + EPS[c] * jf(b, C[a])))
        upd("eq.c4", cov1(Jt - EPS[b] * jf(c, tc[b][a]) + n * EPS[a] * jf(c, C[b])))
        upd("eq.c4", cov1(Jt + EPS[c] * jf(b, tc[c][a]) + n * EPS[b] * jf(a, C[c])))
        upd("eq.c5", cov1(EPS[a] * A[a] + jf(a, C[b]) - EPS[a] * jf(c, C[c])))
        upd("eq.c5", cov1(EPS[a] * A[a] - jf(b, th[c] - th[b])))
        upd("eq.c6", cov1((n - 1) * EPS[c] * jf(b, C[a]) - (th[a] + EPS[a] * jf(b, tc[a][c]))))
        upd("eq.c7", cov1(om[b] - omega_closed_form(th, tc, J, n, a)))
        upd("cor.3.3", cov1(jf(b, tc[a][c]) + jf(c, tc[a][b])))
        per1 = ((n * n + n) * th[a] - n * th[b] - n * n * th[c] - EPS[b] * jf(c, tc[b][a])
                - n * EPS[c] * jf(a, tc[c][b]) + (n + 1) * EPS[a] * jf(b, tc[a][c]))
        upd("eq.per1", cov1(per1))
        per2 = ((n ** 3 - 1) * EPS[c] * jf(b, C[a])
                - ((th[a] + EPS[b] * jf(c, tc[b][a])) + n * (th[b] + EPS[c] * jf(a, tc[c][b]))
                   + n * n * (th[c] + EPS[a] * jf(b, tc[a][c]))))
        upd("eq.per2", cov1(per2))
        # Nijenhuis tensor from the 1-forms, with A o J_a in the J_c terms
        N = nijenhuis_components(G.J[a].truncate(1), EPS[a]).value
        AJ = A[a] @ J[a]
        N6 = (-EPS[b] * (-np.einsum("y,ix->xyi", A[a], J[b]) + np.einsum("x,iy->xyi", A[a], J[b]))
              - np.einsum("y,ix->xyi", AJ, J[c]) + np.einsum("x,iy->xyi", AJ, J[c]))
        upd("eq.6", V.vec2(N - N6))
        # Nijenhuis tensor through nabla and the (0,2) part of T
        Ja = J[a]
        T02 = 0.25 * (Tv + EPS[a] * np.einsum("ux,vy,uvk->xyk", Ja, Ja, Tv)
                      - EPS[a] * np.einsum("ak,ux,uyk->xya", Ja, Ja, Tv)
                      - EPS[a] * np.einsum("ak,vy,xvk->xya", Ja, Ja, Tv))
        nj = nJ[a]
        t1 = np.einsum("dx,diy->xyi", Ja, nj)
        t2 = np.einsum("dy,dix->xyi", Ja, nj)
        t3 = np.einsum("yiz,zx->xyi", nj, Ja)
        t4 = np.einsum("xiz,zy->xyi", nj, Ja)
        upd("eq.2", V.vec2(N - (-4 * EPS[a] * T02 + t1 - t2 - t3 + t4)))
        # (2,0) and (0,2) parts of nabla^g J
        lhs = np.einsum("xiy,iz->xyz", ngJ[a], g)
        e10 = -0.5 * (EPS[a] * np.einsum("xuv,uy,vz->xyz", dFp[a], Ja, Ja) + dFp[a])
        q = np.einsum("xyi,ij,jz->xyz", N, g, Ja)
        e9 = 0.25 * EPS[a] * (q - q.transpose(0, 2, 1) - np.einsum("yzx->xyz", q))
        upd("eq.9", V.cov(lhs - e10 - e9))
        # T against J in the last two slots
        TJ = np.einsum("xuz,uy->xyz", T3, Ja) + np.einsum("xyu,uz->xyz", T3, Ja)
        rhs = ((EPS[a] * np.einsum("xuv,uy,vz->xyz", dFp[a], Ja, Ja) + dFp[a])
               - np.einsum("x,yz->xyz", C[a], F[c]) + EPS[c] * np.einsum("x,yz->xyz", C[a] @ Ja, F[b]))
        upd("eq.i2", V.cov(TJ - rhs))
        rhs7 = (-lhs - np.einsum("x,yz->xyz", om[b], F[c]) - EPS[c] * np.einsum("x,yz->xyz", om[c], F[b]))
        upd("eq.7", V.cov(0.5 * TJ - rhs7))
    out.update(r)
    return out
