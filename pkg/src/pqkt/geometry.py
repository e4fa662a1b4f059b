"""Jet-level construction of every field the identity checks consume.

``LocalGeometry(S, p, order)`` evaluates the structure's jets at ``p`` and
lazily derives connection coefficients, torsions, Lee forms, curvature and so
on.  Everything here is in chart coordinates; the identity modules convert to
adapted-frame components before forming residuals.

Jet bookkeeping: a field computed from ``k`` derivatives of ``(g, J)`` is a
jet of order ``order - k``.  Curvature needs ``order >= 2``.
"""

from __future__ import annotations

import string
from functools import cached_property

import numpy as np

from .errors import ShapeError, UnsupportedDimensionError
from .jet import Jet, invert_jet, jeinsum, reciprocal_jet
from .tensor import CYCLIC, EPS, adapted_frame

_L = string.ascii_lowercase


# ---------------------------------------------------------------------------
# generic jet operators
# ---------------------------------------------------------------------------


def d_first(X: Jet) -> Jet:
    """Partial derivative with the derivative index moved to the front."""
    D = X.deriv()
    r = X.rank
    return D.transpose(r, *range(r))


def cov_deriv(X: Jet, gamma: Jet, variance: str) -> Jet:
    """``(nabla_d X)`` with the derivative index first.

    ``gamma[x, y, a] = (nabla_{e_x} e_y)^a``; ``variance`` has one 'd'
    (covariant) or 'u' (contravariant) letter per slot of ``X``.
    """
    if len(variance) != X.rank:
        raise ShapeError("variance does not match tensor rank")
    r = X.rank
    out = d_first(X)
    idx = _L[:r]
    for s, v in enumerate(variance):
        inner = idx[:s] + "z" + idx[s + 1:]
        if v == "d":
            out = out - jeinsum(f"y{idx[s]}z,{inner}->y{idx}", gamma, X)
        else:
            out = out + jeinsum(f"yz{idx[s]},{inner}->y{idx}", gamma, X)
    return out


def ext_d(X: Jet) -> Jet:
    """Unnormalized exterior derivative of a k-form jet."""
    D = X.deriv()
    k = X.rank
    out = None
    for i in range(k + 1):
        axes = list(range(i)) + [k] + list(range(i, k))
        term = D.transpose(*axes)
        term = term if i % 2 == 0 else -term
        out = term if out is None else out + term
    return out


def codiff(X: Jet, gamma_lc: Jet, ginv: Jet) -> Jet:
    """``(delta X)(...) = -sum_i eps_i (nabla^g_{e_i} X)(e_i, ...)``."""
    r = X.rank
    nab = cov_deriv(X, gamma_lc, "d" * r)
    rest = _L[2:r + 1]
    return -jeinsum(f"ab{rest},ab->{rest}", nab, ginv.truncate(nab.order))


def jform_jet(J: Jet, X: Jet) -> Jet:
    """``(J X)(X_1..X_r) = (-1)^r X(J X_1, ..., J X_r)``."""
    r = X.rank
    if r == 0:
        return X
    src = _L[:r]
    dst = _L[r:2 * r]
    spec = src + "," + ",".join(f"{src[i]}{dst[i]}" for i in range(r)) + "->" + dst
    out = jeinsum(spec, X, *([J] * r))
    return out if r % 2 == 0 else -out


def compose_jet(a: Jet, J: Jet) -> Jet:
    """``a o J`` for a 1-form."""
    return jeinsum("y,yx->x", a, J)


def wedge12_jet(a: Jet, F: Jet) -> Jet:
    return (jeinsum("x,yz->xyz", a, F) + jeinsum("y,zx->xyz", a, F)
            + jeinsum("z,xy->xyz", a, F))


def wedge11_jet(a: Jet, b: Jet) -> Jet:
    return jeinsum("x,y->xy", a, b) - jeinsum("y,x->xy", a, b)


def lie_bracket_coord(A: Jet | None, B: Jet | None, dim: int, order: int) -> Jet:
    """``[A d_x, B d_y]^a`` stored as ``[x, y, a]``; ``None`` means identity.

    ``[A X, B Y]^a = (A X)^d d_d (B Y)^a - (B Y)^d d_d (A X)^a`` with
    ``X = d_x`` and ``Y = d_y`` coordinate fields.
    """
    out = Jet.constant(np.zeros((dim, dim, dim)), dim, order)
    if B is not None:
        dB = B.deriv()  # [a, y, d] = d_d B^a_y
        if A is None:
            out = out + dB.transpose(2, 1, 0)
        else:
            out = out + jeinsum("dx,ayd->xya", A, dB)
    if A is not None:
        dA = A.deriv()
        if B is None:
            out = out - dA.transpose(1, 2, 0)
        else:
            out = out - jeinsum("dy,axd->xya", B, dA)
    return out


def apply_endo(J: Jet, P: Jet) -> Jet:
    """``J P(X, Y)`` for a vector-valued 2-form ``P[x, y, a]``."""
    return jeinsum("ab,xyb->xya", J, P)


def nijenhuis_bracket_jet(A, B, dim, order):
    """``[[A, B]](X, Y)`` on coordinate fields via Lie-bracket expansion.

    ``[[A,B]](X,Y) = [AX,BY] - A[BX,Y] - B[X,AY] + [BX,AY] - B[AX,Y]
    - A[X,BY] + (AB+BA)[X,Y]``; the last term vanishes for coordinate fields.
    """
    br = lambda P, Q: lie_bracket_coord(P, Q, dim, order)  # noqa: E731
    out = br(A, B) + br(B, A)
    for E, (P, Q) in ((A, (B, None)), (B, (None, A)), (B, (A, None)), (A, (None, B))):
        term = br(P, Q)
        if E is not None:
            term = apply_endo(E, term)
        out = out - term
    return out


def nijenhuis_components(J: Jet, eps: float) -> Jet:
    """``N_J`` from the closed component formula (second path).

    ``N^a_{bc} = J^d_b d_d J^a_c - J^d_c d_d J^a_b + J^a_e d_c J^e_b
    - J^a_e d_b J^e_c``.
    """
    dJ = J.deriv()  # [a, c, d] = d_d J^a_c
    t1 = jeinsum("db,acd->bca", J, dJ)
    t2 = jeinsum("dc,abd->bca", J, dJ)
    t3 = jeinsum("ae,ebc->bca", J, dJ)
    t4 = jeinsum("ae,ecb->bca", J, dJ)
    return t1 - t2 + t3 - t4


def torsion_of(gamma: Jet) -> Jet:
    return gamma - gamma.transpose(1, 0, 2)


def curvature_vec(gamma: Jet) -> Jet:
    """``R(e_x, e_y) e_z`` stored as ``[x, y, z, f]``."""
    dG = gamma.deriv()  # [a, b, e, x] = d_x Gamma^e_ab
    t1 = dG.transpose(3, 0, 1, 2)  # [x, y, z, f] = d_x Gamma^f_yz
    t2 = dG.transpose(0, 3, 1, 2)  # d_y Gamma^f_xz
    t3 = jeinsum("yze,xef->xyzf", gamma, gamma)
    t4 = jeinsum("xze,yef->xyzf", gamma, gamma)
    return t1 - t2 + t3 - t4


# ---------------------------------------------------------------------------
# the local geometry
# ---------------------------------------------------------------------------


class LocalGeometry:
    """All derived jets of a structure at one point."""

    def __init__(self, S, p, order=2):
        self.S = S
        self.p = np.asarray(p, dtype=float)
        self.order = int(order)
        self.n = S.n
        self.m = S.dim
        self._g, self._J = S.jets(self.p, self.order)

    # base data --------------------------------------------------------

    @property
    def g(self) -> Jet:
        return self._g

    @property
    def J(self) -> list:
        return self._J

    @cached_property
    def ginv(self) -> Jet:
        return invert_jet(self.g)

    @cached_property
    def frame(self):
        return adapted_frame(self.g.value, [j.value for j in self.J])

    @cached_property
    def F(self) -> list:
        return [jeinsum("ac,cb->ab", self.g, J) for J in self.J]

    # Levi-Civita ------------------------------------------------------

    @cached_property
    def gamma_lc(self) -> Jet:
        dg = self.g.deriv()  # [a, b, c] = d_c g_ab
        low = (dg.transpose(2, 0, 1) + dg.transpose(0, 2, 1) - dg) * 0.5
        # low[a, b, c] = 1/2 (d_a g_bc + d_b g_ac - d_c g_ab)
        return jeinsum("abc,ce->abe", low, self.ginv.truncate(dg.order))

    # Kähler and Lee forms ---------------------------------------------

    @cached_property
    def dF(self) -> list:
        return [ext_d(F) for F in self.F]

    @cached_property
    def deltaF(self) -> list:
        return [codiff(F, self.gamma_lc, self.ginv) for F in self.F]

    @cached_property
    def theta(self) -> list:
        return [compose_jet(self.deltaF[a], self.J[a].truncate(self.order - 1)) * (-EPS[a])
                for a in range(3)]

    @cached_property
    def dF_split(self) -> list:
        """``[(dF_plus, dF_minus)]`` per alpha."""
        out = []
        for a in range(3):
            psi = self.dF[a]
            J = self.J[a].truncate(psi.order)
            L = (jeinsum("uvz,ux,vy->xyz", psi, J, J) + jeinsum("uyw,ux,wz->xyz", psi, J, J)
                 + jeinsum("xvw,vy,wz->xyz", psi, J, J))
            minus = (psi + L * EPS[a]) * 0.25
            out.append((psi - minus, minus))
        return out

    @cached_property
    def theta_cross(self):
        """``theta_{alpha,beta}(X) = eps_alpha/2 sum_i eps_i dF+_alpha(X, e_i, J_beta e_i)``."""
        k = self.order - 1
        ginv = self.ginv.truncate(k)
        return [[jeinsum("xcd,df,cf->x", self.dF_split[a][0], self.J[b].truncate(k), ginv)
                 * (0.5 * EPS[a]) for b in range(3)] for a in range(3)]

    @cached_property
    def dalphaF_plus(self) -> list:
        """``(d_alpha F_alpha)^+ = J_alpha dF_alpha^+``."""
        return [jform_jet(self.J[a].truncate(self.order - 1), self.dF_split[a][0]) for a in range(3)]

    def jf(self, a, X):
        return jform_jet(self.J[a].truncate(X.order), X)

    @cached_property
    def K(self) -> list:
        """``K_alpha = (eps_a J_b theta_a + eps_b theta_{a,c}) / (1 - n)``."""
        if self.n < 2:
            raise UnsupportedDimensionError("K_alpha is singular for n = 1")
        out = [None] * 3
        for a, b, c in CYCLIC:
            out[a] = (self.jf(b, self.theta[a]) * EPS[a] + self.theta_cross[a][c] * EPS[b]) / (1 - self.n)
        return out

    # PQKT connection --------------------------------------------------

    def pqkt_torsion_from(self, a) -> Jet:
        """Closed-form torsion 3-form using the cyclic triple starting at ``a``."""
        _, b, c = CYCLIC[a]
        k = self.order - 1
        F = [f.truncate(k) for f in self.F]
        JK = self.jf(a, self.K[a])
        return self.dalphaF_plus[a] - (wedge12_jet(JK, F[c]) * EPS[a]
                                       + wedge12_jet(self.K[a], F[b]) * EPS[c]) * 0.5

    @cached_property
    def T(self) -> Jet:
        return self.pqkt_torsion_from(0)

    @cached_property
    def T_vec(self) -> Jet:
        return jeinsum("xyz,za->xya", self.T, self.ginv.truncate(self.T.order))

    @cached_property
    def gamma_pqkt(self) -> Jet:
        return self.gamma_lc + self.T_vec * 0.5

    @cached_property
    def t_alpha(self) -> list:
        k = self.order - 1
        ginv = self.ginv.truncate(k)
        return [jeinsum("xcd,df,cf->x", self.T, self.J[a].truncate(k), ginv) * (0.5 * EPS[a])
                for a in range(3)]

    @cached_property
    def t(self) -> Jet:
        """``t(X) = -1/2 eps_1 sum_i eps_i T(J_1 X, e_i, J_1 e_i)``."""
        k = self.order - 1
        J = self.J[0].truncate(k)
        tr = jeinsum("ucd,df,cf->u", self.T, J, self.ginv.truncate(k))
        return compose_jet(tr, J) * (-0.5 * EPS[0])

    # derived jets of the PQKT connection -----------------------------

    @cached_property
    def nabla_T(self) -> Jet:
        return cov_deriv(self.T, self.gamma_pqkt, "ddd")

    @cached_property
    def nabla_g_T(self) -> Jet:
        return cov_deriv(self.T, self.gamma_lc, "ddd")

    @cached_property
    def dT(self) -> Jet:
        return ext_d(self.T)

    @cached_property
    def nabla_t(self) -> Jet:
        return cov_deriv(self.t, self.gamma_pqkt, "d")

    @cached_property
    def dt(self) -> Jet:
        return ext_d(self.t)

    @cached_property
    def delta_t(self) -> Jet:
        return codiff(self.t, self.gamma_lc, self.ginv)

    @cached_property
    def delta_T(self) -> Jet:
        return codiff(self.T, self.gamma_lc, self.ginv)

    # connections and their curvature ---------------------------------

    def nabla_J(self, gamma) -> list:
        return [cov_deriv(J.truncate(gamma.order), gamma, "ud") for J in self.J]

    def omega(self, gamma) -> list:
        """``omega_beta = eps_gamma / 4n tr(J_gamma nabla J_alpha)`` (trace extraction)."""
        nJ = self.nabla_J(gamma)
        out = [None] * 3
        for a, b, c in CYCLIC:
            Jc = self.J[c].truncate(nJ[a].order)
            out[b] = jeinsum("ba,dab->d", Jc, nJ[a]) * (EPS[c] / (4 * self.n))
        return out

    @cached_property
    def omega_pqkt(self) -> list:
        return self.omega(self.gamma_pqkt)

    def curvature4(self, gamma) -> Jet:
        """``R(X, Y, Z, V) = g(R(X, Y) Z, V)``."""
        Rv = curvature_vec(gamma)
        return jeinsum("xyzf,fv->xyzv", Rv, self.g.truncate(Rv.order))

    @cached_property
    def R(self) -> Jet:
        return self.curvature4(self.gamma_pqkt)

    @cached_property
    def Rg(self) -> Jet:
        return self.curvature4(self.gamma_lc)

    # hypercomplex connections ----------------------------------------

    def bracket(self, A, B):
        return lie_bracket_coord(A, B, self.m, self.order - 1)

    @cached_property
    def brackets_JJ(self):
        """``[[J_a, J_b]]`` for all pairs (Lie-bracket expansion)."""
        return [[nijenhuis_bracket_jet(self.J[a], self.J[b], self.m, self.order - 1)
                 for b in range(3)] for a in range(3)]

    @cached_property
    def TH(self) -> Jet:
        """``T^H = -1/12 sum_alpha eps_alpha [[J_alpha, J_alpha]]``."""
        return sum((self.brackets_JJ[a][a] * EPS[a] for a in range(1, 3)),
                   self.brackets_JJ[0][0] * EPS[0]) * (-1.0 / 12.0)

    @cached_property
    def cp_parts(self):
        """``(S1, S2, S3)`` bracket sums on coordinate fields (see ``gamma_cp``)."""
        k = self.order - 1
        J = [j.truncate(k) for j in self.J]
        br = self.bracket
        S1 = None
        for a, b, c in CYCLIC:
            term = apply_endo(J[a], br(self.J[b], self.J[c])) - apply_endo(J[a], br(self.J[c], self.J[b]))
            S1 = term if S1 is None else S1 + term
        S2 = None
        S3 = None
        for a in range(3):
            JXY = apply_endo(J[a], br(self.J[a], None))
            XJY = apply_endo(J[a], br(None, self.J[a]))
            t2 = (JXY - XJY) * EPS[a]
            t3 = (br(self.J[a], self.J[a]) - JXY - XJY) * EPS[a]
            S2 = t2 if S2 is None else S2 + t2
            S3 = t3 if S3 is None else S3 + t3
        return S1, S2, S3

    @cached_property
    def gamma_0(self) -> Jet:
        S1, S2, _ = self.cp_parts
        return (S1 - S2 * 2.0) * (1.0 / 12.0)

    @cached_property
    def gamma_cp(self) -> Jet:
        _, _, S3 = self.cp_parts
        return self.gamma_0 - S3 * (1.0 / 12.0)

    # conformal helpers -------------------------------------------------

    def log_factor_differential(self, f_field):
        """Jet of ``d ln f = df / f`` for a polynomial factor."""
        from .poly import eval_jet

        fj = eval_jet(f_field, self.p, self.order)
        return jeinsum(",x->x", reciprocal_jet(fj).truncate(self.order - 1), fj.deriv())


def local_geometry(S, p, order=2, geom=None) -> LocalGeometry:
    """Reuse ``geom`` when it is at least ``order``, otherwise build a fresh one."""
    if geom is not None and geom.order >= order:
        return geom
    return LocalGeometry(S, p, order)
