"""Pointwise tensor algebra for neutral-signature paraquaternionic data.

Storage conventions used throughout the package:

* a covariant k-tensor ``t`` is an array with ``t[a, b, ...] = t(e_a, e_b, ...)``;
* an endomorphism ``J`` is a matrix with ``(J X)^a = J[a, b] X^b``;
* a vector-valued 2-form ``P`` stores ``P(X, Y)^a`` as ``P[x, y, a]``
  (output index last), and likewise for connection coefficients
  ``Gamma[x, y, a] = (nabla_{e_x} e_y)^a``.

Wedge and exterior derivative are unnormalized: for a 1-form ``a`` and a
2-form ``F``, ``(a ^ F)(X, Y, Z) = a(X) F(Y, Z) + a(Y) F(Z, X) + a(Z) F(X, Y)``,
which is the convention in which ``d(f F) = df ^ F + f dF``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrameConstructionError, NonSkewError, SlotMismatchError

#: signs of J_1^2, J_2^2, J_3^2
EPS = (1, 1, -1)
#: cyclic permutations (alpha, beta, gamma) of (0, 1, 2)
CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))

#: |T|^2 = NORM_SCALE * sum eps_i eps_j eps_k T_ijk^2; fixed by
#: ``calibrate_norm_scale`` on the conformal model (see README).
NORM_SCALE = 1.0

GRAM_SCHMIDT_THRESHOLD = 1e-6
GRAM_SCHMIDT_SEED = 20240611
GRAM_SCHMIDT_RETRIES = 200


def cyclic(alpha):
    """The cyclic triple starting at ``alpha``."""
    return CYCLIC[alpha]


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FrameData:
    """Adapted pseudo-orthonormal frame; ``vectors[:, i]`` is ``e_i``."""

    vectors: np.ndarray
    signs: np.ndarray

    @property
    def dim(self):
        return self.vectors.shape[0]

    @property
    def n(self):
        return self.dim // 4

    @property
    def dual(self):
        return np.linalg.inv(self.vectors)

    def gram(self, g):
        return self.vectors.T @ g @ self.vectors

    def covariant(self, t):
        """Components ``t(e_i, e_j, ...)`` of a covariant tensor."""
        out = np.asarray(t, dtype=float)
        for ax in range(out.ndim):
            out = np.moveaxis(np.tensordot(out, self.vectors, axes=([ax], [0])), -1, ax)
        return out

    def transform(self, t, variance):
        """Frame components of a mixed tensor; ``variance`` has 'd'/'u' per slot."""
        out = np.asarray(t, dtype=float)
        if len(variance) != out.ndim:
            raise SlotMismatchError(f"variance {variance!r} does not match rank {out.ndim}")
        dual = self.dual
        for ax, v in enumerate(variance):
            mat = self.vectors if v == "d" else dual.T
            out = np.moveaxis(np.tensordot(out, mat, axes=([ax], [0])), -1, ax)
        return out


def adapted_frame(g, J, *, threshold=GRAM_SCHMIDT_THRESHOLD, seed=GRAM_SCHMIDT_SEED,
                  retries=GRAM_SCHMIDT_RETRIES) -> FrameData:
    """Paraquaternionic Gram-Schmidt.

    Each step picks a candidate ``v`` g-orthogonal to the quadruples chosen so
    far with ``|g(v, v)| > threshold``, normalizes it to ``g(v, v) = +1``
    (switching to ``J_1 v`` when the norm is negative) and adjoins
    ``(v, J_3 v, J_1 v, J_2 v)``.  Candidates are coordinate vectors first,
    then seeded pseudo-random directions.
    """
    g = np.asarray(g, dtype=float)
    m = g.shape[0]
    if m % 4:
        raise FrameConstructionError(f"dimension {m} is not a multiple of 4")
    n = m // 4
    rng = np.random.default_rng(seed)
    chosen = []  # list of (vector, sign)

    def project(v):
        for e, s in chosen:
            v = v - s * (e @ g @ v) * e
        return v

    def candidates():
        for i in range(m):
            yield np.eye(m)[i]
        for _ in range(retries):
            yield rng.standard_normal(m)

    heads = []
    cand = candidates()
    while len(heads) < n:
        for c in cand:
            v = project(c)
            # second pass for numerical orthogonality
            v = project(v)
            q = v @ g @ v
            if abs(q) > threshold:
                break
        else:
            raise FrameConstructionError(
                f"no candidate with |g(v,v)| > {threshold} after {retries} random retries")
        if q < 0:
            v = J[0] @ v
            q = -q
        v = v / np.sqrt(q)
        heads.append(v)
        for vec, s in ((v, 1.0), (J[2] @ v, 1.0), (J[0] @ v, -1.0), (J[1] @ v, -1.0)):
            chosen.append((vec, s))
    cols = ([h for h in heads] + [J[2] @ h for h in heads] + [J[0] @ h for h in heads]
            + [J[1] @ h for h in heads])
    signs = np.array([1.0] * (2 * n) + [-1.0] * (2 * n))
    return FrameData(np.column_stack(cols), signs)


def standard_structure(n):
    """Constant ``(g0, (J1, J2, J3))`` in adapted coordinates, dimension ``4n``.

    Built from the quadruple relations: for a unit vector ``a`` with
    ``b = J3 a``, ``c = J1 a``, ``d = J2 a`` the products of the ``J``'s fix
    every entry (e.g. ``J1 b = J1 J3 a = J2 a = d``).
    """
    m = 4 * n
    J = np.zeros((3, m, m))
    a, b, c, d = (np.arange(n) + k * n for k in range(4))
    # J1: a->c, b->d, c->a, d->b
    for src, dst, s in ((a, c, 1), (b, d, 1), (c, a, 1), (d, b, 1)):
        J[0][dst, src] = s
    # J2: a->d, b->-c, c->-b, d->a
    for src, dst, s in ((a, d, 1), (b, c, -1), (c, b, -1), (d, a, 1)):
        J[1][dst, src] = s
    # J3: a->b, b->-a, c->-d, d->c
    for src, dst, s in ((a, b, 1), (b, a, -1), (c, d, -1), (d, c, 1)):
        J[2][dst, src] = s
    g0 = np.diag([1.0] * (2 * n) + [-1.0] * (2 * n))
    return g0, J


# ---------------------------------------------------------------------------
# traces and contractions
# ---------------------------------------------------------------------------


def contract(t, i, j, *, ginv=None, frame=None, signs=None):
    """Trace of ``t`` over covariant slots ``i`` and ``j``.

    With ``ginv`` this is ``g^{ab} t(..a..b..)``.  With a frame (or with
    ``signs`` for tensors already in frame components) it is the
    epsilon-weighted sum ``sum_k eps_k t(..e_k..e_k..)``.
    """
    t = np.asarray(t, dtype=float)
    r = t.ndim
    if i == j or not (0 <= i < r and 0 <= j < r):
        raise SlotMismatchError(f"cannot contract slots {i}, {j} of a rank-{r} tensor")
    if frame is not None:
        t = frame.covariant(t)
        signs = frame.signs
    if signs is not None:
        w = np.zeros((t.shape[i],) * 2)
        np.fill_diagonal(w, signs)
    elif ginv is not None:
        w = np.asarray(ginv, dtype=float)
    else:
        raise SlotMismatchError("contracting two covariant slots needs a metric or a frame")
    letters = "abcdefghijklmnop"[:r]
    out = "".join(c for k, c in enumerate(letters) if k not in (i, j))
    return np.einsum(f"{letters},{letters[i]}{letters[j]}->{out}", t, w)


def trace_with(t, J, ginv):
    """``X -> sum_i eps_i t(X, e_i, J e_i)`` for a covariant 3-tensor."""
    return np.einsum("xcd,df,cf->x", t, J, ginv)


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------


def wedge11(a, b):
    return np.einsum("x,y->xy", a, b) - np.einsum("y,x->xy", a, b)


def wedge12(a, F):
    """``(a ^ F)(X,Y,Z) = a(X)F(Y,Z) + a(Y)F(Z,X) + a(Z)F(X,Y)``."""
    return (np.einsum("x,yz->xyz", a, F) + np.einsum("y,zx->xyz", a, F)
            + np.einsum("z,xy->xyz", a, F))


def jform(J, psi):
    """``(J psi)(X_1..X_r) = (-1)^r psi(J X_1, ..., J X_r)``."""
    psi = np.asarray(psi, dtype=float)
    out = psi
    for ax in range(psi.ndim):
        out = np.moveaxis(np.tensordot(out, J, axes=([ax], [0])), -1, ax)
    return out * (-1) ** psi.ndim


def compose(a, J):
    """The 1-form ``a o J``."""
    return np.asarray(a) @ J


def alternation(a, J):
    """``d(a (x) J)(X, Y) = a(X) J Y - a(Y) J X`` as a vector-valued 2-form."""
    return np.einsum("x,ay->xya", a, J) - np.einsum("y,ax->xya", a, J)


def is_skew(t, tol=1e-10):
    t = np.asarray(t)
    scale = max(1.0, np.abs(t).max(initial=0.0))
    for i in range(t.ndim - 1):
        perm = list(range(t.ndim))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        if np.abs(t + np.transpose(t, perm)).max(initial=0.0) > tol * scale:
            return False
    return True


def lower(P, g):
    """``P(X,Y,Z) = g(P(X,Y), Z)`` for a vector-valued 2-form."""
    return np.einsum("xya,az->xyz", P, g)


def raise_last(T, ginv):
    return np.einsum("xyz,za->xya", T, ginv)


# ---------------------------------------------------------------------------
# type decompositions
# ---------------------------------------------------------------------------


def project_2form_type(P, J, eps, part):
    """Type component of a 2-form with respect to ``J`` (``J^2 = eps``).

    For vector-valued 2-forms ``P[x, y, a]`` the parts are defined by
    ``P11(JX,JY) = -eps P11(X,Y)``, ``P20(JX,Y) = J P20(X,Y)`` and
    ``P02(JX,Y) = -J P02(X,Y)``.  Scalar 2-forms split only into ``"1,1"``
    and ``"2,0+0,2"``.
    """
    P = np.asarray(P, dtype=float)
    key = part.replace("(", "").replace(")", "").replace(" ", "")
    if P.ndim == 2:
        if not is_skew(P):
            raise NonSkewError("2-form is not skew")
        A = J.T @ P @ J
        if key == "1,1":
            return 0.5 * (P - eps * A)
        if key in ("2,0+0,2", "20+02", "2,0,0,2"):
            return 0.5 * (P + eps * A)
        raise ValueError(f"unknown part {part!r} for a scalar 2-form")
    if P.ndim != 3:
        raise SlotMismatchError("expected a (vector-valued) 2-form")
    scale = max(1.0, np.abs(P).max(initial=0.0))
    if np.abs(P + P.transpose(1, 0, 2)).max(initial=0.0) > 1e-10 * scale:
        raise NonSkewError("vector-valued 2-form is not skew in its form slots")
    A = np.einsum("uva,ux,vy->xya", P, J, J)
    B = np.einsum("ac,uyc,ux->xya", J, P, J)
    C = np.einsum("ac,xvc,vy->xya", J, P, J)
    if key == "1,1":
        return 0.5 * (P - eps * A)
    if key == "2,0":
        return 0.25 * (P + eps * A + eps * B + eps * C)
    if key == "0,2":
        return 0.25 * (P + eps * A - eps * B - eps * C)
    raise ValueError(f"unknown part {part!r}")


def _L3(psi, J):
    return (np.einsum("uvz,ux,vy->xyz", psi, J, J) + np.einsum("uyw,ux,wz->xyz", psi, J, J)
            + np.einsum("xvw,vy,wz->xyz", psi, J, J))


def split_3form(psi, J, eps):
    """``(psi_plus, psi_minus)``: the (1,2)+(2,1) and (3,0)+(0,3) parts."""
    L = _L3(psi, J)
    minus = 0.25 * (psi + eps * L)
    return psi - minus, minus


def type_3form_residual(psi, J, eps):
    """Residual tensor of ``psi(JX,JY,Z)+psi(JX,Y,JZ)+psi(X,JY,JZ)+eps psi(X,Y,Z)``."""
    return _L3(psi, J) + eps * np.asarray(psi)


def check_3form_type(psi, J, eps, frame=None):
    """Max residual of the (1,2)+(2,1) condition, over frame triples if given."""
    psi = np.asarray(psi, dtype=float)
    if not is_skew(psi, tol=1e-8):
        raise NonSkewError("3-form is not totally skew")
    r = type_3form_residual(psi, J, eps)
    if frame is not None:
        r = frame.covariant(r)
    return float(np.abs(r).max(initial=0.0))


def type_4form_residual(psi, J, eps):
    """Residual of the (2,2)-type condition on the first three slots of a 4-form."""
    L = (np.einsum("uvzw,ux,vy->xyzw", psi, J, J) + np.einsum("uyvw,ux,vz->xyzw", psi, J, J)
         + np.einsum("xuvw,uy,vz->xyzw", psi, J, J))
    return L + eps * psi


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


def norm2(T, ginv, scale=None):
    """``|T|^2`` for a covariant tensor, signature-weighted, times ``scale``."""
    T = np.asarray(T, dtype=float)
    scale = NORM_SCALE if scale is None else scale
    Tu = T
    for ax in range(T.ndim):
        Tu = np.moveaxis(np.tensordot(Tu, ginv, axes=([ax], [0])), -1, ax)
    val = float(np.sum(T * Tu))
    return scale * val if T.ndim == 3 else val


# ---------------------------------------------------------------------------
# vector-valued 2-forms
# ---------------------------------------------------------------------------


def vv_slot(P, J, slot):
    """``P(JX, Y)`` (``slot=0``) or ``P(X, JY)`` (``slot=1``) for ``P[x, y, a]``."""
    if slot == 0:
        return np.einsum("bx,bya->xya", J, P)
    return np.einsum("by,xba->xya", J, P)


def vv_apply(J, P):
    """``J P(X, Y)``."""
    return np.einsum("ab,xyb->xya", J, P)
