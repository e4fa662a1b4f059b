"""Adapted-frame components and the epsilon-weighted operations on them.

Identity residuals are formed in an adapted frame ``e_1..e_4n`` with
``g(e_i, e_j) = eps_i delta_ij``, so every trace is an explicit signed sum.
"""

from __future__ import annotations

import numpy as np

from .tensor import FrameData, adapted_frame


class FrameView:
    """Frame components of tensors at one point.

    ``J[a]`` is the frame matrix of ``J_a`` (``J e_x = sum_y J[a][y, x] e_y``)
    and ``s`` the signature signs.
    """

    def __init__(self, frame: FrameData, J_values):
        self.frame = frame
        self.E = frame.vectors
        self.Einv = np.linalg.inv(self.E)
        self.s = np.asarray(frame.signs, dtype=float)
        self.J = [self.Einv @ np.asarray(j) @ self.E for j in J_values]
        self.n = frame.n
        self.dim = frame.dim

    @classmethod
    def at(cls, g, J_values, **kw):
        return cls(adapted_frame(g, J_values, **kw), J_values)

    # conversion ---------------------------------------------------------

    def cov(self, t):
        """Components of a covariant tensor."""
        return self.frame.covariant(t)

    def mixed(self, t, variance):
        return self.frame.transform(t, variance)

    def vec2(self, P):
        """Frame components of a vector-valued 2-form ``P[x, y, a]``."""
        return self.frame.transform(P, "ddu")

    def lower(self, P):
        """``P(X, Y, Z) = g(P(X, Y), Z)`` from frame components."""
        return P * self.s

    def raise_last(self, T):
        return T * self.s

    # J-insertion and traces ----------------------------------------------

    def jslot(self, t, a, slot):
        """``t`` with ``J_a`` inserted into covariant slot ``slot``."""
        t = np.moveaxis(np.asarray(t), slot, 0)
        t = np.tensordot(self.J[a], t, axes=([0], [0]))
        return np.moveaxis(t, 0, slot)

    def jj(self, t2, a, b):
        """``t(J_a X, J_b Y)`` for a 2-tensor."""
        return self.jslot(self.jslot(t2, a, 0), b, 1)

    def jvec(self, a, P):
        """``J_a P(...)`` for a vector-valued tensor with the output index last."""
        return np.einsum("ab,...b->...a", self.J[a], P)

    def tr(self, t, i, j, a=None):
        """``sum_k eps_k t(.., e_k at i, .., J_a e_k at j, ..)``."""
        t = np.asarray(t)
        if a is not None:
            t = self.jslot(t, a, j)
        t2 = np.moveaxis(t, [i, j], [0, 1])
        return np.einsum("kk...,k->...", t2, self.s)

    def jform1(self, a, v):
        """``(J_a v)(X) = -v(J_a X)`` for a 1-form."""
        return -np.asarray(v) @ self.J[a]

    def compose(self, v, a):
        """``(v o J_a)(X) = v(J_a X)``."""
        return np.asarray(v) @ self.J[a]

    def gTT(self, A, B):
        """``g(A(X, Y), B(Z, U))`` for covariant 3-forms ``A``, ``B``."""
        return np.einsum("xyk,zuk,k->xyzu", A, B, self.s)

    def norm2_1(self, v):
        return float(np.einsum("i,i,i->", v, v, self.s))

    def norm2_3(self, T):
        return float(np.einsum("ijk,i,j,k->", T * T, self.s, self.s, self.s))

    def pair2(self, A, B):
        """``sum eps_i eps_j A_ij B_ij``."""
        return float(np.einsum("ij,ij,i,j->", A, B, self.s, self.s))


def cyclic3(A):
    """Cyclic sum over the first three slots of a 4-tensor."""
    return A + np.einsum("yzxu->xyzu", A) + np.einsum("zxyu->xyzu", A)


def maxabs(*arrays):
    return max((float(np.max(np.abs(a), initial=0.0)) for a in arrays), default=0.0)
