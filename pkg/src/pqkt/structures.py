"""Algebraic validation of paraquaternionic Hermitian structures.

Kähler forms, Nijenhuis tensors and brackets, and the bracket lemma relating
``[[J_a, J_b]]`` to the torsion ``T^H`` of the complex-product connection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (apply_endo, lie_bracket_coord, local_geometry, nijenhuis_bracket_jet,
                       nijenhuis_components)
from .jet import Jet
from .poly import PolyTensor, eval_jet
from .tensor import CYCLIC, EPS, vv_apply, vv_slot


def _max(x):
    return float(np.max(np.abs(x), initial=0.0))


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------


def algebra_residuals(g, J):
    """Residuals of the paraquaternionic identities for values ``g``, ``J[0..2]``."""
    m = g.shape[0]
    eye = np.eye(m)
    square = max(_max(J[a] @ J[a] - EPS[a] * eye) for a in range(3))
    anti = max(_max(J[a] @ J[b] + J[b] @ J[a]) for a, b, _ in CYCLIC)
    product = max(_max(J[a] @ J[b] + EPS[c] * J[c]) for a, b, c in CYCLIC)
    compat = max(_max(J[a].T @ g @ J[a] + EPS[a] * g) for a in range(3))
    return {
        "alg.square": square,
        "alg.anticommute": anti,
        "alg.product": product,
        "alg.compat": compat,
        "alg.symmetric": _max(g - g.T),
    }


def verify_algebra(S, p, geom=None):
    """``J_a^2 = eps_a``, anticommutation, ``J_a J_b = -eps_c J_c``, compatibility, symmetry."""
    if geom is not None:
        g, J = geom.g.value, [j.value for j in geom.J]
    else:
        g, J = S.values(p)
    return algebra_residuals(g, J)


def signature(g):
    """Numbers of positive and negative eigenvalues of a symmetric matrix."""
    w = np.linalg.eigvalsh(0.5 * (g + g.T))
    return int(np.sum(w > 0)), int(np.sum(w < 0))


# ---------------------------------------------------------------------------
# Kähler forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KahlerForms:
    """``F_alpha(X, Y) = g(X, J_alpha Y)`` at a point."""

    F: tuple

    def __getitem__(self, a):
        return self.F[a]

    def skew_residual(self):
        return max(_max(f + f.T) for f in self.F)

    def type_residual(self, J):
        """``F_a(J_b X, J_b Y) = -eps_b F_a(X, Y)`` for ``a = b`` and ``+eps_b F_a(X, Y)`` otherwise.

        The sign flips for ``a != b`` because ``J_a`` and ``J_b`` anticommute.
        """
        return max(_max(J[b].T @ self.F[a] @ J[b] + (1 if a == b else -1) * EPS[b] * self.F[a])
                   for a in range(3) for b in range(3))


def kahler_forms(S, p, geom=None) -> KahlerForms:
    if geom is not None:
        g, J = geom.g.value, [j.value for j in geom.J]
    else:
        g, J = S.values(p)
    return KahlerForms(tuple(g @ J[a] for a in range(3)))


# ---------------------------------------------------------------------------
# Nijenhuis tensors
# ---------------------------------------------------------------------------


def _field_jet(A, p, order):
    """Jet of a (1,1) field given as a PolyTensor, Jet, callable or ``None`` (identity)."""
    if A is None or isinstance(A, Jet):
        return A
    if isinstance(A, PolyTensor):
        return eval_jet(A, p, order)
    return A(p, order)


def nijenhuis_bracket(A, B, p, dim=None):
    """``[[A, B]](X, Y)`` on coordinate fields, stored as ``[x, y, a]``.

    ``A`` and ``B`` may be polynomial tensors, order-1 jets, callables
    ``(p, order) -> Jet`` or ``None`` for the identity.
    """
    p = np.asarray(p, dtype=float)
    dim = p.shape[0] if dim is None else dim
    Aj = _field_jet(A, p, 1)
    Bj = _field_jet(B, p, 1)
    return nijenhuis_bracket_jet(Aj, Bj, dim, 0).value


def nijenhuis_from_jet(J: Jet, eps):
    """``N = [JX,JY] + eps[X,Y] - J[JX,Y] - J[X,JY]`` by Lie-bracket expansion."""
    dim = J.dim
    br = lambda P, Q: lie_bracket_coord(P, Q, dim, 0)  # noqa: E731
    J0 = J.truncate(0)
    return (br(J, J) - apply_endo(J0, br(J, None)) - apply_endo(J0, br(None, J))).value


def nijenhuis(S, alpha, p, geom=None):
    """Nijenhuis tensor of ``J_alpha`` at ``p`` (Lie-bracket path)."""
    G = local_geometry(S, p, 1, geom)
    return nijenhuis_from_jet(G.J[alpha], EPS[alpha])


def nijenhuis_closed_form(S, alpha, p, geom=None):
    """Nijenhuis tensor from the closed component formula (independent path)."""
    G = local_geometry(S, p, 1, geom)
    return nijenhuis_components(G.J[alpha].truncate(1), EPS[alpha]).value


def nijenhuis_residuals(G):
    """Two-path and bracket checks for all three structures."""
    B = [[G.brackets_JJ[a][b].value for b in range(3)] for a in range(3)]
    out = {}
    two_path = 0.0
    skew = 0.0
    for a in range(3):
        N1 = nijenhuis_from_jet(G.J[a], EPS[a])
        N2 = nijenhuis_components(G.J[a].truncate(1), EPS[a]).value
        two_path = max(two_path, _max(N1 - N2), _max(B[a][a] - 2 * N2))
        skew = max(skew, _max(N1 + N1.transpose(1, 0, 2)))
    out["nij.two-path"] = two_path
    out["nij.skew"] = skew
    out["nij.bracket-symmetry"] = max(_max(B[a][b] - B[b][a]) for a in range(3) for b in range(3))
    return out


# ---------------------------------------------------------------------------
# the bracket lemma
# ---------------------------------------------------------------------------


def _sym_twist(P, Ja, Jb):
    """``Ja P(X,JbY) + Ja P(JbX,Y) + Jb P(X,JaY) + Jb P(JaX,Y) - P(JaX,JbY) - P(JbX,JaY)``."""
    return (vv_apply(Ja, vv_slot(P, Jb, 1)) + vv_apply(Ja, vv_slot(P, Jb, 0))
            + vv_apply(Jb, vv_slot(P, Ja, 1)) + vv_apply(Jb, vv_slot(P, Ja, 0))
            - vv_slot(vv_slot(P, Ja, 0), Jb, 1) - vv_slot(vv_slot(P, Jb, 0), Ja, 1))


def _self_twist(P, J, eps):
    """``P(JX,JY) - J P(JX,Y) - J P(X,JY) - eps P(X,Y)``."""
    return (vv_slot(vv_slot(P, J, 0), J, 1) - vv_apply(J, vv_slot(P, J, 0))
            - vv_apply(J, vv_slot(P, J, 1)) - eps * P)


def bracket_lemma_residuals(TH, B, J):
    """Residuals of the four bracket identities.

    ``TH`` is ``T^H[x, y, a]``, ``B[a][b]`` the brackets, ``J`` the three
    matrices.  The mixed-bracket identity is checked in the form
    ``[[J_a, J_b]] = Ja TH(X,JbY) + Ja TH(JbX,Y) + Jb TH(X,JaY) + Jb TH(JaX,Y)
    - TH(JaX,JbY) - TH(JbX,JaY)``.
    """
    r2 = r3 = r4 = r5 = 0.0
    for a, b, c in CYCLIC:
        r2 = max(r2, _max(B[a][b] - _sym_twist(TH, J[a], J[b])))
        r3 = max(r3, _max(-12 * EPS[c] * TH - _sym_twist(B[a][b], J[a], J[b])))
        r4 = max(r4, _max(0.5 * B[a][a] + _self_twist(TH, J[a], EPS[a]) + 2 * EPS[a] * TH))
        l5 = _self_twist(B[b][b], J[c], EPS[c]) + _self_twist(B[c][c], J[b], EPS[b])
        r5 = max(r5, _max(2 * B[a][a] - l5))
    return {"eq.l0.2": r2, "eq.l0.3": r3, "eq.l0.4": r4, "eq.l0.5": r5}


def verify_bracket_lemma(S, p, geom=None):
    G = local_geometry(S, p, 1, geom)
    B = [[G.brackets_JJ[a][b].value for b in range(3)] for a in range(3)]
    J = [j.value for j in G.J]
    return bracket_lemma_residuals(G.TH.value, B, J)
