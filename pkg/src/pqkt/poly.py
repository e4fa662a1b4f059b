"""Exact multivariate polynomial fields on a chart."""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import ShapeError, UnsupportedOrderError
from .jet import Jet


class PolyField:
    """Scalar polynomial ``sum_e c_e x**e`` in ``dim`` variables.

    Zero coefficients are never stored.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[tuple, float] | None = None):
        self.dim = int(dim)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.dim:
                raise ShapeError(f"exponent {exp} has length {len(exp)}, expected {self.dim}")
            if any(e < 0 for e in exp):
                raise ShapeError(f"negative exponent in {exp}")
            c = float(c)
            if c != 0.0:
                clean[exp] = clean.get(exp, 0.0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0.0}

    # construction -----------------------------------------------------

    @classmethod
    def constant(cls, dim, c):
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim, i, coeff=1.0):
        exp = [0] * dim
        exp[i] = 1
        return cls(dim, {tuple(exp): coeff})

    @classmethod
    def from_list(cls, dim, items: Iterable[Mapping]):
        """Build from ``[{"exponents": [...], "coeff": c}, ...]``."""
        terms = {}
        for it in items:
            exp = tuple(it["exponents"])
            terms[exp] = terms.get(exp, 0.0) + float(it["coeff"])
        return cls(dim, terms)

    def to_list(self):
        return [{"exponents": list(e), "coeff": c} for e, c in sorted(self.terms.items())]

    # arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PolyField):
            if other.dim != self.dim:
                raise ShapeError("polynomials live on charts of different dimension")
            return other
        return PolyField.constant(self.dim, float(other))

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return PolyField(self.dim, terms)

    __radd__ = __add__

    def __neg__(self):
        return PolyField(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0.0) + c1 * c2
        return PolyField(self.dim, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PolyField):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "PolyField(0)"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k)
            parts.append(f"{c:g}" + (f"*{mono}" if mono else ""))
        return "PolyField(" + " + ".join(parts) + ")"

    def diff(self, i: int) -> "PolyField":
        terms = {}
        for e, c in self.terms.items():
            if e[i] > 0:
                ne = list(e)
                ne[i] -= 1
                terms[tuple(ne)] = terms.get(tuple(ne), 0.0) + c * e[i]
        return PolyField(self.dim, terms)

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    # evaluation -------------------------------------------------------

    def arrays(self):
        if not self.terms:
            return np.zeros((0, self.dim), dtype=np.int64), np.zeros(0)
        items = sorted(self.terms.items())
        exps = np.array([e for e, _ in items], dtype=np.int64)
        coeffs = np.array([c for _, c in items])
        return exps, coeffs

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        exps, coeffs = self.arrays()
        if x.ndim == 1:
            _check_point(x, self.dim)
            return float(_kernels.poly_eval(exps, coeffs, x[None, :])[0])
        return _kernels.poly_eval(exps, coeffs, x)


class PolyTensor:
    """Dense array of polynomial fields sharing a monomial basis."""

    __slots__ = ("dim", "shape", "exps", "coeffs")

    def __init__(self, dim, shape, exps, coeffs):
        self.dim = int(dim)
        self.shape = tuple(shape)
        self.exps = np.asarray(exps, dtype=np.int64).reshape(-1, self.dim)
        self.coeffs = np.asarray(coeffs, dtype=float).reshape((self.exps.shape[0],) + self.shape)

    @classmethod
    def from_fields(cls, fields) -> "PolyTensor":
        arr = np.empty(np.shape(fields), dtype=object)
        flat = list(np.ravel(np.asarray(fields, dtype=object)))
        if not flat:
            raise ShapeError("empty polynomial tensor")
        dim = flat[0].dim
        basis = sorted({e for f in flat for e in f.terms})
        index = {e: k for k, e in enumerate(basis)}
        shape = arr.shape
        coeffs = np.zeros((len(basis), len(flat)))
        for j, f in enumerate(flat):
            if f.dim != dim:
                raise ShapeError("mixed chart dimensions")
            for e, c in f.terms.items():
                coeffs[index[e], j] = c
        exps = np.array(basis, dtype=np.int64).reshape(-1, dim)
        return cls(dim, shape, exps, coeffs.reshape((len(basis),) + shape))

    @classmethod
    def constant_on(cls, dim, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(dim, arr.shape, np.zeros((1, dim), dtype=np.int64), arr[None, ...])

    def field(self, *idx) -> PolyField:
        c = self.coeffs[(slice(None),) + tuple(idx)]
        return PolyField(self.dim, {tuple(e): float(v) for e, v in zip(self.exps, c) if v != 0.0})

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        _check_point(x, self.dim)
        mono = _kernels.monomial_jets(self.exps, x, 0)[0]
        return np.tensordot(mono, self.coeffs, axes=(0, 0))


def _check_point(x, dim):
    if x.shape != (dim,):
        raise ShapeError(f"point has shape {x.shape}, field lives on a chart of dimension {dim}")
    if not np.all(np.isfinite(x)):
        raise ShapeError("point has non-finite coordinates")


def eval_jet(field, p, order: int) -> Jet:
    """Exact jet of a polynomial field (scalar or tensor) at ``p``.

    Derivative arrays carry the derivative indices as trailing axes.
    """
    if order > _kernels.MAX_ORDER or order < 0:
        raise UnsupportedOrderError(f"jet order {order} unsupported (max {_kernels.MAX_ORDER})")
    p = np.asarray(p, dtype=float)
    if isinstance(field, PolyField):
        exps, coeffs = field.arrays()
        shape = ()
        dim = field.dim
    elif isinstance(field, PolyTensor):
        exps, coeffs, shape, dim = field.exps, field.coeffs, field.shape, field.dim
    else:
        raise TypeError(f"cannot take the jet of {type(field).__name__}")
    _check_point(p, dim)
    if exps.shape[0] == 0:
        return Jet.constant(np.zeros(shape), dim, order)
    mons = _kernels.monomial_jets(exps, p, order)
    data = [np.tensordot(coeffs, mk, axes=(0, 0)) for mk in mons]
    return Jet(data, dim)
