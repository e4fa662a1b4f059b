"""Truncated jets of tensor-valued fields at a point.

A ``Jet`` of order ``k`` stores the value of a tensor field together with all
partial derivatives up to order ``k``.  Entry ``data[j]`` has shape
``shape + (dim,) * j``; the trailing derivative axes are symmetric.  Products
follow the Leibniz rule, so polynomial inputs give exact derivatives up to
float rounding.
"""

from __future__ import annotations

import itertools
import string
from math import comb

import numpy as np

from .errors import DegenerateMetricError, ShapeError

COND_LIMIT = 1e10


class Jet:
    __slots__ = ("data", "dim")

    def __init__(self, data, dim: int):
        self.data = tuple(np.asarray(d, dtype=float) for d in data)
        self.dim = int(dim)
        shape = self.data[0].shape
        for j, d in enumerate(self.data):
            if d.shape != shape + (self.dim,) * j:
                raise ShapeError(f"jet component {j} has shape {d.shape}, expected {shape + (self.dim,) * j}")

    @classmethod
    def constant(cls, value, dim, order):
        value = np.asarray(value, dtype=float)
        return cls([value] + [np.zeros(value.shape + (dim,) * j) for j in range(1, order + 1)], dim)

    @property
    def order(self):
        return len(self.data) - 1

    @property
    def shape(self):
        return self.data[0].shape

    @property
    def rank(self):
        return len(self.shape)

    @property
    def value(self):
        return self.data[0]

    def __repr__(self):
        return f"Jet(shape={self.shape}, order={self.order}, dim={self.dim})"

    # structural -------------------------------------------------------

    def truncate(self, order):
        if order > self.order:
            raise ShapeError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.data[: order + 1], self.dim)

    def deriv(self) -> "Jet":
        """Jet of the gradient; the new tensor axis is appended last."""
        if self.order < 1:
            raise ShapeError("order-0 jet has no derivative data")
        return Jet(self.data[1:], self.dim)

    def transpose(self, *axes):
        r = self.rank
        if sorted(axes) != list(range(r)):
            raise ShapeError(f"bad permutation {axes} for rank {r}")
        return Jet([np.transpose(d, tuple(axes) + tuple(range(r, r + j))) for j, d in enumerate(self.data)], self.dim)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet([d[idx] for d in self.data], self.dim)

    # linear -----------------------------------------------------------

    def _match(self, other):
        if other.dim != self.dim:
            raise ShapeError("jets on charts of different dimension")
        k = min(self.order, other.order)
        return self.data[: k + 1], other.data[: k + 1]

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = self._match(other)
            return Jet([x + y for x, y in zip(a, b)], self.dim)
        return Jet([self.data[0] + other] + list(self.data[1:]), self.dim)

    __radd__ = __add__

    def __neg__(self):
        return Jet([-d for d in self.data], self.dim)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, Jet):
            return jeinsum(_elementwise_spec(self.rank, c.rank), self, c)
        return Jet([d * c for d in self.data], self.dim)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return Jet([d / c for d in self.data], self.dim)


def _elementwise_spec(ra, rb):
    if ra != 0 and rb != 0 and ra != rb:
        raise ShapeError("elementwise jet product needs equal ranks or a scalar factor")
    s = string.ascii_lowercase[: max(ra, rb)]
    return f"{s[:ra]},{s[:rb]}->{s}"


def _symmetrize(arr, k):
    if k < 2:
        return arr
    nd = arr.ndim
    base = tuple(range(nd - k))
    perms = list(itertools.permutations(range(nd - k, nd)))
    acc = np.zeros_like(arr)
    for p in perms:
        acc += np.transpose(arr, base + p)
    return acc / len(perms)


def _binary(sa, sb, out, a, b, order, dim):
    used = set(sa + sb + out)
    free = [c for c in string.ascii_letters if c not in used]
    dl = "".join(free[:order])
    res = []
    for k in range(order + 1):
        acc = None
        for j in range(k + 1):
            if j >= len(a) or k - j >= len(b) or a[j] is None or b[k - j] is None:
                continue
            da, db = dl[:j], dl[j:k]
            term = np.einsum(f"{sa}{da},{sb}{db}->{out}{da}{db}", a[j], b[k - j])
            if j and k - j:
                term = term * comb(k, j)
            acc = term if acc is None else acc + term
        res.append(None if acc is None else _symmetrize(acc, k))
    return res


def jeinsum(spec: str, *ops, order=None) -> Jet:
    """``np.einsum`` lifted to jets via the Leibniz rule.

    Operands may be jets or plain arrays (treated as constants).  The result
    order is the minimum order among jet operands unless ``order`` is given.
    """
    lhs, out = spec.replace(" ", "").split("->")
    subs = lhs.split(",")
    if len(subs) != len(ops):
        raise ShapeError(f"einsum spec {spec!r} expects {len(subs)} operands, got {len(ops)}")
    jets = [o for o in ops if isinstance(o, Jet)]
    if not jets:
        raise ShapeError("jeinsum needs at least one jet operand")
    dim = jets[0].dim
    if any(j.dim != dim for j in jets):
        raise ShapeError("jets on charts of different dimension")
    k = min(j.order for j in jets) if order is None else order
    datas = []
    for o in ops:
        if isinstance(o, Jet):
            if o.order < k:
                raise ShapeError(f"operand order {o.order} below requested order {k}")
            datas.append(o.data[: k + 1])
        else:
            datas.append((np.asarray(o, dtype=float),))
    cur_sub, cur = subs[0], datas[0]
    for i in range(1, len(ops)):
        later = "".join(subs[i + 1:]) + out
        if i == len(ops) - 1:
            tgt = out
        else:
            seen = []
            for c in cur_sub + subs[i]:
                if c in later and c not in seen:
                    seen.append(c)
            tgt = "".join(seen)
        cur = _binary(cur_sub, subs[i], tgt, cur, datas[i], k, dim)
        cur_sub = tgt
    if len(ops) == 1:
        free = [c for c in string.ascii_letters if c not in cur_sub + out]
        res = []
        for j in range(k + 1):
            dl = "".join(free[:j])
            res.append(np.einsum(f"{cur_sub}{dl}->{out}{dl}", cur[j]) if j < len(cur) else None)
        cur = res
    full = []
    shape = None
    for j in range(k + 1):
        if j < len(cur) and cur[j] is not None:
            full.append(cur[j])
            shape = cur[j].shape[: cur[j].ndim - j]
        else:
            full.append(np.zeros(shape + (dim,) * j))
    return Jet(full, dim)


def invert_jet(m: Jet, order=None) -> Jet:
    """Jet of the matrix inverse, via the truncated Neumann series.

    Writing ``m = m0 + n`` with ``n`` vanishing at the point,
    ``m^-1 = sum_j (-m0^-1 n)^j m0^-1`` terminates at the jet order.
    """
    if m.rank != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"invert_jet needs a square matrix jet, got shape {m.shape}")
    k = m.order if order is None else order
    m = m.truncate(k)
    m0 = m.value
    cond = np.linalg.cond(m0)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise DegenerateMetricError(f"matrix is singular or ill-conditioned (cond={cond:.3g})")
    m0inv = np.linalg.inv(m0)
    n = Jet([np.zeros_like(m0)] + list(m.data[1:]), m.dim)
    kj = jeinsum("ab,bc->ac", m0inv, n)
    term = Jet.constant(np.eye(m0.shape[0]), m.dim, k)
    total = term
    for _ in range(k):
        term = -jeinsum("ab,bc->ac", kj, term)
        total = total + term
    return jeinsum("ab,bc->ac", total, m0inv)


def reciprocal_jet(s: Jet) -> Jet:
    """Jet of ``1/s`` for a scalar jet."""
    if s.rank != 0:
        raise ShapeError("reciprocal_jet needs a scalar jet")
    s0 = float(s.value)
    if s0 == 0.0:
        raise DegenerateMetricError("reciprocal of a jet with zero value")
    inv = invert_jet(Jet([d[None, None, ...] for d in s.data], s.dim))
    return inv[0, 0]


def jet_product(a: Jet, b: Jet) -> Jet:
    """Matrix product of two matrix jets."""
    return jeinsum("ab,bc->ac", a, b)
