"""Hot numeric kernels with an optional numba path.

The numba versions are used when numba imports cleanly and the environment
variable ``PQKT_NUMBA`` is not set to ``0``.  Both paths return identical
arrays; ``tests/test_kernels.py`` and ``benchmarks/bench_kernels.py`` compare
them directly.
"""

import os

import numpy as np

_FLAG = os.environ.get("PQKT_NUMBA", "1").strip().lower()

try:
    if _FLAG in ("0", "false", "no", "off"):
        raise ImportError("numba disabled by PQKT_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrapper(f):
            return f

        return wrapper


MAX_ORDER = 3


# ---------------------------------------------------------------------------
# monomial jets
# ---------------------------------------------------------------------------


def _monomial_jets_numpy(exps, x, order):
    """Derivatives of every monomial ``x**exps[t]`` up to ``order``.

    Returns a list ``[v, d1, d2, d3][:order + 1]`` with shapes
    ``(T,)``, ``(T, m)``, ``(T, m, m)``, ``(T, m, m, m)``.
    """
    exps = np.asarray(exps, dtype=np.int64)
    x = np.asarray(x, dtype=np.float64)
    nterms, m = exps.shape
    out = []
    # falling[k][t, i] = e (e-1) ... (e-k+1) * x_i**(e-k), zero when e < k
    falling = []
    for k in range(order + 1):
        coef = np.ones_like(exps, dtype=np.float64)
        for j in range(k):
            coef = coef * (exps - j)
        pw = np.where(exps >= k, exps - k, 0)
        fk = np.where(exps >= k, coef * np.power(x[None, :], pw), 0.0)
        falling.append(fk)
    base = falling[0]
    full = np.prod(base, axis=1)
    out.append(full)
    if order == 0:
        return out

    # Derivatives are assembled by replacing per-variable factors; counts of
    # repeated indices select the higher falling factorials.
    idx1 = np.arange(m)
    d1 = np.empty((nterms, m))
    for i in idx1:
        f = base.copy()
        f[:, i] = falling[1][:, i]
        d1[:, i] = np.prod(f, axis=1)
    out.append(d1)
    if order == 1:
        return out
    d2 = np.empty((nterms, m, m))
    for i in range(m):
        for j in range(i, m):
            f = base.copy()
            if i == j:
                f[:, i] = falling[2][:, i]
            else:
                f[:, i] = falling[1][:, i]
                f[:, j] = falling[1][:, j]
            v = np.prod(f, axis=1)
            d2[:, i, j] = v
            d2[:, j, i] = v
    out.append(d2)
    if order == 2:
        return out
    d3 = np.empty((nterms, m, m, m))
    for i in range(m):
        for j in range(i, m):
            for k in range(j, m):
                f = base.copy()
                counts = {}
                for a in (i, j, k):
                    counts[a] = counts.get(a, 0) + 1
                for a, c in counts.items():
                    f[:, a] = falling[c][:, a]
                v = np.prod(f, axis=1)
                for p in ((i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)):
                    d3[:, p[0], p[1], p[2]] = v
    out.append(d3)
    return out


@njit(cache=True)
def _factor(e, xi, k):
    if e < k:
        return 0.0
    c = 1.0
    for j in range(k):
        c *= e - j
    p = 1.0
    for _ in range(e - k):
        p *= xi
    return c * p


@njit(cache=True)
def _monomial_jets_nb(exps, x, order):
    nterms, m = exps.shape
    v = np.zeros(nterms)
    d1 = np.zeros((nterms, m))
    d2 = np.zeros((nterms, m, m))
    d3 = np.zeros((nterms, m, m, m))
    base = np.empty(m)
    for t in range(nterms):
        for i in range(m):
            base[i] = _factor(exps[t, i], x[i], 0)
        val = 1.0
        for i in range(m):
            val *= base[i]
        v[t] = val
        if order < 1:
            continue
        for i in range(m):
            acc = _factor(exps[t, i], x[i], 1)
            for a in range(m):
                if a != i:
                    acc *= base[a]
            d1[t, i] = acc
        if order < 2:
            continue
        for i in range(m):
            for j in range(i, m):
                if i == j:
                    acc = _factor(exps[t, i], x[i], 2)
                else:
                    acc = _factor(exps[t, i], x[i], 1) * _factor(exps[t, j], x[j], 1)
                for a in range(m):
                    if a != i and a != j:
                        acc *= base[a]
                d2[t, i, j] = acc
                d2[t, j, i] = acc
        if order < 3:
            continue
        for i in range(m):
            for j in range(i, m):
                for k in range(j, m):
                    if i == j and j == k:
                        acc = _factor(exps[t, i], x[i], 3)
                    elif i == j:
                        acc = _factor(exps[t, i], x[i], 2) * _factor(exps[t, k], x[k], 1)
                    elif j == k:
                        acc = _factor(exps[t, i], x[i], 1) * _factor(exps[t, j], x[j], 2)
                    else:
                        acc = (_factor(exps[t, i], x[i], 1) * _factor(exps[t, j], x[j], 1)
                               * _factor(exps[t, k], x[k], 1))
                    for a in range(m):
                        if a != i and a != j and a != k:
                            acc *= base[a]
                    d3[t, i, j, k] = acc
                    d3[t, i, k, j] = acc
                    d3[t, j, i, k] = acc
                    d3[t, j, k, i] = acc
                    d3[t, k, i, j] = acc
                    d3[t, k, j, i] = acc
    return v, d1, d2, d3


def monomial_jets(exps, x, order, backend=None):
    """Value and partial derivatives (to ``order``) of monomials at ``x``."""
    if order < 0 or order > MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
    backend = backend or ("numba" if HAVE_NUMBA else "numpy")
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return list(_monomial_jets_nb(exps, x, order))[: order + 1]
    return _monomial_jets_numpy(exps, x, order)


# ---------------------------------------------------------------------------
# polynomial evaluation over many points
# ---------------------------------------------------------------------------


def _poly_eval_numpy(exps, coeffs, pts):
    pts = np.asarray(pts, dtype=np.float64)
    mon = np.prod(np.power(pts[:, None, :], exps[None, :, :]), axis=2)
    return mon @ coeffs


@njit(cache=True)
def _poly_eval_nb(exps, coeffs, pts):
    npts = pts.shape[0]
    nterms, m = exps.shape
    out = np.zeros(npts)
    for p in range(npts):
        acc = 0.0
        for t in range(nterms):
            mon = coeffs[t]
            for i in range(m):
                for _ in range(exps[t, i]):
                    mon *= pts[p, i]
            acc += mon
        out[p] = acc
    return out


def poly_eval(exps, coeffs, pts, backend=None):
    """Evaluate a scalar polynomial at each row of ``pts``."""
    backend = backend or ("numba" if HAVE_NUMBA else "numpy")
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    pts = np.ascontiguousarray(np.atleast_2d(pts), dtype=np.float64)
    if exps.shape[0] == 0:
        return np.zeros(pts.shape[0])
    if backend == "numba":
        return _poly_eval_nb(exps, coeffs, pts)
    return _poly_eval_numpy(exps, coeffs, pts)


# ---------------------------------------------------------------------------
# naive epsilon-weighted frame traces (reference loops)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _frame_trace3_nb(t, eps, jmat):
    # out[x] = sum_i eps_i t[x, i, k] jmat[k, i]
    m = t.shape[0]
    out = np.zeros(m)
    for x in range(m):
        acc = 0.0
        for i in range(m):
            for k in range(m):
                acc += eps[i] * t[x, i, k] * jmat[k, i]
        out[x] = acc
    return out


def _frame_trace3_numpy(t, eps, jmat):
    m = t.shape[0]
    out = np.zeros(m)
    for x in range(m):
        acc = 0.0
        for i in range(m):
            for k in range(m):
                acc += eps[i] * t[x, i, k] * jmat[k, i]
        out[x] = acc
    return out


def frame_trace3(t, eps, jmat, backend=None):
    """``X -> sum_i eps_i t(X, e_i, J e_i)`` by explicit loops, frame components."""
    backend = backend or ("numba" if HAVE_NUMBA else "numpy")
    t = np.ascontiguousarray(t, dtype=np.float64)
    eps = np.ascontiguousarray(eps, dtype=np.float64)
    jmat = np.ascontiguousarray(jmat, dtype=np.float64)
    if backend == "numba":
        return _frame_trace3_nb(t, eps, jmat)
    return _frame_trace3_numpy(t, eps, jmat)
