"""Test manifolds with known properties.

Every constructor returns a :class:`ParaHermitianStructure` whose ``params``
hold the explicit polynomial data, so ``model_to_spec`` / ``model_from_spec``
round-trip through the manifest format exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import ModelConstructionError, NonPositiveFactorError, ShapeError
from .model import ParaHermitianStructure
from .poly import PolyField, PolyTensor
from .tensor import standard_structure

KINDS = ("flat", "frame-deformed", "diffeo-pushforward", "conformal")

#: presets offered by ``catalog list`` / ``catalog emit``; each maps to a kind
PRESETS = {
    "flat": "flat",
    "frame-deformed": "frame-deformed",
    "diffeo-pushforward": "diffeo-pushforward",
    "conformal": "conformal",
    "sp1-rotation": "frame-deformed",
}

PRESET_NOTES = {
    "flat": "constant hyper-paraKähler structure; every invariant vanishes",
    "frame-deformed": "random linear frame deformation; non-integrable, T^P != 0",
    "diffeo-pushforward": "pushforward of the flat structure with a conformal factor; hyper-paracomplex",
    "conformal": "flat structure rescaled by f = 1 + x_0/10; l.c. hyper-paraKähler",
    "sp1-rotation": "frame rotated inside the paraquaternionic span; PQKT with T, omega, rho != 0",
}

DEFAULT_REGION = 0.5
DEFAULT_POINTS = 25
DEFAULT_SEED = 0
DEFORMATION_CAP = 0.1


def sample_points(n, count=DEFAULT_POINTS, seed=DEFAULT_SEED, region=DEFAULT_REGION):
    """Seeded points of the cube ``[-region, region]^{4n}``."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-region, region, size=(int(count), 4 * n))


# ---------------------------------------------------------------------------
# polynomial helpers
# ---------------------------------------------------------------------------


def _matrix_to_list(M: PolyTensor):
    m = M.shape[0]
    return [[M.field(i, j).to_list() for j in range(m)] for i in range(m)]


def _matrix_from_list(dim, rows):
    try:
        fields = [[PolyField.from_list(dim, entry) for entry in row] for row in rows]
    except (TypeError, KeyError, ValueError) as exc:
        raise ModelConstructionError(f"bad polynomial matrix: {exc}") from exc
    if len(fields) != dim or any(len(r) != dim for r in fields):
        raise ShapeError(f"polynomial matrix must be {dim} x {dim}")
    return PolyTensor.from_fields(fields)


def _linear_matrix(m, A, identity=True):
    """``I + sum_k x_k A[k]`` as a polynomial matrix."""
    X = [PolyField.variable(m, k) for k in range(m)]
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            f = PolyField.constant(m, 1.0 if (identity and i == j) else 0.0)
            for k in range(m):
                if A[k, i, j] != 0.0:
                    f = f + X[k] * float(A[k, i, j])
            row.append(f)
        rows.append(row)
    return PolyTensor.from_fields(rows)


def _check_invertible(M: PolyTensor, n, points, what):
    for p in points:
        val = M(p)
        c = np.linalg.cond(val)
        if not np.isfinite(c) or c > 1e8:
            raise ModelConstructionError(f"{what} is singular or ill-conditioned at {p.tolist()}")


def check_positive(f: PolyField, points):
    vals = [f(p) for p in points]
    bad = [i for i, v in enumerate(vals) if not v > 0]
    if bad:
        raise NonPositiveFactorError(
            f"conformal factor is not positive at sample point {bad[0]} (value {vals[bad[0]]!r})")


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def flat_model(n) -> ParaHermitianStructure:
    """Constant adapted ``(g0, J0)``; ``g0 = diag(+1 x 2n, -1 x 2n)``."""
    if n < 1:
        raise ModelConstructionError("n must be at least 1")
    g0, J0 = standard_structure(n)
    return ParaHermitianStructure(n, g0, J0, kind="flat")


def frame_deformed_model(n, E=None, *, seed=1, scale=DEFORMATION_CAP, points=None):
    """``J_alpha = E J0_alpha E^-1`` and ``g = E^-T g0 E^-1`` for a polynomial frame ``E``.

    Without ``E`` a linear deformation ``E = I + sum_k x_k A_k`` with entries
    of ``A_k`` uniform in ``[-scale, scale]`` is drawn from ``seed``.
    """
    m = 4 * n
    if E is None:
        if not 0 < scale <= DEFORMATION_CAP:
            raise ModelConstructionError(f"deformation scale must lie in (0, {DEFORMATION_CAP}]")
        rng = np.random.default_rng(seed)
        E = _linear_matrix(m, rng.uniform(-1, 1, (m, m, m)) * scale)
    elif not isinstance(E, PolyTensor):
        E = _matrix_from_list(m, E)
    if E.shape != (m, m):
        raise ShapeError(f"frame must be {m} x {m}")
    pts = sample_points(n) if points is None else points
    _check_invertible(E, n, pts, "frame E")
    g0, J0 = standard_structure(n)
    return ParaHermitianStructure(n, g0, J0, frame=E, kind="frame-deformed",
                                  params={"frame": _matrix_to_list(E)})


def sp1_rotation_model(n):
    """Frame ``E = I + 0.2 x_0 J0_1 + (0.1 x_1 x_2 + 0.1 x_3) J0_2 + 0.15 x_4 J0_3``.

    ``E`` commutes with nothing in particular but lies in the algebra spanned
    by ``I`` and the ``J0``'s, so the span of the ``J``'s is constant: the
    flat connection preserves it, ``omega != 0`` and the PQKT torsion is
    nonzero.
    """
    m = 4 * n
    X = [PolyField.variable(m, k) for k in range(m)]
    coef = [PolyField.constant(m, 1.0), X[0] * 0.2, X[1] * X[2] * 0.1 + X[3] * 0.1,
            X[4 % m] * 0.15]
    _, J0 = standard_structure(n)
    mats = [np.eye(m)] + [J0[a] for a in range(3)]
    rows = [[sum((coef[k] * float(mats[k][i, j]) for k in range(4) if mats[k][i, j] != 0),
                 PolyField(m)) for j in range(m)] for i in range(m)]
    return frame_deformed_model(n, PolyTensor.from_fields(rows))


def diffeo_pushforward_model(n, phi=None, *, seed=5, scale=0.05, factor=None, points=None):
    """Pullback of the flat structure by a polynomial map ``phi``.

    The coframe is the Jacobian ``D phi``, so every ``J_alpha`` is integrable.
    ``factor`` optionally rescales the metric (default
    ``1 + x_0/10 + x_1 x_2/20`` when ``phi`` is generated).
    """
    m = 4 * n
    X = [PolyField.variable(m, k) for k in range(m)]
    if phi is None:
        rng = np.random.default_rng(seed)
        Q = rng.uniform(-1, 1, (m, m, m))
        Q = (Q + Q.transpose(0, 2, 1)) / 2 * scale
        phi = []
        for i in range(m):
            f = X[i]
            for j in range(m):
                for k in range(m):
                    f = f + X[j] * X[k] * float(Q[i, j, k])
            phi.append(f)
        if factor is None:
            factor = PolyField.constant(m, 1.0) + X[0] * 0.1 + X[1] * X[2 % m] * 0.05
    else:
        phi = [p if isinstance(p, PolyField) else PolyField.from_list(m, p) for p in phi]
    if len(phi) != m:
        raise ShapeError(f"diffeomorphism needs {m} component polynomials")
    D = PolyTensor.from_fields([[phi[i].diff(j) for j in range(m)] for i in range(m)])
    pts = sample_points(n) if points is None else points
    _check_invertible(D, n, pts, "Jacobian of phi")
    params = {"map": [p.to_list() for p in phi]}
    if factor is not None:
        if not isinstance(factor, PolyField):
            factor = PolyField.from_list(m, factor)
        check_positive(factor, pts)
        params["factor"] = factor.to_list()
    g0, J0 = standard_structure(n)
    return ParaHermitianStructure(n, g0, J0, coframe=D, factor=factor,
                                  kind="diffeo-pushforward", params=params)


def default_factor(n):
    m = 4 * n
    return PolyField.constant(m, 1.0) + PolyField.variable(m, 0, 0.1)


def conformal_model(base=None, f=None, *, n=2, points=None):
    """``f * g`` on ``base`` (default: the flat model, ``f = 1 + x_0/10``)."""
    from .conformal import rescale

    base = flat_model(n) if base is None else base
    f = default_factor(base.n) if f is None else f
    return rescale(base, f, points=points)


def preset(name, n):
    if name not in PRESETS:
        raise ModelConstructionError(f"unknown model preset {name!r}; known: {sorted(PRESETS)}")
    if name == "flat":
        return flat_model(n)
    if name == "frame-deformed":
        return frame_deformed_model(n)
    if name == "diffeo-pushforward":
        return diffeo_pushforward_model(n)
    if name == "conformal":
        return conformal_model(n=n)
    return sp1_rotation_model(n)


# ---------------------------------------------------------------------------
# manifest model specs
# ---------------------------------------------------------------------------


def model_to_spec(S: ParaHermitianStructure) -> dict:
    out = {"kind": S.kind, "n": S.n}
    out.update(S.params)
    return out


def model_from_spec(spec: dict, points=None) -> ParaHermitianStructure:
    """Build a model from its manifest description (already schema-checked)."""
    kind = spec["kind"]
    n = int(spec["n"])
    m = 4 * n
    if kind == "flat":
        return flat_model(n)
    if kind == "frame-deformed":
        return frame_deformed_model(n, spec["frame"], points=points)
    if kind == "diffeo-pushforward":
        phi = [PolyField.from_list(m, p) for p in spec["map"]]
        factor = spec.get("factor")
        return diffeo_pushforward_model(n, phi, factor=factor, points=points)
    if kind == "conformal":
        base = model_from_spec(spec["base"], points=points)
        if base.n != n:
            raise ModelConstructionError("conformal base has a different n")
        return conformal_model(base, PolyField.from_list(m, spec["factor"]), points=points)
    raise ModelConstructionError(f"unknown model kind {kind!r}")
