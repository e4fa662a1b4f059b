"""Suite registry and execution over sample points.

Every check has a stable id, a suite, a kind (``identity`` or ``predicate``)
and a default tolerance.  One :class:`~pqkt.geometry.LocalGeometry` is built
per point at the highest jet order the selected suites need; all checks at
that point share it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import connections as cn
from .catalog import default_factor, model_from_spec, sample_points
from .conformal import conformal_identities, round_trip_residual
from .curvature import informational, parallel_torsion_checks, verify_curvature_identities
from .errors import NoPQKTStructureError, PQKTError, UnsupportedDimensionError, UnsupportedOrderError
from .forms import FAIL_TOL, PASS_TOL, classify, lee_identities, tier
from .frameview import FrameView
from .geometry import local_geometry
from .poly import PolyField
from .structures import kahler_forms, nijenhuis_residuals, verify_algebra, verify_bracket_lemma

THREADS_ENV = "PQKT_THREADS"

SUITE_ORDER = {"algebra": 1, "connections": 2, "forms": 2, "conformal": 2,
               "curvature": 3, "parallel-torsion": 3}

ALGEBRA_IDS = ("alg.square", "alg.anticommute", "alg.product", "alg.compat", "alg.symmetric",
               "kahler.skew", "kahler.type", "nij.two-path", "nij.skew", "nij.bracket-symmetry",
               "eq.l0.2", "eq.l0.3", "eq.l0.4", "eq.l0.5")
HYPERCOMPLEX_IDS = ("eq.tt1.2", "prop.2.1", "rem.nabla0.torsion-free", "rem.nabla0.J",
                    "rem.nabla0.split", "prop.2.4", "eq.tt1.6", "eq.tt1.3", "eq.tt1.7",
                    "eq.tt1.9", "eq.tt1.8")
TORSION_FREE_P_IDS = ("eq.tt1.10", "thm.2.5.torsion-free")
PQKT_IDS = ("thm.3.2.metric", "thm.3.2.skew", "thm.3.2.type", "eq.1", "eq.5", "prop.3.1",
            "eq.tr1", "eq.c2", "eq.c4", "eq.c5", "eq.c6", "eq.c7", "cor.3.3", "eq.per1",
            "eq.per2", "eq.6", "eq.9", "eq.2", "eq.i2", "eq.7")
UNIQUENESS_IDS = ("thm.3.2.uniqueness", "thm.3.2.nullity", "thm.3.2.linear-residual")
FORMS_IDS = ("lee.diagonal", "dF.partition", "dF.plus-type")
CLASS_IDS = ("class.HPKT", "class.l.c.PQK", "class.l.c.HPKT", "class.l.c.HPK", "class.integrable")
CONFORMAL_IDS = ("eq.z1", "eq.z1.torsion", "eq.z4", "eq.z5", "eq.z2.dF", "eq.z2.theta",
                 "eq.z2.theta-cross", "eq.z3.K", "eq.z3.A", "eq.z3.omega", "conformal.round-trip")
CURVATURE_IDS = ("eq.11", "eq.12", "eq.ti20", "eq.ti22", "eq.21.2", "eq.22.2", "eq.22.3", "eq.21",
                 "eq.nov2", "eq.16", "eq.19", "eq.20", "eq.e21.1", "eq.22.21", "eq.22.22",
                 "eq.22.23", "eq.22.24", "eq.22.25", "eq.22.26", "eq.rn2", "eq.l1.1", "eq.l1.2a",
                 "eq.l1.2b", "lem.3.3a", "lem.3.3b", "eq.tir2", "eq.tir4", "eq.22.4", "eq.pq1",
                 "eq.pq1.b", "prop.4.10.a", "prop.4.10.b", "prop.4.10.c", "eq.r5", "eq.r5.ricci",
                 "ricci.skew", "eq.15", "eq.sof", "eq.13", "eq.13.two-path", "eq.14", "eq.tir1")
PARALLEL_IDS = ("eq.17", "eq.17.D", "eq.24", "eq.24p", "eq.26.9", "eq.27")


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    tol: float
    kind: str = "identity"


def _registry():
    reg = {}

    def add(ids, suite, tol, kind="identity"):
        for i in ids:
            reg[i] = Check(i, suite, tol, kind)

    add(ALGEBRA_IDS, "algebra", 1e-9)
    add(("eq.l0.2", "eq.l0.3", "eq.l0.4", "eq.l0.5"), "algebra", 1e-8)
    add(HYPERCOMPLEX_IDS + TORSION_FREE_P_IDS + PQKT_IDS, "connections", 1e-9)
    add(UNIQUENESS_IDS, "connections", 1e-8)
    # the nullity is an integer: it passes only when it is 0
    add(("thm.3.2.nullity",), "connections", 0.5)
    add(("thm.2.5.integrable", "thm.3.2.exists"), "connections", PASS_TOL, "predicate")
    add(FORMS_IDS, "forms", 1e-9)
    add(CLASS_IDS, "forms", PASS_TOL, "predicate")
    add(CONFORMAL_IDS, "conformal", 1e-9)
    add(("eq.z5",), "conformal", 1e-10)
    add(("conformal.round-trip",), "conformal", 1e-8)
    add(CURVATURE_IDS, "curvature", 1e-7)
    add(("lem.3.3a", "lem.3.3b"), "curvature", 1e-9)
    add(PARALLEL_IDS, "parallel-torsion", 1e-7)
    return reg


REGISTRY = _registry()


def suite_ids(suite):
    return tuple(k for k, c in REGISTRY.items() if c.suite == suite)


# ---------------------------------------------------------------------------
# per-point evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NotApplicable:
    reason: str


@dataclass(frozen=True)
class Failed:
    error: str


@dataclass
class PointResult:
    values: dict = field(default_factory=dict)  # id -> float | NotApplicable | Failed
    info: dict = field(default_factory=dict)  # name -> float


def _na(out, ids, reason):
    for i in ids:
        out.values[i] = NotApplicable(reason)


def _guard(out, ids, fn):
    """Run ``fn`` and record its residuals; gating errors become not-applicable."""
    try:
        res = fn()
    except (NoPQKTStructureError, UnsupportedDimensionError, UnsupportedOrderError) as exc:
        _na(out, ids, str(exc))
        return
    except (PQKTError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        for i in ids:
            out.values[i] = Failed(f"{type(exc).__name__}: {exc}")
        return
    for i in ids:
        if i not in res:
            out.values[i] = Failed("identity not produced")
    for k, v in res.items():
        out.values[k] = v if isinstance(v, (NotApplicable, Failed)) else float(v)


class _Context:
    """Per-run data shared by all points (the model and the transport setup)."""

    def __init__(self, S, transport_factor=None):
        self.S = S
        if S.kind == "conformal":
            self.base = model_from_spec(S.params["base"])
            self.factor = PolyField.from_list(S.dim, S.params["factor"])
            self.rescaled = S
        else:
            self.base = S
            if transport_factor is None:
                self.factor = default_factor(S.n)
            else:
                self.factor = PolyField.from_list(S.dim, transport_factor)
            self.rescaled = None


def _pqkt_gate(G):
    if G.S.n < 2:
        return "needs n >= 2"
    res = max(cn.existence_residuals(G))
    if res > cn.EXISTENCE_TOL:
        return f"no PQKT connection (existence residual {res:.3e})"
    return None


def _algebra(G, V, out):
    S, p = G.S, G.p

    def run():
        r = dict(verify_algebra(S, p, G))
        K = kahler_forms(S, p, G)
        r["kahler.skew"] = K.skew_residual()
        r["kahler.type"] = K.type_residual([j.value for j in G.J])
        r.update(nijenhuis_residuals(G))
        r.update(verify_bracket_lemma(S, p, G))
        return r

    _guard(out, ALGEBRA_IDS, run)


def _uniqueness(G, V):
    S, p = G.S, G.p
    conn, td = cn.pqkt_connection(S, p, G)
    lin = cn.pqkt_linear_solve(S, p, G)
    dT = float(np.max(np.abs(V.cov(lin.T3 - td.T3))))
    dw = max(float(np.max(np.abs(V.frame.covariant(lin.omega[a] - conn.omega[a].value))))
             for a in range(3))
    return {"thm.3.2.uniqueness": max(dT, dw), "thm.3.2.nullity": float(lin.nullity),
            "thm.3.2.linear-residual": lin.residual}


def _connections(G, V, out):
    S, p = G.S, G.p
    _guard(out, HYPERCOMPLEX_IDS, lambda: cn.hypercomplex_identities(G, V))

    def torsion_free():
        r = cn.torsion_free_p_identities(G, V)
        if r is None:
            return {i: NotApplicable("the canonical P-connection has torsion") for i in TORSION_FREE_P_IDS}
        return r

    _guard(out, TORSION_FREE_P_IDS, torsion_free)
    _guard(out, ("thm.2.5.integrable",),
           lambda: {"thm.2.5.integrable": cn.integrability_residual(S, p, G)})
    if S.n < 2:
        _na(out, ("thm.3.2.exists",) + PQKT_IDS + UNIQUENESS_IDS, "needs n >= 2")
    else:
        _guard(out, ("thm.3.2.exists",), lambda: {"thm.3.2.exists": max(cn.existence_residuals(G))})
        reason = _pqkt_gate(G)
        if reason:
            _na(out, PQKT_IDS + UNIQUENESS_IDS, reason)
        else:
            _guard(out, PQKT_IDS, lambda: cn.pqkt_identities(G, V))
            _guard(out, UNIQUENESS_IDS, lambda: _uniqueness(G, V))
    try:
        dep = cn.p_connection_input_dependence(G, V)
    except (PQKTError, ArithmeticError, np.linalg.LinAlgError):
        return
    for name, d in dep.items():
        for k, v in d.items():
            out.info[f"prop.2.4.input.{name}.{k}"] = v


def _forms(G, V, out):
    S, p = G.S, G.p
    _guard(out, FORMS_IDS, lambda: lee_identities(S, p, G))
    reason = _pqkt_gate(G)
    if reason:
        _na(out, CLASS_IDS, reason)
        return

    def run():
        preds = classify(S, p, G)
        return {f"class.{k}": v.residual for k, v in preds.items()}

    _guard(out, CLASS_IDS, run)


def _conformal(G, V, out, ctx):
    p = G.p
    reason = _pqkt_gate(G)
    if reason:
        _na(out, CONFORMAL_IDS, reason)
        return

    def run():
        if ctx.rescaled is not None:
            Gb = local_geometry(ctx.base, p, 2)
            if ctx.base.n >= 2 and max(cn.existence_residuals(Gb)) > cn.EXISTENCE_TOL:
                raise NoPQKTStructureError("the conformal base admits no PQKT connection")
            r = conformal_identities(ctx.base, ctx.factor, p, Gbase=Gb, Gbar=G, Sbar=ctx.rescaled)
            r["conformal.round-trip"] = round_trip_residual(ctx.base, ctx.factor, p, Gb)
        else:
            r = conformal_identities(G.S, ctx.factor, p, Gbase=G)
            r["conformal.round-trip"] = round_trip_residual(G.S, ctx.factor, p, G)
        return r

    _guard(out, CONFORMAL_IDS, run)


def _curvature(G, V, out):
    S, p = G.S, G.p
    reason = _pqkt_gate(G)
    if reason:
        _na(out, CURVATURE_IDS, reason)
        return
    _guard(out, CURVATURE_IDS, lambda: verify_curvature_identities(S, p, G))
    try:
        out.info.update(informational(S, p, G))
    except PQKTError:
        pass


def _parallel(G, V, out):
    S, p = G.S, G.p
    reason = _pqkt_gate(G)
    if reason:
        _na(out, PARALLEL_IDS, reason)
        return

    def run():
        rep = parallel_torsion_checks(S, p, G)
        if not rep.applicable:
            return {i: NotApplicable(f"torsion is not parallel (|nabla T| = {rep.nabla_T:.3e})")
                    for i in PARALLEL_IDS}
        r = dict(rep.residuals)
        if "eq.27" not in r:
            r["eq.27"] = NotApplicable("dT is not of type (2,2)")
        return r

    _guard(out, PARALLEL_IDS, run)


def evaluate_point(S, p, suites, ctx=None) -> PointResult:
    """All selected checks at one point."""
    ctx = ctx or _Context(S)
    out = PointResult()
    order = max(SUITE_ORDER[s] for s in suites)
    try:
        G = local_geometry(S, p, order)
        V = FrameView(G.frame, [j.value for j in G.J])
    except (PQKTError, ArithmeticError, np.linalg.LinAlgError) as exc:
        for s in suites:
            for i in suite_ids(s):
                out.values[i] = Failed(f"{type(exc).__name__}: {exc}")
        return out
    if "algebra" in suites:
        _algebra(G, V, out)
    if "connections" in suites:
        _connections(G, V, out)
    if "forms" in suites:
        _forms(G, V, out)
    if "conformal" in suites:
        _conformal(G, V, out, ctx)
    if "curvature" in suites:
        _curvature(G, V, out)
    if "parallel-torsion" in suites:
        _parallel(G, V, out)
    return out


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


def thread_count():
    """Worker threads from ``PQKT_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _identity_entry(check, vals, tol):
    applicable = [(i, v) for i, v in vals if not isinstance(v, NotApplicable)]
    na = len(vals) - len(applicable)
    entry = {"suite": check.suite, "kind": check.kind, "tolerance": tol,
             "samples": 0, "not_applicable": na}
    if not applicable:
        entry["status"] = "not-applicable"
        reasons = sorted({v.reason for _, v in vals})
        entry["reason"] = reasons[0] if reasons else "not evaluated"
        return entry
    errors = [(i, v.error) for i, v in applicable if isinstance(v, Failed)]
    nums = [(i, v) for i, v in applicable if not isinstance(v, Failed)]
    entry["samples"] = len(applicable)
    if nums:
        worst_i, worst = max(nums, key=lambda iv: (-math.inf if math.isnan(iv[1]) else iv[1]))
        if any(math.isnan(v) for _, v in nums):
            worst_i, worst = next((i, v) for i, v in nums if math.isnan(v))
        entry["max_residual"] = worst
        entry["worst_point"] = worst_i
    if errors:
        entry["errors"] = [{"point": i, "error": e} for i, e in errors]
    if check.kind == "predicate":
        flags = [tier(v, tol, FAIL_TOL) if math.isfinite(v) else None for _, v in nums]
        if errors or any(f is None for f in flags):
            entry["status"] = "indeterminate"
            entry["value"] = None
        else:
            entry["status"] = "pass"
            entry["value"] = all(flags) if len(set(flags)) == 1 else "mixed"
        entry["fail_tolerance"] = FAIL_TOL
        return entry
    ok = not errors and all(math.isfinite(v) and v <= tol for _, v in nums)
    entry["status"] = "pass" if ok else "fail"
    return entry


def _info_entry(vals):
    nums = [v for v in vals if math.isfinite(v)]
    return {"samples": len(vals), "max": max(nums, default=None), "min": min(nums, default=None)}


@dataclass
class SuiteRun:
    results: dict
    info: dict
    points: np.ndarray


def run_suites(S, suites, points, tolerances=None, tol_scale=1.0, transport_factor=None,
               threads=None) -> SuiteRun:
    """Evaluate ``suites`` at every point and aggregate per id.

    ``tolerances`` overrides per-id defaults; ``tol_scale`` multiplies every
    identity tolerance (predicate tiers are fixed).  Points are evaluated in
    ``threads`` worker threads and merged in point order.
    """
    unknown = [s for s in suites if s not in SUITE_ORDER]
    if unknown:
        raise ValueError(f"unknown suite(s): {unknown}")
    suites = [s for s in SUITE_ORDER if s in suites]
    points = np.atleast_2d(np.asarray(points, dtype=float))
    ctx = _Context(S, transport_factor)
    threads = thread_count() if threads is None else max(1, int(threads))
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            per_point = list(ex.map(lambda p: evaluate_point(S, p, suites, ctx), points))
    else:
        per_point = [evaluate_point(S, p, suites, ctx) for p in points]

    tolerances = tolerances or {}
    results = {}
    for s in suites:
        for i in suite_ids(s):
            check = REGISTRY[i]
            tol = float(tolerances.get(i, check.tol))
            if check.kind == "identity":
                tol *= tol_scale
            vals = [(k, pr.values.get(i, NotApplicable("not evaluated"))) for k, pr in enumerate(per_point)]
            results[i] = _identity_entry(check, vals, tol)
    info = {}
    names = sorted({k for pr in per_point for k in pr.info})
    for name in names:
        info[name] = _info_entry([pr.info[name] for pr in per_point if name in pr.info])
    return SuiteRun(results, info, points)


def default_points(S, count, seed, region):
    return sample_points(S.n, count=count, seed=seed, region=region)
