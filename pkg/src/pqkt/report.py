"""Residual reports as canonical JSON (sorted keys, 17 significant digits)."""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from . import __version__
from .suites import run_suites

ENGINE = "pqkt"


def _float(x):
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0.0"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def canonical_json(obj, indent=2, _level=0):
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {canonical_json(obj[k], indent, _level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + canonical_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def fingerprint(model_spec):
    """SHA-256 of the canonical JSON of a model spec (first 16 hex digits)."""
    return hashlib.sha256(canonical_json(model_spec, indent=0).encode()).hexdigest()[:16]


def summarize(results):
    counts = {"pass": 0, "fail": 0, "indeterminate": 0, "not-applicable": 0}
    for entry in results.values():
        counts[entry["status"]] += 1
    failed = sorted(k for k, e in results.items() if e["kind"] == "identity" and e["status"] == "fail")
    return {"counts": counts, "failed": failed, "ok": not failed}


def build_report(manifest, *, points=None, seed=None, tol_scale=1.0, suites=None, threads=None):
    """Run a manifest and return the report as a dict.

    ``points``/``seed``/``suites`` override the manifest's sampling and suite
    selection.
    """
    from .catalog import sample_points
    from .manifest import check_buildable

    count = manifest.count if points is None else int(points)
    seed = manifest.seed if seed is None else int(seed)
    suites = list(manifest.suites if not suites else suites)
    n = int(manifest.model["n"])
    pts = sample_points(n, count=count, seed=seed, region=manifest.region)
    S = check_buildable(manifest, pts)
    run = run_suites(S, suites, pts, tolerances=manifest.tolerances, tol_scale=tol_scale,
                     transport_factor=manifest.transport_factor, threads=threads)
    return {
        "engine": {"name": ENGINE, "version": __version__},
        "model": {"spec": manifest.model, "fingerprint": fingerprint(manifest.model), "kind": S.kind,
                  "n": S.n},
        "sampling": {"count": count, "seed": seed, "region": manifest.region},
        "suites": [s for s in ("algebra", "connections", "forms", "conformal", "curvature",
                               "parallel-torsion") if s in suites],
        "tol_scale": float(tol_scale),
        "results": run.results,
        "info": run.info,
        "summary": summarize(run.results),
    }


def dumps(report):
    return canonical_json(report) + "\n"
