import io
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import N
from pqkt.catalog import PRESETS, default_factor, model_to_spec, preset, sample_points
from pqkt.cli import emit_manifest, main
from pqkt.conformal import conformal_identities
from pqkt.connections import hypercomplex_identities, pqkt_identities, torsion_free_p_identities
from pqkt.errors import ManifestError
from pqkt.forms import lee_identities
from pqkt.frameview import FrameView
from pqkt.geometry import local_geometry
from pqkt.manifest import SUITES, loads, parse_manifest
from pqkt.report import build_report, canonical_json, dumps, fingerprint
from pqkt.structures import verify_algebra
from pqkt.suites import (
    CONFORMAL_IDS,
    HYPERCOMPLEX_IDS,
    PQKT_IDS,
    REGISTRY,
    TORSION_FREE_P_IDS,
    run_suites,
    suite_ids,
)


def _manifest(kind="flat", n=N, **extra):
    doc = {"model": model_to_spec(preset(kind, n)), "sampling": {"count": 2, "seed": 0}}
    doc.update(extra)
    return doc


def _cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def _write(tmp_path, doc, name="m.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------


def test_manifest_defaults():
    m = parse_manifest({"model": {"kind": "flat", "n": 2}})
    assert m.count == 25 and m.seed == 0 and m.region == 0.5
    assert m.suites == SUITES
    assert m.build_model().kind == "flat"


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_manifest_round_trip(name):
    doc = emit_manifest(name, N)
    m = parse_manifest(json.loads(canonical_json(doc)))
    assert m.to_dict() == doc
    S = m.build_model()
    assert model_to_spec(S) == doc["model"]


@pytest.mark.parametrize("doc, where", [
    ({}, "$"),
    ({"model": {"kind": "torus", "n": 2}}, "$.model.kind"),
    ({"model": {"kind": "flat", "n": 0}}, "$.model.n"),
    ({"model": {"kind": "flat", "n": 2}, "sampling": {"count": 0}}, "$.sampling.count"),
    ({"model": {"kind": "flat", "n": 2}, "sampling": {"region": -1}}, "$.sampling.region"),
    ({"model": {"kind": "flat", "n": 2}, "suites": ["algebra", "topology"]}, "$.suites[1]"),
    ({"model": {"kind": "flat", "n": 2}, "tolerances": {"eq.z5": -1}}, "$.tolerances.eq.z5"),
    ({"model": {"kind": "flat", "n": 2}, "extra": 1}, "$"),
    ({"model": {"kind": "conformal", "n": 2, "base": {"kind": "flat", "n": 2},
                "factor": [{"exponents": [0, 0], "coeff": 1.0}]}}, "$.model.factor[0].exponents"),
    ({"model": {"kind": "conformal", "n": 2, "base": {"kind": "flat", "n": 3},
                "factor": [{"exponents": [0] * 8, "coeff": 1.0}]}}, "$.model.base.n"),
    ({"model": {"kind": "frame-deformed", "n": 1, "frame": [[[]]]}}, "$.model.frame"),
])
def test_manifest_errors_carry_paths(doc, where):
    with pytest.raises(ManifestError) as exc:
        parse_manifest(doc)
    assert exc.value.where == where


def test_manifest_conformal_requires_factor():
    with pytest.raises(ManifestError) as exc:
        parse_manifest({"model": {"kind": "conformal", "n": 2, "base": {"kind": "flat", "n": 2}}})
    assert "factor" in str(exc.value)


def test_manifest_json_syntax_error():
    with pytest.raises(ManifestError) as exc:
        loads('{"model": {"kind": "flat",,}}')
    assert exc.value.where.startswith("line 1, column")


# ---------------------------------------------------------------------------
# canonical JSON and reports
# ---------------------------------------------------------------------------


def test_canonical_json_formatting():
    text = canonical_json({"b": 0.1, "a": [1, 2.0, 0.0, True, None], "c": float("nan"),
                           "d": np.float64(1 / 3), "e": "eq.z5"})
    data = json.loads(text)
    assert list(data) == ["a", "b", "c", "d", "e"]
    assert '"b": 0.10000000000000001' in text
    assert '"d": 0.33333333333333331' in text
    assert "2.0" in text and "0.0" in text
    assert data["c"] == "nan"
    assert data["e"] == "eq.z5"
    assert float(repr(1 / 3)) == float(format(1 / 3, ".17g"))


def test_canonical_json_rejects_unknown_types():
    with pytest.raises(TypeError):
        canonical_json({"x": object()})


def test_fingerprint_depends_on_model_only():
    a = model_to_spec(preset("flat", N))
    b = json.loads(json.dumps(a))
    assert fingerprint(a) == fingerprint(b)
    assert fingerprint(a) != fingerprint(model_to_spec(preset("flat", 3)))


def test_report_is_deterministic():
    m = parse_manifest(_manifest("sp1-rotation", suites=["algebra", "connections"]))
    r1 = dumps(build_report(m, threads=1))
    r2 = dumps(build_report(m, threads=3))
    assert r1 == r2
    data = json.loads(r1)
    assert data["summary"]["ok"] is True
    assert data["sampling"] == {"count": 2, "seed": 0, "region": 0.5}
    assert data["suites"] == ["algebra", "connections"]
    assert "timestamp" not in r1


def test_report_entries(models):
    pts = sample_points(N, count=2)
    run = run_suites(models["conformal"], ["forms"], pts)
    assert set(run.results) == set(suite_ids("forms"))
    entry = run.results["class.HPKT"]
    assert entry["kind"] == "predicate"
    assert entry["value"] is False and entry["status"] == "pass"
    entry = run.results["lee.diagonal"]
    assert entry["status"] == "pass" and entry["samples"] == 2
    assert entry["max_residual"] <= entry["tolerance"]


def test_not_applicable_entries(models):
    pts = sample_points(N, count=2)
    run = run_suites(models["frame-deformed"], ["connections"], pts)
    entry = run.results["thm.3.2.metric"]
    assert entry["status"] == "not-applicable" and entry["not_applicable"] == 2
    assert "reason" in entry
    assert run.results["eq.tt1.6"]["status"] == "pass"


def test_n1_marks_n2_identities_not_applicable():
    from pqkt.catalog import flat_model

    run = run_suites(flat_model(1), ["connections"], sample_points(1, count=2))
    entry = run.results["eq.c7"]
    assert entry["status"] == "not-applicable"
    assert "n >= 2" in entry["reason"]


def test_tolerance_overrides_and_scaling(models):
    pts = sample_points(N, count=1)
    run = run_suites(models["conformal"], ["conformal"], pts, tolerances={"eq.z5": 1e-3}, tol_scale=2.0)
    assert run.results["eq.z5"]["tolerance"] == 2e-3
    assert run.results["eq.z1"]["tolerance"] == 2 * REGISTRY["eq.z1"].tol


def test_unknown_suite_rejected(models):
    with pytest.raises(ValueError):
        run_suites(models["flat"], ["nope"], sample_points(N, count=1))


# ---------------------------------------------------------------------------
# registry coverage
# ---------------------------------------------------------------------------


def test_registry_matches_evaluated_keys(models, geoms):
    p = sample_points(N, count=1)[0]
    G, V = geoms.view("sp1-rotation", p)
    assert set(hypercomplex_identities(G, V)) == set(HYPERCOMPLEX_IDS)
    assert set(pqkt_identities(G, V)) == set(PQKT_IDS)
    Gf, Vf = geoms.view("flat", p)
    assert set(torsion_free_p_identities(Gf, Vf)) == set(TORSION_FREE_P_IDS)
    keys = set(conformal_identities(models["flat"], default_factor(N), p))
    assert keys | {"conformal.round-trip"} == set(CONFORMAL_IDS)
    assert set(lee_identities(models["flat"], p)) <= set(suite_ids("forms"))
    assert set(verify_algebra(models["flat"], p)) <= set(suite_ids("algebra"))


def test_registry_ids_are_unique_and_tolerances_positive():
    assert all(c.tol > 0 for c in REGISTRY.values())
    assert all(c.kind in ("identity", "predicate") for c in REGISTRY.values())
    assert {c.suite for c in REGISTRY.values()} == set(SUITES)


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------


def test_cli_catalog_list():
    code, out, _ = _cli(["catalog", "list"])
    assert code == 0
    assert [line.split()[0] for line in out.splitlines()] == sorted(PRESETS)


def test_cli_catalog_emit():
    code, out, _ = _cli(["catalog", "emit", "conformal", "--n", "1"])
    assert code == 0
    doc = json.loads(out)
    assert doc["model"]["kind"] == "conformal" and doc["model"]["n"] == 1
    parse_manifest(doc)


def test_cli_run_pass(tmp_path):
    path = _write(tmp_path, _manifest("conformal"))
    out_file = tmp_path / "report.json"
    code, out, err = _cli(["run", path, "--suite", "algebra", "--suite", "conformal",
                           "--points", "2", "--out", str(out_file)])
    assert code == 0
    assert out == ""
    data = json.loads(out_file.read_text())
    assert data["suites"] == ["algebra", "conformal"]
    assert data["summary"]["counts"]["fail"] == 0
    assert "0 fail" in err


def test_cli_run_fail_exit_code(tmp_path):
    path = _write(tmp_path, _manifest("conformal"))
    code, out, err = _cli(["run", path, "--suite", "conformal", "--tol-scale", "1e-30"])
    assert code == 1
    data = json.loads(out)
    assert data["summary"]["ok"] is False
    assert data["summary"]["failed"]
    assert "FAIL" in err


def test_cli_run_seed_and_points_override(tmp_path):
    path = _write(tmp_path, _manifest("flat"))
    code, out, _ = _cli(["run", path, "--suite", "algebra", "--points", "3", "--seed", "4"])
    assert code == 0
    data = json.loads(out)
    assert data["sampling"]["count"] == 3 and data["sampling"]["seed"] == 4


def test_cli_manifest_error_exit_code(tmp_path):
    path = _write(tmp_path, {"model": {"kind": "flat", "n": 2}, "sampling": {"count": -3}})
    code, out, err = _cli(["run", path])
    assert code == 2
    assert "$.sampling.count" in err
    code, _, err = _cli(["run", str(tmp_path / "missing.json")])
    assert code == 2


def test_cli_rejects_bad_arguments(tmp_path):
    path = _write(tmp_path, _manifest("flat"))
    for argv in (["run", path, "--suite", "nope"], ["run", path, "--points", "0"],
                 ["run", path, "--tol-scale", "-1"], ["catalog", "emit", "torus"]):
        with pytest.raises(SystemExit) as exc:
            _cli(argv)
        assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    env = dict(os.environ, PQKT_THREADS="2")
    res = subprocess.run([sys.executable, "-m", "pqkt", "catalog", "list"], capture_output=True,
                         text=True, env=env, check=False)
    assert res.returncode == 0
    assert "flat" in res.stdout
