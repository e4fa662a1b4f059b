import numpy as np
import pytest

from conftest import N, PQKT_MODELS
from pqkt.catalog import flat_model, sample_points
from pqkt.errors import NoPQKTStructureError, UnsupportedDimensionError
from pqkt.forms import (
    FAIL_TOL,
    PASS_TOL,
    Predicate,
    classification_residuals,
    classify,
    dF_split,
    lee_data,
    lee_identities,
    tier,
)
from pqkt.tensor import CYCLIC, EPS, check_3form_type, split_3form, standard_structure


def _max(x):
    return float(np.max(np.abs(x), initial=0.0))


def _jf(J, v):
    return -np.asarray(v) @ J


def _wedge(a, F):
    return (np.einsum("x,yz->xyz", a, F) + np.einsum("y,zx->xyz", a, F)
            + np.einsum("z,xy->xyz", a, F))


def _log_grad(p):
    u = np.zeros(4 * N)
    u[0] = 0.1 / (1 + 0.1 * p[0])
    return u


def test_lee_data_flat_is_zero(models, few_points):
    for p in few_points:
        L = lee_data(models["flat"], p)
        assert all(_max(t) == 0.0 for t in L.theta)
        assert all(_max(t) == 0.0 for row in L.theta_cross for t in row)
        assert all(_max(x) == 0.0 for x in L.dF_plus + L.dF_minus)


def test_dF_of_conformal_model(models, points, geoms):
    # d(f F0) = df ^ F0 for the constant forms F0 of the flat structure
    g0, J0 = standard_structure(N)
    df = np.zeros(4 * N)
    df[0] = 0.1
    for p in points:
        G, V = geoms.view("conformal", p)
        for a, (plus, minus) in enumerate(dF_split(models["conformal"], p, G)):
            assert _max(V.cov(plus + minus - _wedge(df, g0 @ J0[a]))) < 1e-12


def test_lee_forms_of_conformal_model(models, points, geoms):
    _, J0 = standard_structure(N)
    for p in points:
        G, V = geoms.view("conformal", p)
        L = lee_data(models["conformal"], p, G)
        u = _log_grad(p)
        cov = V.frame.covariant
        for a, b, c in CYCLIC:
            assert _max(cov(L.theta[a] - (2 * N - 1) * u)) < 1e-10
            assert _max(cov(L.theta_cross[a][c] - EPS[c] * _jf(J0[b], u))) < 1e-10
        assert L.diagonal_residual() < 1e-10


@pytest.mark.parametrize("name", PQKT_MODELS + ("frame-deformed",))
def test_dF_split_types(models, few_points, geoms, name):
    for p in few_points:
        G = geoms(name, p)
        J = [j.value for j in G.J]
        for a, (plus, minus) in enumerate(dF_split(models[name], p, G)):
            assert check_3form_type(plus, J[a], EPS[a], G.frame) < 1e-10
            plus_of_minus, minus_of_minus = split_3form(minus, J[a], EPS[a])
            assert _max(plus_of_minus) < 1e-12
            np.testing.assert_allclose(minus_of_minus, minus, rtol=0, atol=1e-12)


@pytest.mark.parametrize("name", PQKT_MODELS + ("frame-deformed",))
def test_lee_identities(models, few_points, geoms, name):
    for p in few_points:
        res = lee_identities(models[name], p, geoms(name, p))
        assert res["lee.diagonal"] < 1e-9
        assert res["dF.partition"] < 1e-12
        assert res["dF.plus-type"] < 1e-9


def test_deformed_model_has_nonzero_minus_part(models, few_points, geoms):
    worst = 0.0
    for p in few_points:
        worst = max(worst, max(_max(m) for _, m in dF_split(models["frame-deformed"], p,
                                                           geoms("frame-deformed", p))))
    assert worst > 1e-3


def test_tier():
    assert tier(0.0) is True
    assert tier(PASS_TOL / 2) is True
    assert tier(FAIL_TOL * 2) is False
    assert tier(np.sqrt(PASS_TOL * FAIL_TOL)) is None
    assert Predicate("x", 1.0, False).status == "false"
    assert Predicate("x", 1e-7, None).status == "indeterminate"


def test_classify_flat(models, few_points, geoms):
    for p in few_points:
        preds = classify(models["flat"], p, geoms("flat", p))
        assert all(pr.flag is True for pr in preds.values())
        assert all(pr.residual == 0.0 for pr in preds.values())


def test_classify_conformal(models, points, geoms):
    # conformal to a flat hyper-paraKähler structure: omega != 0 so not HPKT,
    # but locally conformally HPK and integrable
    for p in points:
        preds = classify(models["conformal"], p, geoms("conformal", p))
        assert preds["HPKT"].flag is False
        for key in ("l.c.PQK", "l.c.HPKT", "l.c.HPK", "integrable"):
            assert preds[key].flag is True, key
        assert preds["l.c.HPK"].residual < 1e-9


def test_classify_sp1_rotation(models, few_points, geoms):
    for p in few_points:
        preds = classify(models["sp1-rotation"], p, geoms("sp1-rotation", p))
        assert preds["HPKT"].flag is False
        assert preds["integrable"].flag is False


def test_classify_no_indeterminate(models, few_points, geoms):
    for name in PQKT_MODELS:
        for p in few_points:
            preds = classify(models[name], p, geoms(name, p))
            assert all(pr.flag is not None for pr in preds.values())


def test_classify_rejects_non_pqkt(models):
    p = sample_points(N, count=1)[0]
    with pytest.raises(NoPQKTStructureError):
        classify(models["frame-deformed"], p)


def test_classification_needs_n2():
    with pytest.raises(UnsupportedDimensionError):
        classification_residuals(flat_model(1), np.zeros(4))
