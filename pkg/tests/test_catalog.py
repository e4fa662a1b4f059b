import numpy as np
import pytest

from pqkt.catalog import (
    PRESETS,
    conformal_model,
    default_factor,
    flat_model,
    frame_deformed_model,
    model_from_spec,
    model_to_spec,
    preset,
    sample_points,
)
from pqkt.connections import integrability_residual
from pqkt.errors import ModelConstructionError, NonPositiveFactorError
from pqkt.geometry import local_geometry
from pqkt.poly import PolyField
from pqkt.structures import verify_algebra


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_pass_algebra(name, points):
    S = preset(name, 2)
    for p in points:
        assert max(verify_algebra(S, p).values()) < 1e-9


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_spec_round_trip(name, points):
    S = preset(name, 2)
    S2 = model_from_spec(model_to_spec(S))
    for p in points[:3]:
        g1, J1 = S.values(p)
        g2, J2 = S2.values(p)
        np.testing.assert_allclose(g1, g2, atol=1e-14)
        np.testing.assert_allclose(J1, J2, atol=1e-14)


def test_flat_model_invariants(points):
    S = flat_model(2)
    g, J = S.values(points[0])
    np.testing.assert_array_equal(g, np.diag([1.0] * 4 + [-1.0] * 4))
    G = local_geometry(S, points[0], 3)
    assert np.abs(G.TH.value).max() == 0.0
    assert np.abs(G.R.value).max() == 0.0
    assert max(np.abs(d.value).max() for d in G.dF) == 0.0
    with pytest.raises(ModelConstructionError):
        flat_model(0)


def test_identity_frame_gives_flat_model(points):
    m = 8
    E = [[[{"exponents": [0] * m, "coeff": 1.0}] if i == j else [] for j in range(m)] for i in range(m)]
    S = frame_deformed_model(2, E)
    for p in points[:3]:
        np.testing.assert_allclose(S.values(p)[0], flat_model(2).values(p)[0], atol=1e-15)


def test_deformed_model_is_not_integrable(models, points):
    assert max(integrability_residual(models["frame-deformed"], p) for p in points[:5]) > 1e-3
    with pytest.raises(ModelConstructionError):
        frame_deformed_model(2, scale=0.5)


def test_conformal_model_factor_checks():
    m = 8
    with pytest.raises(NonPositiveFactorError):
        conformal_model(flat_model(2), PolyField.constant(m, -1.0))
    S = conformal_model(flat_model(2), default_factor(2))
    assert S.kind == "conformal"


def test_sample_points_deterministic_and_in_region():
    a = sample_points(2, count=10, seed=3)
    b = sample_points(2, count=10, seed=3)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (10, 8)
    assert np.abs(a).max() <= 0.5
    assert not np.array_equal(a, sample_points(2, count=10, seed=4))
