import numpy as np
import pytest

from conftest import N, PQKT_MODELS
from pqkt.catalog import flat_model, sample_points
from pqkt.connections import levi_civita, one_form_system, pqkt_connection
from pqkt.curvature import (
    curvature,
    curvature_bundle,
    informational,
    omega_jets,
    parallel_torsion_checks,
    verify_curvature_identities,
)
from pqkt.errors import NoPQKTStructureError, UnsupportedDimensionError, UnsupportedOrderError
from pqkt.suites import CURVATURE_IDS, REGISTRY
from pqkt.tensor import standard_structure


def _max(x):
    return float(np.max(np.abs(x), initial=0.0))


def test_flat_curvature_vanishes(models, few_points, geoms):
    for p in few_points:
        G, V, cd, aux = curvature_bundle(models["flat"], p, geoms("flat", p))
        assert _max(cd.R) == 0.0 and _max(cd.Rg) == 0.0
        assert all(_max(r) == 0.0 for r in cd.rho)
        assert cd.scal == 0.0 and cd.scal_g == 0.0
        res = verify_curvature_identities(models["flat"], p, geoms("flat", p))
        assert max(res.values()) < 1e-12


def test_curvature_antisymmetric_in_first_pair(models, few_points, geoms):
    for name in ("conformal", "sp1-rotation"):
        for p in few_points:
            G, V, cd, _ = curvature_bundle(models[name], p, geoms(name, p))
            for R in (cd.R, cd.Rg):
                assert _max(R + R.transpose(1, 0, 2, 3)) < 1e-12
            # Levi-Civita: skew in the last pair and pair symmetric
            assert _max(cd.Rg + cd.Rg.transpose(0, 1, 3, 2)) < 1e-12
            assert _max(cd.Rg - cd.Rg.transpose(2, 3, 0, 1)) < 1e-12


def test_curvature_needs_first_derivatives(models):
    conn = levi_civita(models["flat"], np.zeros(4 * N), order=0)
    with pytest.raises(UnsupportedOrderError):
        curvature(conn)


def test_conformal_scalar_curvature_closed_form(models, points, geoms):
    # f g0 with g0 flat and f = 1 + x_0/10: writing f = exp(2 phi),
    # Scal = exp(-2 phi) (-2 (m-1) Lap phi - (m-2)(m-1) |d phi|^2)
    g0, _ = standard_structure(N)
    g00 = np.linalg.inv(g0)[0, 0]
    m = 4 * N
    for p in points[:8]:
        f = 1 + 0.1 * p[0]
        lap_phi = -0.5 * g00 * 0.01 / f ** 2
        dphi2 = 0.25 * g00 * 0.01 / f ** 2
        ref = (-2 * (m - 1) * lap_phi - (m - 2) * (m - 1) * dphi2) / f
        _, _, cd, _ = curvature_bundle(models["conformal"], p, geoms("conformal", p))
        assert abs(cd.scal_g - ref) < 1e-12


def test_levi_civita_curvature_from_finite_differences(models):
    # R(X, Y)Z from Gamma differentiated numerically
    S = models["sp1-rotation"]
    p = sample_points(N, count=1, seed=7)[0]
    Rv = curvature(levi_civita(S, p, order=1))
    gam = levi_civita(S, p, order=0).gamma
    h = 1e-5
    m = S.dim
    dG = np.zeros((m, m, m, m))
    for l in range(m):
        e = np.zeros(m)
        e[l] = h
        dG[..., l] = (levi_civita(S, p + e, order=0).gamma - levi_civita(S, p - e, order=0).gamma) / (2 * h)
    # Gamma[x, y, a] = Gamma^a_{xy}; (R(X,Y)Z)^a = d_X Gamma^a_{YZ} - d_Y Gamma^a_{XZ}
    #   + Gamma^b_{YZ} Gamma^a_{Xb} - Gamma^b_{XZ} Gamma^a_{Yb}
    ref = (np.einsum("yzax->xyza", dG) - np.einsum("xzay->xyza", dG)
           + np.einsum("yzb,xba->xyza", gam, gam) - np.einsum("xzb,yba->xyza", gam, gam))
    np.testing.assert_allclose(Rv, ref, rtol=0, atol=1e-7)


@pytest.mark.parametrize("name", PQKT_MODELS)
def test_identities_within_registry_tolerance(models, few_points, geoms, name):
    for p in few_points[:2]:
        res = verify_curvature_identities(models[name], p, geoms(name, p))
        assert set(res) == set(CURVATURE_IDS)
        for key, val in res.items():
            assert val < REGISTRY[key].tol, (name, key, val)


def test_sp1_rotation_curvature_is_nontrivial(models, few_points, geoms):
    p = few_points[0]
    _, _, cd, aux = curvature_bundle(models["sp1-rotation"], p, geoms("sp1-rotation", p))
    assert _max(cd.R) > 1e-3
    assert max(_max(r) for r in cd.rho) > 1e-3
    assert _max(aux.dT) > 1e-3


def test_omega_closed_form_matches_extraction(models, few_points, geoms):
    for name in ("sp1-rotation", "conformal"):
        S = models[name]
        for p in few_points:
            G = geoms(name, p)
            conn, _ = pqkt_connection(S, p, G)
            extracted = one_form_system(S, conn, p, G).omega
            closed = omega_jets(G)
            for a in range(3):
                np.testing.assert_allclose(closed[a].value, extracted[a], rtol=0, atol=1e-9)


def test_informational_values_are_finite(models, few_points, geoms):
    for name in PQKT_MODELS:
        info = informational(models[name], few_points[0], geoms(name, few_points[0]))
        assert set(info) == {"scal.alpha.pairing", "scal.P", "scal.g.P"}
        assert all(np.isfinite(v) for v in info.values())


def test_parallel_torsion_flat(models, few_points, geoms):
    for p in few_points:
        rep = parallel_torsion_checks(models["flat"], p, geoms("flat", p))
        assert rep.applicable and rep.dT_22
        assert rep.lam == 0.0
        assert max(rep.residuals.values()) == 0.0


def test_parallel_torsion_not_applicable_with_varying_torsion(models, few_points, geoms):
    for name in ("conformal", "sp1-rotation"):
        rep = parallel_torsion_checks(models[name], few_points[0], geoms(name, few_points[0]))
        assert not rep.applicable
        assert rep.nabla_T > 1e-6
        assert rep.residuals == {}


def test_curvature_requires_pqkt(models):
    p = sample_points(N, count=1)[0]
    with pytest.raises(NoPQKTStructureError):
        verify_curvature_identities(models["frame-deformed"], p)
    with pytest.raises(UnsupportedDimensionError):
        verify_curvature_identities(flat_model(1), np.zeros(4))
