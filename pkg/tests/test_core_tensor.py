import numpy as np
import pytest

from pqkt import _kernels
from pqkt.connections import pqkt_connection
from pqkt.errors import DegenerateMetricError, NonSkewError, ShapeError, SlotMismatchError, UnsupportedOrderError
from pqkt.jet import Jet, invert_jet, jeinsum, jet_product
from pqkt.poly import PolyField, PolyTensor, eval_jet
from pqkt.tensor import (
    EPS,
    FrameData,
    adapted_frame,
    check_3form_type,
    contract,
    project_2form_type,
    split_3form,
    standard_structure,
    wedge12,
)


def x(dim, i):
    return PolyField.variable(dim, i)


# ---------------------------------------------------------------------------
# eval_jet
# ---------------------------------------------------------------------------


def test_eval_jet_square():
    f = x(4, 0) * x(4, 0)
    j = eval_jet(f, [2.0, 0, 0, 0], 1)
    assert float(j.value) == 4.0
    np.testing.assert_array_equal(j.data[1], [4.0, 0, 0, 0])


def test_eval_jet_constant_has_zero_derivatives():
    j = eval_jet(PolyField.constant(4, 3.5), np.ones(4), 3)
    assert float(j.value) == 3.5
    for d in j.data[1:]:
        assert not np.any(d)


def test_eval_jet_mixed_second_derivative_vs_finite_differences():
    f = x(4, 0) * x(4, 1)
    p = np.array([1.0, 1.0, 0.0, 0.0])
    j = eval_jet(f, p, 2)
    assert j.data[2][0, 1] == 1.0 == j.data[2][1, 0]
    h = 1e-4
    e0, e1 = np.eye(4)[0], np.eye(4)[1]
    fd = (f(p + h * e0 + h * e1) - f(p + h * e0 - h * e1) - f(p - h * e0 + h * e1)
          + f(p - h * e0 - h * e1)) / (4 * h * h)
    assert abs(fd - j.data[2][0, 1]) < 1e-6


def test_eval_jet_errors():
    f = x(4, 0)
    with pytest.raises(UnsupportedOrderError):
        eval_jet(f, np.zeros(4), 4)
    with pytest.raises(ShapeError):
        eval_jet(f, np.zeros(3), 1)


def test_polyfield_stores_no_zero_coefficients():
    f = x(3, 0) - x(3, 0) + 2.0
    assert list(f.terms.values()) == [2.0]
    assert PolyField.from_list(3, f.to_list()) == f
    with pytest.raises(ShapeError):
        PolyField(3, {(1, 0): 1.0})


def test_polytensor_matches_fields():
    m = 4
    fields = [[x(m, 0) * x(m, 1), PolyField.constant(m, 2.0)], [x(m, 2), x(m, 3) * x(m, 3)]]
    P = PolyTensor.from_fields(fields)
    p = np.array([0.3, -0.2, 0.5, 0.7])
    J = eval_jet(P, p, 2)
    for i in range(2):
        for k in range(2):
            ref = eval_jet(fields[i][k], p, 2)
            for a, b in zip(J[i, k].data, ref.data):
                np.testing.assert_allclose(a, b, atol=1e-15)


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------


def test_invert_identity():
    I = Jet.constant(np.eye(4), 4, 2)
    inv = invert_jet(I)
    np.testing.assert_array_equal(inv.value, np.eye(4))
    assert all(not np.any(d) for d in inv.data[1:])


def test_invert_diag():
    m = 2
    M = PolyTensor.from_fields([[1.0 + x(m, 0), PolyField(m)], [PolyField(m), PolyField.constant(m, 1.0)]])
    inv = invert_jet(eval_jet(M, np.zeros(m), 1))
    np.testing.assert_allclose(inv.data[1][:, :, 0], np.diag([-1.0, 0.0]))


def _random_poly_matrix(m, seed):
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(m):
        row = []
        for k in range(m):
            f = PolyField.constant(m, (1.0 if i == k else 0.0) + 0.1 * rng.normal())
            for _ in range(2):
                a, b = rng.integers(0, m, size=2)
                f = f + 0.05 * rng.normal() * x(m, a) * x(m, b)
            row.append(f)
        rows.append(row)
    return PolyTensor.from_fields(rows)


def test_invert_random_matrix_multiply_back():
    M = _random_poly_matrix(8, 1)
    p = np.random.default_rng(2).uniform(-0.5, 0.5, 8)
    Mj = eval_jet(M, p, 3)
    prod = jet_product(Mj, invert_jet(Mj))
    np.testing.assert_allclose(prod.value, np.eye(8), atol=1e-10)
    for d in prod.data[1:]:
        assert np.abs(d).max() < 1e-10


def test_invert_singular_raises():
    with pytest.raises(DegenerateMetricError):
        invert_jet(Jet.constant(np.zeros((3, 3)), 3, 1))


def test_jet_derivatives_symmetric():
    M = _random_poly_matrix(4, 5)
    j = invert_jet(eval_jet(M, np.full(4, 0.2), 3))
    np.testing.assert_allclose(j.data[2], np.swapaxes(j.data[2], -1, -2), atol=1e-13)
    d3 = j.data[3]
    for perm in [(0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1)]:
        np.testing.assert_allclose(np.transpose(d3, (0, 1) + tuple(2 + q for q in perm)), d3, atol=1e-13)


def test_jeinsum_rejects_mismatched_operands():
    a = Jet.constant(np.eye(2), 2, 1)
    with pytest.raises(ShapeError):
        jeinsum("ab,bc->ac", a)


# ---------------------------------------------------------------------------
# contractions and frames
# ---------------------------------------------------------------------------


def test_contract_metric_with_itself(models, points):
    # sum_i eps_i g(e_i, e_i) = sum_i eps_i^2 = 4n, in any adapted frame and through g^-1
    for name in ("flat", "conformal", "frame-deformed"):
        g, J = models[name].values(points[2])
        frame = adapted_frame(g, J)
        assert contract(g, 0, 1, frame=frame) == pytest.approx(8.0, abs=1e-12)
        assert contract(g, 0, 1, ginv=np.linalg.inv(g)) == pytest.approx(8.0, abs=1e-12)


def test_contract_errors():
    with pytest.raises(SlotMismatchError):
        contract(np.zeros((4, 4)), 0, 0, signs=np.ones(4))
    with pytest.raises(SlotMismatchError):
        contract(np.zeros((4, 4)), 0, 1)


def test_trace_of_J1_vanishes(models, points):
    for name, S in models.items():
        for p in points[:5]:
            _, J = S.values(p)
            assert abs(np.trace(J[0])) < 1e-12
            assert abs(np.trace(J[1])) < 1e-12


def test_t_alpha_matches_loop_summation(models, points, geoms):
    S = models["conformal"]
    for p in points[:3]:
        G, V = geoms.view("conformal", p)
        _, td = pqkt_connection(S, p, G)
        Tf = V.cov(td.T3)
        for a in range(3):
            loop = 0.5 * EPS[a] * _kernels.frame_trace3(Tf, V.s, V.J[a], backend="numpy")
            np.testing.assert_allclose(V.frame.covariant(td.t_alpha[a]), loop, atol=1e-14)


def test_flat_frame_is_reordered_standard_basis():
    g, J = standard_structure(2)
    frame = adapted_frame(g, J)
    E = frame.vectors
    assert np.all(np.isin(np.round(E, 12), (-1.0, 0.0, 1.0)))
    assert np.all(np.abs(E).sum(axis=0) == 1)
    np.testing.assert_array_equal(frame.signs, [1, 1, 1, 1, -1, -1, -1, -1])


@pytest.mark.parametrize("name", ["conformal", "frame-deformed", "sp1-rotation", "diffeo-pushforward"])
def test_adapted_frame_gram_and_relations(models, points, name):
    S = models[name]
    n = S.n
    for p in points[:5]:
        g, J = S.values(p)
        fr = adapted_frame(g, J)
        np.testing.assert_allclose(fr.gram(g), np.diag(fr.signs), atol=1e-10)
        E = fr.vectors
        for i in range(n):
            np.testing.assert_allclose(E[:, n + i], J[2] @ E[:, i], atol=1e-10)
            np.testing.assert_allclose(E[:, 2 * n + i], J[0] @ E[:, i], atol=1e-10)
            np.testing.assert_allclose(E[:, 3 * n + i], J[1] @ E[:, i], atol=1e-10)


def test_traces_are_frame_independent(models, points):
    S = models["conformal"]
    p = points[0]
    g, J = S.values(p)
    rng = np.random.default_rng(9)
    t2 = rng.normal(size=(8, 8))
    t4 = rng.normal(size=(8, 8, 8, 8))
    A = np.eye(8) + 0.3 * rng.normal(size=(8, 8))
    Ainv = np.linalg.inv(A)
    # a second adapted frame: build one for the pulled-back data, then push it forward
    fr1 = adapted_frame(g, J)
    fr_b = adapted_frame(A.T @ g @ A, [Ainv @ j @ A for j in J])
    fr2 = FrameData(A @ fr_b.vectors, fr_b.signs)
    assert np.abs(fr1.vectors - fr2.vectors).max() > 1e-3
    np.testing.assert_allclose(fr2.gram(g), np.diag(fr2.signs), atol=1e-10)
    for fr in (fr1, fr2):
        assert contract(t2, 0, 1, frame=fr) == pytest.approx(contract(t2, 0, 1, ginv=np.linalg.inv(g)), abs=1e-9)
    double = [contract(contract(t4, 0, 2, frame=fr), 0, 1, signs=fr.signs) for fr in (fr1, fr2)]
    assert double[0] == pytest.approx(double[1], abs=1e-9)


# ---------------------------------------------------------------------------
# type projections
# ---------------------------------------------------------------------------


def test_kahler_form_is_its_own_11_part(models, points):
    S = models["conformal"]
    g, J = S.values(points[0])
    for a in range(3):
        F = g @ J[a]
        np.testing.assert_allclose(project_2form_type(F, J[a], EPS[a], "(1,1)"), F, atol=1e-14)


def test_vector_valued_parts_partition(models, points):
    S = models["frame-deformed"]
    g, J = S.values(points[1])
    P = np.random.default_rng(4).normal(size=(8, 8, 8))
    P = P - P.transpose(1, 0, 2)
    for a in range(3):
        parts = [project_2form_type(P, J[a], EPS[a], k) for k in ("1,1", "2,0", "0,2")]
        np.testing.assert_allclose(sum(parts), P, atol=1e-12)


def test_project_rejects_non_skew():
    with pytest.raises(NonSkewError):
        project_2form_type(np.ones((4, 4)), np.eye(4), 1, "1,1")


def test_torsion_02_part_vanishes_on_conformal(models, points, geoms):
    S = models["conformal"]
    for p in points[:3]:
        G, V = geoms.view("conformal", p)
        _, td = pqkt_connection(S, p, G)
        J = [j.value for j in G.J]
        for a in range(3):
            T02 = project_2form_type(td.T_vec, J[a], EPS[a], "0,2")
            assert np.abs(V.vec2(T02)).max() < 1e-12


def test_check_3form_type_examples(models, points):
    g, J = models["flat"].values(points[0])
    assert check_3form_type(np.zeros((8, 8, 8)), J[0], EPS[0]) == 0.0
    df = np.random.default_rng(0).normal(size=8)
    frame = adapted_frame(g, J)
    for a in range(3):
        psi = wedge12(-df @ J[a], g @ J[a])
        assert check_3form_type(psi, J[a], EPS[a], frame) < 1e-10
    rng = np.random.default_rng(1)
    R = rng.normal(size=(8, 8, 8))
    psi = sum(np.transpose(R, pm) * s for pm, s in [((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                                                    ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1)])
    assert check_3form_type(psi, J[0], EPS[0], frame) > 1e-2
    plus, minus = split_3form(psi, J[0], EPS[0])
    assert check_3form_type(plus, J[0], EPS[0], frame) < 1e-10
    with pytest.raises(NonSkewError):
        check_3form_type(R, J[0], EPS[0])
