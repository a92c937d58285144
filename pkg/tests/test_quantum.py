import math

import numpy as np
import pytest

from qbody import (
    AngleSumViolation,
    AngleTuple,
    BadWeights,
    Correlation,
    DimensionTooLarge,
    GramSystem,
    InvalidModel,
    build_model,
    clifford_model,
    correlations_of,
    gram_vectors,
    mixture_model,
    selftest_residuals,
    solve_completion,
)
from qbody.quantum import (
    CLIFFORD_GENERATORS,
    QuantumModel,
    SINGLET_PSI,
    reflection_matrix,
)

from helpers import CHSH_ANGLES, CHSH_POINT, deep_interior_point, tetra_angles


def _scalar_model(values):
    mats = [np.array([[float(v)]]) for v in values]
    return QuantumModel(psi=np.array([1.0]), A1=mats[0], A2=mats[1],
                        B1=mats[2], B2=mats[3], d=1)


class TestBuildModel:
    def test_maximal_violation_model(self):
        c = correlations_of(build_model(CHSH_ANGLES))
        assert np.allclose(c.as_array(), CHSH_POINT.as_array(), atol=1e-12)

    def test_vertex_model(self):
        c = correlations_of(build_model(AngleTuple(0, 0, 0, 0)))
        assert np.allclose(c.as_array(), np.ones(4), atol=1e-12)

    def test_origin_model(self):
        half_pi = math.pi / 2
        c = correlations_of(
            build_model(AngleTuple(half_pi, half_pi, half_pi, half_pi)))
        assert np.abs(c.as_array()).max() < 1e-12

    def test_hypotheses_hold(self):
        rng = np.random.default_rng(103)
        for t in tetra_angles(rng, 50):
            build_model(t).validate()

    def test_cosine_identity_without_extremality(self):
        # the construction realizes the cosines for every valid tuple,
        # interior parameter values included
        rng = np.random.default_rng(107)
        for _ in range(200):
            a, b, g = rng.uniform(-3.0, 3.0, size=3)
            t = AngleTuple(a, b, g, -(a + b + g))
            c = correlations_of(build_model(t))
            expected = [math.cos(x) for x in t.as_tuple()]
            assert np.allclose(c.as_array(), expected, atol=1e-10)

    def test_singlet_reflection_identity(self):
        # <psi| M(u) x M(v) psi> = -cos(u - v)
        rng = np.random.default_rng(109)
        for _ in range(1000):
            u, v = rng.uniform(-6.0, 6.0, size=2)
            op = np.kron(reflection_matrix(u), reflection_matrix(v))
            value = SINGLET_PSI @ (op @ SINGLET_PSI)
            assert value == pytest.approx(-math.cos(u - v), abs=1e-12)


class TestCorrelationsOf:
    def test_scalar_identity_model(self):
        c = correlations_of(_scalar_model([1, 1, 1, 1]))
        assert c == Correlation(1, 1, 1, 1)

    def test_invalid_model_rejected(self):
        bad = QuantumModel(psi=np.array([1.0, 1.0]), A1=np.eye(2),
                           A2=np.eye(2), B1=np.eye(2), B2=np.eye(2), d=2)
        with pytest.raises(InvalidModel):
            correlations_of(bad)

    def test_commutator_violation_rejected(self):
        sx = np.array([[0.0, 1.0], [1.0, 0.0]])
        sz = np.array([[1.0, 0.0], [0.0, -1.0]])
        bad = QuantumModel(psi=np.array([1.0, 0.0]), A1=sx, A2=sz,
                           B1=sz, B2=sx, d=2)
        with pytest.raises(InvalidModel):
            correlations_of(bad)


class TestSelfTest:
    def test_extreme_point_relations_hold(self):
        report = selftest_residuals(build_model(CHSH_ANGLES))
        for value in (report.residual_bpsi, report.residual_squares,
                      report.residual_anticommutator, report.residual_tracial):
            assert value < 1e-9
        assert report.u_value == pytest.approx(0.0, abs=1e-12)

    def test_scalar_classical_model(self):
        report = selftest_residuals(_scalar_model([1, 1, 1, 1]))
        assert report.residual_bpsi < 1e-12
        assert report.residual_anticommutator < 1e-12
        assert report.u_value == 1.0

    def test_mixture_breaks_relations(self):
        m1 = build_model(CHSH_ANGLES)
        m2 = build_model(AngleTuple(0.9, 0.7, 0.5, -2.1))
        report = selftest_residuals(mixture_model([(0.5, m1), (0.5, m2)]))
        worst = max(report.residual_bpsi, report.residual_squares,
                    report.residual_anticommutator, report.residual_tracial)
        assert worst > 1e-2

    def test_json_round_trip(self):
        model = build_model(CHSH_ANGLES)
        clone = QuantumModel.from_json_dict(model.to_json_dict())
        assert correlations_of(clone) == correlations_of(model)


class TestCliffordModel:
    def test_generators_anticommute(self):
        for i, gi in enumerate(CLIFFORD_GENERATORS):
            assert np.array_equal(gi, gi.T)
            for j, gj in enumerate(CLIFFORD_GENERATORS):
                anti = gi @ gj + gj @ gi
                expected = 2.0 * np.eye(8) if i == j else np.zeros((8, 8))
                assert np.abs(anti - expected).max() < 1e-14

    def test_rank_two_realization(self):
        gs = gram_vectors(solve_completion(CHSH_POINT).witness)
        model = clifford_model(gs)
        c = correlations_of(model)
        assert np.allclose(c.as_array(), CHSH_POINT.as_array(), atol=1e-10)
        # independent check of the entangled-pair trace identity: with
        # A1 = X x I and B1 = I x Y, the expectation equals tr(X Y)/8
        X = model.A1[::8, ::8]
        Y = model.B1[:8, :8]
        psi = model.psi
        assert psi @ (model.A1 @ (model.B1 @ psi)) == pytest.approx(
            float(np.trace(X @ Y)) / 8, abs=1e-10)

    def test_aligned_vectors(self):
        e1 = np.array([1.0, 0.0])
        gs = GramSystem(a1=e1, a2=e1, b1=e1, b2=e1)
        c = correlations_of(clifford_model(gs))
        assert np.allclose(c.as_array(), np.ones(4), atol=1e-12)

    def test_orthonormal_vectors(self):
        basis = np.eye(4)
        gs = GramSystem(a1=basis[0], a2=basis[1], b1=basis[2], b2=basis[3])
        c = correlations_of(clifford_model(gs))
        assert np.abs(c.as_array()).max() < 1e-12

    def test_dimension_guard(self):
        basis = np.eye(5)
        gs = GramSystem(a1=basis[0], a2=basis[1], b1=basis[2], b2=basis[3])
        with pytest.raises(DimensionTooLarge):
            clifford_model(gs)

    def test_soundness_on_interior_completions(self):
        rng = np.random.default_rng(113)
        for _ in range(1000):
            c = deep_interior_point(rng)
            gs = gram_vectors(solve_completion(c).witness)
            realized = correlations_of(clifford_model(gs))
            assert np.abs(realized.as_array() - c.as_array()).max() < 1e-9


class TestMixtureModel:
    def test_antipodal_mixture_is_origin(self):
        t = CHSH_ANGLES
        flipped = AngleTuple(math.pi - t.alpha, math.pi - t.beta,
                             math.pi - t.gamma, math.pi - t.delta)
        mix = mixture_model([(0.5, build_model(t)), (0.5, build_model(flipped))])
        assert np.abs(correlations_of(mix).as_array()).max() < 1e-12

    def test_single_component(self):
        model = build_model(CHSH_ANGLES)
        mix = mixture_model([(1.0, model)])
        assert correlations_of(mix) == correlations_of(model)

    def test_convex_combination(self):
        m1 = build_model(CHSH_ANGLES)
        m2 = build_model(AngleTuple(0, 0, 0, 0))
        mix = mixture_model([(0.3, m1), (0.7, m2)])
        expected = 0.3 * correlations_of(m1).as_array() \
            + 0.7 * correlations_of(m2).as_array()
        assert np.allclose(correlations_of(mix).as_array(), expected,
                           atol=1e-10)

    def test_weight_validation(self):
        model = build_model(CHSH_ANGLES)
        with pytest.raises(BadWeights):
            mixture_model([(0.5, model), (0.6, model)])
        with pytest.raises(BadWeights):
            mixture_model([(-0.5, model), (1.5, model)])
        with pytest.raises(BadWeights):
            mixture_model([])


class TestAngleValidation:
    def test_bad_sum_rejected(self):
        good = AngleTuple(0.2, 0.3, 0.4, -0.9)
        assert good.canonical() == good
        with pytest.raises(AngleSumViolation):
            AngleTuple(0.2, 0.3, 0.4, 0.9)
