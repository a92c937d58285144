
import numpy as np
import pytest

from qbody import (
    AngleTuple,
    Correlation,
    Functional,
    NCYCLE_RESIDUAL_NAMES,
    Oracle,
    OutsideTetrahedron,
    TransformDirection,
    ZeroFunctional,
    dual_completion,
    dual_member,
    dual_transform,
    exposing_functional,
    extreme_from_angles,
    gauge,
    member,
    ncycle_residuals,
    phi_map,
    quantum_case,
    solve_completion,
    support,
)

from helpers import CHSH_ANGLES, CHSH_POINT, SQRT2, deep_interior_point, tetra_angles


class TestQuantumCase:
    def test_maximal_violation_direction(self):
        verdict = quantum_case(Functional(0.5, 0.5, 0.5, -0.5))
        assert verdict.quantum_case
        assert verdict.m_value == pytest.approx(4.0, abs=1e-12)
        assert verdict.phi_quantum == pytest.approx(SQRT2, abs=1e-12)

    def test_facet_functional_classical(self):
        verdict = quantum_case(Functional(1, 0, 0, 0))
        assert not verdict.quantum_case
        assert verdict.m_value is None

    def test_nonnegative_functional_classical(self):
        assert not quantum_case(Functional(1, 1, 1, 1)).quantum_case

    def test_zero_rejected(self):
        with pytest.raises(ZeroFunctional):
            quantum_case(Functional(0, 0, 0, 0))


class TestSupport:
    def test_tsirelson_value(self):
        assert support(Functional(0.5, 0.5, 0.5, -0.5)) \
            == pytest.approx(SQRT2, abs=1e-13)

    def test_facet_functional(self):
        assert support(Functional(1, 0, 0, 0)) == 1.0

    def test_classical_branch(self):
        assert support(Functional(1, 1, 1, 1)) == 4.0

    def test_zero(self):
        assert support(Functional(0, 0, 0, 0)) == 0.0

    def test_homogeneity(self):
        rng = np.random.default_rng(73)
        for _ in range(300):
            f = rng.uniform(-1, 1, size=4)
            lam = float(rng.uniform(0.1, 10.0))
            a = support(Functional.from_sequence(lam * f))
            b = lam * support(Functional.from_sequence(f))
            assert a == pytest.approx(b, rel=1e-12)

    def test_dominates_inner_products(self):
        rng = np.random.default_rng(79)
        for _ in range(200):
            f = Functional.from_sequence(rng.uniform(-1, 1, size=4))
            phi = support(f)
            for _ in range(50):
                c = deep_interior_point(rng, depth=1e-6)
                assert f.dot(c) <= phi + 1e-12

    def test_exposing_attains_support(self):
        rng = np.random.default_rng(83)
        for t in tetra_angles(rng, 100, k_min=0.2):
            f = exposing_functional(t)
            c = extreme_from_angles(t).c
            assert support(f) == pytest.approx(f.dot(c), abs=1e-9)


class TestGauge:
    def test_origin(self):
        assert gauge(Correlation(0, 0, 0, 0)) == 0.0

    def test_boundary_point(self):
        assert gauge(CHSH_POINT) == pytest.approx(1.0, abs=1e-12)

    def test_homogeneous_scaling(self):
        assert gauge(Correlation(1, 1, 1, -1)) == pytest.approx(SQRT2, abs=1e-12)

    def test_matches_membership_bisection(self):
        rng = np.random.default_rng(89)
        for _ in range(10000):
            raw = rng.uniform(-1.2, 1.2, size=4)
            scale = np.abs(raw).max()
            if scale < 1e-3:
                continue
            c = Correlation.from_sequence(raw)
            value = gauge(c)
            lo, hi = 0.0, 1.0 / scale + 1e-9
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                inside = member(
                    Correlation.from_sequence(mid * raw), Oracle.SEMIALG).inside
                lo, hi = (mid, hi) if inside else (lo, mid)
            bisected = 1.0 / lo
            assert value == pytest.approx(bisected, abs=1e-7, rel=1e-7)
            assert member(c, Oracle.SEMIALG).inside == (value <= 1.0) \
                or abs(value - 1.0) < 1e-9


class TestDualMember:
    def test_boundary_functional(self):
        f = Functional(*(v / (2 * SQRT2) for v in (1, 1, 1, -1)))
        verdict = dual_member(f)
        assert abs(verdict.margin) < 1e-12

    def test_facet_vertex(self):
        verdict = dual_member(Functional(1, 0, 0, 0))
        assert verdict.inside and abs(verdict.margin) < 1e-12

    def test_outside(self):
        assert not dual_member(Functional(1, 1, 1, 1)).inside


class TestDualCompletion:
    def test_boundary_functional_witness(self):
        f = Functional(*(v / (2 * SQRT2) for v in (1, 1, 1, -1)))
        result = dual_completion(f)
        assert result.feasible
        assert result.witness.p1 == pytest.approx(0.5, abs=1e-9)
        assert result.witness.p3 == pytest.approx(0.5, abs=1e-9)
        eigs = np.linalg.eigvalsh(result.witness.matrix())
        assert np.allclose(eigs, [0, 0, 1, 1], atol=1e-9)

    def test_zero_functional(self):
        result = dual_completion(Functional(0, 0, 0, 0))
        assert result.feasible
        assert np.allclose(result.witness.matrix(), 0.5 * np.eye(4), atol=1e-9)

    def test_infeasible_outside_polar(self):
        assert not dual_completion(Functional(1, 1, 1, 1)).feasible

    def test_agrees_with_dual_membership(self):
        rng = np.random.default_rng(97)
        for _ in range(60):
            f = Functional.from_sequence(rng.uniform(-0.6, 0.6, size=4))
            s = support(f)
            if abs(s - 1.0) < 1e-6:
                continue
            assert dual_completion(f).feasible == (s <= 1.0)

    def test_pairing_identity(self):
        # tr(C F) = 2 - 2 f.c for any primal and dual certificates
        rng = np.random.default_rng(101)
        for _ in range(100):
            c = deep_interior_point(rng)
            f_raw = dual_transform(
                deep_interior_point(rng).as_tuple(), TransformDirection.TO_DUAL)
            f = Functional.from_sequence(f_raw)
            C = solve_completion(c).witness.matrix()
            result = dual_completion(f)
            assert result.feasible
            F = result.witness.matrix()
            assert float(np.trace(C @ F)) == pytest.approx(
                2.0 - 2.0 * f.dot(c), abs=1e-10)


class TestPhiMap:
    def test_fixed_point(self):
        image = phi_map(CHSH_ANGLES)
        assert max(abs(a - b) for a, b in
                   zip(image.as_tuple(), CHSH_ANGLES.as_tuple())) < 1e-10

    def test_involution_example(self):
        t = AngleTuple(0.3, 0.7, 0.5, -1.5)
        t2 = phi_map(phi_map(t))
        assert max(abs(a - b) for a, b in
                   zip(t.as_tuple(), t2.as_tuple())) < 1e-8

    def test_face_collapses_toward_vertex(self):
        # as alpha -> 0 the image concentrates near a vertex of the closure
        spreads = []
        for alpha in (1e-2, 1e-3, 1e-4):
            image = phi_map(AngleTuple(alpha, 1.0, 1.0, -(alpha + 2.0)))
            spreads.append(max(abs(v) for v in image.as_tuple()))
        assert spreads[0] > spreads[1] > spreads[2]
        assert spreads[2] < 0.05

    def test_rejects_outside_domain(self):
        with pytest.raises(OutsideTetrahedron):
            phi_map(AngleTuple(2.0, 2.0, 1.0, -5.0))


class TestNcycleResiduals:
    def test_layout(self):
        assert len(NCYCLE_RESIDUAL_NAMES) == 20

    def test_incident_extreme_pair(self):
        c = extreme_from_angles(CHSH_ANGLES).c
        f = exposing_functional(CHSH_ANGLES)
        residuals = ncycle_residuals(c, f)
        assert len(residuals) == 20
        assert max(abs(r) for r in residuals) < 1e-10

    def test_vertex_facet_pair_incidence_only(self):
        residuals = ncycle_residuals(Correlation(1, 1, 1, 1),
                                     Functional(1, 0, 0, 0))
        assert residuals[0] == 0.0

    def test_non_incident_pair(self):
        residuals = ncycle_residuals(Correlation(0, 0, 0, 0),
                                     Functional(0, 0, 0, 0))
        assert residuals[0] == -1.0


class TestCaseSplitEdges:
    def test_no_spurious_disagreement_near_case_surfaces(self):
        # fuzz across the p = 0 and m = 2 surfaces; inside the margin band
        # the criteria may differ but must never raise
        rng = np.random.default_rng(137)
        for _ in range(2000):
            f = rng.uniform(0.2, 1.0, size=4)
            f[3] = -1.0 / 3.0 + rng.uniform(-1e-10, 1e-10)  # near m = 2
            quantum_case(Functional.from_sequence(f * rng.uniform(0.5, 2.0)))
        for _ in range(2000):
            f = rng.uniform(-1.0, 1.0, size=4)
            f[int(rng.integers(0, 4))] = rng.uniform(-1e-10, 1e-10)  # near p = 0
            if np.abs(f).max() == 0.0:
                continue
            quantum_case(Functional.from_sequence(f))
