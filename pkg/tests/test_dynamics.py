"""Rotation machinery, reflect bounding, and environment updates."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmpbench import (
    ScenarioConfig,
    ScenarioExhausted,
    advance_environment,
    givens_matrix,
    gram_schmidt,
    init_landscape,
    initial_rotation,
    orthogonality_error,
    plane_pairs,
    reflect,
    update_component,
    update_rotation,
)


def in_ranges(comp, cfg):
    lb, ub = cfg.search_range
    checks = [
        ((comp.center >= lb) & (comp.center <= ub)).all(),
        cfg.height_range[0] <= comp.height <= cfg.height_range[1],
        ((comp.widths >= cfg.width_range[0]) & (comp.widths <= cfg.width_range[1])).all(),
        cfg.angle_range[0] <= comp.angle <= cfg.angle_range[1],
        cfg.tau_range[0] <= comp.tau <= cfg.tau_range[1],
        ((comp.eta >= cfg.eta_range[0]) & (comp.eta <= cfg.eta_range[1])).all(),
    ]
    return all(checks)


class TestGivens:
    def test_zero_angle_is_identity(self):
        np.testing.assert_array_equal(givens_matrix(2, (0, 1), 0.0), np.eye(2))

    def test_quarter_turn_in_2d(self):
        g = givens_matrix(2, (0, 1), math.pi / 2)
        np.testing.assert_allclose(g, [[0.0, -1.0], [1.0, 0.0]], atol=1e-15)

    def test_half_turn_in_first_third_plane(self):
        g = givens_matrix(3, (0, 2), math.pi)
        np.testing.assert_allclose(g, np.diag([-1.0, 1.0, -1.0]), atol=1e-15)

    @given(d=st.integers(2, 8), theta=st.floats(-10, 10))
    def test_orthogonal_with_unit_determinant(self, d, theta):
        g = givens_matrix(d, (0, d - 1), theta)
        assert orthogonality_error(g) <= 1e-9
        assert abs(np.linalg.det(g) - 1.0) <= 1e-6

    def test_invalid_pair_rejected(self):
        for pair in [(1, 1), (2, 1), (-1, 0), (0, 3)]:
            with pytest.raises(ValueError):
                givens_matrix(3, pair, 0.5)

    def test_plane_count(self):
        for d in range(1, 9):
            pairs = plane_pairs(d)
            assert len(pairs) == d * (d - 1) // 2
            assert len(set(pairs)) == len(pairs)
            assert all(0 <= p < q < d for p, q in pairs)


class TestGramSchmidt:
    @given(d=st.integers(1, 12), seed=st.integers(0, 10_000))
    @settings(max_examples=50)
    def test_orthonormalizes(self, d, seed):
        a = np.random.default_rng(seed).standard_normal((d, d))
        q = gram_schmidt(a)
        assert orthogonality_error(q) <= 1e-9
        assert abs(abs(np.linalg.det(q)) - 1.0) <= 1e-6

    def test_degenerate_pivot_rejected(self):
        a = np.ones((3, 3))
        with pytest.raises(ValueError, match="pivot"):
            gram_schmidt(a)

    def test_identity_is_fixed(self):
        np.testing.assert_array_equal(gram_schmidt(np.eye(4)), np.eye(4))


class TestInitialRotation:
    def test_one_dimensional(self):
        r = initial_rotation(1, np.random.default_rng(0))
        assert r.shape == (1, 1)
        assert abs(abs(r[0, 0]) - 1.0) < 1e-12

    def test_disabled_gives_identity(self):
        rng = np.random.default_rng(0)
        np.testing.assert_array_equal(initial_rotation(5, rng, rotation_enabled=False), np.eye(5))

    @given(d=st.integers(1, 10), seed=st.integers(0, 10_000))
    @settings(max_examples=50)
    def test_orthogonal(self, d, seed):
        r = initial_rotation(d, np.random.default_rng(seed))
        assert orthogonality_error(r) <= 1e-9


class TestUpdateRotation:
    def test_identity_at_zero_angle(self):
        out = update_rotation(np.eye(4), 0.0, np.random.default_rng(0))
        np.testing.assert_allclose(out, np.eye(4), atol=1e-15)

    def test_single_plane_2d(self):
        theta = math.pi / 9
        out = update_rotation(np.eye(2), theta, np.random.default_rng(0))
        expect = [[math.cos(theta), -math.sin(theta)],
                  [math.sin(theta), math.cos(theta)]]
        np.testing.assert_allclose(out, expect, atol=1e-15)

    def test_matches_explicit_matrix_product(self):
        # the two-row update must equal building each plane matrix and
        # multiplying in the same permuted order
        d, theta = 5, 0.37
        r0 = initial_rotation(d, np.random.default_rng(5))
        seed = 99
        out = update_rotation(r0, theta, np.random.default_rng(seed))
        pairs = plane_pairs(d)
        order = np.random.default_rng(seed).permutation(len(pairs))
        product = np.eye(d)
        for idx in order:
            product = product @ givens_matrix(d, pairs[idx], theta)
        np.testing.assert_allclose(out, product @ r0, atol=1e-12)

    @given(d=st.integers(1, 8), seed=st.integers(0, 1000), theta=st.floats(-math.pi, math.pi))
    @settings(max_examples=50)
    def test_stays_orthogonal(self, d, seed, theta):
        rng = np.random.default_rng(seed)
        r = initial_rotation(d, rng)
        out = update_rotation(r, theta, rng)
        assert orthogonality_error(out) <= 1e-9
        assert abs(abs(np.linalg.det(out)) - 1.0) <= 1e-6

    def test_deterministic(self):
        r = initial_rotation(6, np.random.default_rng(1))
        a = update_rotation(r, 0.3, np.random.default_rng(7))
        b = update_rotation(r, 0.3, np.random.default_rng(7))
        np.testing.assert_array_equal(a, b)


class TestReflect:
    def test_in_range_passes_through(self):
        assert reflect(5.0, 2.0, 0.0, 10.0) == 7.0

    def test_upper_reflection(self):
        assert reflect(8.0, 5.0, 0.0, 10.0) == 7.0

    def test_lower_reflection(self):
        assert reflect(2.0, -5.0, 0.0, 10.0) == 3.0

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            reflect(0.0, 0.0, 1.0, 0.0)

    def test_degenerate_range(self):
        assert reflect(5.0, 3.0, 5.0, 5.0) == 5.0

    @given(value=st.floats(-50, 50), delta=st.floats(-500, 500))
    def test_always_lands_inside(self, value, delta):
        v = reflect(value, delta, -50.0, 50.0)
        assert -50.0 <= v <= 50.0

    @given(value=st.floats(-50, 50))
    def test_zero_delta_in_range_is_identity(self, value):
        assert reflect(value, 0.0, -50.0, 50.0) == value


class TestUpdateComponent:
    def test_zero_severities_keep_parameters(self):
        cfg = ScenarioConfig(dimension=3, num_components=1, shift_severity=0.0,
                             height_severity=0.0, width_severity=0.0,
                             angle_severity=0.0, tau_severity=0.0, eta_severity=0.0)
        rng = np.random.default_rng(42)
        comp = init_landscape(cfg, rng).components[0]
        new = update_component(comp, cfg, rng)
        np.testing.assert_array_equal(new.center, comp.center)
        assert new.height == comp.height
        np.testing.assert_array_equal(new.widths, comp.widths)
        assert new.angle == comp.angle
        assert new.tau == comp.tau
        np.testing.assert_array_equal(new.eta, comp.eta)
        # rotation still advances by the plane-rotation product at the angle
        assert not np.array_equal(new.rotation, comp.rotation)
        assert orthogonality_error(new.rotation) <= 1e-9

    def test_shift_length_equals_severity_in_interior(self):
        cfg = ScenarioConfig(dimension=5, num_components=1, shift_severity=1.0,
                             height_severity=0.0, width_severity=0.0,
                             angle_severity=0.0, tau_severity=0.0, eta_severity=0.0)
        rng = np.random.default_rng(3)
        comp = init_landscape(cfg, rng).components[0]
        # pin the center well inside so no reflection triggers
        comp = type(comp)(center=np.zeros(5), height=comp.height, widths=comp.widths,
                          angle=comp.angle, tau=comp.tau, eta=comp.eta,
                          rotation=comp.rotation)
        for _ in range(20):
            new = update_component(comp, cfg, rng)
            assert np.linalg.norm(new.center - comp.center) == pytest.approx(1.0, rel=1e-12)
            comp = type(comp)(center=np.zeros(5), height=new.height, widths=new.widths,
                              angle=new.angle, tau=new.tau, eta=new.eta,
                              rotation=new.rotation)

    def test_parameters_stay_bounded(self):
        cfg = ScenarioConfig(dimension=4, num_components=1)
        rng = np.random.default_rng(8)
        comp = init_landscape(cfg, rng).components[0]
        for _ in range(500):
            comp = update_component(comp, cfg, rng)
            assert in_ranges(comp, cfg)

    def test_rotation_disabled_stays_identity(self):
        cfg = ScenarioConfig(dimension=3, num_components=1, rotation_enabled=False)
        rng = np.random.default_rng(9)
        comp = init_landscape(cfg, rng).components[0]
        for _ in range(5):
            comp = update_component(comp, cfg, rng)
        np.testing.assert_array_equal(comp.rotation, np.eye(3))

    def test_deterministic(self):
        cfg = ScenarioConfig(dimension=3, num_components=1)
        comp = init_landscape(cfg, np.random.default_rng(5)).components[0]
        a = update_component(comp, cfg, np.random.default_rng(77))
        b = update_component(comp, cfg, np.random.default_rng(77))
        np.testing.assert_array_equal(a.center, b.center)
        np.testing.assert_array_equal(a.rotation, b.rotation)
        assert a.height == b.height


class TestLandscapeLifecycle:
    def test_init_fixed_height_range(self):
        cfg = ScenarioConfig(dimension=2, num_components=4, height_range=(50.0, 50.0))
        ls = init_landscape(cfg, np.random.default_rng(0))
        assert all(c.height == 50.0 for c in ls.components)
        assert ls.optimum_value == 50.0

    def test_init_respects_all_ranges(self):
        cfg = ScenarioConfig()
        ls = init_landscape(cfg, np.random.default_rng(1))
        assert len(ls.components) == 10
        for comp in ls.components:
            assert in_ranges(comp, cfg)
            assert orthogonality_error(comp.rotation) <= 1e-9

    def test_init_deterministic(self):
        cfg = ScenarioConfig(dimension=4, num_components=3)
        a = init_landscape(cfg, np.random.default_rng(123))
        b = init_landscape(cfg, np.random.default_rng(123))
        for ca, cb in zip(a.components, b.components):
            np.testing.assert_array_equal(ca.center, cb.center)
            np.testing.assert_array_equal(ca.rotation, cb.rotation)
            assert ca.height == cb.height

    def test_init_rejects_invalid_config(self):
        with pytest.raises(ValueError, match="width range must be positive"):
            init_landscape(ScenarioConfig(width_range=(0.0, 12.0)), np.random.default_rng(0))

    def test_advance_increments_and_recomputes(self):
        cfg = ScenarioConfig(dimension=2, num_components=3, num_environments=4)
        rng = np.random.default_rng(2)
        ls = init_landscape(cfg, rng)
        nxt = advance_environment(ls, cfg, rng)
        assert nxt.environment_index == 1
        assert nxt.optimum_value == max(c.height for c in nxt.components)
        assert ls.environment_index == 0  # original untouched

    def test_advance_zero_severity_keeps_values(self):
        cfg = ScenarioConfig(dimension=2, num_components=3, num_environments=4,
                             shift_severity=0.0, height_severity=0.0,
                             width_severity=0.0, angle_severity=0.0,
                             tau_severity=0.0, eta_severity=0.0,
                             rotation_enabled=False)
        rng = np.random.default_rng(2)
        ls = init_landscape(cfg, rng)
        nxt = advance_environment(ls, cfg, rng)
        assert nxt.environment_index == 1
        for a, b in zip(ls.components, nxt.components):
            np.testing.assert_array_equal(a.center, b.center)
            assert a.height == b.height

    def test_advance_past_end_raises(self):
        cfg = ScenarioConfig(dimension=2, num_components=1, num_environments=1)
        rng = np.random.default_rng(3)
        ls = init_landscape(cfg, rng)
        with pytest.raises(ScenarioExhausted):
            advance_environment(ls, cfg, rng)

    def test_full_trajectory_invariants(self):
        cfg = ScenarioConfig(dimension=3, num_components=2, num_environments=30)
        rng = np.random.default_rng(4)
        ls = init_landscape(cfg, rng)
        for _ in range(cfg.num_environments - 1):
            ls = advance_environment(ls, cfg, rng)
            for comp in ls.components:
                assert in_ranges(comp, cfg)
                assert orthogonality_error(comp.rotation) <= 1e-9
        assert ls.environment_index == 29
