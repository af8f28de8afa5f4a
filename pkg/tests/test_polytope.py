import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

from conftest import CROSS, ROT
from polylyap.polytope import (
    DegenerateSample,
    VPolytope,
    check_absorbing,
    minkowski_dual,
    minkowski_primal,
    random_init,
    subgradient_max_decay,
)


def facet_gauge(v, x):
    """Gauge from the facet description of the hull, an LP-free oracle."""
    eq = ConvexHull(v.T).equations
    h = eq[:, :-1] / -eq[:, -1:]
    return float(np.max(h @ x))


def cases():
    return st.tuples(st.integers(2, 3), st.integers(0, 6), st.integers(0, 2**31 - 1))


def draw(case):
    n, extra, seed = case
    m = n + 1 + extra
    rng = np.random.default_rng(seed)
    return random_init(n, m, seed), rng.standard_normal(n), rng.standard_normal(n)


class TestAbsorbing:
    def test_cross(self):
        assert check_absorbing(CROSS)

    def test_too_few_vertices(self):
        assert not check_absorbing(VPolytope([[1.0, 2.0], [1.0, 1.0]]))

    def test_simplex_around_origin(self):
        assert check_absorbing(VPolytope([[1.0, 0.0, -1.0], [0.0, 1.0, -1.0]]))

    def test_half_space(self):
        assert not check_absorbing(VPolytope([[1.0, 2.0, 1.0, 3.0], [1.0, 1.0, -1.0, 0.5]]))

    def test_rank_deficient(self):
        assert not check_absorbing(VPolytope([[1.0, -1.0, 2.0, -2.0], [0.0, 0.0, 0.0, 0.0]]))

    def test_origin_on_boundary(self):
        # Origin is the midpoint of an edge, not interior.
        assert not check_absorbing(VPolytope([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]]))


class TestGauge:
    def test_cross_is_l1(self):
        assert minkowski_primal(CROSS, [0.5, 0.5]) == pytest.approx(1.0)
        assert minkowski_primal(CROSS, [0.3, -1.2]) == pytest.approx(1.5)

    def test_zero(self):
        assert minkowski_primal(CROSS, [0.0, 0.0]) == 0.0
        val, h = minkowski_dual(CROSS, [0.0, 0.0])
        assert val == 0.0

    def test_dual_at_vertex(self):
        val, h = minkowski_dual(CROSS, [1.0, 0.0])
        assert val == pytest.approx(1.0)
        assert h[0] == pytest.approx(1.0)
        assert -1 - 1e-9 <= h[1] <= 1 + 1e-9

    @settings(max_examples=100, deadline=None)
    @given(cases())
    def test_matches_facet_oracle(self, case):
        v, x, _ = draw(case)
        expect = facet_gauge(v.v, x)
        assert minkowski_primal(v, x) == pytest.approx(expect, rel=1e-7, abs=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(cases())
    def test_dual_subgradient_conditions(self, case):
        v, x, _ = draw(case)
        val, h = minkowski_dual(v, x)
        assert h @ x == pytest.approx(val, rel=1e-8, abs=1e-10)
        assert np.all(h @ v.v <= 1 + 1e-9)

    def test_irreducible_vertices_have_unit_gauge(self):
        for seed in range(20):
            v = random_init(2, 6, seed)
            hull = set(ConvexHull(v.v.T).vertices.tolist())
            for j in range(v.m):
                g = minkowski_primal(v, v.v[:, j])
                assert g <= 1 + 1e-9
                if j in hull:
                    assert g == pytest.approx(1.0, abs=1e-9)


class TestMaxDecay:
    def test_negative_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            v = random_init(2, 5, int(rng.integers(1000)))
            x = rng.standard_normal(2)
            psi = minkowski_primal(v, x)
            assert subgradient_max_decay(v, -np.eye(2), x) == pytest.approx(-psi, rel=1e-7)

    def test_zero_matrix(self):
        assert subgradient_max_decay(CROSS, np.zeros((2, 2)), [0.4, 0.1]) == pytest.approx(0.0, abs=1e-12)

    def test_rotation_at_cross_vertex(self):
        # At e1 the subdifferential is {(1, b): |b| <= 1} and A e1 = (0, -1),
        # so the supremum of h^T A x is max(-b) = 1.
        assert subgradient_max_decay(CROSS, ROT, [1.0, 0.0]) == pytest.approx(1.0, abs=1e-8)

    def test_rotation_brute_force(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            x = rng.standard_normal(2)
            # l1 ball: subdifferential is sign(x) with free entries where x_i = 0.
            expect = np.sign(x) @ (ROT @ x)
            assert subgradient_max_decay(CROSS, ROT, x) == pytest.approx(expect, abs=1e-8)


class TestRandomInit:
    def test_unit_columns_and_absorbing(self):
        v = random_init(2, 3, 5)
        np.testing.assert_allclose(np.linalg.norm(v.v, axis=0), 1.0)
        assert check_absorbing(v)

    def test_last_column_is_minus_sum(self):
        v = random_init(3, 6, 9)
        s = -v.v[:, :-1].sum(axis=1)
        np.testing.assert_allclose(v.v[:, -1], s / np.linalg.norm(s))

    def test_deterministic(self):
        np.testing.assert_array_equal(random_init(3, 5, 42).v, random_init(3, 5, 42).v)

    def test_sweep(self):
        for seed in range(100):
            assert check_absorbing(random_init(3, 6, seed))

    def test_needs_enough_vertices(self):
        with pytest.raises(ValueError):
            random_init(3, 3, 0)

    def test_read_only(self):
        v = random_init(2, 4, 0)
        with pytest.raises(ValueError):
            v.v[0, 0] = 5.0

    def test_degenerate_error_type(self):
        assert issubclass(DegenerateSample, Exception)
