import numpy as np
import pytest

from polylyap.numerics import Singular, as_matrix, kron, lu_factor, lu_solve, scale, unvec, vec


def test_kron_identity_one():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(kron(np.eye(1), m), m)


def test_kron_block_diagonal():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    out = kron(np.eye(2), m)
    expect = np.zeros((4, 4))
    expect[:2, :2] = m
    expect[2:, 2:] = m
    np.testing.assert_array_equal(out, expect)


def test_kron_matches_definition():
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((2, 3)), rng.standard_normal((4, 2))
    out = kron(a, b)
    assert out.shape == (8, 6)
    for i in range(2):
        for j in range(3):
            np.testing.assert_array_equal(out[4 * i:4 * i + 4, 2 * j:2 * j + 2], a[i, j] * b)


@pytest.mark.parametrize("seed", range(20))
def test_vec_kron_identity(seed):
    rng = np.random.default_rng(seed)
    n, p, q, r = rng.integers(1, 5, size=4)
    a, x, b = rng.standard_normal((n, p)), rng.standard_normal((p, q)), rng.standard_normal((q, r))
    lhs = vec(a @ x @ b)
    rhs = kron(b.T, a) @ vec(x)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_vec_stacks_columns():
    np.testing.assert_array_equal(vec([[1, 2], [3, 4]]), [1, 3, 2, 4])
    np.testing.assert_array_equal(vec(np.zeros((2, 2))), np.zeros(4))


def test_unvec_round_trip():
    x = np.random.default_rng(1).standard_normal((3, 5))
    np.testing.assert_array_equal(unvec(vec(x), 3, 5), x)


def test_lu_solve_examples():
    np.testing.assert_allclose(lu_solve(np.eye(3), [1, 2, 3]), [1, 2, 3])
    np.testing.assert_allclose(lu_solve([[2, 0], [0, 4]], [2, 8]), [1, 2])


@pytest.mark.parametrize("seed", range(10))
def test_lu_solve_random(seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((10, 10)))
    a = q @ np.diag(rng.uniform(1, 10, 10)) @ q.T
    x = rng.standard_normal(10)
    b = a @ x
    got = lu_solve(a, b)
    assert np.max(np.abs(a @ got - b)) <= 1e-9 * (1 + np.max(np.abs(b)))
    assert np.linalg.norm(got - x) <= 1e-8 * np.linalg.norm(x)


def test_lu_singular_raises():
    with pytest.raises(Singular):
        lu_factor(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(Singular):
        lu_factor(np.zeros((3, 3)))


def test_lu_threshold_is_relative():
    # A tiny but well-conditioned matrix is not singular.
    lu_factor(1e-8 * np.eye(3))
    with pytest.raises(Singular):
        lu_factor(np.diag([1.0, 1e-13]))


def test_as_matrix_rejects_non_finite():
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ValueError):
        as_matrix(np.zeros((2, 2, 2)))
    assert as_matrix([1.0, 2.0]).shape == (2, 1)


def test_scale_floor():
    assert scale(np.zeros((2, 2))) == 1e-12
    assert scale([[-3.0, 1.0]]) == 3.0
