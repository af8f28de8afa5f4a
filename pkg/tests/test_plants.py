import numpy as np
import pytest

from polylyap.plants import (
    IntervalMatrix,
    PlantModel,
    TooManyCorners,
    as_model,
    corners,
    hull,
    motor_position_model,
    motor_speed_model,
    position_interval,
    single,
    speed_interval,
    speed_parameter_corners,
    synthesis,
)


def test_single_validation():
    with pytest.raises(ValueError):
        single(np.ones((2, 3)))
    with pytest.raises(ValueError):
        PlantModel("single", (np.eye(2), np.eye(2)))
    with pytest.raises(ValueError):
        PlantModel("bogus", (np.eye(2),))


def test_hull_validation():
    with pytest.raises(ValueError):
        hull([])
    with pytest.raises(ValueError):
        hull([np.eye(2), np.eye(3)])


def test_synthesis_validation():
    with pytest.raises(ValueError):
        synthesis([np.eye(2)], [np.ones((3, 1))], np.eye(2))
    with pytest.raises(ValueError):
        synthesis([np.eye(2)], [np.ones((2, 1))], np.eye(3))
    with pytest.raises(ValueError):
        PlantModel("synthesis", (np.eye(2),))


def test_block_pairs_cover_product():
    a = [np.eye(2), 2 * np.eye(2)]
    b = [np.ones((2, 1)), -np.ones((2, 1))]
    model = synthesis(a, b, np.eye(2))
    a_list, b_list = model.block_pairs()
    assert len(a_list) == 4
    pairs = {(float(x[0, 0]), float(y[0, 0])) for x, y in zip(a_list, b_list)}
    assert pairs == {(1.0, 1.0), (1.0, -1.0), (2.0, 1.0), (2.0, -1.0)}


def test_closed_loop():
    model = synthesis([np.zeros((2, 2))], [np.array([[0.0], [1.0]])], np.array([[1.0, 0.0]]))
    (acl,) = model.closed_loop(np.array([[-3.0]]))
    np.testing.assert_array_equal(acl, [[0.0, 0.0], [-3.0, 0.0]])
    with pytest.raises(ValueError):
        model.closed_loop()
    assert model.with_gain(np.array([[-3.0]])).kind in ("hull", "single")


def test_as_model():
    assert as_model(np.eye(2)).kind == "single"
    assert as_model([np.eye(2)]).kind == "single"
    assert as_model([np.eye(2), -np.eye(2)]).kind == "hull"
    m = hull([np.eye(2), -np.eye(2)])
    assert as_model(m) is m


class TestCorners:
    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            IntervalMatrix(np.ones((2, 2)), np.zeros((2, 2)))

    def test_order_and_extremes(self):
        lo = np.array([[0.0, 1.0], [2.0, 3.0]])
        hi = np.array([[1.0, 1.0], [5.0, 4.0]])
        cs = corners(IntervalMatrix(lo, hi))
        assert len(cs) == 8
        np.testing.assert_array_equal(cs[0], lo)
        np.testing.assert_array_equal(cs[-1], hi)
        # Uncertain entries in column-major order: (0,0), (1,0), (1,1).
        np.testing.assert_array_equal(cs[1], [[1.0, 1.0], [2.0, 3.0]])
        np.testing.assert_array_equal(cs[2], [[0.0, 1.0], [5.0, 3.0]])
        np.testing.assert_array_equal(cs[4], [[0.0, 1.0], [2.0, 4.0]])
        stack = np.stack(cs)
        np.testing.assert_array_equal(stack.min(axis=0), lo)
        np.testing.assert_array_equal(stack.max(axis=0), hi)

    def test_no_uncertainty(self):
        assert len(corners(IntervalMatrix(np.eye(2), np.eye(2)))) == 1

    def test_blow_up_guard(self):
        with pytest.raises(TooManyCorners):
            corners(IntervalMatrix(np.zeros((5, 5)), np.ones((5, 5))))


class TestMotor:
    def test_nominal_speed(self):
        model = motor_speed_model(1.0)
        assert model.kind == "single"
        np.testing.assert_allclose(model.a[0], [[-10.0, 1.0], [-0.02, -2.0]])

    def test_speed_interval_at_ten(self):
        im = speed_interval(10.0)
        assert im.lower[0, 0] == pytest.approx(-1000.0)
        assert im.upper[0, 0] == pytest.approx(-0.1)
        assert im.lower[0, 1] == pytest.approx(0.01)
        assert im.upper[0, 1] == pytest.approx(100.0)
        assert im.lower[1, 0] == pytest.approx(-0.2)
        assert im.upper[1, 0] == pytest.approx(-0.002)
        assert im.lower[1, 1] == im.upper[1, 1] == -2.0
        assert len(motor_speed_model(10.0).a) == 8

    def test_interval_hull_contains_parameter_corners(self):
        im = speed_interval(6.0)
        for a in speed_parameter_corners(6.0):
            assert np.all(a >= im.lower - 1e-12) and np.all(a <= im.upper + 1e-12)
        assert len(motor_speed_model(6.0, "parameter").a) == 8
        assert motor_speed_model(1.0, "parameter").kind == "single"
        with pytest.raises(ValueError):
            motor_speed_model(2.0, "nope")

    def test_nominal_position(self):
        model = motor_position_model(1.0)
        assert model.synthesis and len(model.a) == 1
        np.testing.assert_allclose(model.a[0], [[0, 1, 0], [0, -10, 1], [0, -0.02, -2]])
        np.testing.assert_allclose(model.b[0], [[0], [0], [2]])
        np.testing.assert_allclose(model.c, [[1, 0, 0], [0, 0, 1]])

    def test_position_corners(self):
        assert len(motor_position_model(4.0).a) == 8
        im = position_interval(4.0)
        assert np.count_nonzero(im.lower < im.upper) == 3

    def test_gamma_guard(self):
        with pytest.raises(ValueError):
            motor_speed_model(0.5)
        with pytest.raises(ValueError):
            motor_position_model(0.5)

    def test_deterministic(self):
        for a, b in zip(motor_speed_model(3.0).a, motor_speed_model(3.0).a):
            np.testing.assert_array_equal(a, b)
