import math

import numpy as np
import pytest

from polar_lab.errors import AntipodalInputError
from polar_lab.geometry import (
    PolarParam,
    Side,
    angular_distance,
    ball_volume,
    fold,
    great_circle_step,
    half_space_side,
    orthogonal_to,
    random_directions,
    reflect,
    sphere_area,
)


def test_reflect_sends_origin_to_r_u():
    omega = PolarParam(1.5, [0.0, 2.0])
    assert reflect(omega, [0.0, 0.0]) == pytest.approx([0.0, 1.5])


def test_reflect_is_an_involution(rng):
    omega = PolarParam(0.7, [0.6, 0.8])
    x = rng.normal(size=(50, 2))
    assert np.allclose(reflect(omega, reflect(omega, x)), x)


def test_half_space_side_classifies_points():
    omega = PolarParam(2.0, [1.0, 0.0])
    assert half_space_side(omega, [0.0, 0.0]) is Side.POSITIVE
    assert half_space_side(omega, [3.0, 1.0]) is Side.NEGATIVE
    assert half_space_side(omega, [1.0, 5.0]) is Side.BOUNDARY


def test_half_space_side_through_origin_keeps_the_negative_normal_side():
    omega = PolarParam(0.0, [1.0, 0.0])
    assert half_space_side(omega, [-1.0, 0.0]) is Side.POSITIVE
    assert half_space_side(omega, [1.0, 0.0]) is Side.NEGATIVE


def test_fold_never_increases_the_norm(rng):
    x = rng.normal(size=(200, 3)) * 2.0
    for _ in range(10):
        omega = PolarParam(float(rng.uniform(0, 3)), rng.normal(size=3))
        folded = fold(omega, x)
        assert np.all(
            np.linalg.norm(folded, axis=1)
            <= np.linalg.norm(x, axis=1) + 1e-12
        )


def test_fold_keeps_positive_points():
    omega = PolarParam(2.0, [1.0, 0.0])
    x = np.array([0.5, 0.3])
    assert np.array_equal(fold(omega, x), x)
    assert fold(omega, [1.5, 0.0]) == pytest.approx([0.5, 0.0])


@pytest.mark.parametrize(
    "d, expected",
    [(1, 2.0), (2, math.pi), (3, 4.0 * math.pi / 3.0)],
)
def test_ball_volume(d, expected):
    assert ball_volume(d) == pytest.approx(expected)
    assert ball_volume(d, 2.0) == pytest.approx(expected * 2.0**d)


def test_sphere_area_of_the_circle_and_sphere():
    assert sphere_area(2) == pytest.approx(2.0 * math.pi)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi)


def test_ball_volume_rejects_negative_radius():
    with pytest.raises(ValueError):
        ball_volume(2, -1.0)


def test_polar_param_rejects_negative_radius():
    with pytest.raises(ValueError):
        PolarParam(-0.1, [1.0, 0.0])


def test_great_circle_step_moves_by_step():
    v = np.array([1.0, 0.0, 0.0])
    target = np.array([0.0, 1.0, 0.0])
    moved = great_circle_step(v, target, 0.3)
    assert np.linalg.norm(moved) == pytest.approx(1.0)
    assert angular_distance(v, moved) == pytest.approx(0.3)
    assert angular_distance(moved, target) == pytest.approx(
        math.pi / 2 - 0.3
    )


def test_great_circle_step_stops_at_target():
    v = np.array([1.0, 0.0])
    target = np.array([math.cos(0.1), math.sin(0.1)])
    assert np.allclose(great_circle_step(v, target, 0.5), target)


def test_great_circle_step_rejects_antipodes():
    with pytest.raises(AntipodalInputError):
        great_circle_step([1.0, 0.0], [-1.0, 0.0], 0.1)


def test_random_directions_are_unit(rng):
    u = random_directions(rng, 1000, 4)
    assert u.shape == (1000, 4)
    assert np.allclose(np.linalg.norm(u, axis=1), 1.0)


def test_orthogonal_to():
    v = np.array([0.3, -0.4, 0.866])
    w = orthogonal_to(v)
    assert abs(float(w @ v)) < 1e-12
    assert np.linalg.norm(w) == pytest.approx(1.0)
