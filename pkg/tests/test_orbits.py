import csv
import math

import numpy as np
import pytest

from polar_lab.orbits import (
    DirectionSet,
    covering_radius,
    generating_heuristics,
    orbit_expand,
    probe_points,
    positively_spans,
    write_orbit_csv,
)


@pytest.fixture
def one_radian() -> DirectionSet:
    quarter = math.pi / 2
    return DirectionSet.from_angles(
        [0.0, quarter, 2 * quarter, 3 * quarter, 1.0]
    )


def test_orbit_of_the_coordinate_folds_is_finite():
    G = DirectionSet(np.eye(2))
    orbit = orbit_expand(G, [0.6, 0.8], budget=100)
    assert len(orbit) == 4
    assert np.allclose(np.sort(np.abs(orbit), axis=0), [[0.6, 0.8]] * 4)


def test_orbit_points_are_unit_vectors_in_bfs_order(one_radian):
    small = orbit_expand(one_radian, [0.6, 0.8], budget=50)
    large = orbit_expand(one_radian, [0.6, 0.8], budget=400)
    assert len(small) == 50
    assert len(large) == 400
    assert np.allclose(np.linalg.norm(large, axis=1), 1.0)
    assert np.array_equal(small, large[:50])


def test_orbit_budget_must_be_positive(one_radian):
    with pytest.raises(ValueError):
        orbit_expand(one_radian, [1.0, 0.0], budget=0)


def test_orbit_fills_the_circle(one_radian):
    orbit = orbit_expand(one_radian, [0.6, 0.8], budget=2000)
    assert covering_radius(orbit) < covering_radius(orbit[:50])


def test_covering_radius_of_equispaced_points():
    points = probe_points(2, 64)
    assert covering_radius(points) == pytest.approx(math.pi / 64, rel=0.01)
    assert covering_radius(points, probes=64) == pytest.approx(0.0, abs=1e-7)


@pytest.mark.parametrize("d", [3, 4])
def test_probe_points_are_on_the_sphere(d):
    points = probe_points(d, 500)
    assert points.shape == (500, d)
    assert np.allclose(np.linalg.norm(points, axis=1), 1.0)


def test_heuristics_of_the_standard_basis():
    report = generating_heuristics(DirectionSet(np.eye(2)), 10_000)
    assert report.spans
    assert not report.connected
    assert not report.positive_span
    assert not report.irrational_angle
    assert report.witness is None


def test_heuristics_find_the_irrational_angle(one_radian):
    report = generating_heuristics(one_radian, 10_000)
    assert report.positive_span
    assert report.spans
    assert report.connected
    assert report.irrational_angle
    assert report.witness == pytest.approx(1.0)


def test_heuristics_of_a_planar_set_in_space():
    G = DirectionSet([[1.0, 0.0, 0.0], [math.cos(1), math.sin(1), 0.0]])
    assert not generating_heuristics(G, 100).spans


def test_positive_span_of_planar_sets(one_radian):
    assert positively_spans(one_radian)
    triangle = np.radians([90.0, 210.0, 330.0]) + [0.0, 0.0, 1.0]
    assert positively_spans(DirectionSet.from_angles(triangle))
    assert not positively_spans(DirectionSet.from_angles([0.0, 1.0, 2.2]))
    assert not positively_spans(DirectionSet.from_angles([0.0, math.pi]))


def test_positive_span_in_space():
    simplex = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
    assert positively_spans(DirectionSet(simplex))
    assert not positively_spans(DirectionSet(simplex[:3]))


def test_folds_fix_the_cone_left_by_a_half_plane_set():
    G = DirectionSet.from_angles([0.0, 1.0, 2.2])
    x = [math.cos(4.2), math.sin(4.2)]
    assert np.all(G.directions @ x <= 0.0)
    assert len(orbit_expand(G, x, budget=100)) == 1


def test_direction_set_validation():
    with pytest.raises(ValueError):
        DirectionSet([[1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(ValueError):
        DirectionSet([[0.0, 0.0]])
    assert len(DirectionSet.from_angles([0.0, 1.0, 2.0])) == 3


def test_write_orbit_csv(tmp_path, one_radian):
    orbit = orbit_expand(one_radian, [0.6, 0.8], budget=20)
    path = write_orbit_csv(orbit, tmp_path / "orbit" / "points.csv")
    with path.open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["u1", "u2"]
    assert len(rows) == 21
    assert np.allclose(np.array(rows[1:], dtype=float), orbit)
