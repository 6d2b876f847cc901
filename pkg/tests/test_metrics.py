import math

import numpy as np
import pytest

from polar_lab.errors import EmptyParallelSetError, EmptySetError
from polar_lab.functions import GridFunction, GridSet, Lattice, level_set
from polar_lab.functions import sdr_set
from polar_lab.geometry import PolarParam
from polar_lab.metrics import (
    I_functional,
    aux_distance_function,
    delta_drop,
    hausdorff,
    parallel_radius,
    parallel_set,
    symm_diff_volume,
)
from polar_lab.operators import PolarizeMode, polarize_set


def disk(lattice, center, radius):
    center = np.asarray(center, dtype=float)
    return GridSet.from_predicate(
        lattice, lambda x: np.linalg.norm(x - center, axis=-1) < radius
    )


def single_cell(lattice, index):
    mask = np.zeros(lattice.shape, dtype=bool)
    mask[index] = True
    return GridSet(lattice, mask)


def test_I_functional_of_an_indicator(lattice64):
    f = disk(lattice64, [0, 0], 1.0).indicator()
    # integral of |x| over the unit disk is 2 pi / 3
    assert I_functional(f) == pytest.approx(2 * math.pi / 3, rel=0.03)


def test_symm_diff_volume(lattice32):
    A = disk(lattice32, [0, 0], 0.5)
    assert symm_diff_volume(A, A) == 0.0
    empty = GridSet(lattice32, np.zeros(lattice32.shape, dtype=bool))
    assert symm_diff_volume(A, empty) == pytest.approx(A.volume)


def test_delta_drop_matches_the_change_of_symmetric_difference(
    rng, lattice64
):
    A = disk(lattice64, [0.6, 0.1], 0.5)
    star = sdr_set(A)
    for _ in range(30):
        u = np.zeros(2)
        u[int(rng.integers(2))] = 1.0 if rng.random() < 0.5 else -1.0
        omega = PolarParam(int(rng.integers(1, 9)) * lattice64.h, u)
        after = polarize_set(A, omega, PolarizeMode.MIRROR_EXACT)
        change = symm_diff_volume(A, star) - symm_diff_volume(after, star)
        assert delta_drop(A, star, omega) == pytest.approx(change)
        A = after


def test_hausdorff_of_two_cells(lattice32):
    h = lattice32.h
    a = single_cell(lattice32, (3, 3))
    b = single_cell(lattice32, (3, 7))
    assert hausdorff(a, b) == pytest.approx(4 * h)
    assert hausdorff(a, a) == 0.0


def test_hausdorff_is_discontinuous_in_the_set():
    # one far cell changes the volume by h but the distance by 9h
    lattice = Lattice(d=1, L=1.0, n_cells=20)
    one = single_cell(lattice, (10,))
    two = GridSet(lattice, one.mask | single_cell(lattice, (19,)).mask)
    assert hausdorff(one, two) == pytest.approx(9 * lattice.h)
    assert symm_diff_volume(one, two) == pytest.approx(lattice.h)


def test_hausdorff_rejects_empty_sets(lattice32):
    empty = GridSet(lattice32, np.zeros(lattice32.shape, dtype=bool))
    with pytest.raises(EmptySetError):
        hausdorff(empty, disk(lattice32, [0, 0], 0.5))


def test_parallel_sets(lattice64):
    K = disk(lattice64, [0, 0], 0.8)
    outer = parallel_set(K, 0.2)
    inner = parallel_set(K, -0.2)
    assert inner.count < K.count < outer.count
    assert parallel_radius(K, 0.0) == pytest.approx(0.8, abs=lattice64.h)
    assert parallel_radius(K, 0.2) == pytest.approx(1.0, abs=2 * lattice64.h)
    with pytest.raises(EmptyParallelSetError):
        parallel_radius(K, -1.0)


def test_aux_distance_function_recovers_the_set(lattice64):
    K = disk(lattice64, [0.3, -0.2], 0.6)
    f = aux_distance_function(K, lattice64.h)
    assert np.array_equal(level_set(f, lattice64.h).mask, K.mask)
    with pytest.raises(ValueError):
        aux_distance_function(K, 0.0)


def test_aux_distance_function_is_lipschitz(lattice64):
    K = disk(lattice64, [0.3, -0.2], 0.6)
    f = aux_distance_function(K, lattice64.h)
    step = np.abs(np.diff(f.values, axis=0)).max()
    assert step <= 2 * lattice64.h + 1e-12
    assert isinstance(f, GridFunction)
