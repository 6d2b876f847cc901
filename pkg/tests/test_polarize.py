import numpy as np
import pytest

from polar_lab.errors import (
    AlreadySymmetricError,
    NotLatticeCompatibleError,
)
from polar_lab.functions import (
    ConeFunction,
    GridFunction,
    GridSet,
    Lattice,
    sdr_grid,
    sup_distance,
)
from polar_lab.geometry import PolarParam
from polar_lab.metrics import I_functional
from polar_lab.operators import (
    I_drop_identity,
    PolarizeMode,
    drop_lower_bound_uniform,
    polarize_cone,
    polarize_grid,
    polarize_set,
    steiner_grid,
    telescoping_drops,
    weak_tail_bound,
)
from polar_lab.sampling import UniformPolar, sample


def lattice_omega(rng, lattice, max_shift=16):
    """Random polarization that maps the lattice onto itself."""
    u = np.zeros(lattice.d)
    u[int(rng.integers(lattice.d))] = 1.0 if rng.random() < 0.5 else -1.0
    return PolarParam(int(rng.integers(max_shift + 1)) * lattice.h, u)


def off_center_cone(lattice, apex, radius):
    apex = np.asarray(apex, dtype=float)
    return GridFunction.from_callable(
        lattice,
        lambda x: np.maximum(radius - np.linalg.norm(x - apex, axis=-1), 0),
    )


def test_drop_identity_matches_the_functional(rng, lattice64, make_bump):
    for _ in range(200):
        f = make_bump(lattice64, 1.0)
        omega = lattice_omega(rng, lattice64)
        after = polarize_grid(f, omega, PolarizeMode.MIRROR_EXACT)
        drop = I_functional(f) - I_functional(after)
        assert I_drop_identity(f, omega) == pytest.approx(drop, abs=1e-10)


def test_mirror_exact_is_equimeasurable_and_contracting(
    rng, lattice64, make_bump
):
    for _ in range(500):
        f = make_bump(lattice64, 1.0)
        g = make_bump(lattice64, 1.0)
        omega = lattice_omega(rng, lattice64)
        pf = polarize_grid(f, omega, "mirror-exact")
        pg = polarize_grid(g, omega, "mirror-exact")
        assert np.array_equal(
            np.sort(pf.values.ravel()), np.sort(f.values.ravel())
        )
        assert sup_distance(pf, pg) <= sup_distance(f, g)


def test_polarization_lowers_the_functional(rng, bump64):
    omega = PolarParam(0.4, [0.6, -0.8])
    after = polarize_grid(bump64, omega)
    assert I_functional(after) <= I_functional(bump64) + 1e-12


def test_interp_agrees_with_exact_on_lattice_mirrors(rng, bump64):
    omega = lattice_omega(rng, bump64.lattice)
    exact = polarize_grid(bump64, omega, PolarizeMode.MIRROR_EXACT)
    interp = polarize_grid(bump64, omega, PolarizeMode.INTERP)
    assert np.allclose(exact.values, interp.values, atol=1e-9)


def test_mirror_exact_rejects_oblique_mirrors(bump64):
    with pytest.raises(NotLatticeCompatibleError):
        polarize_grid(
            bump64, PolarParam(0.5, [0.6, 0.8]), PolarizeMode.MIRROR_EXACT
        )
    with pytest.raises(NotLatticeCompatibleError):
        polarize_grid(
            bump64,
            PolarParam(0.3 * bump64.lattice.h, [1.0, 0.0]),
            PolarizeMode.MIRROR_EXACT,
        )


def test_polarized_centered_function_is_fixed(lattice64):
    f = sdr_grid(off_center_cone(lattice64, [0.0, 0.0], 1.0))
    omega = PolarParam(4 * lattice64.h, [0.0, 1.0])
    assert np.array_equal(
        polarize_grid(f, omega, PolarizeMode.MIRROR_EXACT).values, f.values
    )


def test_polarize_set_keeps_the_count_in_exact_mode(rng, lattice64):
    A = GridSet.from_predicate(
        lattice64, lambda x: np.linalg.norm(x - [0.6, 0.1], axis=-1) < 0.5
    )
    for _ in range(20):
        B = polarize_set(A, lattice_omega(rng, lattice64, 8))
        assert B.count == A.count


def test_polarize_set_interp_is_a_set(lattice64):
    A = GridSet.from_predicate(
        lattice64, lambda x: np.linalg.norm(x - [0.6, 0.1], axis=-1) < 0.5
    )
    B = polarize_set(A, PolarParam(0.7, [0.8, 0.6]), PolarizeMode.INTERP)
    assert B.mask.dtype == bool
    assert abs(B.count - A.count) <= 0.25 * A.count


def test_polarize_cone_folds_the_apex():
    cone = ConeFunction([1.5, 0.0])
    moved = polarize_cone(cone, PolarParam(2.0, [1.0, 0.0]))
    assert moved.apex == pytest.approx([0.5, 0.0])
    kept = polarize_cone(cone, PolarParam(2.0, [-1.0, 0.0]))
    assert np.array_equal(kept.apex, cone.apex)
    with pytest.raises(ValueError):
        polarize_cone(cone, PolarParam(0.0, [1.0, 0.0]))


def test_telescoping_drops_add_up(rng, bump64):
    omegas = [lattice_omega(rng, bump64.lattice) for _ in range(30)]
    final, drops = telescoping_drops(bump64, omegas)
    assert len(drops) == 30
    assert all(drop >= 0.0 for drop in drops)
    assert sum(drops) == pytest.approx(
        I_functional(bump64) - I_functional(final), abs=1e-9
    )


def test_uniform_drop_bound_is_positive_and_bounded_by_the_budget():
    lattice = Lattice(d=2, L=1.0, n_cells=64)
    f = off_center_cone(lattice, [0.4, 0.0], 0.45)
    bound = drop_lower_bound_uniform(f, 1.0)
    budget = I_functional(f) - I_functional(sdr_grid(f))
    assert 0.0 < bound <= budget
    with pytest.raises(AlreadySymmetricError):
        drop_lower_bound_uniform(sdr_grid(f), 1.0)


def test_weak_tail_bound_decreases_with_n():
    lattice = Lattice(d=2, L=1.0, n_cells=64)
    f = off_center_cone(lattice, [0.4, 0.0], 0.45)
    first = weak_tail_bound(f, 1.0, 10, 0.4)
    later = weak_tail_bound(f, 1.0, 10_000, 0.4)
    assert 0.0 <= later <= first <= 1.0
    with pytest.raises(ValueError):
        weak_tail_bound(f, 1.0, 0, 0.4)


def test_expected_uniform_drop_exceeds_the_bound(rng):
    lattice = Lattice(d=2, L=1.0, n_cells=64)
    f = off_center_cone(lattice, [0.4, 0.0], 0.45)
    spec = UniformPolar(d=2, L=1.0)
    before = I_functional(f)
    drops = [
        before - I_functional(polarize_grid(f, sample(spec, i, rng)))
        for i in range(1, 401)
    ]
    se = np.std(drops, ddof=1) / np.sqrt(len(drops))
    assert np.mean(drops) + 3 * se >= drop_lower_bound_uniform(f, 1.0)
    assert np.mean(drops) > 0.0


def test_mirror_exact_polarization_is_idempotent(rng, lattice64, make_bump):
    for _ in range(200):
        f = make_bump(lattice64, 1.0)
        omega = lattice_omega(rng, lattice64)
        once = polarize_grid(f, omega, PolarizeMode.MIRROR_EXACT)
        twice = polarize_grid(once, omega, PolarizeMode.MIRROR_EXACT)
        assert np.array_equal(once.values, twice.values)
        A = GridSet(lattice64, f.values > 0.5)
        B = polarize_set(A, omega)
        assert np.array_equal(polarize_set(B, omega).mask, B.mask)


def test_steiner_dominates_polarization(rng, lattice64, make_bump):
    for _ in range(200):
        f = make_bump(lattice64, 1.0)
        omega = lattice_omega(rng, lattice64)
        polarized = I_functional(
            polarize_grid(f, omega, PolarizeMode.MIRROR_EXACT)
        )
        steiner = I_functional(steiner_grid(f, omega.u))
        symmetric = I_functional(sdr_grid(f))
        tol = 1e-12 * I_functional(f)
        assert symmetric <= steiner + tol
        assert steiner <= polarized + tol
        assert polarized <= I_functional(f) + tol
