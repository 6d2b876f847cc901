import math

import numpy as np
import pytest
from scipy import stats

from polar_lab.eigen import eigen_gap
from polar_lab.errors import (
    ConfigError,
    PreconditionViolatedError,
    UnsupportedSpecError,
)
from polar_lab.functions import ConeFunction
from polar_lab.geometry import PolarParam
from polar_lab.operators import polarize_cone
from polar_lab.operators.steiner import steiner_ellipsoid
from polar_lab.sampling import (
    AdversarialCone,
    AdversarialConeSampler,
    AdversarialSteiner,
    AdversarialSteinerWalker,
    BaseSequence,
    GaussianPolar,
    IndependentStream,
    PoissonDirection,
    Schedule,
    UniformDirection,
    UniformPolar,
    build_stream,
    divergence_audit,
    sample,
    spec_from_dict,
    spec_to_dict,
    trial_stream,
)


def test_trial_streams_depend_on_seed_and_trial_only():
    a = trial_stream(7, 3).random(5)
    b = trial_stream(7, 3).random(5)
    c = trial_stream(7, 4).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_trial_stream_rejects_bad_keys():
    with pytest.raises(ValueError):
        trial_stream(2**64, 0)
    with pytest.raises(ValueError):
        trial_stream(1, -1)


def test_schedule_values():
    assert Schedule("constant", 2.0)(5) == 2.0
    assert Schedule("power", 0.5, 2.0)(3) == pytest.approx(4.5)
    assert Schedule("harmonic")(1) == 0.0
    assert Schedule("inverse-loglog")(1) == pytest.approx(
        1.0 / math.log(math.log(3))
    )
    loglog = Schedule("inverse-loglog", 0.5)
    assert np.allclose(loglog.values(6), [loglog(i) for i in range(1, 7)])
    with pytest.raises(ValueError):
        loglog(0)


def test_schedule_rejects_bad_fields():
    with pytest.raises(ConfigError):
        Schedule("linear")
    with pytest.raises(ConfigError):
        Schedule("constant", 0.0)


def test_spec_from_dict():
    spec = spec_from_dict({"kind": "Uniform-Polar", "L": 2}, 3)
    assert spec == UniformPolar(d=3, L=2.0)
    gaussian = GaussianPolar(d=2, schedule=Schedule("power", 0.5, 1.0))
    assert spec_from_dict(spec_to_dict(gaussian), 2) == gaussian
    with pytest.raises(ConfigError):
        spec_from_dict({"kind": "uniform-polar"}, 2)
    with pytest.raises(ConfigError):
        spec_from_dict({"kind": "levy"}, 2)
    with pytest.raises(ConfigError):
        spec_from_dict({"kind": "finite-iid", "directions": []}, 2)
    for weights in ([1.0, -1.0], [0.0, 0.0]):
        with pytest.raises(ConfigError):
            spec_from_dict(
                {
                    "kind": "finite-iid",
                    "directions": [[1.0, 0.0], [0.0, 1.0]],
                    "weights": weights,
                },
                2,
            )


def test_uniform_polar_draws(rng):
    spec = UniformPolar(d=3, L=1.5)
    for i in range(1, 500):
        omega = sample(spec, i, rng)
        assert 0.0 < omega.r < 3.0
        assert np.linalg.norm(omega.u) == pytest.approx(1.0)


def test_uniform_directions_have_uniform_angles(rng):
    spec = UniformDirection(d=2)
    draws = np.array([sample(spec, i, rng) for i in range(1, 6001)])
    angles = np.arctan2(draws[:, 1], draws[:, 0])
    counts, _ = np.histogram(angles, bins=12, range=(-np.pi, np.pi))
    assert stats.chisquare(counts).pvalue > 1e-3


def test_gaussian_radii_follow_the_chi_law(rng):
    spec = GaussianPolar(d=2, schedule=Schedule("constant", 1.0))
    radii = np.array([sample(spec, i, rng).r for i in range(1, 20001)])
    assert radii.min() > 0.0
    assert radii.mean() == pytest.approx(math.sqrt(math.pi / 2), abs=0.03)


def test_poisson_directions_average_to_the_pole(rng):
    spec = PoissonDirection(d=2, schedule=Schedule("constant", 0.5))
    draws = np.array([sample(spec, i, rng) for i in range(1, 2001)])
    assert np.allclose(np.linalg.norm(draws, axis=1), 1.0)
    assert np.allclose(draws.mean(axis=0), [0.5, 0.0], atol=0.06)


def test_poisson_pole_must_stay_inside_the_ball():
    spec = PoissonDirection(d=2, schedule=Schedule("power", 0.5, 1.0))
    with pytest.raises(ValueError):
        spec.pole(2)


def test_finite_iid_draws_from_its_set(rng):
    spec = spec_from_dict(
        {"kind": "finite-iid", "angles": [0.0, 1.0], "radial": {"scale": 2}},
        2,
    )
    allowed = spec.direction_array()
    for i in range(1, 200):
        omega = sample(spec, i, rng)
        assert 0.0 < omega.r < 2.0
        assert np.min(np.linalg.norm(allowed - omega.u, axis=1)) == 0.0


def test_feedback_specs_need_a_stream(rng):
    spec = AdversarialSteiner(d=2, epsilon=0.2)
    with pytest.raises(UnsupportedSpecError):
        sample(spec, 1, rng)
    assert isinstance(build_stream(spec, rng), AdversarialSteinerWalker)
    assert isinstance(
        build_stream(UniformDirection(d=2), rng), IndependentStream
    )


def test_adversarial_cone_keeps_the_apex_away():
    base = BaseSequence(kind="constant", items=((1.0, (1.0, 0.0)),))
    sampler = AdversarialConeSampler(
        AdversarialCone(d=2, L=1.0, epsilon=0.1, base=base)
    )
    cone = ConeFunction(np.array([0.8, 0.0]))
    for i in range(1, 1001):
        cone = polarize_cone(cone, sampler.draw(i, cone.apex))
        assert cone.apex_norm >= 0.7 - 1e-12


def test_adversarial_cone_emits_the_base_sequence():
    sampler = AdversarialConeSampler(AdversarialCone(d=2, L=2.0, epsilon=0.2))
    cone = ConeFunction(np.array([0.5, 0.0]))
    for i in range(1, 401):
        cone = polarize_cone(cone, sampler.draw(i, cone.apex))
        assert cone.apex_norm >= 0.3 - 1e-12
    positions = sampler.base_positions()
    assert len(positions) == 200
    for k, pos in enumerate(positions, start=1):
        emitted, item = sampler.emitted[pos - 1], sampler.base_item(k)
        assert emitted.r == item.r
        assert np.array_equal(emitted.u, item.u)


def test_adversarial_cone_precondition():
    sampler = AdversarialConeSampler(AdversarialCone(d=2, L=1.0, epsilon=0.6))
    with pytest.raises(PreconditionViolatedError):
        sampler.draw(1, np.array([0.5, 0.0]))


def test_adversarial_steiner_keeps_the_gap_open():
    walker = AdversarialSteinerWalker(AdversarialSteiner(d=2, epsilon=0.2))
    matrix = np.diag([2.0, 0.5])
    start = eigen_gap(matrix)
    c = 1.0 + start.lam_max / start.lam_min
    bound = start.gap
    for n in range(1, 501):
        matrix = steiner_ellipsoid(matrix, walker.draw(n, matrix))
        bound *= 1.0 - (c + 2.0) * math.sin(0.2 / n) ** 2
        assert eigen_gap(matrix).gap >= bound - 1e-9
    positions = walker.base_positions()
    assert positions == sorted(positions)
    for k, pos in enumerate(positions, start=1):
        assert np.array_equal(walker.emitted[pos - 1], walker.base_item(k))


def test_adversarial_steiner_precondition():
    walker = AdversarialSteinerWalker(AdversarialSteiner(d=2, epsilon=0.5))
    with pytest.raises(PreconditionViolatedError):
        walker.draw(1, np.diag([2.0, 0.5]))


def test_divergence_audit_of_the_harmonic_poisson_schedule():
    spec = PoissonDirection(d=2, schedule=Schedule("harmonic"))
    audit = divergence_audit(spec, rho=0.5, L=1.0, N=1000)
    assert np.allclose(audit.terms, 1.0 / np.arange(1, 1001))
    assert audit.monotone
    assert audit.first_exceeding(1.5) == 3
    assert audit.first_exceeding(100.0) is None
    assert audit.growth() == pytest.approx(math.log(2), abs=1e-3)


def test_divergence_audit_of_a_gaussian_schedule():
    spec = GaussianPolar(d=2, schedule=Schedule("power", 1.0, 1.0))
    audit = divergence_audit(spec, rho=0.5, L=0.5, N=10_000)
    assert audit.monotone
    assert audit.growth() > 0.6
    with pytest.raises(UnsupportedSpecError):
        divergence_audit(UniformPolar(d=2, L=1.0), rho=0.5, L=1.0, N=10)
    with pytest.raises(ValueError):
        divergence_audit(spec, rho=0.5, L=0.5, N=0)


def test_polar_param_in_draws_is_a_polar_param(rng):
    assert isinstance(sample(UniformPolar(d=2, L=1.0), 1, rng), PolarParam)
