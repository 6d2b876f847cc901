import csv
import json
from pathlib import Path

import pytest

from polar_lab.errors import ConfigError
from polar_lab.experiments import (
    ExperimentConfig,
    ResultRow,
    build_experiment,
    list_experiments,
    run_experiment,
)


def config(**raw) -> ExperimentConfig:
    return ExperimentConfig.from_dict(raw)


def read_rows(path):
    with open(path, encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def check(summary, name):
    return next(c for c in summary.checks if c.name == name)


def shipped(name: str, **overrides) -> ExperimentConfig:
    """Config shipped in the settings, with some keys replaced."""
    path = CONFIG_DIR / f"{name}.json"
    with path.open(encoding="utf-8") as fh:
        raw = json.load(fh)
    return ExperimentConfig.from_dict({**raw, **overrides})


CONFIG_DIR = Path(__file__).resolve().parents[1] / "settings" / "experiments"

LOWER_CONE = {
    "experiment": "lower-cone",
    "d": 2,
    "trials": 6,
    "steps": 5,
    "seed": 3,
    "initial": {"kind": "cone", "apex": [0.5, 0.0]},
    "sampler": {"kind": "uniform-polar", "L": 2.0},
    "record": "all",
}


def test_every_experiment_is_registered():
    assert set(list_experiments()) >= {
        "conv-polar",
        "rate-uniform",
        "recursion-audit",
        "lower-cone",
        "lower-ellipsoid",
        "nonconv-cone",
        "nonconv-steiner",
        "steiner-rate",
        "extremal-gap",
        "compact-hausdorff",
        "orbit-density",
        "divergence-audit",
        "sphere-moments",
    }


@pytest.mark.parametrize(
    "raw",
    [
        {"experiment": "no-such-experiment"},
        {"experiment": "lower-cone", "d": 0},
        {"experiment": "lower-cone", "trials": 2.5},
        {"experiment": "lower-cone", "seed": -1},
        {"experiment": "lower-cone", "seed": True},
        {"experiment": "lower-cone", "mode": "nearest"},
        {"experiment": "lower-cone", "grid": {"L": 1.0}},
        {"experiment": "lower-cone", "grid": {"L": -1, "n_cells": 8}},
        {"experiment": "lower-cone", "record": "sometimes"},
        {"experiment": "lower-cone", "record": [1, -2]},
        {"experiment": "lower-cone", "tolerances": {"audit": "tight"}},
        ["lower-cone"],
    ],
)
def test_config_validation(raw):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(raw)


def test_config_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(broken)


def test_config_round_trip_and_overrides(tmp_path):
    cfg = config(**LOWER_CONE)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    moved = cfg.with_overrides(seed=9, output_dir=tmp_path)
    assert moved.seed == 9
    assert moved.output["dir"] == str(tmp_path)
    assert cfg.prefix == "lower-cone"
    with pytest.raises(ConfigError):
        cfg.with_overrides(seed=2**64)


def test_record_steps():
    assert config(**LOWER_CONE).record_steps() == (0, 1, 2, 3, 4, 5)
    listed = config(**{**LOWER_CONE, "record": [3, 2, 9]})
    assert listed.record_steps() == (0, 2, 3)
    logged = config(**{**LOWER_CONE, "steps": 1000, "record": "log"})
    steps = logged.record_steps()
    assert steps[0] == 0 and steps[-1] == 1000
    assert len(steps) <= 32


def test_result_rows_reject_negative_observables():
    with pytest.raises(ValueError):
        ResultRow(0, 1, {"gap": -0.5})
    assert ResultRow(0, 0, status="EmptySetError").aborted


def test_setup_rejects_the_wrong_sampler():
    cfg = config(**{**LOWER_CONE, "sampler": {"kind": "uniform-direction"}})
    with pytest.raises(ConfigError):
        build_experiment(cfg)
    with pytest.raises(ConfigError):
        build_experiment(config(**{**LOWER_CONE, "initial": {}}))


def test_lower_cone_run_writes_its_files(tmp_path):
    summary = run_experiment(
        config(**LOWER_CONE), out_dir=tmp_path, charts=False
    )
    rows = read_rows(tmp_path / "lower-cone.csv")
    assert len(rows) == 6 * 6
    assert {r["status"] for r in rows} == {"ok"}
    assert all(
        float(r["apex_norm"]) <= 0.5 + 1e-12 for r in rows
    )
    assert check(summary, "apex-lower-bound").passed
    assert check(summary, "monotone:apex_norm").passed
    assert (tmp_path / "lower-cone_summary.csv").exists()
    with open(tmp_path / "lower-cone_summary.json", encoding="utf-8") as fh:
        payload = json.load(fh)
    assert payload["experiment"] == "lower-cone"
    assert payload["trials"] == 6


def test_chart_is_written(tmp_path):
    summary = run_experiment(config(**LOWER_CONE), out_dir=tmp_path)
    chart = summary.paths["chart"]
    assert chart.suffix == ".svg"
    assert "<svg" in chart.read_text(encoding="utf-8")


def test_results_do_not_depend_on_the_worker_count(tmp_path):
    cfg = config(**LOWER_CONE)
    run_experiment(cfg, out_dir=tmp_path / "one", charts=False)
    run_experiment(
        cfg, threads=2, chunk_size=2, out_dir=tmp_path / "two", charts=False
    )
    assert read_rows(tmp_path / "one" / "lower-cone.csv") == read_rows(
        tmp_path / "two" / "lower-cone.csv"
    )


def test_precondition_failures_abort_trials(tmp_path):
    cfg = config(
        experiment="nonconv-cone",
        d=2,
        trials=2,
        steps=10,
        initial={"kind": "cone", "apex": [0.5, 0.0]},
        sampler={"kind": "adversarial-cone", "L": 2.0, "epsilon": 0.6},
    )
    summary = run_experiment(cfg, out_dir=tmp_path, charts=False)
    assert summary.aborted == 2
    assert not summary.passed
    assert not check(summary, "no-aborted-trials").passed
    rows = read_rows(tmp_path / "nonconv-cone.csv")
    assert [r["status"] for r in rows] == ["PreconditionViolatedError"] * 2
    assert rows[0]["apex_norm"] == ""


def test_nonconv_cone_keeps_the_apex_floor(tmp_path):
    cfg = config(
        experiment="nonconv-cone",
        d=2,
        steps=400,
        seed=17,
        initial={"kind": "cone", "apex": [0.5, 0.0]},
        sampler={"kind": "adversarial-cone", "L": 2.0, "epsilon": 0.2},
    )
    summary = run_experiment(cfg, out_dir=tmp_path, charts=False)
    assert summary.passed
    assert summary.extras["apex_floor"] == pytest.approx(0.3)
    assert check(summary, "base-subsequence").passed


def test_nonconv_steiner_keeps_the_gap(tmp_path):
    cfg = config(
        experiment="nonconv-steiner",
        d=2,
        steps=300,
        seed=19,
        initial={"kind": "ellipsoid", "diagonal": [2.0, 0.5]},
        sampler={"kind": "adversarial-steiner", "epsilon": 0.2},
    )
    summary = run_experiment(cfg, out_dir=tmp_path, charts=False)
    assert check(summary, "bound").passed
    assert check(summary, "gap-bound-positive").passed
    assert summary.extras["C"] == pytest.approx(5.0)


def test_extremal_gap(tmp_path):
    cfg = config(
        experiment="extremal-gap",
        d=3,
        trials=5,
        seed=29,
        initial={"kind": "ellipsoid", "diagonal": [2.0, 1.2, 1.01]},
        params={"batch": 2000},
    )
    summary = run_experiment(cfg, out_dir=tmp_path, charts=False)
    assert check(summary, "gap-ratio").passed
    assert check(summary, "gap-bound").passed
    assert summary.extras["directions"] == 10_000


def test_sphere_moments(tmp_path):
    cfg = config(
        experiment="sphere-moments",
        trials=2,
        seed=37,
        params={"dims": [2, 3], "draws": 40_000},
    )
    run_experiment(cfg, out_dir=tmp_path, charts=False)
    rows = read_rows(tmp_path / "sphere-moments.csv")
    for row, d in zip(rows, (2, 3)):
        assert float(row["d"]) == d
        assert float(row["m2"]) == pytest.approx(1 / d, abs=0.01)
        assert float(row["m4"]) == pytest.approx(3 / (d * (d + 2)), abs=0.01)


def test_sphere_moments_needs_one_trial_per_dimension():
    cfg = config(experiment="sphere-moments", trials=3, params={"dims": [2]})
    with pytest.raises(ConfigError):
        build_experiment(cfg)


def test_divergence_audit(tmp_path):
    families = [
        {
            "sampler": {
                "kind": "gaussian-polar",
                "schedule": {"kind": "power", "exponent": 1.0},
            },
            "L": 0.5,
            "N": 1000,
            "threshold": 2.0,
        },
        {
            "sampler": {
                "kind": "poisson-direction",
                "schedule": {"kind": "harmonic"},
            },
            "N": 1000,
            "threshold": 1.5,
        },
    ]
    cfg = config(
        experiment="divergence-audit", trials=2, params={"families": families}
    )
    summary = run_experiment(cfg, out_dir=tmp_path, charts=False)
    assert summary.passed
    assert summary.extras["families"][1]["first_N"] == 3
    with pytest.raises(ConfigError):
        build_experiment(
            config(
                experiment="divergence-audit",
                trials=1,
                params={"families": families},
            )
        )


def test_orbit_density(tmp_path):
    cfg = config(
        experiment="orbit-density",
        seed=41,
        params={
            "directions": [
                [1.0, 0.0],
                [-1.0, 0.0],
                [0.0, 1.0],
                [0.0, -1.0],
                [0.5403023058681398, 0.8414709848078965],
            ],
            "budgets": [500, 50],
            "x": [0.6, 0.8],
        },
    )
    summary = run_experiment(cfg, out_dir=tmp_path, charts=False)
    rows = read_rows(tmp_path / "orbit-density.csv")
    assert [int(r["step"]) for r in rows] == [50, 500]
    assert float(rows[1]["covering_radius"]) <= float(
        rows[0]["covering_radius"]
    )
    assert summary.extras["generating"]["spans"]
    orbit = read_rows(summary.paths["orbit"])
    assert len(orbit) == 500


def test_orbit_density_checks_the_dimension():
    cfg = config(
        experiment="orbit-density", d=3, params={"angles": [0.0, 1.0]}
    )
    with pytest.raises(ConfigError):
        build_experiment(cfg)


@pytest.mark.parametrize("name", ["conv-polar", "compact-hausdorff"])
def test_shipped_finite_direction_sets_positively_span(name):
    build_experiment(shipped(name))


@pytest.mark.parametrize("name", ["conv-polar", "compact-hausdorff"])
def test_finite_directions_inside_a_half_plane_are_rejected(name):
    sampler = {
        "kind": "finite-iid",
        "angles": [0.0, 1.0, 2.2],
        "radial": {"kind": "uniform", "scale": 1.0},
    }
    with pytest.raises(ConfigError, match="positively span"):
        build_experiment(shipped(name, sampler=sampler))


def test_zero_weights_do_not_count_towards_the_span():
    sampler = {
        "kind": "finite-iid",
        "directions": [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
        "weights": [1.0, 1.0, 1.0, 0.0],
    }
    with pytest.raises(ConfigError):
        build_experiment(shipped("conv-polar", sampler=sampler))


SHRUNK_RUNS = [
    (
        "conv-polar",
        {
            "trials": 3,
            "steps": 600,
            "grid": {"L": 1.0, "n_cells": 128},
        },
        ["sup-dist-below-threshold"],
    ),
    (
        "compact-hausdorff",
        {"trials": 2, "steps": 3000},
        [
            "hausdorff-below-4h",
            "boundary_hausdorff-below-4h",
            "radii-rate",
            "raster-volume",
        ],
    ),
    (
        "rate-uniform",
        {
            "trials": 20,
            "steps": 50,
            "grid": {"L": 2.0, "n_cells": 128},
        },
        ["symm-diff-rate", "raster-volume"],
    ),
    (
        "rate-uniform-holder",
        {
            "trials": 10,
            "steps": 50,
            "grid": {"L": 1.0, "n_cells": 64},
            "record": [10, 50],
        },
        ["l1-rate", "holder-rate"],
    ),
    (
        "recursion-audit",
        {"trials": 20, "steps": 40},
        ["initial-z", "z-recursion", "raster-volume"],
    ),
    (
        "lower-ellipsoid",
        {"trials": 500, "steps": 8},
        ["sup-lower-bound"],
    ),
    (
        "steiner-rate",
        {
            "trials": 8,
            "steps": 30,
            "grid": {"L": 1.0, "n_cells": 64},
        },
        ["l1-rate", "holder-rate"],
    ),
]


@pytest.mark.parametrize(
    "name, overrides, names",
    SHRUNK_RUNS,
    ids=[run[0] for run in SHRUNK_RUNS],
)
def test_shipped_experiment_meets_its_acceptance(
    tmp_path, name, overrides, names
):
    summary = run_experiment(
        shipped(name, **overrides), out_dir=tmp_path, charts=False
    )
    assert summary.aborted == 0
    for check_name in names:
        outcome = check(summary, check_name)
        assert outcome.passed, outcome.detail
