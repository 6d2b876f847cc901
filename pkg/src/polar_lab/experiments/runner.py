"""
Runs an experiment: trials (inline or across worker processes), CSV and
JSON output, the optional chart, and the acceptance summary.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Iterable

from polar_lab.charts import write_chart
from polar_lab.constants import CSV_DIGITS
from polar_lab.experiments.base import Experiment
from polar_lab.experiments.models import (
    AcceptanceCheck,
    ExperimentConfig,
    RunSummary,
    TrialResult,
)
from polar_lab.experiments.registry import get_experiment
from polar_lab.experiments.stats import Aggregate, aggregate, series
from polar_lab.utils import logger


def build_experiment(config: ExperimentConfig) -> Experiment:
    """
    Instantiate and prepare the experiment named by ``config``.

    :raises ConfigError: If the config does not fit the experiment.
    """
    experiment = get_experiment(config.experiment)(config)
    experiment.prepare()
    return experiment


def _run_chunk(
    payload: dict[str, Any], trials: list[int]
) -> list[TrialResult]:
    config = ExperimentConfig.from_dict(payload)
    experiment = build_experiment(config)
    return [experiment.run_trial(t) for t in trials]


def _chunks(count: int, size: int) -> list[list[int]]:
    return [
        list(range(start, min(start + size, count)))
        for start in range(0, count, size)
    ]


def run_trials(
    experiment: Experiment, *, threads: int = 1, chunk_size: int = 16
) -> list[TrialResult]:
    """
    All trials of ``experiment`` in trial order.

    Every trial draws from its own stream, so the results do not depend
    on ``threads`` or ``chunk_size``.
    """
    count = experiment.config.trials
    if threads <= 1 or count == 1:
        return [experiment.run_trial(t) for t in range(count)]

    payload = experiment.config.to_dict()
    results: list[TrialResult] = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(_run_chunk, payload, chunk)
            for chunk in _chunks(count, max(1, chunk_size))
        ]
        for future in futures:
            results.extend(future.result())
    return sorted(results, key=lambda r: r.trial)


def _fmt(value: float) -> str:
    return f"{value:.{CSV_DIGITS}g}"


def write_rows_csv(
    results: Iterable[TrialResult], columns: tuple[str, ...], path: Path
) -> Path:
    """
    One line per (trial, recorded step); aborted trials leave their
    observables blank.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "step", "status", *columns])
        for result in results:
            for row in result.rows:
                writer.writerow(
                    [
                        row.trial,
                        row.step,
                        row.status,
                        *(
                            _fmt(row.values[c]) if c in row.values else ""
                            for c in columns
                        ),
                    ]
                )
    return path


def write_summary_csv(
    agg: Aggregate, columns: tuple[str, ...], path: Path
) -> Path:
    """Per-step mean and standard error of every column."""
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ["step"]
    for column in columns:
        header += [f"{column}_mean", f"{column}_se"]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for step, stats in agg.items():
            line: list[Any] = [step]
            for column in columns:
                if column in stats:
                    line += [_fmt(stats[column].mean), _fmt(stats[column].se)]
                else:
                    line += ["", ""]
            writer.writerow(line)
    return path


def audit_checks(results: list[TrialResult]) -> list[AcceptanceCheck]:
    """One check per in-trial audit: it held in every trial."""
    names = sorted({name for r in results for name in r.audits})
    checks = []
    for name in names:
        failed = [
            r.trial for r in results if not r.audits.get(name, True)
        ]
        detail = (
            f"violated in trials {failed[:10]}"
            if failed
            else f"held in {len(results)} trials"
        )
        checks.append(AcceptanceCheck(name, not failed, detail))
    return checks


def run_experiment(
    config: ExperimentConfig,
    *,
    threads: int = 1,
    chunk_size: int = 16,
    out_dir: str | Path | None = None,
    charts: bool = True,
    log_log: bool = True,
) -> RunSummary:
    """
    Run ``config`` end to end and write its files.

    Output goes to ``out_dir``, else ``output.dir`` of the config, else
    ``results``. Files are ``<prefix>.csv``, ``<prefix>_summary.csv``,
    ``<prefix>_summary.json`` and, with ``charts``, ``<prefix>.svg``.

    :raises ConfigError: If the config does not fit the experiment.
    """
    experiment = build_experiment(config)
    logger.info(
        f"Running {config.experiment}: d={config.d}, trials={config.trials}, "
        f"steps={config.steps}, seed={config.seed}, threads={threads}"
    )
    logger.debug(json.dumps(config.to_dict(), indent=4))

    started = time.perf_counter()
    results = run_trials(experiment, threads=threads, chunk_size=chunk_size)
    columns = tuple(experiment.columns)
    agg = aggregate(results, columns)

    aborted = sum(1 for r in results if r.aborted)
    checks = experiment.acceptance(agg, results) + audit_checks(results)
    checks.append(
        AcceptanceCheck(
            "no-aborted-trials",
            aborted == 0,
            f"{aborted}/{len(results)} trials aborted",
        )
    )

    target = Path(out_dir or config.output.get("dir") or "results")
    prefix = config.prefix
    paths = {
        "rows": write_rows_csv(results, columns, target / f"{prefix}.csv"),
        "summary_csv": write_summary_csv(
            agg, columns, target / f"{prefix}_summary.csv"
        ),
    }
    if charts:
        chart = write_chart(
            {c: series(agg, c) for c in experiment.chart_columns()},
            target / f"{prefix}.svg",
            title=config.experiment,
            log_log=log_log,
        )
        if chart is not None:
            paths["chart"] = chart
    paths.update(experiment.artifacts(target))

    summary = RunSummary(
        experiment=config.experiment,
        trials=len(results),
        aborted=aborted,
        checks=checks,
        paths=paths,
        extras=experiment.report(results),
    )
    summary_path = target / f"{prefix}_summary.json"
    with summary_path.open("w", encoding="utf-8") as fh:
        json.dump(summary.to_dict(), fh, indent=4, default=_jsonable)
    summary.paths["summary_json"] = summary_path

    for check in checks:
        if check.passed:
            logger.info(f"check {check.name}: passed ({check.detail})")
        else:
            logger.warning(f"check {check.name}: FAILED ({check.detail})")
    logger.info(
        f"{config.experiment} finished in "
        f"{time.perf_counter() - started:.2f}s, wrote "
        f"{', '.join(str(p) for p in summary.paths.values())}"
    )
    return summary


def _jsonable(value: Any) -> Any:
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


__all__ = [
    "build_experiment",
    "run_trials",
    "run_experiment",
    "write_rows_csv",
    "write_summary_csv",
    "audit_checks",
]
