"""Benchmark scenarios, experiment runs and statistics.

A :class:`Scenario` pins down everything a benchmark needs — workspace,
targets, planner name, shared parameters and the explicit list of seeds —
as a versioned JSON document.  :func:`run_experiment` executes it seed by
seed and returns :class:`RunStats`; per-seed planner failures are recorded
in the run, never raised.

Wall-clock time is measured and kept on the in-memory records, but is
deliberately excluded from every serialized artifact so that repeated runs
of the same scenario produce byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats as _scipy_stats

from .forest import PlannerParams
from .geometry import Workspace, check_targets
from .planners import make_planner, parse_planner_name

SCENARIO_VERSION = 1

# Metrics aggregated over seeds, in serialization order.
METRICS = ("tsp_cost", "cumulative_cost", "iterations", "point_checks")


class ScenarioError(ValueError):
    """A scenario document is malformed or inconsistent."""


@dataclass
class Scenario:
    workspace: Workspace
    targets: list[tuple[float, float]]
    planner: str
    params: PlannerParams
    seeds: list[int]
    name: str = "scenario"

    def __post_init__(self):
        try:
            parse_planner_name(self.planner)
            check_targets(self.workspace, self.targets)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
        if not self.seeds:
            raise ScenarioError("seeds must be a non-empty list")
        if any(not isinstance(s, int) for s in self.seeds):
            raise ScenarioError("seeds must all be integers")
        if len(set(self.seeds)) != len(self.seeds):
            raise ScenarioError("seeds must be distinct")

    def to_dict(self) -> dict:
        params = self.params.to_dict()
        params.pop("seed")  # the per-run seed comes from `seeds`
        return {
            "version": SCENARIO_VERSION,
            "name": self.name,
            "workspace": self.workspace.to_dict(),
            "targets": [[x, y] for x, y in self.targets],
            "planner": self.planner,
            "params": params,
            "seeds": list(self.seeds),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ScenarioError(f"scenario must be a JSON object, got {type(data).__name__}")
        version = data.get("version")
        if version != SCENARIO_VERSION:
            raise ScenarioError(f"unsupported scenario version {version!r}")
        missing = {"workspace", "targets", "planner", "params", "seeds"} - set(data)
        if missing:
            raise ScenarioError(f"scenario is missing fields: {', '.join(sorted(missing))}")
        try:
            workspace = Workspace.from_dict(data["workspace"])
            params = PlannerParams.from_dict({**data["params"], "seed": 0})
        except (TypeError, KeyError, ValueError) as exc:
            raise ScenarioError(f"bad scenario contents: {exc}") from exc
        targets = [(float(x), float(y)) for x, y in data["targets"]]
        return cls(
            workspace=workspace,
            targets=targets,
            planner=str(data["planner"]),
            params=params,
            seeds=list(data["seeds"]),
            name=str(data.get("name", "scenario")),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "Scenario":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
        return cls.from_dict(data)


@dataclass
class SeedRecord:
    """Outcome of one seeded run.  Metric fields are None when undefined."""

    seed: int
    tsp_cost: float | None = None
    cumulative_cost: float | None = None
    iterations: int | None = None
    point_checks: int | None = None
    error: str | None = None
    wall_time: float = 0.0  # in-memory only; never serialized

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "tsp_cost": self.tsp_cost,
            "cumulative_cost": self.cumulative_cost,
            "iterations": self.iterations,
            "point_checks": self.point_checks,
            "error": self.error,
        }


def _aggregate(values: list[float]) -> dict | None:
    if not values:
        return None
    arr = np.asarray(values, dtype=float)
    # Sample standard deviation; a single observation has no spread to estimate.
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return {
        "count": int(arr.size),
        "mean": float(arr.mean()),
        "std": std,
        "min": float(arr.min()),
        "max": float(arr.max()),
    }


@dataclass
class RunStats:
    scenario_name: str
    planner: str
    records: list[SeedRecord] = field(default_factory=list)

    def values(self, metric: str) -> list[float]:
        """All defined values of one metric, in seed order."""
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
        return [getattr(r, metric) for r in self.records if getattr(r, metric) is not None]

    @property
    def aggregates(self) -> dict:
        return {metric: _aggregate(self.values(metric)) for metric in METRICS}

    @property
    def failures(self) -> int:
        return sum(1 for r in self.records if r.error is not None)

    def to_dict(self) -> dict:
        return {
            "version": SCENARIO_VERSION,
            "scenario_name": self.scenario_name,
            "planner": self.planner,
            "records": [r.to_dict() for r in self.records],
            "aggregates": self.aggregates,
            "failures": self.failures,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunStats":
        records = [
            SeedRecord(
                seed=r["seed"],
                tsp_cost=r.get("tsp_cost"),
                cumulative_cost=r.get("cumulative_cost"),
                iterations=r.get("iterations"),
                point_checks=r.get("point_checks"),
                error=r.get("error"),
            )
            for r in data["records"]
        ]
        return cls(
            scenario_name=data.get("scenario_name", "scenario"),
            planner=data["planner"],
            records=records,
        )

    @classmethod
    def load(cls, path) -> "RunStats":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def records_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["seed"] + list(METRICS) + ["error"])
        for r in self.records:
            writer.writerow(
                [r.seed]
                + [getattr(r, m) if getattr(r, m) is not None else "" for m in METRICS]
                + [r.error or ""]
            )
        return out.getvalue()


def run_experiment(scenario: Scenario, progress=None) -> RunStats:
    """Run the scenario's planner once per seed and collect statistics.

    ``progress`` (optional) is called as ``progress(seed, record)`` after
    each seed.  Planner errors become per-seed records with ``error`` set.
    """
    stats = RunStats(scenario_name=scenario.name, planner=scenario.planner)
    for seed in scenario.seeds:
        planner = make_planner(scenario.planner, scenario.workspace, scenario.params, seed)
        record = SeedRecord(seed=seed)
        started = time.perf_counter()
        try:
            planner.fit(scenario.targets)
        except Exception as exc:  # recorded, never fatal to the run
            record.error = f"{type(exc).__name__}: {exc}"
        else:
            tour = planner.tour_
            record.tsp_cost = float(tour.cost) if tour is not None else None
            cumulative = planner.cumulative_cost_
            record.cumulative_cost = float(cumulative) if cumulative is not None else None
            record.iterations = int(planner.iterations_)
            record.point_checks = int(planner.point_checks_)
        record.wall_time = time.perf_counter() - started
        stats.records.append(record)
        if progress is not None:
            progress(seed, record)
    return stats


@dataclass(frozen=True)
class TTestResult:
    statistic: float
    p_value: float
    alpha: float

    @property
    def different(self) -> bool:
        """True when the two samples' means differ at the chosen level."""
        return self.p_value < self.alpha


def welch_t_test(sample_a, sample_b, alpha: float = 0.05) -> TTestResult:
    """Two-sided Welch's t-test (unequal variances) on two metric samples."""
    a = np.asarray(list(sample_a), dtype=float)
    b = np.asarray(list(sample_b), dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError(
            f"each sample needs at least 2 observations, got {a.size} and {b.size}"
        )
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("samples must be finite")
    if a.std() == 0.0 and b.std() == 0.0:
        if float(a.mean()) == float(b.mean()):
            # Identical constants: no evidence of a difference.
            return TTestResult(statistic=0.0, p_value=1.0, alpha=alpha)
        raise ValueError("both samples are constant; the t statistic is undefined")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    result = _scipy_stats.ttest_ind(a, b, equal_var=False)
    return TTestResult(statistic=float(result.statistic), p_value=float(result.pvalue), alpha=alpha)


def histogram_csv(values, bins: int = 20) -> str:
    """Histogram of a metric as CSV text with columns bin_lo, bin_hi, count."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValueError("cannot build a histogram of an empty sample")
    counts, edges = np.histogram(arr, bins=bins)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["bin_lo", "bin_hi", "count"])
    for k in range(len(counts)):
        writer.writerow([repr(float(edges[k])), repr(float(edges[k + 1])), int(counts[k])])
    return out.getvalue()


def write_run_artifacts(stats: RunStats, out_dir, bins: int = 20) -> list[Path]:
    """Write the run's JSON, CSV and histogram files; returns the paths.

    Histograms are emitted only for metrics that have at least one value.
    Output is deterministic: rerunning the same scenario reproduces every
    file byte for byte.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    path = out / "runstats.json"
    path.write_text(stats.to_json())
    written.append(path)
    path = out / "records.csv"
    path.write_text(stats.records_csv())
    written.append(path)
    for metric in METRICS:
        values = stats.values(metric)
        if values:
            path = out / f"hist_{metric}.csv"
            path.write_text(histogram_csv(values, bins=bins))
            written.append(path)
    return written


def compare_runs(stats_a: RunStats, stats_b: RunStats, alpha: float = 0.05) -> dict:
    """Welch-compare two runs metric by metric.

    Metrics without at least two defined values on both sides are skipped
    (reported as ``null``).  math.inf never occurs in records (failures are
    stored as errors), so samples are finite by construction.
    """
    comparison: dict = {
        "planner_a": stats_a.planner,
        "planner_b": stats_b.planner,
        "alpha": alpha,
        "metrics": {},
    }
    for metric in METRICS:
        va, vb = stats_a.values(metric), stats_b.values(metric)
        if len(va) < 2 or len(vb) < 2:
            comparison["metrics"][metric] = None
            continue
        try:
            result = welch_t_test(va, vb, alpha=alpha)
        except ValueError as exc:
            comparison["metrics"][metric] = {"error": str(exc)}
            continue
        comparison["metrics"][metric] = {
            "mean_a": float(np.mean(va)),
            "mean_b": float(np.mean(vb)),
            "statistic": result.statistic,
            "p_value": result.p_value,
            "different": result.different,
        }
    return comparison
