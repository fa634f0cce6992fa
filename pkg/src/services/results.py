"""CSV result files with reproducibility headers, and their aggregation."""

import csv
import json
import logging
import math
from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel
from scipy import stats

from ..models.mission import MissionReport

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# "
Z_95 = 1.96

RUN_FIELDS = [
    "trial",
    "planner",
    "budget",
    "env_seed",
    "mission_seed",
    "final_reduction",
    "distance_flown",
    "replans",
    "replan_failures",
    "clusters_touched",
    "failed",
    "error",
]
SUMMARY_FIELDS = ["planner", "budget", "n", "failed", "mean", "std", "ci95", "p_vs_best"]
TRACE_FIELDS = ["t", "entropy_bits", "pct_reduction", "x", "y", "z", "psi"]
CURVE_FIELDS = ["planner", "budget", "t", "n", "mean", "ci95"]
CYCLE_FIELDS = [
    "cycle",
    "iterations",
    "tree_size",
    "matched",
    "recycled_nodes",
    "plan_info",
    "plan_cost",
]
CYCLE_TIMING_FIELDS = ["build_time", "update_time", "info_evals", "info_time"]


class RunRecord(BaseModel):
    """One mission of a campaign."""

    trial: int
    planner: str
    budget: float
    env_seed: int
    mission_seed: int
    final_reduction: float = math.nan
    distance_flown: float = 0.0
    replans: int = 0
    replan_failures: int = 0
    clusters_touched: Optional[int] = None
    failed: bool = False
    error: str = ""


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return value


def write_csv(
    path: Union[str, Path],
    rows: Iterable[Dict[str, Any]],
    fieldnames: Sequence[str],
    header: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write rows after a ``# {json}`` line holding the config and seeds."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        if header is not None:
            f.write(HEADER_PREFIX + json.dumps(header, sort_keys=True) + "\n")
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in fieldnames})
    return path


def read_csv(path: Union[str, Path]) -> Tuple[Dict[str, Any], List[Dict[str, str]]]:
    """Header dict and string rows of a file written by :func:`write_csv`."""
    with Path(path).open(newline="") as f:
        first = f.readline()
        header: Dict[str, Any] = {}
        if first.startswith(HEADER_PREFIX):
            header = json.loads(first[len(HEADER_PREFIX):])
        else:
            f.seek(0)
        return header, list(csv.DictReader(f))


def parse_run(row: Dict[str, str]) -> RunRecord:
    return RunRecord(
        trial=int(row["trial"]),
        planner=row["planner"],
        budget=float(row["budget"]),
        env_seed=int(row["env_seed"]),
        mission_seed=int(row["mission_seed"]),
        final_reduction=float(row["final_reduction"]),
        distance_flown=float(row["distance_flown"]),
        replans=int(row["replans"]),
        replan_failures=int(row["replan_failures"]),
        clusters_touched=int(row["clusters_touched"]) if row["clusters_touched"] else None,
        failed=row["failed"] == "True",
        error=row["error"],
    )


def mean_ci(values: Sequence[float]) -> Tuple[float, float, float]:
    """Mean, sample standard deviation and the 95% normal half-width."""
    n = len(values)
    if n == 0:
        return math.nan, math.nan, math.nan
    arr = np.asarray(values, dtype=float)
    mean = float(np.mean(arr))
    if n < 2:
        return mean, math.nan, math.nan
    std = float(np.std(arr, ddof=1))
    return mean, std, Z_95 * std / math.sqrt(n)


def paired_p_value(a: Dict[int, float], b: Dict[int, float]) -> float:
    """Paired t-test over the trials both arms completed."""
    trials = sorted(a.keys() & b.keys())
    if len(trials) < 2:
        return math.nan
    x = np.array([a[t] for t in trials])
    y = np.array([b[t] for t in trials])
    if np.allclose(x, y):
        return 1.0
    return float(stats.ttest_rel(x, y).pvalue)


def summarize(runs: Sequence[RunRecord]) -> List[Dict[str, Any]]:
    """Per (planner, budget) mean and CI, excluding failed runs.

    The planner with the best mean at each budget is compared against every
    other planner with a paired t-test over shared trials.
    """
    groups: Dict[Tuple[float, str], Dict[int, float]] = defaultdict(dict)
    failures: Dict[Tuple[float, str], int] = defaultdict(int)
    order: List[Tuple[float, str]] = []
    for run in sorted(runs, key=lambda r: (r.budget, r.trial)):
        key = (run.budget, run.planner)
        if key not in groups:
            order.append(key)
            groups[key] = {}
        if run.failed or math.isnan(run.final_reduction):
            failures[key] += 1
            continue
        groups[key][run.trial] = run.final_reduction

    rows = []
    for budget in sorted({b for b, _ in order}):
        keys = sorted((k for k in order if k[0] == budget), key=lambda k: k[1])
        means = {k: mean_ci([groups[k][t] for t in sorted(groups[k])]) for k in keys}
        scored = [k for k in keys if not math.isnan(means[k][0])]
        best = max(scored, key=lambda k: (means[k][0], k[1])) if scored else None
        for key in keys:
            mean, std, ci = means[key]
            p = math.nan
            if best is not None and key != best:
                p = paired_p_value(groups[best], groups[key])
            rows.append(
                {
                    "planner": key[1],
                    "budget": budget,
                    "n": len(groups[key]),
                    "failed": failures[key],
                    "mean": mean,
                    "std": std,
                    "ci95": ci,
                    "p_vs_best": p,
                }
            )
    return rows


def mean_curves(
    reports: Sequence[MissionReport], budgets: Sequence[float], dt: float
) -> List[Dict[str, Any]]:
    """Mean reduction over time with a 95% band, per planner and budget.

    Each trace is held at its last value after its mission ends.
    """
    grouped: Dict[Tuple[str, float], List[MissionReport]] = defaultdict(list)
    for report, budget in zip(reports, budgets):
        if not report.failed and report.trace:
            grouped[(report.planner, budget)].append(report)
    rows = []
    for (planner, budget), group in sorted(grouped.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        steps = max(len(r.trace) for r in group)
        values = np.empty((len(group), steps))
        for i, report in enumerate(group):
            series = [row.pct_reduction for row in report.trace]
            values[i, : len(series)] = series
            values[i, len(series):] = series[-1]
        for k in range(steps):
            mean, _, ci = mean_ci(values[:, k].tolist())
            rows.append(
                {"planner": planner, "budget": budget, "t": k * dt, "n": len(group), "mean": mean, "ci95": ci}
            )
    return rows


def trace_rows(report: MissionReport) -> List[Dict[str, Any]]:
    return [row.model_dump() for row in report.trace]


def cycle_rows(report: MissionReport, timings: bool) -> List[Dict[str, Any]]:
    fields = CYCLE_FIELDS + (CYCLE_TIMING_FIELDS if timings else [])
    return [{k: v for k, v in c.model_dump().items() if k in fields} for c in report.cycles]


def write_runs(out_dir: Path, runs: Sequence[RunRecord], header: Dict[str, Any]) -> Path:
    return write_csv(out_dir / "runs.csv", (r.model_dump() for r in runs), RUN_FIELDS, header)


def write_summary(out_dir: Path, rows: Sequence[Dict[str, Any]], header: Dict[str, Any]) -> Path:
    return write_csv(out_dir / "summary.csv", rows, SUMMARY_FIELDS, header)


def _same(a: str, b: str) -> bool:
    if a == b:
        return True
    try:
        x, y = float(a), float(b)
    except ValueError:
        return False
    return (math.isnan(x) and math.isnan(y)) or x == y


def reaggregate(out_dir: Union[str, Path]) -> Tuple[List[Dict[str, Any]], bool]:
    """Recompute the summary from ``runs.csv`` and compare with ``summary.csv``.

    Returns:
        (recomputed rows, whether they equal the emitted summary exactly)
    """
    out_dir = Path(out_dir)
    _, raw = read_csv(out_dir / "runs.csv")
    rows = summarize([parse_run(r) for r in raw])
    summary_path = out_dir / "summary.csv"
    if not summary_path.exists():
        return rows, False
    _, emitted = read_csv(summary_path)
    if len(emitted) != len(rows):
        return rows, False
    matches = all(
        _same(str(_cell(row[k])), old[k]) for row, old in zip(rows, emitted) for k in SUMMARY_FIELDS
    )
    if not matches:
        logger.warning("Summary in %s differs from its raw runs", out_dir)
    return rows, matches
