"""Monte Carlo campaigns over planners, budgets and paired environments."""

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..geometry.bounds import Bounds
from ..models.bench import CampaignConfig
from ..models.mission import MissionReport
from ..templates.scenario_manager import ScenarioManager
from .environment import Environment, generate_env
from .planner_factory import create_planner
from .results import (
    CURVE_FIELDS,
    CYCLE_FIELDS,
    CYCLE_TIMING_FIELDS,
    TRACE_FIELDS,
    RunRecord,
    cycle_rows,
    mean_curves,
    summarize,
    trace_rows,
    write_csv,
    write_runs,
    write_summary,
)
from .simulator import run_mission

logger = logging.getLogger(__name__)

SEED_MASK = 2**31 - 1


def trial_seeds(seed: int, trial: int) -> Tuple[int, int]:
    """(environment seed, mission seed) for a trial; every planner shares them."""
    env_ss, mission_ss = np.random.SeedSequence([seed, trial]).spawn(2)
    return (
        int(env_ss.generate_state(1)[0]) & SEED_MASK,
        int(mission_ss.generate_state(1)[0]) & SEED_MASK,
    )


def build_environment(config: CampaignConfig, trial: int) -> Environment:
    """The environment of ``trial``: a scenario's fixed map or a random draw."""
    env_seed, _ = trial_seeds(config.seed, trial)
    if config.scenario:
        template = ScenarioManager().get_template(config.scenario)
        if template is not None and template.env is not None:
            return Environment.from_spec(template.env.model_copy(update={"seed": env_seed}))
    bounds = Bounds.from_size(config.width, config.height)
    return generate_env(
        config.env, bounds, config.cell_size, np.random.default_rng(env_seed), seed=env_seed
    )


def run_single(
    config: CampaignConfig, trial: int, planner_name: str, budget: float
) -> Tuple[RunRecord, MissionReport]:
    """One mission; failures come back as flagged records instead of raising."""
    env_seed, mission_seed = trial_seeds(config.seed, trial)
    record = RunRecord(
        trial=trial,
        planner=planner_name,
        budget=budget,
        env_seed=env_seed,
        mission_seed=mission_seed,
    )
    try:
        env = build_environment(config, trial)
        planner_config = config.planner.model_copy(update={"budget": budget, "seed": mission_seed})
        planner = create_planner(planner_name, planner_config)
        report = run_mission(env, planner, config.sim, seed=mission_seed)
        report.final_belief = None
    except Exception as exc:  # noqa: BLE001
        logger.error("Run trial=%d planner=%s budget=%.0f failed: %s", trial, planner_name, budget, exc)
        record.failed = True
        record.error = f"{type(exc).__name__}: {exc}"
        report = MissionReport(
            planner=planner_name, seed=mission_seed, budget=budget, failed=True, error=record.error
        )
        return record, report
    record.final_reduction = report.final_reduction
    record.distance_flown = report.distance_flown
    record.replans = report.replans
    record.replan_failures = report.replan_failures
    record.clusters_touched = report.clusters_touched
    return record, report


Job = Tuple[int, str, float]


def campaign_jobs(config: CampaignConfig) -> List[Job]:
    return [
        (trial, planner, budget)
        for trial in range(config.trials)
        for budget in config.budgets
        for planner in config.planners
    ]


async def run_jobs_async(
    config: CampaignConfig, jobs: Sequence[Job], workers: int
) -> List[Tuple[RunRecord, MissionReport]]:
    """Runs jobs on a process pool with at most ``workers`` in flight."""
    loop = asyncio.get_running_loop()
    semaphore = asyncio.Semaphore(workers)
    done = 0

    with ProcessPoolExecutor(max_workers=workers) as pool:

        async def _run(job: Job) -> Tuple[RunRecord, MissionReport]:
            nonlocal done
            async with semaphore:
                result = await loop.run_in_executor(pool, run_single, config, *job)
            done += 1
            logger.info("Campaign progress %d/%d", done, len(jobs))
            return result

        return list(await asyncio.gather(*(_run(job) for job in jobs)))


def run_jobs(config: CampaignConfig, jobs: Sequence[Job]) -> List[Tuple[RunRecord, MissionReport]]:
    if config.workers <= 1 or len(jobs) <= 1:
        results = []
        for i, job in enumerate(jobs, start=1):
            results.append(run_single(config, *job))
            logger.info("Campaign progress %d/%d", i, len(jobs))
        return results
    return asyncio.run(run_jobs_async(config, jobs, config.workers))


def reproducibility_header(config: CampaignConfig, **extra: Any) -> Dict[str, Any]:
    header: Dict[str, Any] = {
        "config": config.model_dump(mode="json", exclude={"output_dir", "workers"})
    }
    header["trial_seeds"] = {
        str(t): list(trial_seeds(config.seed, t)) for t in range(config.trials)
    }
    header.update(extra)
    return header


@dataclass
class CampaignResult:
    config: CampaignConfig
    runs: List[RunRecord]
    reports: List[MissionReport]
    summary: List[Dict[str, Any]]
    out_dir: Optional[Path] = None
    files: List[Path] = field(default_factory=list)


def write_campaign(result: CampaignResult, out_dir: Path) -> List[Path]:
    """runs.csv, summary.csv, curves.csv plus one trace and cycle file per run."""
    config = result.config
    timings = not config.deterministic
    files = [
        write_runs(out_dir, result.runs, reproducibility_header(config)),
        write_summary(out_dir, result.summary, reproducibility_header(config)),
        write_csv(
            out_dir / "curves.csv",
            mean_curves(result.reports, [r.budget for r in result.runs], config.sim.dt),
            CURVE_FIELDS,
            reproducibility_header(config),
        ),
    ]
    for run, report in zip(result.runs, result.reports):
        if run.failed:
            continue
        stem = f"{run.planner}_b{int(run.budget)}_t{run.trial:03d}"
        header = reproducibility_header(
            config, trial=run.trial, env_seed=run.env_seed, mission_seed=run.mission_seed
        )
        header.pop("trial_seeds")
        files.append(write_csv(out_dir / "traces" / f"{stem}.csv", trace_rows(report), TRACE_FIELDS, header))
        files.append(
            write_csv(
                out_dir / "cycles" / f"{stem}.csv",
                cycle_rows(report, timings),
                CYCLE_FIELDS + (CYCLE_TIMING_FIELDS if timings else []),
                header,
            )
        )
    return files


def run_campaign(config: CampaignConfig, out_dir: Optional[Path] = None) -> CampaignResult:
    """Every trial x budget x planner mission, summarized and written to disk.

    Within a trial all planners fly the same environment and truth.
    """
    config = config.effective()
    jobs = campaign_jobs(config)
    logger.info(
        "Campaign: %d trials x %d budgets x %d planners on %d workers",
        config.trials,
        len(config.budgets),
        len(config.planners),
        config.workers,
    )
    results = run_jobs(config, jobs)
    runs = [r for r, _ in results]
    reports = [m for _, m in results]
    failed = sum(1 for r in runs if r.failed)
    if failed:
        logger.warning("%d of %d runs failed and are excluded from means", failed, len(runs))
    result = CampaignResult(config, runs, reports, summarize(runs))
    target = Path(out_dir or config.output_dir)
    result.out_dir = target
    result.files = write_campaign(result, target)
    return result
