"""Ablation suites and the extend/near/prune parameter sweep."""

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..geometry.footprint import project_footprint
from ..models.bench import CampaignConfig, SweepConfig
from ..models.planning import Plan, PlanRequest, PoseModel
from ..planners.informative_tree import InformativeTreePlanner
from ..templates.scenario_manager import ScenarioManager, ScenarioPreset
from .campaign import build_environment, campaign_jobs, reproducibility_header, run_jobs
from .environment import Environment
from .results import RunRecord, mean_ci, paired_p_value, write_csv
from .simulator import MissionSimulator

logger = logging.getLogger(__name__)

ABLATIONS = ["recycle", "embedding", "horizon", "priority_time"]

RECYCLE_ARMS = ["replan-recycle", "replan-fresh", "no-replan"]
RECYCLE_FIELDS = ["arm", "budget", "n", "failed", "mean", "std", "ci95", "p_vs_recycle"]
EMBEDDING_FIELDS = ["arm", "chunk", "tree_size", "elapsed", "info_evals", "mean_info_time"]
REBUILD_FIELDS = ["method", "nodes", "elapsed", "per_node"]
HORIZON_FIELDS = ["scenario", "arm", "horizon", "n", "mean", "ci95", "clusters_touched"]
PRIORITY_FIELDS = ["scenario", "plan_cost", "plan_info", "clusters", "clusters_covered", "cluster_order"]
PATH_FIELDS = ["x", "y", "z", "psi", "cost", "info", "node"]
SWEEP_FIELDS = ["extend_distance", "near_radius", "prune_radius", "n", "failed", "mean", "ci95"]

HORIZON_PRESETS = [ScenarioPreset.HORIZON_CLUSTERED, ScenarioPreset.HORIZON_DENSE]
PRIORITY_PRESETS = [
    ScenarioPreset.PRIORITY_BASE,
    ScenarioPreset.PRIORITY_WEIGHTED,
    ScenarioPreset.PRIORITY_TIMED,
]


@dataclass
class AblationResult:
    name: str
    rows: List[Dict[str, Any]]
    files: List[Path] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)


def _tree_only(config: CampaignConfig, **updates: Any) -> CampaignConfig:
    """Effective copy restricted to the tree planner at the first budget."""
    config = config.effective()
    return config.model_copy(update={"planners": ["tree"], "budgets": config.budgets[:1], **updates})


def _reductions(runs: List[RunRecord]) -> Tuple[Dict[int, float], int]:
    done = {r.trial: r.final_reduction for r in runs if not r.failed and not math.isnan(r.final_reduction)}
    return done, len(runs) - len(done)


def _preset_campaign(preset: ScenarioPreset, config: CampaignConfig) -> CampaignConfig:
    """A preset campaign carrying the caller's trial, seed and clock settings."""
    base = ScenarioManager().get_campaign(preset.value)
    updates: Dict[str, Any] = {
        "seed": config.seed,
        "workers": config.workers,
        "deterministic": config.deterministic,
        "trials": config.trials,
    }
    if config.iterations is not None:
        updates["iterations"] = config.iterations
    if config.planning_time is not None:
        updates["planning_time"] = config.planning_time
    return base.model_copy(update=updates)


def standard_request(env: Environment, planner: InformativeTreePlanner, config: CampaignConfig) -> PlanRequest:
    """First-cycle request of a mission on ``env``."""
    start = MissionSimulator(env, planner, config.sim).start_pose()
    return PlanRequest(
        start=PoseModel.from_pose(start),
        budget=planner.config.budget,
        bounds=env.bounds,
        belief=env.belief.snapshot(),
    )


def ablate_recycle(config: CampaignConfig) -> AblationResult:
    """No replanning, replanning from fresh trees and replanning with recycling.

    All three arms fly the same trials; each arm is compared with the
    recycling arm by a paired t-test.
    """
    base = _tree_only(config)
    arms = {
        "replan-recycle": base,
        "replan-fresh": base.model_copy(
            update={"planner": base.planner.model_copy(update={"recycle": False})}
        ),
        "no-replan": base.model_copy(update={"sim": base.sim.model_copy(update={"replan": False})}),
    }
    reductions: Dict[str, Dict[int, float]] = {}
    failures: Dict[str, int] = {}
    for arm in RECYCLE_ARMS:
        logger.info("Recycle ablation arm %s", arm)
        arm_config = arms[arm]
        runs = [r for r, _ in run_jobs(arm_config, campaign_jobs(arm_config))]
        reductions[arm], failures[arm] = _reductions(runs)

    rows = []
    for arm in RECYCLE_ARMS:
        values = [reductions[arm][t] for t in sorted(reductions[arm])]
        mean, std, ci = mean_ci(values)
        p = math.nan
        if arm != "replan-recycle":
            p = paired_p_value(reductions["replan-recycle"], reductions[arm])
        rows.append(
            {
                "arm": arm,
                "budget": base.budgets[0],
                "n": len(values),
                "failed": failures[arm],
                "mean": mean,
                "std": std,
                "ci95": ci,
                "p_vs_recycle": p,
            }
        )
    return AblationResult("recycle", rows, extra={"fields": RECYCLE_FIELDS})


def ablate_embedding(
    config: CampaignConfig, chunks: int = 8, chunk_iterations: Optional[int] = None
) -> AblationResult:
    """Tree size against build time with and without node embeddings.

    Both arms grow the same tree from the same seed; only the way node
    information is computed differs. The grown embedding tree is then
    re-scored once by the recycling update and once by full replay.
    """
    config = config.effective()
    env = build_environment(config, 0)
    step = chunk_iterations or config.iterations or 100
    rows: List[Dict[str, Any]] = []
    grown: Optional[Tuple[InformativeTreePlanner, Any, Any]] = None
    for use_embedding in (True, False):
        arm = "embedding" if use_embedding else "replay"
        planner = InformativeTreePlanner(
            config.planner.model_copy(
                update={"use_embedding": use_embedding, "iterations": step, "budget": config.budgets[0]}
            )
        )
        request = standard_request(env, planner, config)
        ctx = planner.context(request)
        tree = planner.fresh_tree(request.start_pose, planner.budget_for(request), ctx)
        elapsed = 0.0
        for chunk in range(chunks):
            started = time.perf_counter()
            planner.grow(tree, request, ctx)
            elapsed += time.perf_counter() - started
            rows.append(
                {
                    "arm": arm,
                    "chunk": chunk,
                    "tree_size": len(tree),
                    "elapsed": elapsed,
                    "info_evals": planner.info_evals,
                    "mean_info_time": (
                        planner.info_time / planner.info_evals if planner.info_evals else math.nan
                    ),
                }
            )
        logger.info(
            "Embedding arm %s: %d nodes in %.3f s, %d evaluations",
            arm,
            len(tree),
            elapsed,
            planner.info_evals,
        )
        if use_embedding:
            grown = (planner, tree, ctx)

    assert grown is not None
    _, tree, ctx = grown
    rebuild = []
    started = time.perf_counter()
    scored = tree.update_subtree(tree.root, ctx.base, tree.budget, ctx)
    elapsed = time.perf_counter() - started
    rebuild.append({"method": "update_subtree", "nodes": scored, "elapsed": elapsed})
    started = time.perf_counter()
    replayed = tree.rebuild_naive(ctx)
    elapsed = time.perf_counter() - started
    rebuild.append({"method": "rebuild_naive", "nodes": replayed, "elapsed": elapsed})
    for row in rebuild:
        row["per_node"] = row["elapsed"] / row["nodes"] if row["nodes"] else math.nan

    final = {r["arm"]: r["mean_info_time"] for r in rows if r["chunk"] == chunks - 1}
    ratio = final["embedding"] / final["replay"] if final["replay"] else math.nan
    return AblationResult(
        "embedding",
        rows,
        extra={"fields": EMBEDDING_FIELDS, "rebuild": rebuild, "info_time_ratio": ratio},
    )


def ablate_horizon(config: CampaignConfig, fraction: float = 1.0 / 3.0) -> AblationResult:
    """Full-budget plans against plans capped at ``fraction`` of the budget."""
    rows = []
    for preset in HORIZON_PRESETS:
        base = _tree_only(_preset_campaign(preset, config))
        capped = base.budgets[0] * fraction
        arms = {
            "full": base,
            "capped": base.model_copy(update={"sim": base.sim.model_copy(update={"horizon": capped})}),
        }
        for arm, arm_config in arms.items():
            logger.info("Horizon ablation %s arm %s", preset.value, arm)
            runs = [r for r, _ in run_jobs(arm_config, campaign_jobs(arm_config))]
            done = [r for r in runs if not r.failed]
            mean, _, ci = mean_ci([r.final_reduction for r in done])
            touched = [r.clusters_touched for r in done if r.clusters_touched is not None]
            rows.append(
                {
                    "scenario": preset.value,
                    "arm": arm,
                    "horizon": base.budgets[0] if arm == "full" else capped,
                    "n": len(done),
                    "mean": mean,
                    "ci95": ci,
                    "clusters_touched": sum(touched) / len(touched) if touched else math.nan,
                }
            )
    return AblationResult("horizon", rows, extra={"fields": HORIZON_FIELDS})


def cluster_order(plan: Plan, env: Environment, planner: InformativeTreePlanner) -> List[int]:
    """Cluster indices in the order the planned footprint first covers them."""
    masks = env.cluster_masks()
    first: Dict[int, int] = {}
    for i, waypoint in enumerate(plan.waypoints):
        if len(first) == len(masks):
            break
        cells = project_footprint(waypoint.pose(), planner.camera, env.belief).cells
        for k, mask in enumerate(masks):
            if k not in first and mask[cells].any():
                first[k] = i
    return sorted(first, key=lambda k: (first[k], k))


def ablate_priority_time(config: CampaignConfig) -> AblationResult:
    """Plan once on each demonstration map and summarize the path."""
    rows = []
    paths: Dict[str, List[Dict[str, Any]]] = {}
    for preset in PRIORITY_PRESETS:
        campaign = _preset_campaign(preset, config).effective()
        env = build_environment(campaign, 0)
        planner = InformativeTreePlanner(
            campaign.planner.model_copy(update={"budget": campaign.budgets[0], "seed": campaign.seed})
        )
        plan = planner.plan(standard_request(env, planner, campaign))
        order = cluster_order(plan, env, planner)
        rows.append(
            {
                "scenario": preset.value,
                "plan_cost": plan.total_cost,
                "plan_info": plan.total_info,
                "clusters": len(env.spec.priors),
                "clusters_covered": len(order),
                "cluster_order": ">".join(str(k) for k in order),
            }
        )
        paths[preset.value] = [w.model_dump() for w in plan.waypoints]
        logger.info("Priority scenario %s visits clusters %s", preset.value, order)
    return AblationResult("priority_time", rows, extra={"fields": PRIORITY_FIELDS, "paths": paths})


ABLATION_RUNNERS: Dict[str, Callable[[CampaignConfig], AblationResult]] = {
    "recycle": ablate_recycle,
    "embedding": ablate_embedding,
    "horizon": ablate_horizon,
    "priority_time": ablate_priority_time,
}


def write_ablation(result: AblationResult, config: CampaignConfig, out_dir: Path) -> List[Path]:
    header = reproducibility_header(config, ablation=result.name)
    files = [write_csv(out_dir / f"{result.name}.csv", result.rows, result.extra["fields"], header)]
    if "rebuild" in result.extra:
        files.append(
            write_csv(out_dir / f"{result.name}_rebuild.csv", result.extra["rebuild"], REBUILD_FIELDS, header)
        )
    for scenario, waypoints in result.extra.get("paths", {}).items():
        files.append(write_csv(out_dir / "paths" / f"{scenario}.csv", waypoints, PATH_FIELDS, header))
    return files


def run_ablation(name: str, config: CampaignConfig, out_dir: Optional[Path] = None) -> AblationResult:
    """Run one named ablation and write its tables.

    Raises:
        ValueError: If the ablation name is unknown
    """
    runner = ABLATION_RUNNERS.get(name)
    if runner is None:
        raise ValueError(f"Unknown ablation: {name}. Available: {', '.join(ABLATIONS)}")
    result = runner(config)
    result.files = write_ablation(result, config, Path(out_dir or config.output_dir))
    return result


def run_sweep(sweep: SweepConfig, out_dir: Optional[Path] = None) -> List[Dict[str, Any]]:
    """Mean reduction of the tree planner over every (Δ, R, prune) grid point.

    Every grid point flies the same ``envs`` environments.
    """
    base = _tree_only(sweep.campaign, trials=sweep.envs)
    rows = []
    grid = sweep.grid()
    for i, (extend, near, prune) in enumerate(grid, start=1):
        planner = base.planner.model_copy(
            update={"extend_distance": extend, "near_radius": near, "prune_radius": prune}
        )
        point = base.model_copy(update={"planner": planner})
        runs = [r for r, _ in run_jobs(point, campaign_jobs(point))]
        done, failed = _reductions(runs)
        mean, _, ci = mean_ci([done[t] for t in sorted(done)])
        rows.append(
            {
                "extend_distance": extend,
                "near_radius": near,
                "prune_radius": prune,
                "n": len(done),
                "failed": failed,
                "mean": mean,
                "ci95": ci,
            }
        )
        logger.info("Sweep point %d/%d (%.0f, %.0f, %.0f): %.2f%%", i, len(grid), extend, near, prune, mean)
    target = Path(out_dir or sweep.campaign.output_dir)
    header = reproducibility_header(base, sweep=sweep.model_dump(mode="json", exclude={"campaign"}))
    write_csv(target / "sweep.csv", rows, SWEEP_FIELDS, header)
    return rows
