"""Command-line harness for environments, campaigns, sweeps and ablations."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from .config import settings
from .models.bench import CampaignConfig, SweepConfig
from .services.ablations import ABLATIONS, run_ablation, run_sweep
from .services.campaign import build_environment, run_campaign
from .services.results import reaggregate
from .templates.scenario_manager import ScenarioManager

logger = logging.getLogger(__name__)


def _csv_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _float_list(value: str) -> List[float]:
    return [float(item) for item in _csv_list(value)]


def _add_campaign_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON campaign config file")
    parser.add_argument("--scenario", help="Named scenario preset used when no config file is given")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--planners", type=_csv_list, help="Comma-separated planner names")
    parser.add_argument("--budget", type=_float_list, help="Comma-separated budgets (m)")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials")
    clock = parser.add_mutually_exclusive_group()
    clock.add_argument(
        "--deterministic",
        dest="deterministic",
        action="store_true",
        default=None,
        help="Iteration-budgeted planning on the simulated clock",
    )
    clock.add_argument(
        "--wall-clock",
        dest="deterministic",
        action="store_false",
        help="Time-budgeted planning on worker threads",
    )
    parser.add_argument("--workers", type=int, help="Parallel missions")
    parser.add_argument("--out", type=Path, help="Output directory")
    parser.add_argument("--planning-time", type=float, help="Planning time per cycle (s)")
    parser.add_argument("--iterations", type=int, help="Planner iterations per cycle in deterministic mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipp-bench", description="Budget-constrained informative path planning bench."
    )
    parser.add_argument("--log-level", default=None, help="Overrides IPP_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-env", help="Generate a random environment")
    _add_campaign_flags(gen)
    gen.add_argument("--trial", type=int, default=0, help="Trial whose environment to draw")

    run = sub.add_parser("run", help="Run a Monte Carlo campaign")
    _add_campaign_flags(run)

    sweep = sub.add_parser("sweep", help="Sweep extend distance, near radius and prune radius")
    _add_campaign_flags(sweep)
    sweep.add_argument("--extend", type=_float_list, help="Extend distances (m)")
    sweep.add_argument("--near", type=_float_list, help="Near radii (m)")
    sweep.add_argument("--prune", type=_float_list, help="Prune radii (m)")
    sweep.add_argument("--envs", type=int, help="Shared environments per grid point")

    ablate = sub.add_parser("ablate", help="Run an ablation suite")
    ablate.add_argument("name", choices=ABLATIONS)
    _add_campaign_flags(ablate)

    report = sub.add_parser("report", help="Re-aggregate runs.csv and check summary.csv")
    report.add_argument("out", type=Path, help="Campaign output directory")

    serve = sub.add_parser("serve", help="Start the planning HTTP service")
    serve.add_argument("--host", default=settings.host)
    serve.add_argument("--port", type=int, default=settings.port)
    return parser


def _read_json(path: Path) -> Dict[str, Any]:
    return json.loads(path.read_text())


def load_campaign(args: argparse.Namespace, raw: Optional[Dict[str, Any]] = None) -> CampaignConfig:
    """Config file or scenario preset, then command-line overrides."""
    if raw is not None:
        config = CampaignConfig.model_validate(raw)
    elif args.scenario:
        config = ScenarioManager().get_campaign(args.scenario)
    else:
        config = CampaignConfig()
    if "output_dir" not in config.model_fields_set:
        config.output_dir = settings.output_dir
    if "workers" not in config.model_fields_set:
        config.workers = settings.workers

    overrides: Dict[str, Any] = {
        "seed": args.seed,
        "planners": args.planners,
        "budgets": args.budget,
        "trials": args.trials,
        "deterministic": args.deterministic,
        "workers": args.workers,
        "output_dir": str(args.out) if args.out else None,
        "planning_time": args.planning_time,
        "iterations": args.iterations,
    }
    if raw is not None and args.scenario:
        overrides["scenario"] = args.scenario
    updates = {k: v for k, v in overrides.items() if v is not None}
    return CampaignConfig.model_validate({**config.model_dump(), **updates})


def cmd_gen_env(args: argparse.Namespace) -> int:
    config = load_campaign(args, _read_json(args.config) if args.config else None).effective()
    env = build_environment(config, args.trial)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "env.json").write_text(env.spec.model_dump_json(indent=2))
    env.belief.save(out / "belief.json")
    logger.info(
        "Environment with %d clusters written to %s (%d cells)",
        len(env.spec.priors),
        out,
        env.belief.n_cells,
    )
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config = load_campaign(args, _read_json(args.config) if args.config else None)
    result = run_campaign(config)
    for row in result.summary:
        logger.info(
            "%-8s B=%-8.0f n=%-3d mean %.2f%% +/- %.2f (p vs best %.3g)",
            row["planner"],
            row["budget"],
            row["n"],
            row["mean"],
            row["ci95"],
            row["p_vs_best"],
        )
    logger.info("Wrote %d files to %s", len(result.files), result.out_dir)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    raw = _read_json(args.config) if args.config else None
    if raw is not None and "campaign" in raw:
        sweep = SweepConfig.model_validate(raw)
        campaign = load_campaign(args, raw["campaign"])
    else:
        sweep = SweepConfig()
        campaign = load_campaign(args, raw)
    updates: Dict[str, Any] = {"campaign": campaign}
    if args.extend:
        updates["extend_distances"] = args.extend
    if args.near:
        updates["near_radii"] = args.near
    if args.prune:
        updates["prune_radii"] = args.prune
    if args.envs:
        updates["envs"] = args.envs
    sweep = SweepConfig.model_validate({**sweep.model_dump(), **updates, "campaign": campaign})
    rows = run_sweep(sweep)
    logger.info("Sweep finished: %d grid points in %s", len(rows), campaign.output_dir)
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    config = load_campaign(args, _read_json(args.config) if args.config else None)
    result = run_ablation(args.name, config)
    for row in result.rows:
        logger.info("%s: %s", args.name, row)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    rows, matches = reaggregate(args.out)
    for row in rows:
        logger.info(
            "%-8s B=%-8.0f n=%-3d failed=%d mean %.2f%% +/- %.2f",
            row["planner"],
            row["budget"],
            row["n"],
            row["failed"],
            row["mean"],
            row["ci95"],
        )
    if not matches:
        logger.error("Recomputed summary does not match %s", args.out / "summary.csv")
        return 1
    logger.info("Summary matches the raw runs")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run(
        "src.main:app",
        host=args.host,
        port=args.port,
        reload=settings.environment == "development",
        log_level=settings.log_level.lower(),
    )
    return 0


COMMANDS = {
    "gen-env": cmd_gen_env,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "ablate": cmd_ablate,
    "report": cmd_report,
    "serve": cmd_serve,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, (args.log_level or settings.log_level).upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ValidationError, ValueError) as e:
        logger.error("Invalid configuration: %s", e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
