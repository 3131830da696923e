"""Command-line interface.

Subcommands
-----------
plan      run one seeded planning query from a scenario file
bench     run a scenario over all its seeds and write statistics
compare   Welch-compare two benchmark runs metric by metric
genmap    generate a workspace + targets and write a scenario file

Exit codes: 0 on success, 2 for invalid scenarios/arguments, 3 when
planning or map generation fails.

The short parameter flags mirror the planner's knobs: ``--l`` step length,
``--d`` connection radius, ``--k`` samples per expansion, ``--pq`` queue
bias, ``--imax`` iteration budget.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .baselines import PlanningFailure
from .bench import RunStats, Scenario, ScenarioError, compare_runs, run_experiment, write_run_artifacts
from .forest import PlannerParams
from .maps import MAP_KINDS, MapGenerationError, generate_map, sample_free_targets
from .planners import make_planner, parse_planner_name
from .render import render_svg


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("planner parameter overrides")
    group.add_argument("--l", type=float, dest="step", metavar="LEN", help="expansion step length")
    group.add_argument("--d", type=float, dest="connect_radius", metavar="DIST",
                       help="inter-tree connection radius")
    group.add_argument("--k", type=int, dest="samples", metavar="N",
                       help="samples per expansion / rewiring neighbourhood")
    group.add_argument("--pq", type=float, dest="queue_bias", metavar="P",
                       help="probability of queue-guided node selection")
    group.add_argument("--imax", type=int, dest="max_iterations", metavar="N",
                       help="iteration budget")
    group.add_argument("--check-points", type=int, dest="check_points", metavar="N",
                       help="sample points per segment collision check")
    group.add_argument("--planner", metavar="NAME",
                       help="planner name (e.g. sff-star, nr-sff-star, simple-sff, "
                            "multi-t-rrt, multi-t-rrt-20, lazy-tsp)")


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    updates = {
        key: getattr(args, key)
        for key in ("step", "connect_radius", "samples", "queue_bias",
                    "max_iterations", "check_points")
        if getattr(args, key, None) is not None
    }
    params = replace(scenario.params, **updates) if updates else scenario.params
    planner = scenario.planner
    if getattr(args, "planner", None):
        parse_planner_name(args.planner)  # fail fast on typos
        planner = args.planner
    seeds = scenario.seeds
    if getattr(args, "seed", None) is not None:
        seeds = [args.seed]
    return replace(scenario, params=params, planner=planner, seeds=seeds)


def _cmd_plan(args) -> int:
    scenario = _apply_overrides(Scenario.load(args.scenario), args)
    seed = scenario.seeds[0]
    planner = make_planner(scenario.planner, scenario.workspace, scenario.params, seed)
    planner.fit(scenario.targets)

    tour = planner.tour_
    result = {
        "planner": scenario.planner,
        "seed": seed,
        "tour": list(tour.sequence) if tour else None,
        "tour_cost": tour.cost if tour else None,
        "cumulative_cost": planner.cumulative_cost_,
        "iterations": planner.iterations_,
        "point_checks": planner.point_checks_,
    }
    forest = getattr(planner, "forest_", None)
    if forest is not None and hasattr(forest, "to_dict"):
        result["forest"] = forest.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    if args.svg:
        render_svg(scenario.workspace, forest, planner.tour_paths(), path=args.svg)

    print(f"planner      {scenario.planner} (seed {seed})")
    if tour:
        print(f"tour         {'-'.join(str(v) for v in tour.sequence)}  cost {tour.cost:.3f}")
    if planner.cumulative_cost_ is not None:
        print(f"cumulative   {planner.cumulative_cost_:.3f}")
    print(f"iterations   {planner.iterations_}")
    print(f"point checks {planner.point_checks_}")
    return 0


def _cmd_bench(args) -> int:
    scenario = _apply_overrides(Scenario.load(args.scenario), args)

    def progress(seed, record):
        if record.error:
            print(f"seed {seed}: FAILED ({record.error})", file=sys.stderr)
        elif args.verbose:
            cost = f"{record.tsp_cost:.3f}" if record.tsp_cost is not None else "-"
            print(f"seed {seed}: tour cost {cost}, {record.iterations} iterations")

    stats = run_experiment(scenario, progress=progress)
    written = write_run_artifacts(stats, args.out_dir, bins=args.bins)
    for metric, agg in stats.aggregates.items():
        if agg:
            print(f"{metric:16s} mean {agg['mean']:.3f}  std {agg['std']:.3f}  "
                  f"min {agg['min']:.3f}  (n={agg['count']})")
    print(f"failures         {stats.failures}/{len(stats.records)}")
    print("wrote " + ", ".join(str(p) for p in written))
    if stats.failures == len(stats.records):
        print("every seed failed", file=sys.stderr)
        return 3
    return 0


def _cmd_compare(args) -> int:
    try:
        stats_a = RunStats.load(args.run_a)
        stats_b = RunStats.load(args.run_b)
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot load run statistics: {exc}") from exc
    report = compare_runs(stats_a, stats_b, alpha=args.alpha)
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"A: {report['planner_a']}   B: {report['planner_b']}   alpha={report['alpha']}")
    for metric, cell in report["metrics"].items():
        if cell is None:
            print(f"{metric:16s} not enough data")
        elif "error" in cell:
            print(f"{metric:16s} {cell['error']}")
        else:
            verdict = "DIFFERENT" if cell["different"] else "indistinguishable"
            print(f"{metric:16s} mean {cell['mean_a']:.3f} vs {cell['mean_b']:.3f}  "
                  f"p={cell['p_value']:.4g}  {verdict}")
    return 0


def _cmd_genmap(args) -> int:
    workspace = generate_map(
        kind=args.kind,
        size=args.size,
        density=args.density,
        seed=args.seed,
        robot_radius=args.robot_radius,
    )
    targets = sample_free_targets(workspace, args.targets, seed=args.seed)
    step = args.step if args.step is not None else round(args.size * 0.075, 6)
    params = PlannerParams(
        step=step,
        connect_radius=args.connect_radius if args.connect_radius is not None else 2.0 * step,
        samples=args.samples if args.samples is not None else 10,
        queue_bias=args.queue_bias if args.queue_bias is not None else 0.95,
        max_iterations=args.max_iterations if args.max_iterations is not None else 6000,
        check_points=args.check_points if args.check_points is not None else 3,
    )
    planner = args.planner or "sff-star"
    parse_planner_name(planner)
    scenario = Scenario(
        workspace=workspace,
        targets=targets,
        planner=planner,
        params=params,
        seeds=list(range(args.bench_seeds)),
        name=f"{args.kind}-{args.targets}t-s{args.seed}",
    )
    scenario.save(args.out)
    print(f"wrote {args.out}: {args.kind} map, size {args.size}, "
          f"{len(workspace.obstacles)} obstacles, {args.targets} targets")
    if args.svg:
        render_svg(workspace, None, path=args.svg)
        print(f"wrote {args.svg}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forestplan",
                                     description="Multi-goal path planning toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="run one seeded planning query")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--seed", type=int, help="seed (defaults to the scenario's first)")
    p.add_argument("--out", help="write the result JSON here")
    p.add_argument("--svg", help="render the result to this SVG file")
    _add_param_flags(p)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("bench", help="run a scenario over all its seeds")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--out-dir", required=True, help="directory for statistics files")
    p.add_argument("--seed", type=int, help="run only this seed")
    p.add_argument("--bins", type=int, default=20, help="histogram bins (default 20)")
    p.add_argument("--verbose", action="store_true", help="print one line per seed")
    _add_param_flags(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("compare", help="Welch-compare two benchmark runs")
    p.add_argument("run_a", help="first runstats.json")
    p.add_argument("run_b", help="second runstats.json")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument("--out", help="write the comparison JSON here")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("genmap", help="generate a workspace and scenario file")
    p.add_argument("--kind", choices=MAP_KINDS, required=True)
    p.add_argument("--size", type=float, default=200.0, help="square side length")
    p.add_argument("--density", type=float, default=0.2, help="obstacle area fraction")
    p.add_argument("--seed", type=int, default=0, help="map + target placement seed")
    p.add_argument("--targets", type=int, default=5, help="number of targets")
    p.add_argument("--robot-radius", type=float, default=5.0)
    p.add_argument("--bench-seeds", type=int, default=10,
                   help="how many benchmark seeds (0..n-1) the scenario lists")
    p.add_argument("--out", required=True, help="scenario JSON output path")
    p.add_argument("--svg", help="also render the bare map to this SVG file")
    _add_param_flags(p)
    p.set_defaults(func=_cmd_genmap)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PlanningFailure, MapGenerationError) as exc:
        print(f"planning failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
