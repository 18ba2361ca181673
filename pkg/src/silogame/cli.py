"""Command-line front end.

    silogame dilemma    --scenario s.json [--out DIR]
    silogame synthesize --scenario s.json [--out DIR]
    silogame simulate   --scenario s.json [--out DIR] [--seed N] [--svg]
    silogame sweep      --scenario s.json [--out DIR] [--seed N] [--svg]

Every command echoes the normalized scenario next to its outputs. CSV
numbers use 17 significant digits, so identical scenario + seed give
byte-identical files. Exit codes: 0 ok, 2 configuration error, 3 infeasible
pinning, 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import engine, svgchart
from .errors import BudgetExceededError, ConfigError, InfeasibleSolutionError
from .model import (NASH_ENUMERATION_BUDGET, dilemma_condition,
                    find_pure_nash, social_welfare)
from .scenario import Scenario, dump_scenario, parse_scenario
from .states import DENSE_STATE_BUDGET, decode_all
from .synthesis import (ZdSolution, complete_strategy,
                        synthesize_alliance, synthesize_individual)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


def _echo_scenario(scenario: Scenario, out_dir: Path):
    _write(out_dir / "scenario.normalized.json", dump_scenario(scenario))


def _solution_for(scenario: Scenario) -> ZdSolution:
    zd = scenario.zd
    alliance = zd.alliance()
    if alliance is not None:
        sol = synthesize_alliance(scenario.game, alliance, zd.phi,
                                  completion=zd.completion)
    else:
        org = zd.org if zd.org is not None else 0
        sol = synthesize_individual(scenario.game, org, zd.phi,
                                    completion=zd.completion)
    if zd.alpha0 is not None:
        sol = sol.with_alpha0(zd.alpha0)
    return sol


def cmd_dilemma(scenario: Scenario, out_dir: Path) -> int:
    cfg = scenario.game
    report = dilemma_condition(cfg)
    print(f"organizations: {cfg.n_orgs}, actions per round: 0..{cfg.max_rounds}")
    for i, flag in enumerate(report.per_org):
        print(f"  org {i}: solo training is a net loss: {flag}")
    print(f"free-riding condition holds for all orgs: {report.all_hold}")
    print(f"welfare at full participation: {_fmt(report.full_coop_welfare)}"
          f" (positive: {report.full_coop_positive})")
    print(f"welfare at zero participation: {_fmt(report.defect_welfare)}")
    if cfg.n_states <= NASH_ENUMERATION_BUDGET:
        equilibria = find_pure_nash(cfg)
        print(f"pure equilibria ({len(equilibria)}): "
              + ", ".join(str(e) for e in equilibria))
        if equilibria:
            gap = report.full_coop_welfare - max(
                social_welfare(e, cfg) for e in equilibria)
            print(f"welfare gap (full participation - best equilibrium): {_fmt(gap)}")
    else:
        print(f"equilibrium enumeration skipped: {cfg.n_states} profiles exceed "
              f"the {NASH_ENUMERATION_BUDGET} budget")
    _echo_scenario(scenario, out_dir)
    return EXIT_OK


def cmd_synthesize(scenario: Scenario, out_dir: Path) -> int:
    cfg = scenario.game
    sol = _solution_for(scenario)
    label = (f"alliance {sorted(sol.alliance.members)} (leader {sol.org})"
             if sol.alliance else f"org {sol.org}")
    print(f"pinning for {label}, phi={_fmt(sol.phi)}")
    print(f"a0 interval: [{_fmt(sol.alpha0_min)}, {_fmt(sol.alpha0_max)}]")
    print(f"feasible: {sol.feasible}")
    print(f"enforced welfare (-a0, a0={_fmt(sol.alpha0)}): "
          f"{_fmt(sol.enforced_welfare)}")
    coop = social_welfare((cfg.max_rounds,) * cfg.n_orgs, cfg)
    if coop > 0:
        print(f"relative maximum: {_fmt(sol.enforced_welfare / coop)}")
    _echo_scenario(scenario, out_dir)
    if not sol.feasible:
        print(f"infeasible: gap {_fmt(sol.gap)}")
        return EXIT_INFEASIBLE
    if cfg.n_states <= DENSE_STATE_BUDGET:
        strat = complete_strategy(sol, cfg)
        lines = ["state," + ",".join(f"y_{i + 1}" for i in range(cfg.n_orgs))
                 + "," + ",".join(f"p_{g}" for g in range(cfg.max_rounds + 1))]
        profiles = decode_all(cfg)
        for v in range(cfg.n_states):
            lines.append(",".join(
                [str(v)] + [str(int(y)) for y in profiles[v]]
                + [_fmt(p) for p in strat.table[v]]))
        _write(out_dir / "strategy.csv", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_simulate(scenario: Scenario, out_dir: Path) -> int:
    cfg = scenario.game
    needs_zd = any(k in ("MMZD", "MMZDA") for k in scenario.roster)
    solution = _solution_for(scenario) if needs_zd else None
    if solution is not None and not solution.feasible \
            and not scenario.zd.allow_infeasible:
        print(f"infeasible pinning (gap {_fmt(solution.gap)}); "
              "set zd.allow_infeasible to clamp for diagnostics")
        return EXIT_INFEASIBLE
    roster = engine.build_roster(
        cfg, scenario.roster, phi=scenario.zd.phi,
        alliance=scenario.zd.alliance(), completion=scenario.zd.completion,
        clamp=scenario.zd.allow_infeasible, solution=solution)
    trace = engine.run_game(cfg, roster, scenario.rounds, scenario.seed,
                            scenario.first_round_prior)

    header = ("round," + ",".join(f"y_{i + 1}" for i in range(cfg.n_orgs))
              + ",welfare,running_mean")
    lines = [header]
    for t in range(trace.rounds):
        lines.append(",".join(
            [str(t + 1)] + [str(int(y)) for y in trace.profiles[t]]
            + [_fmt(trace.welfare[t]), _fmt(trace.running_mean[t])]))
    _write(out_dir / "trace.csv", "\n".join(lines) + "\n")
    _echo_scenario(scenario, out_dir)
    print(f"final running-mean welfare: {_fmt(trace.running_mean[-1])}")
    if solution is not None:
        print(f"pinned welfare (-a0): {_fmt(solution.enforced_welfare)}")
    if scenario.svg:
        refs = ({"pinned welfare": solution.enforced_welfare}
                if solution is not None else {})
        svg = svgchart.line_chart(
            list(range(1, trace.rounds + 1)),
            {"running mean welfare": list(trace.running_mean)},
            title="welfare per round", x_label="round", y_label="welfare",
            ref_lines=refs)
        _write(out_dir / "trace.svg", svg)
    return EXIT_OK


def cmd_sweep(scenario: Scenario, out_dir: Path) -> int:
    sweep = scenario.sweep
    if sweep is None:
        print("scenario has no experiment.sweep block")
        return EXIT_CONFIG
    if sweep.axis == "alliance_size":
        result = engine.sweep_alliance_size(
            scenario.game, sweep.sizes, scenario.zd.phi, sweep.draws,
            scenario.seed, nested=sweep.nested, leader=sweep.leader,
            completion=scenario.zd.completion)
        axis_header = "alliance_size"
    else:
        result = engine.sweep_population(
            engine.default_population_generator(
                local_iters=scenario.game.local_iters,
                max_rounds=scenario.game.max_rounds,
                theta0=scenario.game.theta0, theta1=scenario.game.theta1),
            sweep.n_values, scenario.zd.phi,
            alliance_size=sweep.alliance_size,
            alliance_ratio=sweep.alliance_ratio,
            n_outer=sweep.outer, n_inner=sweep.inner, seed=scenario.seed,
            completion=scenario.zd.completion)
        axis_header = "n_orgs"

    lines = [f"{axis_header},absolute_max_mean,absolute_max_se,"
             "relative_max_mean,relative_max_se,draws"]
    for i, x in enumerate(result.axis):
        lines.append(",".join([
            str(x), _fmt(result.absolute_mean[i]), _fmt(result.absolute_se[i]),
            _fmt(result.relative_mean[i]), _fmt(result.relative_se[i]),
            str(result.draws[i])]))
    _write(out_dir / "sweep.csv", "\n".join(lines) + "\n")
    _echo_scenario(scenario, out_dir)
    for i, x in enumerate(result.axis):
        print(f"{axis_header}={x}: enforced welfare "
              f"{_fmt(result.absolute_mean[i])} "
              f"(relative {_fmt(result.relative_mean[i])}, "
              f"feasible fraction {result.feasible_fraction[i]:.2f})")
    if scenario.svg:
        svg = svgchart.bar_chart(
            result.axis, result.absolute_mean, result.absolute_se,
            title="enforceable welfare", x_label=axis_header,
            y_label="welfare")
        _write(out_dir / "sweep.svg", svg)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="silogame",
        description="Repeated public-goods game engine for cross-silo "
                    "federated learning")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
            ("dilemma", "free-riding condition and pure equilibria"),
            ("synthesize", "welfare-pinning synthesis"),
            ("simulate", "one iterated game, trace CSV"),
            ("sweep", "alliance-size or population sweep, CSV")]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--scenario", required=True, help="scenario JSON path")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--svg", action="store_true", help="also emit SVG charts")
    args = parser.parse_args(argv)

    try:
        scenario = parse_scenario(args.scenario)
        if args.seed is not None:
            scenario = replace(scenario, seed=args.seed)
        if args.svg:
            scenario = replace(scenario, svg=True)
        out_dir = Path(args.out if args.out is not None else scenario.out_dir)
        handler = {"dilemma": cmd_dilemma, "synthesize": cmd_synthesize,
                   "simulate": cmd_simulate, "sweep": cmd_sweep}[args.command]
        return handler(scenario, out_dir)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleSolutionError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
