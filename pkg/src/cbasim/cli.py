"""Command line interface.

    cbasim run <scenario> [--seed N] [--out DIR] [--sensitivity] [--workers N]
    cbasim cashflow <scenario> [--out DIR]
    cbasim validate <scenario>
    cbasim sensitivity <scenario> [--metric total_net_benefit|npv] [--out DIR]

``<scenario>`` is a YAML file or the name of a shipped scenario.  Exit codes:
0 success, 1 invalid scenario, 2 I/O or parse failure.  ``CBASIM_SEED`` and
``CBASIM_OUT`` supply defaults for ``--seed`` and ``--out``.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .cashflow import build_cashflow, metrics
from .reports import format_money, render_cashflow_table, render_tornado_table, write_reports
from .scenario_io import ScenarioParseError, ScenarioValidationError, load_scenario
from .sensitivity import one_at_a_time, rank_correlation
from .simulation import run_simulation

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


def _load(path):
    try:
        return load_scenario(path)
    except ScenarioValidationError as exc:
        print(exc, file=sys.stderr)
        raise SystemExit(EXIT_INVALID)
    except (OSError, ScenarioParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _print_metrics(m) -> None:
    print(f"Total costs:        {format_money(m.total_costs, True)}")
    print(f"  initial:          {format_money(m.total_initial_costs, True)}")
    print(f"  ongoing:          {format_money(m.total_ongoing_costs, True)}")
    print(f"Total benefits:     {format_money(m.total_benefits, True)}")
    print(f"Total net benefit:  {format_money(m.total_net_benefit, True)}")
    print(f"{f'NPV @ {m.discount_rate:.2%}:':<20}{format_money(m.npv, True)}")
    print(f"Benefit-cost ratio: {'n/a' if m.bcr is None else f'{m.bcr:.3f}'}")
    print(f"Payback (years):    {'never' if m.payback_years is None else f'{m.payback_years:.3f}'}")


def cmd_validate(args) -> int:
    scenario, _ = _load(args.scenario)
    groups = {f.group or f.id for f in scenario.factors}
    print(f"ok: {scenario.name}: {len(scenario.factors)} entries ({len(groups)} factors), horizon {scenario.horizon_years}")
    return EXIT_OK


def cmd_cashflow(args) -> int:
    scenario, _ = _load(args.scenario)
    schedule = build_cashflow(scenario)
    m = metrics(schedule, scenario.discount_rate)
    print(render_cashflow_table(scenario, schedule))
    print()
    _print_metrics(m)
    if args.out:
        write_reports(None, schedule, m, args.out, scenario_name=scenario.name)
    return EXIT_OK


def cmd_run(args) -> int:
    scenario, cfg = _load(args.scenario)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    schedule = build_cashflow(scenario)
    m = metrics(schedule, scenario.discount_rate)
    result = run_simulation(scenario, cfg, workers=args.workers, keep_inputs=args.sensitivity)
    tornado = correlations = None
    if args.sensitivity:
        tornado = one_at_a_time(scenario, cfg.output_metric)
        correlations = rank_correlation(result.inputs, result.outputs)
    s = result.summary
    status = "converged" if result.converged else "NOT converged (max_iterations reached)"
    print(f"{scenario.name}: {cfg.output_metric}, seed {cfg.master_seed}, {result.iterations} iterations, {status}")
    print(f"  mean {format_money(s.mean, True)}  sd {format_money(s.sd, True)}  mode {format_money(s.mode, True)}")
    print(
        "  p5 {}  p50 {}  p95 {}  P(>0) {:.4f}".format(
            format_money(s.percentiles[5], True),
            format_money(s.percentiles[50], True),
            format_money(s.percentiles[95], True),
            s.prob_positive,
        )
    )
    if args.out:
        try:
            write_reports(result, schedule, m, args.out, tornado, correlations, scenario_name=scenario.name)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"reports written to {args.out}")
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    scenario, _ = _load(args.scenario)
    entries = one_at_a_time(scenario, args.metric)
    print(render_tornado_table(entries))
    if args.out:
        schedule = build_cashflow(scenario)
        write_reports(None, schedule, metrics(schedule, scenario.discount_rate), args.out, tornado=entries,
                      scenario_name=scenario.name)
    return EXIT_OK


def _env_int(name: str) -> Optional[int]:
    raw = os.environ.get(name)
    return int(raw) if raw not in (None, "") else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cbasim", description="Monte Carlo cost-benefit analysis")
    sub = parser.add_subparsers(dest="command", required=True)
    out_default = os.environ.get("CBASIM_OUT") or None

    p = sub.add_parser("run", help="Monte Carlo run with reports")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=_env_int("CBASIM_SEED"), help="master seed (overrides the document)")
    p.add_argument("--out", default=out_default, help="directory for report files")
    p.add_argument("--sensitivity", action="store_true", help="also write tornado and rank-correlation reports")
    p.add_argument("--workers", type=int, default=1, help="worker threads (results do not depend on this)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("cashflow", help="deterministic expected-value tables")
    p.add_argument("scenario")
    p.add_argument("--out", default=out_default)
    p.set_defaults(func=cmd_cashflow)

    p = sub.add_parser("validate", help="check a scenario document")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sensitivity", help="one-at-a-time tornado table")
    p.add_argument("scenario")
    p.add_argument("--metric", choices=("total_net_benefit", "npv"), default="total_net_benefit")
    p.add_argument("--out", default=out_default)
    p.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ValueError as exc:  # bad CBASIM_SEED
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
