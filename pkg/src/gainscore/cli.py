"""Batch command-line front end.

Subcommands: analytic (trek table and partial coefficients), simulate (dump
one replication as CSV), cell (one scenario x simulation-set cell), and
table1 / appendix1 / appendix2 (full grids).

Value precedence, lowest to highest: built-in defaults, config file,
--override key=value pairs, then the dedicated --seed/--runs/--n flags.
The grid subcommands take sizes, seed, and thresholds from the config but
pin every path coefficient themselves.  --threads controls worker count;
the GAINSCORE_THREADS environment variable is honored only when the flag
is absent.  Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .analytic import enumerate_treks, partial_coefficients
from .config import (
    ConfigError,
    ScenarioConfig,
    apply_overrides,
    dump_config,
    load_config,
)
from .dgp import generate, replication_rng
from .harness import (
    BASELINE_PARAMS,
    POSTHOC_ROWS,
    SIM_SETS,
    TABLE1_ROWS,
    TABLE_NAMES,
    run_cell,
    run_table,
)
from .scenarios import Scenario, build_scenario
from .tables import (
    Provenance,
    analytic_report_csv,
    analytic_report_json,
    analytic_report_text,
    render_cell,
    render_table,
    sample_to_csv,
)

THREADS_ENV_VAR = "GAINSCORE_THREADS"

_SCENARIO_CHOICES = [s.value for s in Scenario]
_ROW_EXTRAS = {scenario: extras for scenario, extras, _ in TABLE1_ROWS + POSTHOC_ROWS}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="flat key=value config file")
    parser.add_argument(
        "--override", "-O", metavar="KEY=VALUE", action="append", default=[],
        help="override a config field (repeatable; applied after the file)",
    )
    parser.add_argument("--seed", type=int, help="master seed (default 20160301)")
    parser.add_argument(
        "--out", metavar="PATH", default="-",
        help="output path, or '-' for standard output (default)",
    )
    parser.add_argument(
        "--format", choices=("csv", "json", "md"), default="csv",
        help="output format (default csv; md is aligned text)",
    )
    parser.add_argument(
        "--threads", type=int, default=None,
        help=f"worker threads (default 1; ${THREADS_ENV_VAR} used when absent)",
    )
    parser.add_argument(
        "--dump-config", action="store_true",
        help="print the effective config and exit without running",
    )


def _add_baseline_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--baseline", action="store_true",
        help="start from the grid baseline effects (and the scenario's grid "
             "extras, for scenarios that have them) instead of all-zero",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gainscore",
        description="Gain-score robustness test for two-sibling designs: "
                    "analytics, simulation, and result grids.",
    )
    parser.add_argument("--version", action="version", version=f"gainscore {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="trek table and partial coefficients")
    p.add_argument("--scenario", required=True, choices=_SCENARIO_CHOICES)
    _add_common(p)
    _add_baseline_flag(p)

    p = sub.add_parser("simulate", help="dump one replication as CSV")
    p.add_argument("--scenario", required=True, choices=_SCENARIO_CHOICES)
    p.add_argument("--set", choices=sorted(SIM_SETS), default=None,
                   help="apply a simulation set's eta and pi")
    p.add_argument("--run", type=int, default=0, help="replication index (default 0)")
    p.add_argument("--n", type=int, help="observations (overrides n_obs)")
    _add_common(p)
    _add_baseline_flag(p)

    p = sub.add_parser("cell", help="run one scenario x simulation-set cell")
    p.add_argument("--scenario", required=True, choices=_SCENARIO_CHOICES)
    p.add_argument("--set", required=True, choices=sorted(SIM_SETS))
    p.add_argument("--runs", type=int, help="replications (overrides n_runs)")
    p.add_argument("--n", type=int, help="observations (overrides n_obs)")
    _add_common(p)
    _add_baseline_flag(p)

    for name, help_text in (
        ("table1", "main results grid (7 scenarios x 4 sets)"),
        ("appendix1", "full results grid (same cells, all regressors)"),
        ("appendix2", "post-hoc grid (single treatment association)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--runs", type=int, help="replications (overrides n_runs)")
        p.add_argument("--n", type=int, help="observations (overrides n_obs)")
        _add_common(p)

    return parser


def _effective_config(args: argparse.Namespace) -> ScenarioConfig:
    config = ScenarioConfig()
    if args.config:
        config = load_config(args.config)
    if getattr(args, "baseline", False):
        changes = dict(BASELINE_PARAMS)
        scenario = Scenario(args.scenario)
        changes.update(_ROW_EXTRAS.get(scenario, {}))
        config = config.replace(**changes)
    config = apply_overrides(config, args.override)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    if getattr(args, "runs", None) is not None:
        config = config.replace(n_runs=args.runs)
    if getattr(args, "n", None) is not None:
        config = config.replace(n_obs=args.n)
    return config


def _thread_count(args: argparse.Namespace) -> int:
    if args.threads is not None:
        count = args.threads
    else:
        raw = os.environ.get(THREADS_ENV_VAR)
        try:
            count = int(raw) if raw else 1
        except ValueError:
            raise ConfigError(f"${THREADS_ENV_VAR} must be an integer, got '{raw}'") from None
    if count < 1:
        raise ConfigError(f"thread count must be positive, got {count}")
    return count


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _cmd_analytic(args: argparse.Namespace, config: ScenarioConfig) -> str:
    scenario = Scenario(args.scenario)
    model = build_scenario(scenario, config)
    if scenario.has_observed_fe:
        source, regressors = "C", ["T1", "T2", "C"]
    else:
        source, regressors = "U", ["T1", "T2"]
    treks = enumerate_treks(model, source, "D")
    coefs = partial_coefficients(model, regressors, "D")
    partials = {name.lower(): float(value) for name, value in zip(regressors, coefs)}
    provenance = Provenance.of(config)
    if args.format == "csv":
        return analytic_report_csv(treks, partials, provenance)
    if args.format == "json":
        return analytic_report_json(treks, partials, provenance)
    return analytic_report_text(treks, partials, provenance)


def _cmd_simulate(args: argparse.Namespace, config: ScenarioConfig) -> str:
    if args.set is not None:
        sim_set = SIM_SETS[args.set]
        config = config.replace(eta=sim_set.eta, pi=sim_set.pi)
    if args.run < 0:
        raise ConfigError(f"--run must be nonnegative, got {args.run}")
    sample = generate(config, Scenario(args.scenario), replication_rng(config.seed, args.run))
    return sample_to_csv(sample)


def _cmd_cell(args: argparse.Namespace, config: ScenarioConfig) -> str:
    aggregate = run_cell(
        Scenario(args.scenario), SIM_SETS[args.set], config,
        n_workers=_thread_count(args),
    )
    return render_cell(aggregate, Provenance.of(config), args.format)


def _cmd_table(args: argparse.Namespace, config: ScenarioConfig) -> str:
    table = run_table(args.command, config=config, n_workers=_thread_count(args))
    return render_table(table, Provenance.of(config), args.format)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _effective_config(args)
        if args.dump_config:
            _write(dump_config(config), args.out)
            return 0
        if args.command == "analytic":
            text = _cmd_analytic(args, config)
        elif args.command == "simulate":
            text = _cmd_simulate(args, config)
        elif args.command == "cell":
            text = _cmd_cell(args, config)
        elif args.command in TABLE_NAMES:
            text = _cmd_table(args, config)
        else:  # pragma: no cover - argparse rejects unknown subcommands
            raise ConfigError(f"unknown command '{args.command}'")
        _write(text, args.out)
        return 0
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"gainscore: error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
