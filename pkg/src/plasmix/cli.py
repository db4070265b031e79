"""Command-line interface.

Subcommands:
    run          execute one configured run, write trajectory/summary/probe
    convergence  reference run plus the scheme x level study, write tableau
    rates        print the two kinetic rate constants at a temperature
    cfl          print the explicit stability bound and pass/fail for a grid

Exit codes: 0 success, 1 validation error, 2 solver error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import CFLViolationError, ConfigError, FluxSingularityError
from .model import arrhenius_rates

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plasmix",
        description="Three-species transport-reaction solver with splitting time integrators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured run")
    p_run.add_argument("--config", required=True, help="key=value config file")
    p_run.add_argument("--out", default=None, help="output directory (default: config 'out' or cwd)")

    p_conv = sub.add_parser("convergence", help="run the scheme x level study")
    p_conv.add_argument("--config", required=True, help="key=value config file")
    p_conv.add_argument("--workers", type=int, default=1, help="concurrent runs")
    p_conv.add_argument("--out", default=None, help="output directory (default: cwd)")

    p_rates = sub.add_parser("rates", help="print kinetic rate constants")
    p_rates.add_argument("--Te", required=True, type=float, help="electron temperature [K]")

    p_cfl = sub.add_parser("cfl", help="check the explicit stability bound")
    p_cfl.add_argument("--grid", required=True, help="JxN, e.g. 140x40000")
    p_cfl.add_argument("--scenario", required=True, help="scenario name")

    return parser


def _cmd_run(args) -> int:
    from . import harness

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    config = harness.parse_config(text)
    out_dir = Path(args.out) if args.out else (config.out or Path.cwd())
    traj = harness.run(config, out_dir)
    print(f"wrote {out_dir / 'trajectory.csv'}")
    print(f"wrote {out_dir / 'summary.txt'}")
    if config.to_scenario().reaction is not None:
        print(f"wrote {out_dir / 'probe.csv'}")
    print(f"scheme={traj.scheme.label} loop_seconds={traj.loop_seconds:.6f}")
    return EXIT_OK


def _cmd_convergence(args) -> int:
    from . import harness

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    config = harness.parse_convergence_config(text)
    rows = harness.convergence(config, workers=max(1, args.workers))
    out_dir = Path(args.out) if args.out else Path.cwd()
    out_dir.mkdir(parents=True, exist_ok=True)
    harness.write_tableau_csv(rows, out_dir / "tableau.csv")
    print(f"wrote {out_dir / 'tableau.csv'} ({len(rows)} rows incl. reference)")
    return EXIT_OK


def _cmd_rates(args) -> int:
    lambda1, lambda2 = arrhenius_rates(args.Te)
    print(f"lambda1 = {lambda1:.6e}")
    print(f"lambda2 = {lambda2:.6e}")
    return EXIT_OK


def _cmd_cfl(args) -> int:
    from . import harness

    parts = args.grid.lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"grid must look like 140x40000, got {args.grid!r}")
    try:
        grid_points, time_steps = int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(f"grid must be two integers, got {args.grid!r}") from None
    dt, bound, ok = harness.cfl_report(grid_points, time_steps, args.scenario)
    verdict = "PASS" if ok else "FAIL"
    print(f"dt = {dt:.6e}")
    print(f"dt_max = {bound:.6e}")
    print(verdict)
    return EXIT_OK if ok else EXIT_VALIDATION


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {
        "run": _cmd_run,
        "convergence": _cmd_convergence,
        "rates": _cmd_rates,
        "cfl": _cmd_cfl,
    }[args.command]
    try:
        return handler(args)
    except (ConfigError, CFLViolationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FluxSingularityError, ArithmeticError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
