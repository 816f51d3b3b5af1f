"""Command-line interface.

Usage:
    pdapow consecutive --n 5 --k 4 --alpha 5
    pdapow consecutive --n 6 --k 4 --alpha 2 --reduced
    pdapow table table3 --format markdown
    pdapow simulate --n 2 --k 2 --alpha 2 --blocks 1000000 --seed 7
    pdapow nakamoto --q 0.1 --z 2
    pdapow reduce-info --n 7 --k 6

Exit codes: 0 success, 1 computational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .baseline import AttackerParams, attacker_success
from .chain import DEFAULT_TOL
from .errors import ConvergenceError, DomainError, LumpabilityError, PDAError
from .model import SystemConfig
from .reduction import reduction_info
from .simulate import empirical_consecutive_rate, run_simulation, z_score
from .tables import TABLE_IDS, build_table, consecutive_probability, format_value, render

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="SystemConfig JSON file (flags override it)")
    p.add_argument("--n", type=int, help="number of players")
    p.add_argument("--k", type=int, help="history window length")
    p.add_argument("--alpha", type=float, help="alpha-exponential difficulty base (omit for uniform)")
    p.add_argument("--powers", help="comma-separated computing powers (default all 1.0)")


def _config(args) -> SystemConfig:
    data = {"n": None, "k": 1, "alpha": None, "powers": None}
    if args.config:
        try:
            data.update(json.loads(args.config.read_text()))
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config: {e}") from None
    for key in ("n", "k", "alpha"):
        if getattr(args, key) is not None:
            data[key] = getattr(args, key)
    if args.powers:
        try:
            data["powers"] = [float(x) for x in args.powers.split(",")]
        except ValueError:
            raise UsageError(f"invalid --powers {args.powers!r}") from None
    if data["n"] is None:
        raise UsageError("--n (or a config file) is required")
    try:
        return SystemConfig.from_dict(data)
    except DomainError as e:
        raise UsageError(str(e)) from None


def _emit(text: str, out: Optional[Path]):
    if out:
        out.write_text(text)
    else:
        sys.stdout.write(text)


def cmd_consecutive(args) -> int:
    config = _config(args)
    method = "full" if args.full else "reduced" if args.reduced else "auto"
    if not 0 <= args.player < config.n:
        raise UsageError(f"--player must lie in 0..{config.n - 1}")
    p = consecutive_probability(config, method, player=args.player, tol=args.tol)
    print(format_value(p, args.precision))
    return EXIT_OK


def cmd_table(args) -> int:
    table = build_table(args.table, tol=args.tol)
    _emit(render(table, args.format, args.precision), args.out)
    for note in table.notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _config(args)
    report = run_simulation(config, args.blocks, args.seed, args.player, race_mode=args.race_mode)
    data = report.to_dict()
    m = config.k
    analytic = None
    if config.num_states <= 10 ** 5 or config.equal_powers:
        analytic = consecutive_probability(config, player=args.player, tol=args.tol)
    rate = empirical_consecutive_rate(report, m)
    if analytic is not None:
        z = z_score(report, m, analytic)
        data["comparison"] = {"m": m, "rate": rate, "analytic": analytic, "z": z}
    _emit(json.dumps(data, indent=2) + "\n", args.out)
    if analytic is not None:
        print(f"m={m} rate={rate:.6g} analytic={analytic:.6g} z={z:+.2f}", file=sys.stderr)
    return EXIT_OK


def cmd_nakamoto(args) -> int:
    try:
        params = AttackerParams(args.q, args.z)
    except DomainError as e:
        raise UsageError(str(e)) from None
    print(f"{attacker_success(params):.{args.precision - 1}e}" if args.precision
          else repr(attacker_success(params)))
    return EXIT_OK


def cmd_reduce_info(args) -> int:
    config = _config(args)
    print(json.dumps(reduction_info(config.n, config.k)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdapow",
                                     description="Consecutive-winning analysis of PDA proof-of-work")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("consecutive", help="analytic consecutive-winning probability")
    _add_config_flags(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--full", action="store_true", help="force the full chain")
    g.add_argument("--reduced", action="store_true", help="force the symmetry-reduced chain")
    p.add_argument("--player", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--precision", type=int, default=3, help="significant digits")
    p.set_defaults(func=cmd_consecutive)

    p = sub.add_parser("table", help="reproduce a results table")
    p.add_argument("table", choices=TABLE_IDS)
    p.add_argument("--format", choices=("csv", "json", "markdown"), default="csv")
    p.add_argument("--out", type=Path)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--precision", type=int, help="significant digits")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="seeded Monte Carlo run")
    _add_config_flags(p)
    p.add_argument("--blocks", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--player", type=int, default=0, help="tracked player")
    p.add_argument("--race-mode", action="store_true", help="sample exponential waiting times")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("nakamoto", help="traditional PoW attacker catch-up probability")
    p.add_argument("--q", type=float, required=True, help="attacker power fraction")
    p.add_argument("--z", type=int, required=True, help="confirmation depth")
    p.add_argument("--precision", type=int, help="significant digits (default: full repr)")
    p.set_defaults(func=cmd_nakamoto)

    p = sub.add_parser("reduce-info", help="standard vs reduced state counts")
    _add_config_flags(p)
    p.set_defaults(func=cmd_reduce_info)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, LumpabilityError) as e:
        parser.exit(EXIT_USAGE, f"pdapow: error: {e}\n")
    except ConvergenceError as e:
        print(f"pdapow: solver failed: {e} (residual {e.residual:.3e} after {e.iterations} iterations)",
              file=sys.stderr)
        return EXIT_FAILURE
    except DomainError as e:
        parser.exit(EXIT_USAGE, f"pdapow: error: {e}\n")
    except PDAError as e:
        print(f"pdapow: error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
