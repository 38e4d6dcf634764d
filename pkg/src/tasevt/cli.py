"""Command-line entry point: ``tasevt {run,verify,point}``.

Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure
(including a failed MDA check), 3 out-of-regime (``point`` only).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from .channel import SystemParams
from .config import METHODS, PRIMITIVES, db_to_linear, load_config
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    GridError,
    InsufficientTrialsError,
    OutOfRegimeError,
)
from .experiment import evaluate, rows_to_csv, run_experiment, verify_config

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_REGIME = 0, 1, 2, 3

log = logging.getLogger("tasevt")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_sim_flags(p: argparse.ArgumentParser, seed=None, trials=None, workers=None):
    # None means "keep the config value" for `run`
    p.add_argument("--seed", type=int, default=seed, help="RNG seed")
    p.add_argument("--trials", type=int, default=trials, help="Monte Carlo trials")
    p.add_argument("--workers", type=int, default=workers, help="Monte Carlo threads")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tasevt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a sweep config and write CSV")
    run.add_argument("config", type=Path)
    run.add_argument("--out", type=Path, help="CSV path (overrides [run].out; '-' for stdout)")
    _add_sim_flags(run)

    ver = sub.add_parser("verify", help="check the Gumbel-MDA tail condition")
    ver.add_argument("config", type=Path)
    ver.add_argument("--exponential", action="store_true", help="check the exponential law instead")

    pt = sub.add_parser("point", help="single capacity value")
    pt.add_argument("--n", type=int, required=True, help="number of ST antennas")
    pt.add_argument("--method", required=True, choices=METHODS)
    pt.add_argument("--epsilon", type=float, help="outage threshold; omit for mean capacity")
    for name in PRIMITIVES:
        flag = name.replace("_", "-")
        grp = pt.add_mutually_exclusive_group()
        grp.add_argument(f"--{flag}", type=float, dest=name, help=f"{name} (linear)")
        grp.add_argument(f"--{flag}-db", type=float, dest=f"{name}_db", help=f"{name} in dB")
    pt.add_argument("--shared-interference", action="store_true",
                    help="MC: one PT->SR gain shared by all antennas")
    pt.add_argument("--out", type=Path, help="also write the value as a one-row CSV")
    _add_sim_flags(pt, seed=0, trials=1_000_000, workers=1)
    return parser


def _params_from_flags(args) -> SystemParams:
    base = SystemParams()
    values = {}
    for name in PRIMITIVES:
        lin, db = getattr(args, name), getattr(args, f"{name}_db")
        values[name] = lin if lin is not None else db_to_linear(db) if db is not None else getattr(base, name)
    try:
        return SystemParams(**values)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    for key in ("seed", "trials", "workers"):
        if getattr(args, key) is not None:
            setattr(cfg, key, getattr(args, key))
    if "mc" in cfg.methods and cfg.trials < 10_000:
        log.warning("only %d Monte Carlo trials; normal-approximation CIs are rough", cfg.trials)
    out = args.out if args.out is not None else cfg.out
    text = rows_to_csv(run_experiment(cfg))
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        out = Path(out)
        if not out.is_absolute() and args.out is None:
            out = (args.config.parent / out).resolve()
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.exponential:
        cfg.verify["sanity"] = "exponential"
    ok, report = verify_config(cfg)
    print(report)
    print("RESULT:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_point(args) -> int:
    params = _params_from_flags(args)
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    metric = "mean" if args.epsilon is None else "outage"
    if args.epsilon is not None and not 0.0 < args.epsilon < 1.0:
        raise ConfigError("--epsilon must lie in (0, 1)")
    value, lo, hi = evaluate(
        args.method, params, args.n, metric, args.epsilon or 0.1,
        trials=args.trials, seed=args.seed, workers=args.workers,
        shared_interference=args.shared_interference,
    )
    label = "mean capacity" if metric == "mean" else f"outage capacity (eps={args.epsilon:g})"
    print(f"{args.method} {label}, N={args.n}")
    print(f"value_nats={value:.12g}")
    print(f"value_bits={value / math.log(2):.12g}")
    if lo is not None:
        print(f"ci_nats=[{lo:.12g}, {hi:.12g}]")
    if args.out is not None:
        from .experiment import Row

        args.out.write_text(rows_to_csv([Row("N", args.n, args.n, args.method, value, lo, hi)]))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {"run": cmd_run, "verify": cmd_verify, "point": cmd_point}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutOfRegimeError as exc:
        print(f"out of regime: {exc}", file=sys.stderr)
        return EXIT_REGIME if args.command == "point" else EXIT_NUMERICAL
    except InsufficientTrialsError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, GridError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
