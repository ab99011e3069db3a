"""Command-line interface.

Subcommands:

* ``relspec run``     — generate one experiment instance, solve it, and
  stream the checkpoint trace to a CSV file.
* ``relspec params``  — print the accuracy-to-budget parameter chain as JSON.
* ``relspec compare`` — run the same instance under both oracle kinds with
  shared seeds, writing one trace CSV per kind.

Exit codes: 0 success, 2 usage error (bad arguments or parameters),
3 numerical failure during a run.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Optional, Sequence

from .errors import IllConditionedError, NumericalFailure, ParameterError
from .harness import TaskSpec, compare_oracles, run_task
from .regression import select_parameters

USAGE_ERROR = 2
NUMERICAL_ERROR = 3


def _add_task_arguments(sp: argparse.ArgumentParser, with_oracle: bool) -> None:
    sp.add_argument("--mode", choices=["dense", "sparse"], required=True,
                    help="data generator: dense or sparse basis matrices")
    sp.add_argument("--d", type=int, required=True, help="number of basis matrices")
    sp.add_argument("--n", type=int, required=True, help="matrix row count")
    sp.add_argument("--m", type=int, required=True, help="matrix column count")
    sp.add_argument("--s", type=int, default=5,
                    help="stored entries per column in sparse mode (default 5)")
    sp.add_argument("--delta", type=float, default=0.01,
                    help="target relative accuracy (default 0.01)")
    sp.add_argument("--seed", type=int, default=0, help="seed for all random streams")
    if with_oracle:
        sp.add_argument("--oracle", choices=["new", "power-iteration"], default="new",
                        help="gradient oracle kind (default new)")
    sp.add_argument("--early-stop", action=argparse.BooleanOptionalAction, default=True,
                    help="stop once the measured accuracy reaches the target")
    sp.add_argument("--eval-geometric", action=argparse.BooleanOptionalAction, default=True,
                    help="evaluate at geometric checkpoints 1,2,4,... (default) "
                         "instead of every iteration")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="relspec",
        description="Stochastic solver for spectral-norm linear regression "
                    "with relative-accuracy guarantees.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write its trace CSV")
    _add_task_arguments(run, with_oracle=True)
    run.add_argument("--out", required=True, help="output trace CSV path")

    params = sub.add_parser("params", help="print the parameter chain as JSON")
    params.add_argument("--delta", type=float, required=True,
                        help="target relative accuracy")
    params.add_argument("--n", type=int, required=True, help="matrix row count")

    comp = sub.add_parser(
        "compare", help="run both oracle kinds with shared seeds, one CSV each"
    )
    _add_task_arguments(comp, with_oracle=False)
    comp.add_argument("--out-new", required=True,
                      help="trace CSV path for the unbiased oracle run")
    comp.add_argument("--out-pi", required=True,
                      help="trace CSV path for the power-iteration oracle run")
    return ap


def _task_from_args(args: argparse.Namespace, oracle: Optional[str] = None) -> TaskSpec:
    return TaskSpec(
        mode=args.mode,
        d=args.d,
        n=args.n,
        m=args.m,
        s=args.s,
        delta=args.delta,
        seed=args.seed,
        oracle=oracle if oracle is not None else args.oracle,
        early_stop=args.early_stop,
        eval_geometric=args.eval_geometric,
    )


def _summary_line(label: str, trace) -> str:
    last = trace.rows[-1]
    return (
        f"{label}: {trace.status} at iteration {last.iter}, "
        f"f_est={last.f_est:.6g}, delta_k={last.delta_k:.6g}, "
        f"matvecs={last.matvecs}"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)

    try:
        if args.command == "params":
            rp = select_parameters(args.delta, args.n)
            print(json.dumps(dataclasses.asdict(rp)))
            return 0
        if args.command == "run":
            trace = run_task(_task_from_args(args), args.out)
            print(_summary_line(args.out, trace))
            return 0
        if args.command == "compare":
            task = _task_from_args(args, oracle="new")
            results = compare_oracles(task, args.out_new, args.out_pi)
            print(_summary_line(args.out_new, results["new"]))
            print(_summary_line(args.out_pi, results["power-iteration"]))
            return 0
        parser.error(f"unknown command {args.command!r}")
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (NumericalFailure, IllConditionedError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
