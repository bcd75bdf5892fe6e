"""Command-line entry points.

    firmkinetics run <plan.json>            execute a plan (base or sweep)
    firmkinetics sweep <plan.json>          execute a plan that must sweep
    firmkinetics validate <plan.json>       run the plan's invariant checks
    firmkinetics sample-simplex --n N --count C --seed S [--out FILE]

Exit codes: 0 success, 1 execution or plan failure, 2 validation checks
failed.  ``--seed`` overrides the plan seed, ``--output-dir`` (or the
FIRMKINETICS_OUTPUT_DIR environment variable) overrides the destination.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path


from .plans import PlanError, execute, load_plan, validate, write_csv
from .seeding import spawn_rng
from .simplex import sample_simplex_block


def _add_plan_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("plan", type=Path, help="plan JSON file")
    sub.add_argument("--seed", type=int, default=None, help="override the plan seed")
    sub.add_argument(
        "--output-dir", type=Path, default=None, help="override the output directory"
    )
    sub.add_argument(
        "--workers", type=int, default=None, help="concurrent sweep cells"
    )
    sub.add_argument(
        "--full",
        action="store_true",
        help="apply the plan's full-scale overrides (publication-scale step counts)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firmkinetics",
        description="Conserved kinetic-exchange firm-size simulator",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    _add_plan_options(subs.add_parser("run", help="execute a plan"))
    _add_plan_options(subs.add_parser("sweep", help="execute a sweeping plan"))

    val = subs.add_parser("validate", help="run invariant checks for a plan")
    val.add_argument("plan", type=Path, help="plan JSON file")
    val.add_argument("--seed", type=int, default=None, help="override the plan seed")

    ss = subs.add_parser(
        "sample-simplex", help="emit uniform simplex samples as CSV"
    )
    ss.add_argument("--n", type=int, required=True, help="shares per sample (>= 2)")
    ss.add_argument("--count", type=int, required=True, help="number of samples")
    ss.add_argument("--seed", type=int, required=True, help="random seed")
    ss.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    return parser


def _cmd_execute(args, require_sweep: bool) -> int:
    try:
        plan = load_plan(args.plan)
    except PlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if require_sweep and plan.sweep is None:
        print("error: sweep: plan has no sweep axis", file=sys.stderr)
        return 1
    result = execute(
        plan,
        full=args.full,
        seed_override=args.seed,
        output_dir_override=args.output_dir,
        workers_override=args.workers,
    )
    for path in result.files:
        print(path)
    print(result.manifest)
    if not result.ok:
        print(f"error: {result.error}", file=sys.stderr)
        return 1
    return 0


def _cmd_validate(args) -> int:
    try:
        plan = load_plan(args.plan)
    except PlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        from dataclasses import replace

        plan = replace(
            plan,
            economy_raw={**plan.economy_raw, "seed": args.seed},
            base=replace(plan.base, seed=args.seed),
        )
    report = validate(plan)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 2


def _cmd_sample_simplex(args) -> int:
    if args.n < 2 or args.count < 1:
        print("error: need --n >= 2 and --count >= 1", file=sys.stderr)
        return 1
    rng = spawn_rng(args.seed)
    samples = sample_simplex_block(args.n, args.count, rng)
    header = [f"eps_{i}" for i in range(args.n)]
    if args.out is None:
        print(",".join(header))
        for row in samples:
            print(",".join(repr(float(v)) for v in row))
    else:
        write_csv(args.out, header, [samples[:, i] for i in range(args.n)])
        print(args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_execute(args, require_sweep=False)
    if args.command == "sweep":
        return _cmd_execute(args, require_sweep=True)
    if args.command == "validate":
        return _cmd_validate(args)
    return _cmd_sample_simplex(args)


if __name__ == "__main__":
    sys.exit(main())
