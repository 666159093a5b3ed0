"""Command-line front end.

    vmqkd run [--config FILE] [--p 11 --t 3 ... --target efficiency,abort_rate]
    vmqkd validate-math [--corrupt-omega]

Exit status is 0 only when every requested target meets its threshold.
"""

import argparse
import sys

from .errors import ConfigError, VMQKDError
from .scenario import TARGETS, convert, load_spec, run_scenario, validate_math

_FLAGS = [
    ("--p", "p"), ("--t", "t"), ("--n", "n"), ("--h-degree", "h_degree"), ("--m", "m"),
    ("--eps1", "eps1"), ("--eps2", "eps2"), ("--noise", "noise"),
    ("--eve-fraction", "eve_fraction"), ("--eve-basis-pool", "eve_basis_pool"),
    ("--seed", "seed"), ("--trials", "trials"), ("--max-rounds", "max_rounds"),
    ("--window", "window"), ("--target", "target"), ("--out", "out"),
    ("--transcript-dir", "transcript_dir"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vmqkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a batch of seeded trials and report metrics")
    run.add_argument("--config", help="key = value scenario file; flags override it")
    for flag, dest in _FLAGS:
        run.add_argument(flag, dest=dest, default=None)
    run.add_argument("--example-replay", dest="example_replay", action="store_true", default=None,
                     help="also replay the F_11 worked example")
    run.epilog = "targets: " + ", ".join(TARGETS)

    vm = sub.add_parser("validate-math", help="numeric MUB unbiasedness and shift-law checks")
    vm.add_argument("--primes", default="3,5,7,11,13")
    vm.add_argument("--corrupt-omega", action="store_true", help="fault injection: perturb the root-of-unity table")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate-math":
        try:
            primes = tuple(int(p) for p in args.primes.split(","))
            report = validate_math(primes, corrupt=args.corrupt_omega)
        except (ValueError, VMQKDError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        sys.stdout.write(report.text())
        return 0 if report.passed else 1

    try:
        overrides = {dest: convert(dest, getattr(args, dest)) for _, dest in _FLAGS if getattr(args, dest) is not None}
        if args.example_replay:
            overrides["example_replay"] = True
        spec = load_spec(args.config, **overrides)
        report = run_scenario(spec)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.text())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
