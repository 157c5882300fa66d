"""Command-line experiment runner.

    lpss list
    lpss run <config.json | preset> [--seed S] [--reps R] [--out DIR] [--jobs K] [--per-rep]
    lpss show <preset>
    lpss sample --method LPSS --dim 6 --n 625 --notation "4 1^2" --out sample.csv

Exit codes: 0 success, 2 configuration error, 3 numerical-contract violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import distributions
from .config import ExperimentConfig, load_config, run_experiment
from .design_spec import make_design
from .designs import generate
from .errors import ContractError, LPSSError
from .presets import PRESETS, preset

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3


def _resolve(target: str) -> ExperimentConfig:
    path = Path(target)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise LPSSError(f"config file {target} not found")
        return load_config(path)
    return preset(target)


def _cmd_list(args) -> int:
    width = max(map(len, PRESETS))
    for name in PRESETS:
        print(f"{name:<{width}}  {preset(name).description}")
    return EXIT_OK


def _cmd_show(args) -> int:
    sys.stdout.write(_resolve(args.target).to_json())
    return EXIT_OK


def _cmd_run(args) -> int:
    config = _resolve(args.target).with_overrides(args.seed, args.reps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    result = run_experiment(config, jobs=args.jobs, progress=log)
    summary = out / f"{config.name}.csv"
    summary.write_text(result.summary_csv())
    (out / f"{config.name}.config.json").write_text(config.to_json())
    written = [summary]
    if args.per_rep and config.kind == "variance":
        reps = out / f"{config.name}.replications.csv"
        reps.write_text(result.replications_csv())
        written.append(reps)
    for p in written:
        print(p)
    return EXIT_OK


def _cmd_sample(args) -> int:
    marg = distributions.from_dict(json.loads(args.marginal))
    spec = make_design(
        args.method, args.dim, args.n, notation=args.notation,
        counts=json.loads(args.counts) if args.counts else None, seed=args.seed,
    )
    s = generate(spec, marg)
    problems = s.verify()
    if problems:
        raise ContractError("; ".join(problems))
    if args.out:
        s.write(args.out)
        print(args.out)
    else:
        sys.stdout.write(s.to_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpss", description="Stratified-sampling variance studies.")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list preset experiments").set_defaults(func=_cmd_list)

    show = sub.add_parser("show", help="print a preset or config as JSON")
    show.add_argument("target")
    show.set_defaults(func=_cmd_show)

    run = sub.add_parser("run", help="run a config file or preset")
    run.add_argument("target", help="path to a JSON config or a preset name")
    run.add_argument("--seed", type=int, help="override the base seed")
    run.add_argument("--reps", type=int, help="override the replication count")
    run.add_argument("--out", default="results", help="output directory (default: results)")
    run.add_argument("--jobs", type=int, default=1, help="parallel replication workers")
    run.add_argument("--per-rep", action="store_true", help="also write every replication estimate")
    run.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    run.set_defaults(func=_cmd_run)

    smp = sub.add_parser("sample", help="draw and write one sample set")
    smp.add_argument("--method", required=True)
    smp.add_argument("--dim", type=int, required=True)
    smp.add_argument("--n", type=int, required=True)
    smp.add_argument("--notation")
    smp.add_argument("--counts", help="JSON strata counts, e.g. '[[5,5]]'")
    smp.add_argument("--marginal", default='{"kind": "uniform", "lower": 0, "upper": 1}',
                     help="JSON marginal applied to every variable")
    smp.add_argument("--seed", type=int, default=0)
    smp.add_argument("--out", help="CSV path; metadata goes next to it as .json")
    smp.set_defaults(func=_cmd_sample)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContractError as exc:
        print(f"error: numerical contract violated: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (LPSSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
