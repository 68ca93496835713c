"""Command-line entry point ``mts-oracle``.

Exit codes: 0 success, 2 data error (missing or malformed input data),
3 spec error (bad spec file or bad command-line usage).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .. import datasets
from ..combine import FtpPolicy
from ..core import INF
from ..errors import SpecError
from .generators import gen_coupon_collector_caching, gen_uniform_mts_adversary
from .output import emit_csv, emit_plot_data
from .runner import run_experiment
from .spec import load_spec

EXIT_OK, EXIT_DATA, EXIT_SPEC = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_SPEC, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mts-oracle", description="Prediction-augmented online algorithms: experiments and generators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment spec")
    run.add_argument("--spec", required=True, type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--out", type=Path, default=Path("results.csv"), help="CSV path; plot data goes to <stem>.plot.json")

    ds = sub.add_parser("datasets", help="dataset utilities")
    ds_sub = ds.add_subparsers(dest="action", required=True, parser_class=_Parser)
    fc = ds_sub.add_parser("fetch-check", help="check that downloaded datasets are present and parse")
    fc.add_argument("--data-dir", type=Path)

    gen = sub.add_parser("gen", help="generate instances")
    gen_sub = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    adv = gen_sub.add_parser("adversary", help="phased uniform-metric adversary against FtP")
    adv.add_argument("--n", type=int, default=5)
    adv.add_argument("--eta-bar", type=float, default=1.0)
    adv.add_argument("--rounds", type=int, default=10)
    coup = gen_sub.add_parser("coupon", help="uniform random requests over k+1 pages")
    coup.add_argument("--k", type=int, default=32)
    coup.add_argument("--length", type=int, default=100_000)
    for g in (adv, coup):
        g.add_argument("--seed", type=int, default=0)
        g.add_argument("--trials", type=int, default=1, help="number of instances to generate")
        g.add_argument("--out", type=Path, help="output file (default: stdout)")
    return p


def _cost(c):
    return "inf" if c == INF else c


def _cmd_run(args) -> int:
    spec = load_spec(args.spec, seed=args.seed, trials=args.trials, workers=args.workers)
    rows = run_experiment(spec)
    out = args.out
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True)
    emit_csv(rows, out)
    emit_plot_data(rows, out.with_suffix(".plot.json"))
    for r in rows:
        param = "" if r.param is None else f" {r.param:g}"
        print(f"{r.algorithm:>14} {r.predictor}{param}: {r.mean_ratio:.4f} ± {r.std_ratio:.4f}")
    return EXIT_OK


def _cmd_fetch_check(args) -> int:
    report = datasets.fetch_check(args.data_dir)
    print(f"brightkite: {report['brightkite'] or 'missing'}")
    print(f"citi: {len(report['citi'])} file(s)")
    for p in report["citi"]:
        print(f"  {p}")
    if report["brightkite"] is None or not report["citi"]:
        print(
            "download BrightKite from https://snap.stanford.edu/data/loc-brightkite.html and Citi Bike 2017 "
            "from https://s3.amazonaws.com/tripdata/index.html into $MTS_ORACLE_DATA",
            file=sys.stderr,
        )
        return EXIT_DATA
    return EXIT_OK


def _cmd_gen(args) -> int:
    docs = []
    for t in range(args.trials):
        seed = args.seed + t
        if args.kind == "adversary":
            a = gen_uniform_mts_adversary(args.n, args.eta_bar, args.rounds, FtpPolicy(), seed)
            docs.append(
                {
                    "n": args.n,
                    "eta_bar": args.eta_bar,
                    "initial_state": a.instance.initial_state,
                    "tasks": [[_cost(c) for c in task.costs] for task in a.instance.tasks],
                    "predictions": list(a.predictions.predictions),
                    "offline_states": list(a.offline_states),
                    "phase_length": a.phase_length,
                }
            )
        else:
            inst = gen_coupon_collector_caching(args.k, args.length, seed)
            docs.append({"k": inst.k, "seed": seed, "requests": list(inst.requests)})
    text = json.dumps(docs[0] if len(docs) == 1 else docs)
    if args.out:
        args.out.write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "datasets":
            return _cmd_fetch_check(args)
        return _cmd_gen(args)
    except SpecError as e:
        print(f"spec error: {e}", file=sys.stderr)
        return EXIT_SPEC
    except (OSError, ValueError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
