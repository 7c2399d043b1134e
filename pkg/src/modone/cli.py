"""``modone`` command line.

Exit status: 0 success, 1 usage error, 2 reproduction mismatch,
3 resource limit hit.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys

from . import __version__
from .errors import InvalidArgument, ResourceLimit
from .experiments import compute, load_config, run_experiment
from .export import Table, histogram_table, render, scalar_table, write_table
from .worksheet import DEFAULT_N, repro_maple

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_RESOURCE = 0, 1, 2, 3

log = logging.getLogger("modone")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output directory (default: print the main table)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modone", description="Local statistics of sequences mod one.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("repro-maple", help="rebuild the 6001-point gap histogram of sqrt(m sqrt 2)")
    _common(p)
    p.add_argument("--n", type=int, default=DEFAULT_N)
    p.add_argument("--arithmetic", choices=("worksheet", "double"), default="worksheet")

    p = sub.add_parser("run", help="run an experiment configuration file")
    p.add_argument("config")
    _common(p)

    p = sub.add_parser("gaps", help="gap histogram of a generated sequence")
    _common(p)
    p.add_argument("--generator", choices=("malpha", "sqrt", "iid"), default="sqrt")
    p.add_argument("--alpha", type=float, default=math.sqrt(2.0))
    p.add_argument("--n", type=int, default=DEFAULT_N)
    p.add_argument("--convention", choices=("circular", "open-chain"), default="circular")

    p = sub.add_parser("ekl", help="empirical E_N(k, L)")
    _common(p)
    p.add_argument("--generator", choices=("malpha", "sqrt", "iid"), default="malpha")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=10_000)

    p = sub.add_parser("oracle", help="E(k, L) by Monte-Carlo over the homogeneous space")
    _common(p)
    p.add_argument("--psi", choices=("rectangle", "triangle"), default="rectangle")
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--workers", type=int)
    p.add_argument("--budget", type=int)

    p = sub.add_parser("dioph", help="diophantine profile, counting bound and singular average")
    _common(p)
    p.add_argument("--alpha", type=float, default=math.sqrt(2.0))
    p.add_argument("--q-max", type=int, default=100_000)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--beta", type=float, default=0.5)
    return parser


def _emit(cfg: dict, args) -> int:
    if args.out:
        for path in run_experiment(cfg, args.out):
            print(path)
        return EXIT_OK
    full, outputs = compute(cfg)
    table = next(v for v in outputs.values() if isinstance(v, Table))
    header = {k: v for k, v in full.items() if k != "out_dir"}
    sys.stdout.write(render(table, header, args.format))
    return EXIT_OK


def _repro(args) -> int:
    res = repro_maple(args.n, args.arithmetic)
    print(f"outliers > 7.0 ({res.outliers.size}):")
    print("[" + ", ".join(f"{x:.10f}" for x in res.outliers) + "]")
    if args.out:
        cfg = {"command": "repro-maple", "n": args.n, "arithmetic": args.arithmetic}
        ext = args.format
        write_table(f"{args.out}/maple_histogram.{ext}", histogram_table(res.histogram), cfg, ext)
        write_table(f"{args.out}/maple_outliers.{ext}",
                    scalar_table([(f"outlier_{i + 1}", x, 0.0) for i, x in enumerate(res.outliers)]), cfg, ext)
    if res.matched:
        print(f"match: 15 outliers, max abs error {res.max_error:.3g}")
        return EXIT_OK
    print("MISMATCH against the reference outlier list:", file=sys.stderr)
    print(res.report, file=sys.stderr)
    return EXIT_MISMATCH


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.command == "repro-maple":
            return _repro(args)
        if args.command == "run":
            cfg = load_config(args.config)
            cfg["seed"] = cfg.get("seed", args.seed)
            cfg.setdefault("format", args.format)
            for path in run_experiment(cfg, args.out):
                print(path)
            return EXIT_OK
        base = {"seed": args.seed, "format": args.format}
        if args.command == "gaps":
            cfg = dict(base, experiment="gaps", generator=args.generator, alpha=args.alpha, n=args.n,
                       convention=args.convention)
        elif args.command == "ekl":
            cfg = dict(base, experiment="ekl-empirical", generator=args.generator, n=args.n, L=args.L,
                       samples=args.samples)
        elif args.command == "oracle":
            cfg = dict(base, experiment="ekl-oracle", psi=args.psi, L=args.L, samples=args.samples,
                       k_max=args.k_max)
            if args.workers:
                cfg["workers"] = args.workers
            if args.budget is not None:
                cfg["budget"] = args.budget
        else:
            cfg = dict(base, experiment="dioph", alpha=args.alpha, q_max=args.q_max, n=args.n,
                       samples=args.samples, beta=args.beta)
        return _emit(cfg, args)
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidArgument, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
