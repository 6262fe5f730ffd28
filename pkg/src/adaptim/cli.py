"""``adaptim`` command line: ``run``, ``verify`` and ``stats``.

Exit codes: 0 success, 1 usage or input error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .bench import ExperimentSpec, SpecError, dataset_stats, parse_spec_text, run_experiment
from .graph import load_edge_list

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bool(text: str) -> bool:
    return text.lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="adaptim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment sweep and write CSV")
    run.add_argument("spec", nargs="?", help="spec file with key=value lines")
    run.add_argument("--dataset")
    run.add_argument("--directed", type=_bool)
    run.add_argument("--sweep", choices=["b", "k"])
    run.add_argument("--k")
    run.add_argument("--b")
    run.add_argument("--r")
    run.add_argument("--eps")
    run.add_argument("--delta")
    run.add_argument("--mode", "--algorithms", dest="algorithms",
                     help="comma list of expected, worst_case, naive, fixed, nonadaptive")
    run.add_argument("--realizations")
    run.add_argument("--pool-size", dest="pool_size")
    run.add_argument("--probabilities", choices=["wc", "file"])
    run.add_argument("--seed")
    run.add_argument("--out")
    run.add_argument("--workers")

    ver = sub.add_parser("verify", help="run the oracle property suite")
    ver.add_argument("--suite", choices=["quick", "full"], default="full")
    ver.add_argument("--seed", type=int, default=0)

    st = sub.add_parser("stats", help="summarize a dataset")
    st.add_argument("dataset")
    st.add_argument("--directed", type=_bool, default=True)
    return p


_OVERRIDES = ["dataset", "sweep", "k", "b", "r", "eps", "delta", "algorithms", "realizations",
              "pool_size", "probabilities", "seed", "out", "workers"]


def spec_from_args(args) -> ExperimentSpec:
    values = {}
    if args.spec:
        values.update(parse_spec_text(Path(args.spec).read_text()))
    overrides = "\n".join(f"{name}={getattr(args, name)}" for name in _OVERRIDES
                          if getattr(args, name) is not None)
    values.update(parse_spec_text(overrides))
    if args.directed is not None:
        values["directed"] = args.directed
    return replace(ExperimentSpec(), **values)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "run":
        try:
            out = run_experiment(spec_from_args(args))
        except (SpecError, OSError) as exc:
            print(f"adaptim run: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(out)
        return EXIT_OK

    if args.command == "verify":
        from .checks import run_all
        results = run_all(seed=args.seed, quick=args.suite == "quick")
        failed = [r for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
        return EXIT_VERIFY if failed else EXIT_OK

    try:
        g = load_edge_list(args.dataset, directed=args.directed)
    except (OSError, ValueError) as exc:
        print(f"adaptim stats: {exc}", file=sys.stderr)
        return EXIT_USAGE
    s = dataset_stats(g)
    print(f"n={s['n']} m={s['m']} avg_degree={s['avg_degree']:.2f}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
