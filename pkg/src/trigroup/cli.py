"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 resource cap hit.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import collapse, experiments, intersection, presentation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CAPPED = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="trigroup",
                     description="Random triangular groups: sampling, collapse "
                                 "certification, and threshold experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a presentation and write it to a file")
    p.add_argument("--n", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--t", type=int, help="uniform model: relation count")
    group.add_argument("--p", type=float, help="binomial model: inclusion probability")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verdict", help="certify a presentation file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--max-steps", type=int, default=experiments.DEFAULT_MAX_OPS)
    p.add_argument("--cert", help="write the triviality certificate here")

    p = sub.add_parser("witness", help="run the two-stage witness pipeline")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c1", type=float, default=1.2,
                   help="p = c1 * n^(-3/2) (default 1.2)")
    p.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("gamma", help="giant-component fixed point")
    p.add_argument("--beta", type=float, required=True)

    p = sub.add_parser("rig", help="random intersection graph experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="threshold sweep over (n, C) cells")
    p.add_argument("--n-list", required=True, help="comma-separated n values")
    p.add_argument("--c-list", required=True, help="comma-separated C values")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--model", choices=experiments.MODELS, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    return parser


def _format_of(path: str) -> str:
    return "json" if path.endswith(".json") else "csv"


def _cmd_sample(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.t is not None:
        pres = presentation.sample_uniform(args.n, args.t, rng)
    else:
        pres = presentation.sample_binomial(args.n, args.p, rng)
    presentation.save_presentation(pres, args.out)
    print(f"wrote n={pres.n}, t={pres.t} to {args.out}")
    return EXIT_OK


def _cmd_verdict(args) -> int:
    pres = presentation.load_presentation(args.input)
    v = collapse.verdict(pres, max_ops=args.max_steps)
    if v.kind == collapse.VERDICT_TRIVIAL:
        print(f"trivial ({len(v.certificate)} certificate steps)")
        if args.cert:
            with open(args.cert, "w", encoding="utf-8") as fh:
                fh.write(collapse.serialize_certificate(v.certificate))
    elif v.kind == collapse.VERDICT_NONTRIVIAL:
        factors = ",".join(str(f) for f in v.invariant_factors) or "-"
        print(f"nontrivial-abelianization (invariant factors: {factors}, "
              f"free rank: {v.free_rank})")
    else:
        print("unknown" + (" (resource cap hit)" if v.resource_capped else ""))
        if v.resource_capped:
            return EXIT_CAPPED
    return EXIT_OK


def _cmd_witness(args) -> int:
    p = args.c1 * args.n ** -1.5
    rng = np.random.default_rng(args.seed)
    split = presentation.sample_two_stage(args.n, p, rng)
    result = collapse.witness_pipeline(split)
    if result.success:
        print(f"success: component of {len(result.component)} letters "
              f"(fraction {result.component_fraction:.4f}), "
              f"{len(result.certificate)} certificate steps")
    else:
        print(f"failure: {result.failure_reason} "
              f"(largest fraction {result.component_fraction:.4f})")
    return EXIT_OK


def _cmd_gamma(args) -> int:
    gamma = intersection.gamma_solve(args.beta)
    print(f"gamma={gamma:.12f} giant_fraction={1.0 - gamma:.12f}")
    return EXIT_OK


def _cmd_rig(args) -> int:
    table = experiments.giant_experiment(args.n, args.alpha, args.beta,
                                         args.trials, args.seed)
    experiments.emit(table, _format_of(args.out), args.out)
    print(f"wrote {len(table.rows)} trials to {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        n_values = tuple(int(x) for x in args.n_list.split(","))
        c_values = tuple(float(x) for x in args.c_list.split(","))
    except ValueError as exc:
        raise _UsageError(f"bad list argument: {exc}") from exc
    grid = experiments.SweepGrid(n_values, c_values, args.trials, args.model,
                                 args.seed, jobs=args.jobs)
    table = experiments.sweep(grid)
    experiments.emit(table, _format_of(args.out), args.out)
    print(f"wrote {len(table.rows)} cells to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "sample": _cmd_sample,
    "verdict": _cmd_verdict,
    "witness": _cmd_witness,
    "gamma": _cmd_gamma,
    "rig": _cmd_rig,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (presentation.PresentationError, collapse.CollapseError,
            experiments.ExperimentError, intersection.GraphError,
            ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
