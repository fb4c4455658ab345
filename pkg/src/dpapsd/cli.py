"""Command-line surface: gen / validate / exact / private / baseline /
bench / sensitivity.

Exit codes: 0 success, 1 usage error, 2 malformed input, 3 invalid
decomposition.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .experiment import MECHANISMS, ExperimentConfig, run_experiment
from .formats import (
    ParseError,
    parse_decomposition,
    parse_graph,
    serialize_decomposition,
    serialize_graph,
)
from .generators import ATTACH_CHAIN, ATTACH_RANDOM, generate_partial_ktree
from .graphs import exact_apsd
from .mechanism import (
    NOISE_OFF,
    PrivacyParams,
    input_perturbation_apsd,
    output_perturbation_apsd,
    private_apsd,
)
from .shortcut import construct_graph, sensitivity_bound
from .treedec import DecompositionError, heuristic_decomposition, validate_decomposition

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MALFORMED = 2
EXIT_INVALID_DECOMPOSITION = 3


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1 (argparse default is 2, reserved here for bad input)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(0, f"cannot read {path}: {exc.strerror}") from None


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _matrix_csv(mat):
    lines = []
    for row in mat.values:
        lines.append(",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def _matrix_jsonable(mat):
    return [
        [float(x) if math.isfinite(x) else None for x in row] for row in mat.values
    ]


def _load_graph(args):
    return parse_graph(_read(args.graph))


def _load_decomposition(args, g):
    if getattr(args, "td", None):
        t = parse_decomposition(_read(args.td))
    else:
        t = heuristic_decomposition(g)
    report = validate_decomposition(g, t)
    if not report.ok:
        raise DecompositionError("\n".join(report.violations))
    return t


def _add_io_flags(p, graph_required=True):
    p.add_argument("--graph", required=graph_required, help="graph file path")
    p.add_argument("--td", help="tree decomposition file path")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _cmd_gen(args):
    bundle = generate_partial_ktree(
        n=args.n,
        k=args.k,
        edge_keep_prob=args.keep_prob,
        weight_range=tuple(args.weight_range),
        seed=args.seed,
        attachment=args.family,
        integer_weights=args.integer_weights,
    )
    with open(args.graph, "w") as fh:
        fh.write(serialize_graph(bundle.graph))
    if args.td:
        with open(args.td, "w") as fh:
            fh.write(serialize_decomposition(bundle.decomposition, bundle.graph.n))
    print(
        f"generated n={bundle.graph.n} m={bundle.graph.edge_count} "
        f"width={bundle.decomposition.width} -> {args.graph}"
        + (f", {args.td}" if args.td else "")
    )
    return EXIT_OK


def _cmd_validate(args):
    g = _load_graph(args)
    t = parse_decomposition(_read(args.td))
    report = validate_decomposition(g, t)
    if report.ok:
        print(f"ok (width {t.width}, {t.bag_count} bags)")
        return EXIT_OK
    for violation in report.violations:
        print(violation, file=sys.stderr)
    return EXIT_INVALID_DECOMPOSITION


def _cmd_exact(args):
    g = _load_graph(args)
    dist = exact_apsd(g)
    if args.format == "csv":
        _emit(_matrix_csv(dist), args.out)
    else:
        _emit(
            json.dumps({"n": g.n, "distances": _matrix_jsonable(dist)}, indent=2)
            + "\n",
            args.out,
        )
    return EXIT_OK


def _parse_hop_budget(text):
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"--hop-budget must be 'auto' or an integer, got {text!r}")


_CLI_NOISE_MODES = {
    "exact-sensitivity": "exact-sensitivity",
    "paper": "paper-formula",
    "disabled": "disabled",
}


def _cmd_private(args):
    noise_mode = _CLI_NOISE_MODES[args.noise_mode]
    if noise_mode != NOISE_OFF and args.epsilon is None:
        raise ValueError("--epsilon is required unless --noise-mode disabled")
    g = _load_graph(args)
    t = _load_decomposition(args, g)
    params = PrivacyParams(
        epsilon=args.epsilon if args.epsilon is not None else 1.0,
        noise_mode=noise_mode,
        c=args.c,
        hop_budget=_parse_hop_budget(args.hop_budget),
    )
    out = private_apsd(g, t, params, args.seed, clamp=args.clamp)
    meta = {
        "n": g.n,
        "epsilon": args.epsilon,
        "noise_mode": noise_mode,
        "noise_scale": out.noise_scale,
        "hop_budget": out.hop_budget,
        "delta": out.delta_used,
        "depth": out.depth,
        "shortcut_count": out.shortcut_count,
        "seed": out.seed,
    }
    if args.format == "csv":
        print(
            " ".join(f"{k}={v}" for k, v in meta.items()),
            file=sys.stderr,
        )
        _emit(_matrix_csv(out.distances), args.out)
    else:
        meta["distances"] = _matrix_jsonable(out.distances)
        _emit(json.dumps(meta, indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_baseline(args):
    g = _load_graph(args)
    if args.kind == "input":
        dist = input_perturbation_apsd(g, args.epsilon, args.seed)
    else:
        dist = output_perturbation_apsd(g, args.epsilon, args.seed)
    if args.format == "csv":
        _emit(_matrix_csv(dist), args.out)
    else:
        _emit(
            json.dumps(
                {"n": g.n, "kind": args.kind, "epsilon": args.epsilon,
                 "seed": args.seed, "distances": _matrix_jsonable(dist)},
                indent=2,
            )
            + "\n",
            args.out,
        )
    return EXIT_OK


def _cmd_sensitivity(args):
    g = _load_graph(args)
    t = _load_decomposition(args, g)
    _, trace = construct_graph(g, t)
    account = sensitivity_bound(trace, g)
    items = sorted(account.contributions.items())
    if args.format == "csv":
        lines = [f"delta,{repr(account.delta)}", "u,v,contribution"]
        lines += [f"{u + 1},{v + 1},{repr(c)}" for (u, v), c in items]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(
            json.dumps(
                {
                    "delta": account.delta,
                    "contributions": [[u + 1, v + 1, c] for (u, v), c in items],
                },
                indent=2,
            )
            + "\n",
            args.out,
        )
    return EXIT_OK


def _cmd_bench(args):
    config = ExperimentConfig(
        sizes=tuple(int(x) for x in args.sizes.split(",")),
        width=args.k,
        trials=args.trials,
        epsilon=args.epsilon,
        gamma=args.gamma,
        mechanisms=tuple(args.mechanisms.split(",")),
        seed=args.seed,
        noise_mode=_CLI_NOISE_MODES[args.noise_mode],
        c=args.c,
        hop_budget=_parse_hop_budget(args.hop_budget),
        edge_keep_prob=args.keep_prob,
        weight_range=tuple(args.weight_range),
        integer_weights=args.integer_weights,
        attachment=args.family,
        workers=args.workers,
    )
    csv_path = f"{args.out}.csv"
    json_path = f"{args.out}.json"
    report = run_experiment(config, csv_path=csv_path, json_path=json_path)
    for mech in config.mechanisms:
        meds = " ".join(
            f"n={n}:{report.medians[(mech, n)]:.4g}" for n in config.sizes
        )
        slope = report.slopes[mech]
        print(f"{mech}: slope={slope:.3f} medians[{meds}]")
    if report.incomplete:
        print(f"incomplete cells: {len(report.incomplete)}", file=sys.stderr)
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def build_parser():
    parser = _Parser(
        prog="dpapsd",
        description="Differentially private all-pairs shortest distances "
        "for low tree-width graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a partial k-tree instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--keep-prob", type=float, default=1.0)
    p.add_argument("--weight-range", type=float, nargs=2, default=(0.0, 10.0),
                   metavar=("LO", "HI"))
    p.add_argument("--integer-weights", action="store_true")
    p.add_argument("--family", choices=(ATTACH_RANDOM, ATTACH_CHAIN),
                   default=ATTACH_RANDOM)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--graph", required=True, help="output graph path")
    p.add_argument("--td", help="output decomposition path")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("validate", help="check a decomposition against a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--td", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("exact", help="exact all-pairs shortest distances")
    _add_io_flags(p)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("private", help="run the private release mechanism")
    _add_io_flags(p)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--noise-mode", choices=tuple(_CLI_NOISE_MODES),
                   default="exact-sensitivity")
    p.add_argument("--c", type=float, default=5.0)
    p.add_argument("--hop-budget", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clamp", action="store_true",
                   help="clamp negative noisy weights to zero (experimentation only)")
    p.set_defaults(func=_cmd_private)

    p = sub.add_parser("baseline", help="input/output perturbation baselines")
    p.add_argument("--kind", choices=("input", "output"), required=True)
    _add_io_flags(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("sensitivity", help="print delta and per-edge contributions")
    _add_io_flags(p)
    p.set_defaults(func=_cmd_sensitivity)

    p = sub.add_parser("bench", help="run an experiment sweep")
    p.add_argument("--sizes", required=True, help="comma-separated vertex counts")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--mechanisms", default="main,input-perturbation",
                   help=f"comma-separated subset of {','.join(MECHANISMS)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-mode", choices=tuple(_CLI_NOISE_MODES),
                   default="exact-sensitivity")
    p.add_argument("--c", type=float, default=5.0)
    p.add_argument("--hop-budget", default="auto")
    p.add_argument("--keep-prob", type=float, default=1.0)
    p.add_argument("--weight-range", type=float, nargs=2, default=(0.0, 10.0),
                   metavar=("LO", "HI"))
    p.add_argument("--integer-weights", action="store_true")
    p.add_argument("--family", choices=(ATTACH_RANDOM, ATTACH_CHAIN),
                   default=ATTACH_RANDOM)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="bench", help="output path prefix")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except DecompositionError as exc:
        print(f"error: invalid decomposition: {exc}", file=sys.stderr)
        return EXIT_INVALID_DECOMPOSITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
