"""Batch command-line front end.

Exit codes: 0 success, 1 domain or validation error, 2 I/O, syntax or usage
error. Results go to stdout only after the whole command succeeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .classify import BlendWeights, Method, classify, estimate_weights, likelihood_matrix, posterior_update, weight_accuracy
from .conformance import (
    CostScheme,
    SyncCost,
    expected_conformance,
    matrix_conformance,
    model_conformance_stochastic,
)
from .core import DEFAULT_REALIZATION_CAP, argmax_decode, collapse_frames
from .errors import ParseError, SKError
from .ingest import format_trace, parse_trace_text, read_log, read_matrix, write_matrix
from .measures import Measure
from .synth import NoiseModel, adjacent_confusion, synthesize_log

SCHEMA_VERSION = 1

_CLASSIFY_METHODS = {
    "frobenius": Method.MATRIX_FROBENIUS,
    "matrix_frobenius": Method.MATRIX_FROBENIUS,
    "stochastic_alignment": Method.STOCHASTIC_ALIGNMENT,
    "alignment": Method.STOCHASTIC_ALIGNMENT,
    "expected_cost": Method.EXPECTED_COST,
}


class UsageError(Exception):
    pass


def _scheme(args: argparse.Namespace) -> CostScheme:
    return CostScheme(SyncCost(args.sync_cost), args.log_cost, args.model_cost)


def _moves(alignment) -> list[dict[str, Any]]:
    return [
        {
            "kind": mv.kind.value,
            "log_position": mv.log_position,
            "model_activity": mv.model_activity,
            "cost": mv.cost,
        }
        for mv in alignment.moves
    ]


def _matrix_rows(sk) -> dict[str, list[float]]:
    return {label: [float(x) for x in sk.matrix[i]] for i, label in enumerate(sk.alphabet.labels)}


def cmd_validate(args) -> tuple[dict, str]:
    sk = read_matrix(args.trace)
    result = {
        "activities": list(sk.alphabet.labels),
        "events": sk.m,
        "column_sums": [float(s) for s in sk.matrix.sum(axis=0)],
    }
    return result, f"ok: {sk.n} activities x {sk.m} events\n"


def cmd_decode(args) -> tuple[dict, str]:
    sk = read_matrix(args.trace)
    if args.collapse:
        sk = collapse_frames(sk)
    trace = argmax_decode(sk)
    return {"trace": list(trace.activities), "collapsed": args.collapse}, format_trace(trace) + "\n"


def cmd_conform(args) -> tuple[dict, str]:
    sk = read_matrix(args.trace)
    model = read_log(args.model)
    if args.method == "alignment":
        res = model_conformance_stochastic(sk, model, _scheme(args))
        result = {
            "method": "alignment",
            "best_trace": list(res.trace.activities),
            "score": res.cost,
            "alignment": _moves(res.alignment),
        }
    else:
        res = matrix_conformance(sk, model, Measure(args.method))
        result = {"method": args.method, "best_trace": list(res.trace.activities), "score": res.cost}
    text = f"best trace: {format_trace(res.trace)}\nscore: {res.cost:.6f}\n"
    return result, text


def cmd_classify(args) -> tuple[dict, str]:
    sk = read_matrix(args.trace)
    models = []
    for path in args.model:
        ident = Path(path).stem
        if any(ident == other for other, _ in models):
            ident = path
        models.append((ident, read_log(path)))
    res = classify(sk, models, _CLASSIFY_METHODS[args.method], scheme=_scheme(args))
    result = {
        "method": res.method.value,
        "winner": res.winner,
        "ranking": [{"model": ident, "score": score} for ident, score in res.ranking],
        "fallbacks": list(res.fallbacks),
    }
    width = max(len(ident) for ident, _ in res.ranking)
    lines = [f"winner: {res.winner}"] + [f"  {ident:<{width}}  {score:.6f}" for ident, score in res.ranking]
    return result, "\n".join(lines) + "\n"


def cmd_posterior(args) -> tuple[dict, str]:
    prior = read_matrix(args.trace)
    log = read_log(args.log)
    tl = likelihood_matrix(prior, log)
    weights = BlendWeights(args.alpha)
    post = posterior_update(prior, tl, weights)
    decoded = argmax_decode(post)
    text = write_matrix(post, args.precision)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    result = {
        "alpha": weights.alpha,
        "beta": weights.beta,
        "likelihood_terms": [
            {"trace": list(t.activities), "distance": d, "proximity": w, "coefficient": c}
            for t, d, w, c in zip(tl.traces, tl.distances, tl.proximities, tl.coefficients)
        ],
        "posterior": _matrix_rows(post),
        "decoded": list(decoded.activities),
    }
    return result, text + f"# decoded: {format_trace(decoded)}\n"


def cmd_expected(args) -> tuple[dict, str]:
    sk = read_matrix(args.trace)
    model = read_log(args.model)
    res = expected_conformance(sk, model, args.min_prob, max_realizations=args.max_realizations)
    result = {
        "expected_cost": res.expected_cost,
        "covered_mass": res.covered_mass,
        "realizations": res.realizations,
        "zero_coverage": res.zero_coverage,
    }
    text = (
        f"expected cost: {res.expected_cost:.6f}\n"
        f"covered mass: {res.covered_mass:.6f}\n"
        f"realizations: {res.realizations}\n"
    )
    if res.zero_coverage:
        text += "warning: no realization above min-prob; nothing was covered\n"
    return result, text


def cmd_synth(args) -> tuple[dict, str]:
    model = read_log(args.model)
    confusion = adjacent_confusion(len(model.alphabet)) if args.smear == "adjacent" else None
    noise = NoiseModel(args.epsilon, confusion, args.seed)
    pairs = synthesize_log(model, args.count, noise)
    docs = [f"# truth: {format_trace(truth)}\n" + write_matrix(sk, args.precision) for sk, truth in pairs]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for k, doc in enumerate(docs):
            (out / f"trace_{k:05d}.csv").write_text(doc, encoding="utf-8")
    result = {
        "seed": args.seed,
        "epsilon": args.epsilon,
        "smear": args.smear,
        "traces": [
            {"truth": list(truth.activities), "matrix": _matrix_rows(sk)} for sk, truth in pairs
        ],
    }
    return result, "\n".join(docs)


def cmd_weights(args) -> tuple[dict, str]:
    log = read_log(args.log)
    pairs = []
    for obs_path, truth_text in args.pair:
        obs = read_matrix(obs_path, log.alphabet)
        pairs.append((obs, parse_trace_text(truth_text, log.alphabet)))
    curve = weight_accuracy(pairs, log, args.grid_step)
    weights = estimate_weights(pairs, log, args.grid_step)
    result = {
        "alpha": weights.alpha,
        "beta": weights.beta,
        "pairs": len(pairs),
        "curve": [{"alpha": a, "hits": h} for a, h in curve],
    }
    lines = [f"alpha: {weights.alpha:.4f}", f"beta: {weights.beta:.4f}"]
    lines += [f"  alpha={a:.4f}  hits={h}/{len(pairs)}" for a, h in curve]
    return result, "\n".join(lines) + "\n"


def _add_scheme_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sync-cost", choices=[s.value for s in SyncCost], default=SyncCost.ONE_MINUS_P.value)
    p.add_argument("--log-cost", type=float, default=1.0, help="cost of a log-only move")
    p.add_argument("--model-cost", type=float, default=1.0, help="cost of a model-only move")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skconform", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, func, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=["table", "json"], default="table")
        return p

    p = command("validate", cmd_validate, "check a probability matrix file")
    p.add_argument("--trace", required=True)

    p = command("decode", cmd_decode, "argmax-decode a probability matrix")
    p.add_argument("--trace", required=True)
    p.add_argument("--collapse", action="store_true", help="merge same-argmax frame runs first")

    p = command("conform", cmd_conform, "conformance of a matrix against one model")
    p.add_argument("--trace", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--method", choices=["frobenius", "cross_entropy", "alignment"], default="frobenius")
    _add_scheme_flags(p)

    p = command("classify", cmd_classify, "rank candidate models for a matrix")
    p.add_argument("--trace", required=True)
    p.add_argument("--model", required=True, action="append")
    p.add_argument("--method", choices=sorted(_CLASSIFY_METHODS), default="frobenius")
    _add_scheme_flags(p)

    p = command("posterior", cmd_posterior, "blend a matrix with a reference log")
    p.add_argument("--trace", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--alpha", type=float, default=0.5, help="weight of the observation")
    p.add_argument("--precision", type=int, default=6)
    p.add_argument("--out", help="also write the posterior matrix to this path")

    p = command("expected", cmd_expected, "expected alignment cost over all realizations")
    p.add_argument("--trace", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--min-prob", type=float, default=0.0)
    p.add_argument("--max-realizations", type=int, default=DEFAULT_REALIZATION_CAP)

    p = command("synth", cmd_synth, "synthesize noisy matrices from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--smear", choices=["uniform", "adjacent"], default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision", type=int, default=6)
    p.add_argument("--out", help="directory to write one matrix file per trace")

    p = command("weights", cmd_weights, "grid-search the observation weight alpha")
    p.add_argument("--log", required=True)
    p.add_argument("--pair", nargs=2, action="append", required=True, metavar=("MATRIX", "TRUTH"))
    p.add_argument("--grid-step", type=float, default=0.1)
    return parser


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    try:
        result, text = args.func(args)
    except ParseError as exc:
        print(f"skconform {args.command}: syntax error: {exc}", file=stderr)
        return 2
    except OSError as exc:
        print(f"skconform {args.command}: {exc.strerror or exc}: {exc.filename}", file=stderr)
        return 2
    except SKError as exc:
        print(f"skconform {args.command}: {type(exc).__name__}: {exc}", file=stderr)
        return 1

    if args.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": args.command, "result": result}
        stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
