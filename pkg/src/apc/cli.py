"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 cost-assumption
violation. Outputs are written to a temp file and renamed into place, so a
failed run leaves no partial file behind.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from ._io import atomic_write_text, dumps_csv, dumps_jsonl, fmt, read_jsonl
from .align import (
    denormalize_cursor,
    diff_segments,
    lcs_len,
    levenshtein,
    make_pc_instance,
    tokenize,
)
from .costmodel import CostParams, verify_theorem
from .data import build_dataset, ingest, write_split
from .exceptions import AssumptionViolation, CursorError, DataError
from .lm import NgramLM
from .metrics import aggregate, score_record
from .reward import RewardConfig, score_reward
from .sim import cumulative_entropy, sweep

log = logging.getLogger("apc")

DEFAULT_SEED = 0

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ASSUMPTION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out) -> None:
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        atomic_write_text(out, text)


def _pair_fields(obj, line):
    pred = obj.get("pred", obj.get("prediction"))
    truth = obj.get("truth")
    if not isinstance(pred, str) or not isinstance(truth, str):
        raise DataError("expected string fields 'pred' and 'truth'", line=line)
    return pred, truth


def _thresholds(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad threshold list {text!r}") from exc
    if not values:
        raise UsageError("threshold list is empty")
    return values


def _ratio(text: str) -> tuple[int, int]:
    try:
        h, p = text.split(":")
        return int(h), int(p)
    except ValueError as exc:
        raise UsageError(f"ratio must look like H:P, got {text!r}") from exc


def cmd_align(args):
    rows = []
    for line, obj in read_jsonl(args.input):
        pred, truth = _pair_fields(obj, line)
        p, t = tokenize(pred, args.mode), tokenize(truth, args.mode)
        try:
            instance = denormalize_cursor("".join(make_pc_instance(p, t)))
        except CursorError as exc:
            raise DataError(str(exc), line=line) from exc
        rows.append(
            {
                "segments": [
                    {"kind": s.kind.value, "text": denormalize_cursor(s.text)} for s in diff_segments(p, t)
                ],
                "pc_instance": instance,
                "lcs": lcs_len(p, t),
                "levenshtein": levenshtein(p, t),
            }
        )
    _emit(dumps_jsonl(rows), args.output)


def cmd_build_dataset(args):
    records = ingest(args.input)
    split = build_dataset(records, _ratio(args.ratio), seed=args.seed, mode=args.mode)
    hc_path, pc_path = write_split(split, args.out_dir)
    log.info("wrote %d HC records to %s and %d PC records to %s", len(split.hc), hc_path, len(split.pc), pc_path)


def cmd_reward(args):
    cfg = RewardConfig(
        alpha_lazy=args.alpha_lazy,
        alpha_error=args.alpha_error,
        saturation_slope=args.slope,
        floor=args.floor,
    )
    rows = []
    for line, obj in read_jsonl(args.input):
        pred, truth = _pair_fields(obj, line)
        try:
            r = score_reward(pred, truth, cfg)
        except CursorError as exc:
            raise DataError(str(exc), line=line) from exc
        rows.append(
            {
                "reward": float(fmt(r.reward)),
                "case": r.case,
                "es": float(fmt(r.es)),
                "c_model": r.c_model,
                "c_gt": r.c_gt,
            }
        )
    _emit(dumps_jsonl(rows), args.output)


def cmd_eval(args):
    records = ingest(args.bench)
    if not records:
        raise DataError("empty benchmark")
    scores = [
        score_record(r.prediction, r.truth, r.user_final if args.cost_against == "user-final" else None)
        for r in records
    ]
    report = aggregate(scores)
    payload = {k: (v if k == "n" else float(fmt(v))) for k, v in report.as_dict().items()}
    _emit(json.dumps(payload, sort_keys=True) + "\n", args.out)
    if args.per_record:
        rows = [
            [r.id, int(s.has_placeholder), s.em, fmt(s.es), fmt(s.cost)] for r, s in zip(records, scores)
        ]
        atomic_write_text(args.per_record, dumps_csv(["id", "has_placeholder", "em", "es", "cost"], rows))


def cmd_simulate(args):
    model = NgramLM.load(args.model)
    records = ingest(args.bench)
    if not records:
        raise DataError("empty benchmark")
    try:
        rows = sweep(records, model, _thresholds(args.thresholds), args.kind)
    except ValueError as exc:
        if isinstance(exc, DataError):
            raise
        raise UsageError(str(exc)) from exc
    text = dumps_csv(
        ["threshold", "pcr", "cost", "em", "es"],
        ([fmt(r.threshold), fmt(r.pcr), fmt(r.cost), fmt(r.em), fmt(r.es)] for r in rows),
    )
    _emit(text, args.out)


def _cell(x: float) -> str:
    return "" if math.isnan(x) else fmt(x)


def cmd_entropy_profile(args):
    model = NgramLM.load(args.model)
    records = ingest(args.bench)
    curves = cumulative_entropy(records, model)
    text = dumps_csv(
        ["n", "pc_mean", "hc_mean"],
        ([n, _cell(pc), _cell(hc)] for n, pc, hc in zip(curves.n, curves.pc_mean, curves.hc_mean)),
    )
    _emit(text, args.out)


def cmd_verify_theory(args):
    params = CostParams(args.c_hc, args.c_pc)
    if args.k_max < 1:
        raise UsageError("--k-max must be at least 1")
    rows = verify_theorem(args.k_max, params)
    text = dumps_csv(
        ["K", "H", "H_star", "e_hc", "e_pc", "winner"],
        ([r.k, fmt(r.entropy), fmt(r.h_star), fmt(r.e_hc), fmt(r.e_pc), r.winner] for r in rows),
    )
    _emit(text, args.out)
    bad = [r.k for r in rows if not r.agrees]
    if bad:
        log.error("sign law disagreement at K=%s", bad)
        return EXIT_ASSUMPTION


def cmd_train_lm(args):
    docs = []
    for path in args.corpus:
        try:
            docs.append(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read corpus file {path}: {exc.strerror}") from exc
    model = NgramLM(order=args.order, smoothing_k=args.k, mode=args.mode)
    try:
        model._validate_params()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    model.fit(docs).save(args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="apc", description="Adaptive placeholder completion toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("align", help="diff prediction/truth pairs and build placeholder instances")
    p.add_argument("--input", required=True, help="JSONL with {pred, truth} per line")
    p.add_argument("--output", default="-", help="output JSONL (default: stdout)")
    p.add_argument("--mode", choices=["word", "char"], default="word")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("build-dataset", help="split records into HC and PC training sets")
    p.add_argument("--input", required=True, help="JSONL completion records")
    p.add_argument("--out-dir", required=True, help="directory for hc.jsonl and pc.jsonl")
    p.add_argument("--ratio", default="1:2", help="HC:PC count ratio (default 1:2)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"sampling seed (default {DEFAULT_SEED})")
    p.add_argument("--mode", choices=["word", "char"], default="word", help="alignment units")
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("reward", help="score {pred, truth} pairs with the cost-based reward")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--alpha-lazy", type=float, default=1.0)
    p.add_argument("--alpha-error", type=float, default=1.0)
    p.add_argument("--slope", type=float, default=0.1, help="saturation slope")
    p.add_argument("--floor", type=float, default=-1.0)
    p.set_defaults(func=cmd_reward)

    p = sub.add_parser("eval", help="aggregate HCR/PCR/EM/ES/Precision/F1/Cost over a benchmark")
    p.add_argument("--bench", required=True, help="JSONL completion records")
    p.add_argument("--out", default="-", help="JSON report path (default: stdout)")
    p.add_argument("--per-record", help="optional per-record CSV path")
    p.add_argument(
        "--cost-against",
        choices=["user-final", "truth"],
        default="user-final",
        help="reference for Cost; user-final falls back to truth when absent",
    )
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="fixed-threshold post-processing sweep")
    p.add_argument("--kind", choices=["entropy", "confidence"], default="entropy")
    p.add_argument("--thresholds", required=True, help="comma-separated threshold values")
    p.add_argument("--model", required=True, help="n-gram model file from train-lm")
    p.add_argument("--bench", required=True)
    p.add_argument("--out", default="-", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("entropy-profile", help="cumulative mean entropy of placeholder vs other regions")
    p.add_argument("--model", required=True)
    p.add_argument("--bench", required=True, help="records with annotations")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_entropy_profile)

    p = sub.add_parser("verify-theory", help="check the entropy sign law on uniform distributions")
    p.add_argument("--c-hc", type=float, default=2.0)
    p.add_argument("--c-pc", type=float, default=1.0)
    p.add_argument("--k-max", type=int, default=100)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify_theory)

    p = sub.add_parser("train-lm", help="train an n-gram probability source")
    p.add_argument("--corpus", required=True, nargs="+", help="text files, one document each")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--k", type=float, default=1.0, help="add-k smoothing pseudo-count")
    p.add_argument("--mode", choices=["char", "word"], default="char")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_lm)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        status = args.func(args)
    except UsageError as exc:
        print(f"apc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssumptionViolation as exc:
        print(f"apc {args.command}: assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except DataError as exc:
        print(f"apc {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"apc {args.command}: data error: no such file: {exc.filename}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"apc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return status or EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
