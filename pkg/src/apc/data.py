"""Completion records, HC/PC classification and dataset construction."""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from ._io import atomic_write_text, dumps_jsonl, read_jsonl
from .align import CURSOR, denormalize_cursor, make_pc_instance, normalize_cursor, pc_spans
from .exceptions import DataError

__all__ = [
    "CompletionRecord",
    "DatasetSplit",
    "record_from_dict",
    "ingest",
    "write_records",
    "classify",
    "build_dataset",
    "write_split",
]

_REQUIRED = ("id", "prediction", "truth")
_KNOWN = _REQUIRED + ("prefix", "suffix", "user_final", "annotations")


@dataclass(frozen=True)
class CompletionRecord:
    """One completion interaction. Text fields hold the internal cursor form.

    ``annotations`` lists ``(start, end)`` character spans of the cursor-free
    ground truth that a placeholder stands for.
    """

    id: str
    prediction: str
    truth: str
    prefix: str = ""
    suffix: str = ""
    user_final: str | None = None
    annotations: tuple[tuple[int, int], ...] | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        out = dict(self.extra)
        out.update(
            id=self.id,
            prefix=denormalize_cursor(self.prefix),
            suffix=denormalize_cursor(self.suffix),
            prediction=denormalize_cursor(self.prediction),
            truth=denormalize_cursor(self.truth),
        )
        if self.user_final is not None:
            out["user_final"] = denormalize_cursor(self.user_final)
        if self.annotations is not None:
            out["annotations"] = [list(s) for s in self.annotations]
        return out


def _annotations(raw, line) -> tuple[tuple[int, int], ...]:
    if not isinstance(raw, list):
        raise DataError("annotations must be a list of [start, end] pairs", line=line)
    spans = []
    for item in raw:
        if (
            not isinstance(item, (list, tuple))
            or len(item) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in item)
        ):
            raise DataError(f"bad annotation span {item!r}", line=line)
        spans.append((item[0], item[1]))
    return tuple(spans)


def _check_spans(spans, length, line):
    last_end = 0
    for start, end in sorted(spans):
        if not 0 <= start <= end <= length:
            raise DataError(f"annotation span ({start}, {end}) outside text of length {length}", line=line)
        if start < last_end:
            raise DataError("annotation spans overlap", line=line)
        last_end = end


def record_from_dict(obj: dict, line: int | None = None) -> CompletionRecord:
    missing = [k for k in _REQUIRED if k not in obj]
    if missing:
        raise DataError(f"missing field(s): {', '.join(missing)}", line=line)
    for key in ("id", "prediction", "truth", "prefix", "suffix"):
        if key in obj and not isinstance(obj[key], str):
            raise DataError(f"field {key!r} must be a string", line=line)
    user_final = obj.get("user_final")
    if user_final is not None and not isinstance(user_final, str):
        raise DataError("field 'user_final' must be a string or null", line=line)
    annotations = None
    if obj.get("annotations") is not None:
        annotations = _annotations(obj["annotations"], line)
        reference = user_final if user_final is not None else obj["truth"]
        _check_spans(annotations, len(normalize_cursor(reference)), line)
    return CompletionRecord(
        id=obj["id"],
        prediction=normalize_cursor(obj["prediction"]),
        truth=normalize_cursor(obj["truth"]),
        prefix=normalize_cursor(obj.get("prefix", "")),
        suffix=normalize_cursor(obj.get("suffix", "")),
        user_final=normalize_cursor(user_final) if user_final is not None else None,
        annotations=annotations,
        extra={k: v for k, v in obj.items() if k not in _KNOWN},
    )


def ingest(path) -> list[CompletionRecord]:
    """Read a JSONL file of completion records.

    Raises :class:`DataError` naming the offending line for malformed JSON,
    missing fields, bad spans, or a repeated ``id``.
    """
    records = []
    seen: dict[str, int] = {}
    for lineno, obj in read_jsonl(path):
        rec = record_from_dict(obj, line=lineno)
        if rec.id in seen:
            raise DataError(f"duplicate id {rec.id!r} (first seen on line {seen[rec.id]})", line=lineno)
        seen[rec.id] = lineno
        records.append(rec)
    return records


def write_records(path, records: Iterable[CompletionRecord]) -> None:
    atomic_write_text(path, dumps_jsonl(r.to_dict() for r in records))


@dataclass(frozen=True)
class DatasetSplit:
    hc: list[CompletionRecord]
    pc: list[CompletionRecord]


def classify(records: Sequence[CompletionRecord], mode: str = "word"):
    """Partition into exact-match (HC) records and rewritten PC records.

    A PC record's truth becomes the placeholder instance, the original truth
    moves to ``user_final`` (unless one is already present) and the replaced
    spans are stored in ``annotations``.
    """
    hc, pc = [], []
    for rec in records:
        if CURSOR in rec.truth:
            raise DataError(f"record {rec.id!r}: ground truth already contains a cursor")
        if rec.prediction == rec.truth:
            hc.append(rec)
            continue
        if CURSOR in rec.prediction:
            raise DataError(f"record {rec.id!r}: prediction contains a cursor")
        pc.append(
            replace(
                rec,
                truth=make_pc_instance(rec.prediction, rec.truth, mode),
                user_final=rec.user_final if rec.user_final is not None else rec.truth,
                annotations=tuple(pc_spans(rec.prediction, rec.truth, mode)),
            )
        )
    return hc, pc


def _take(items, count, rng):
    order = list(range(len(items)))
    rng.shuffle(order)
    return [items[i] for i in sorted(order[:count])]


def build_dataset(
    records: Sequence[CompletionRecord],
    ratio: tuple[int, int] = (1, 2),
    seed: int = 0,
    mode: str = "word",
) -> DatasetSplit:
    """Classify records and downsample to ``hc:pc = ratio``.

    The largest multiple of the ratio that the available records allow is
    kept. Each bucket is shuffled with its own seeded generator, trimmed, and
    returned in input order.
    """
    h, p = ratio
    if h < 0 or p < 0 or (h == 0 and p == 0):
        raise ValueError(f"invalid ratio {h}:{p}")
    hc, pc = classify(records, mode)
    scales = [n // w for n, w in ((len(hc), h), (len(pc), p)) if w > 0]
    scale = min(scales)
    if scale == 0:
        raise DataError(
            f"not enough records for ratio {h}:{p}: {len(hc)} HC and {len(pc)} PC available"
        )
    return DatasetSplit(
        hc=_take(hc, h * scale, random.Random(f"{seed}:hc")),
        pc=_take(pc, p * scale, random.Random(f"{seed}:pc")),
    )


def write_split(split: DatasetSplit, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    hc_path, pc_path = out_dir / "hc.jsonl", out_dir / "pc.jsonl"
    hc_text = dumps_jsonl(r.to_dict() for r in split.hc)
    pc_text = dumps_jsonl(r.to_dict() for r in split.pc)
    atomic_write_text(hc_path, hc_text)
    atomic_write_text(pc_path, pc_text)
    return hc_path, pc_path
