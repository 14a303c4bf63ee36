"""Per-record scores and aggregate benchmark metrics (percent scale)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

from .align import CURSOR, levenshtein, normalize_cursor
from .exceptions import DataError

__all__ = [
    "RecordScore",
    "MetricsReport",
    "normalized_similarity",
    "score_record",
    "aggregate",
    "f1_score",
]


@dataclass(frozen=True)
class RecordScore:
    has_placeholder: bool
    em: int
    es: float
    cost: float


@dataclass(frozen=True)
class MetricsReport:
    hcr: float
    pcr: float
    em: float
    es: float
    precision: float
    f1: float
    cost: float
    n: int

    def as_dict(self) -> dict:
        return asdict(self)


def normalized_similarity(a: str, b: str) -> float:
    """``1 - levenshtein / max(len)`` over characters, cursor counted once."""
    a, b = normalize_cursor(a), normalize_cursor(b)
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def score_record(pred: str, truth: str, user_final: str | None = None) -> RecordScore:
    """Score one prediction.

    ``cost`` is measured against ``user_final`` when given, otherwise against
    ``truth``.
    """
    p, t = normalize_cursor(pred), normalize_cursor(truth)
    es = normalized_similarity(p, t)
    cost = 1.0 - (es if user_final is None else normalized_similarity(p, user_final))
    return RecordScore(has_placeholder=CURSOR in p, em=int(p == t), es=es, cost=cost)


def f1_score(precision: float, recall: float) -> float:
    if precision <= 0 or recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def aggregate(scores: Iterable[RecordScore]) -> MetricsReport:
    scores = list(scores)
    n = len(scores)
    if n == 0:
        raise DataError("empty benchmark")
    n_pc = sum(s.has_placeholder for s in scores)
    pc_hits = sum(s.em for s in scores if s.has_placeholder)
    em = 100.0 * sum(s.em for s in scores) / n
    precision = 100.0 * pc_hits / n_pc if n_pc else 0.0
    return MetricsReport(
        hcr=100.0 * (n - n_pc) / n,
        pcr=100.0 * n_pc / n,
        em=em,
        es=100.0 * math.fsum(s.es for s in scores) / n,
        precision=precision,
        f1=f1_score(precision, em),
        cost=100.0 * math.fsum(s.cost for s in scores) / n,
        n=n,
    )
