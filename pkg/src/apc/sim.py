"""Fixed-threshold placeholder post-processing and region entropy analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .align import CURSOR, tokenize
from .exceptions import DataError
from .lm import NgramLM, PositionProfile
from .metrics import MetricsReport, aggregate, score_record

__all__ = [
    "ThresholdPolicy",
    "SweepRow",
    "CumulativeEntropy",
    "triggers",
    "apply_threshold",
    "profile_record",
    "postprocess",
    "evaluate",
    "sweep",
    "region_entropies",
    "cumulative_entropy",
    "ThresholdPlaceholderer",
]

KINDS = ("entropy", "confidence")


@dataclass(frozen=True)
class ThresholdPolicy:
    """Replace a unit when its entropy exceeds, or its confidence falls below, ``value``."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown threshold kind {self.kind!r}")
        if math.isnan(self.value):
            raise ValueError("threshold must not be NaN")
        if self.kind == "entropy" and self.value < 0:
            raise ValueError("entropy threshold must be >= 0")
        if self.kind == "confidence" and not 0.0 <= self.value <= 1.0:
            raise ValueError("confidence threshold must lie in [0, 1]")


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    pcr: float
    cost: float
    em: float
    es: float


def triggers(profile: PositionProfile, policy: ThresholdPolicy) -> bool:
    if policy.kind == "entropy":
        return profile.entropy > policy.value
    return profile.confidence < policy.value


def apply_threshold(
    pred: Sequence[str], profile: Sequence[PositionProfile], policy: ThresholdPolicy
) -> list[str]:
    """Swap triggering units for the cursor, then merge adjacent cursors."""
    if len(pred) != len(profile):
        raise ValueError(f"prediction has {len(pred)} units but profile has {len(profile)}")
    out: list[str] = []
    for unit, prof in zip(pred, profile):
        unit = CURSOR if triggers(prof, policy) else unit
        if unit == CURSOR and out and out[-1] == CURSOR:
            continue
        out.append(unit)
    return out


def profile_record(model: NgramLM, record) -> tuple[list[str], list[PositionProfile]]:
    """Units of the record's prediction and their profile, conditioned on its prefix."""
    units = tokenize(record.prediction, model.mode)
    return units, model.sequence_profile(units, history=tokenize(record.prefix, model.mode))


def postprocess(units, profile, policy: ThresholdPolicy | None) -> str:
    if policy is None:
        return "".join(units)
    return "".join(apply_threshold(units, profile, policy))


def evaluate(records, outputs: Sequence[str]) -> MetricsReport:
    return aggregate(score_record(o, r.truth, r.user_final) for r, o in zip(records, outputs))


def sweep(records, model: NgramLM, thresholds: Sequence[float], kind: str = "entropy") -> list[SweepRow]:
    """Metrics of the post-processed benchmark at each threshold, sorted by threshold."""
    records = list(records)
    if not records:
        raise DataError("empty benchmark")
    if not thresholds:
        raise ValueError("no thresholds given")
    profiled = [profile_record(model, r) for r in records]
    rows = []
    for value in sorted(thresholds):
        policy = ThresholdPolicy(kind, value)
        report = evaluate(records, [postprocess(u, p, policy) for u, p in profiled])
        rows.append(SweepRow(value, report.pcr, report.cost, report.em, report.es))
    return rows


def _reference_truth(record) -> str:
    if CURSOR in record.truth:
        if record.user_final is None:
            raise DataError(f"record {record.id!r}: placeholder truth without the original text")
        return record.user_final
    return record.truth


def region_entropies(model: NgramLM, record) -> tuple[list[float], list[float]]:
    """Entropies of the original truth's units, split into placeholder and other regions.

    A unit belongs to the placeholder region when its character range
    intersects an annotated span.
    """
    if record.annotations is None:
        raise DataError(f"record {record.id!r} has no placeholder annotations")
    text = _reference_truth(record)
    units = tokenize(text, model.mode)
    profile = model.sequence_profile(units, history=tokenize(record.prefix, model.mode))
    pc, hc = [], []
    pos = 0
    for unit, prof in zip(units, profile):
        start, end = pos, pos + len(unit)
        pos = end
        inside = any(s < end and start < e for s, e in record.annotations if s < e)
        (pc if inside else hc).append(prof.entropy)
    return pc, hc


@dataclass(frozen=True)
class CumulativeEntropy:
    """Running means of per-sample region entropy.

    Entry ``i`` covers the first ``i + 1`` samples; a sample whose region is
    empty does not contribute to that curve, and an entry is NaN until the
    first contributing sample.
    """

    n: list[int]
    pc_mean: list[float]
    hc_mean: list[float]
    pc_count: list[int]
    hc_count: list[int]


def cumulative_entropy(records, model: NgramLM) -> CumulativeEntropy:
    records = list(records)
    if not records:
        raise DataError("empty benchmark")
    out = CumulativeEntropy([], [], [], [], [])
    sums = {"pc": 0.0, "hc": 0.0}
    counts = {"pc": 0, "hc": 0}
    for i, rec in enumerate(records, 1):
        pc, hc = region_entropies(model, rec)
        for name, values in (("pc", pc), ("hc", hc)):
            if values:
                sums[name] += math.fsum(values) / len(values)
                counts[name] += 1
        out.n.append(i)
        out.pc_mean.append(sums["pc"] / counts["pc"] if counts["pc"] else math.nan)
        out.hc_mean.append(sums["hc"] / counts["hc"] if counts["hc"] else math.nan)
        out.pc_count.append(counts["pc"])
        out.hc_count.append(counts["hc"])
    return out


class ThresholdPlaceholderer(BaseEstimator, TransformerMixin):
    """Post-processor that placeholders uncertain units of each prediction.

    Parameters
    ----------
    model : NgramLM
        Fitted probability source.
    kind : {"entropy", "confidence"}, default="entropy"
    threshold : float, default=1.0

    ``transform`` takes completion records and returns post-processed
    prediction strings. ``score`` returns the benchmark metrics of those
    outputs.
    """

    def __init__(self, model=None, kind="entropy", threshold=1.0):
        self.model = model
        self.kind = kind
        self.threshold = threshold

    def fit(self, X=None, y=None):
        if self.model is None:
            raise ValueError("a fitted probability model is required")
        self.policy_ = ThresholdPolicy(self.kind, float(self.threshold))
        return self

    def transform(self, X):
        if not hasattr(self, "policy_"):
            self.fit()
        return [postprocess(*profile_record(self.model, r), self.policy_) for r in X]

    def score(self, X, y=None) -> MetricsReport:
        X = list(X)
        return evaluate(X, self.transform(X))
