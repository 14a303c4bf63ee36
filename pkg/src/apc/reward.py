"""Cost-based reward for placeholder-aware completions.

All counting is character level after cursor normalization, so a cursor is
one atomic character. One LCS alignment feeds both the similarity term and
the hallucination/omission counts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .align import CURSOR, Kind, diff_segments, lcs_len, normalize_cursor
from .exceptions import CursorError

__all__ = [
    "RewardConfig",
    "CostCounts",
    "RewardBreakdown",
    "exact_match",
    "edit_similarity",
    "cost_counts",
    "saturate",
    "reward",
    "score_reward",
]


@dataclass(frozen=True)
class RewardConfig:
    alpha_lazy: float = 1.0
    alpha_error: float = 1.0
    saturation_slope: float = 0.1
    floor: float = -1.0

    def __post_init__(self):
        if self.alpha_lazy < 0 or self.alpha_error < 0:
            raise ValueError("alpha weights must be non-negative")
        if not self.saturation_slope > 0:
            raise ValueError("saturation slope must be positive")
        if self.floor > 0:
            raise ValueError("floor must be <= 0")


@dataclass(frozen=True)
class CostCounts:
    c_model: int  # hallucinated characters
    c_gt: int  # omitted characters


@dataclass(frozen=True)
class RewardBreakdown:
    reward: float
    case: str  # "exact", "pc_structural", "pc_error" or "hc"
    es: float
    c_model: int
    c_gt: int


def exact_match(pred: str, truth: str) -> float:
    return 1.0 if normalize_cursor(pred) == normalize_cursor(truth) else 0.0


def edit_similarity(pred: str, truth: str) -> float:
    """``2 * LCS / (len(pred) + len(truth))``; two empty strings score 1."""
    p, t = normalize_cursor(pred), normalize_cursor(truth)
    total = len(p) + len(t)
    if total == 0:
        return 1.0
    return 2.0 * lcs_len(p, t) / total


def _checked_truth(truth: str) -> str:
    t = normalize_cursor(truth)
    if CURSOR in t:
        raise CursorError("ground truth must not contain a cursor placeholder")
    return t


def cost_counts(pred: str, truth: str) -> CostCounts:
    p, t = normalize_cursor(pred), _checked_truth(truth)
    c_model = c_gt = 0
    for seg in diff_segments(p, t):
        if seg.kind is Kind.PRED_ONLY:
            c_model += sum(1 for ch in seg.units if ch != CURSOR)
        elif seg.kind is Kind.TRUTH_ONLY:
            c_gt += len(seg.units)
    return CostCounts(c_model, c_gt)


def saturate(x: float, slope: float = 0.1) -> float:
    """Bounded penalty ``1 - 1 / (1 + slope * x)``."""
    if x < 0:
        raise ValueError(f"saturation input must be non-negative, got {x}")
    if not slope > 0:
        raise ValueError("slope must be positive")
    return 1.0 - 1.0 / (1.0 + slope * x)


def score_reward(pred: str, truth: str, cfg: RewardConfig | None = None) -> RewardBreakdown:
    cfg = cfg or RewardConfig()
    p, t = normalize_cursor(pred), _checked_truth(truth)
    es = edit_similarity(p, t)
    counts = cost_counts(p, t)
    if p == t:
        return RewardBreakdown(1.0, "exact", es, counts.c_model, counts.c_gt)
    f = lambda x: saturate(x, cfg.saturation_slope)  # noqa: E731
    if CURSOR in p:
        if counts.c_model == 0:
            case = "pc_structural"
            value = es - cfg.alpha_lazy * f(counts.c_gt)
        else:
            case = "pc_error"
            value = es - f(cfg.alpha_error * counts.c_model + cfg.alpha_lazy * counts.c_gt)
    else:
        case = "hc"
        value = es - f(counts.c_model + counts.c_gt)
    return RewardBreakdown(max(cfg.floor, value), case, es, counts.c_model, counts.c_gt)


def reward(pred: str, truth: str, cfg: RewardConfig | None = None) -> float:
    return score_reward(pred, truth, cfg).reward
