"""Expected user-cost calculus for hard vs. placeholder completion.

Each position either emits a concrete token (hard completion) or a
placeholder. A wrong concrete token costs ``c_hc`` to repair, a placeholder
always costs ``c_pc`` to fill, and a correct token costs nothing. Under a
greedy decoder with top-token probability ``pmax`` the expected costs are
additive over positions, which yields a per-position decision rule and a
critical entropy above which placeholding is cheaper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .align import CURSOR
from .exceptions import AssumptionViolation

__all__ = [
    "CostParams",
    "TokenDistribution",
    "TheoremRow",
    "step_cost",
    "expected_cost_hc",
    "expected_cost_apc",
    "per_position_benefit",
    "optimal_mask",
    "benefit",
    "benefit_sum",
    "shannon_entropy",
    "entropy_threshold",
    "confidence_threshold",
    "verify_theorem",
    "CostOptimalAbstainer",
]

DIST_TOL = 1e-9


@dataclass(frozen=True)
class CostParams:
    """Repair cost ``c_hc`` and fill cost ``c_pc``; requires ``0 < c_pc < c_hc``."""

    c_hc: float
    c_pc: float

    def __post_init__(self):
        if not (math.isfinite(self.c_hc) and math.isfinite(self.c_pc)):
            raise AssumptionViolation("cost parameters must be finite")
        if not 0 < self.c_pc < self.c_hc:
            raise AssumptionViolation(
                f"cost parameters must satisfy 0 < c_pc < c_hc, got c_hc={self.c_hc}, c_pc={self.c_pc}"
            )

    @property
    def theta(self) -> float:
        """Confidence below which a placeholder is strictly cheaper."""
        return 1.0 - self.c_pc / self.c_hc


class TokenDistribution(Mapping):
    """Validated next-token distribution (token -> probability)."""

    __slots__ = ("_probs",)

    def __init__(self, probs: Mapping[str, float]):
        probs = dict(probs)
        if not probs:
            raise ValueError("distribution has no candidates")
        for tok, p in probs.items():
            if not (p >= 0.0) or p > 1.0 + DIST_TOL:
                raise ValueError(f"probability for {tok!r} out of range: {p}")
        total = math.fsum(probs.values())
        if abs(total - 1.0) > DIST_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self._probs = probs

    @classmethod
    def from_pairs(cls, candidates: Sequence[str], probs: Sequence[float]) -> "TokenDistribution":
        if len(candidates) != len(probs):
            raise ValueError("candidates and probs differ in length")
        if len(set(candidates)) != len(candidates):
            raise ValueError("duplicate candidate tokens")
        return cls(dict(zip(candidates, probs)))

    def __getitem__(self, tok):
        return self._probs[tok]

    def __iter__(self):
        return iter(self._probs)

    def __len__(self):
        return len(self._probs)

    def __repr__(self):
        return f"TokenDistribution({self._probs!r})"

    @property
    def pmax(self) -> float:
        return max(self._probs.values())

    @property
    def argmax(self) -> str:
        """Greedy choice; ties go to the lexicographically smallest token."""
        best = self.pmax
        return min(t for t, p in self._probs.items() if p == best)

    def entropy(self) -> float:
        return shannon_entropy(self)


def step_cost(pred_token: str, truth_token: str, params: CostParams) -> float:
    if pred_token == CURSOR:
        return params.c_pc
    if pred_token == truth_token:
        return 0.0
    return params.c_hc


def _confidences(pmax: Iterable[float]) -> list[float]:
    p = [float(x) for x in pmax]
    for x in p:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"confidences must lie in [0, 1], got {x}")
    return p


def _mask(mask: Iterable[int], n: int) -> list[int]:
    m = [int(b) for b in mask]
    if len(m) != n:
        raise ValueError(f"mask length {len(m)} does not match {n} confidences")
    if any(b not in (0, 1) for b in m):
        raise ValueError("mask entries must be 0 or 1")
    return m


def expected_cost_hc(pmax: Sequence[float], params: CostParams) -> float:
    c_hc = params.c_hc
    return math.fsum(c_hc * (1.0 - x) for x in _confidences(pmax))


def expected_cost_apc(pmax: Sequence[float], mask: Sequence[int], params: CostParams) -> float:
    p = _confidences(pmax)
    m = _mask(mask, len(p))
    c_hc, c_pc = params.c_hc, params.c_pc
    return math.fsum(c_pc if b else c_hc * (1.0 - x) for x, b in zip(p, m))


def per_position_benefit(pmax_i: float, params: CostParams) -> float:
    """Saving from placeholding one position instead of hard-completing it."""
    if not 0.0 <= pmax_i <= 1.0:
        raise ValueError(f"confidence must lie in [0, 1], got {pmax_i}")
    return params.c_hc * (1.0 - pmax_i) - params.c_pc


def optimal_mask(pmax: Sequence[float], params: CostParams) -> list[int]:
    """Placeholder exactly where the per-position benefit is strictly positive.

    A zero benefit (``pmax == theta``) keeps the concrete token.
    """
    p = _confidences(pmax)
    return [int(params.c_hc * (1.0 - x) - params.c_pc > 0.0) for x in p]


def benefit(pmax: Sequence[float], mask: Sequence[int], params: CostParams) -> float:
    """Cost saved by ``mask`` relative to hard completion, by subtraction."""
    return expected_cost_hc(pmax, params) - expected_cost_apc(pmax, mask, params)


def benefit_sum(pmax: Sequence[float], mask: Sequence[int], params: CostParams) -> float:
    """Same saving, accumulated as the masked sum of per-position benefits."""
    p = _confidences(pmax)
    m = _mask(mask, len(p))
    return math.fsum(per_position_benefit(x, params) for x, b in zip(p, m) if b)


def shannon_entropy(dist) -> float:
    """Entropy in nats of a distribution given as a mapping or a probability list."""
    if isinstance(dist, TokenDistribution):
        probs = list(dist.values())
    elif isinstance(dist, Mapping):
        probs = list(TokenDistribution(dist).values())
    else:
        probs = [float(p) for p in dist]
        if not probs or any(not (p >= 0.0) for p in probs) or abs(math.fsum(probs) - 1.0) > DIST_TOL:
            raise ValueError("not a valid probability distribution")
    h = -math.fsum(p * math.log(p) for p in probs if p > 0.0)
    return max(h, 0.0)


def entropy_threshold(params: CostParams) -> float:
    """Critical entropy ``ln(c_hc / (c_hc - c_pc))`` in nats."""
    if not isinstance(params, CostParams):
        raise TypeError("expected CostParams")
    return -math.log1p(-params.c_pc / params.c_hc)


def confidence_threshold(params: CostParams) -> float:
    return params.theta


@dataclass(frozen=True)
class TheoremRow:
    k: int
    entropy: float
    h_star: float
    e_hc: float
    e_pc: float
    winner: str  # "PC", "HC" or "tie", from the exact expected costs
    entropy_side: str  # same labels, from comparing ln K with the threshold
    gap: float  # |e_hc - e_pc| in floating point

    @property
    def agrees(self) -> bool:
        return self.winner == self.entropy_side


def _label(sign: int) -> str:
    return {1: "PC", -1: "HC", 0: "tie"}[sign]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def verify_theorem(k_max: int, params: CostParams) -> list[TheoremRow]:
    """Check the entropy sign law on uniform distributions over K = 1..k_max.

    For each K the truth is one of K equiprobable outcomes and the greedy
    decoder emits the smallest one. Both strategies' per-step costs are
    averaged over every outcome, in exact rational arithmetic, and the winner
    is compared with the side of the critical entropy ``ln K`` falls on
    (``ln K > H*`` iff ``K * (c_hc - c_pc) > c_hc``, decided exactly).
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    c_hc, c_pc = Fraction(params.c_hc), Fraction(params.c_pc)
    h_star = entropy_threshold(params)
    rows = []
    for k in range(1, k_max + 1):
        outcomes = np.arange(k)
        greedy = 0
        # per-outcome costs: HC pays c_hc on every outcome the greedy token misses
        hc_misses = int(np.count_nonzero(outcomes != greedy))
        pc_fills = int(outcomes.size)
        e_hc = c_hc * hc_misses / k
        e_pc = c_pc * pc_fills / k
        winner = _label(_sign(e_hc - e_pc))
        entropy_side = _label(_sign(k * (c_hc - c_pc) - c_hc))
        rows.append(
            TheoremRow(
                k=k,
                entropy=math.log(k),
                h_star=h_star,
                e_hc=float(e_hc),
                e_pc=float(e_pc),
                winner=winner,
                entropy_side=entropy_side,
                gap=abs(float(e_hc) - float(e_pc)),
            )
        )
    return rows


class CostOptimalAbstainer(BaseEstimator):
    """Per-position placeholder policy derived from the cost parameters.

    Parameters
    ----------
    c_hc : float, default=2.0
        Cost of repairing a wrong concrete token.
    c_pc : float, default=1.0
        Cost of filling a placeholder.

    Nothing is learned from data; ``fit`` validates the parameters and exposes
    the derived thresholds as ``theta_`` and ``entropy_threshold_``.
    """

    def __init__(self, c_hc=2.0, c_pc=1.0):
        self.c_hc = c_hc
        self.c_pc = c_pc

    def fit(self, X=None, y=None):
        self.params_ = CostParams(float(self.c_hc), float(self.c_pc))
        self.theta_ = self.params_.theta
        self.entropy_threshold_ = entropy_threshold(self.params_)
        return self

    def _check(self):
        if not hasattr(self, "params_"):
            self.fit()
        return self.params_

    def decision_function(self, X):
        """Per-position benefit of a placeholder for confidences ``X``."""
        params = self._check()
        p = np.asarray(_confidences(np.ravel(X)), dtype=float)
        return params.c_hc * (1.0 - p) - params.c_pc

    def predict(self, X):
        """Mask with 1 where a placeholder lowers expected cost."""
        return (self.decision_function(X) > 0.0).astype(int)

    def expected_cost(self, X, mask=None):
        params = self._check()
        if mask is None:
            mask = self.predict(X)
        return expected_cost_apc(np.ravel(X), mask, params)
