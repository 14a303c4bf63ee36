"""Token probability sources for the threshold experiments.

:class:`NgramLM` is an add-k smoothed n-gram model over char or word units.
:func:`load_distributions` reads externally produced per-position
distributions, so real model outputs can drive the same experiments.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._io import atomic_write_text
from .align import tokenize
from .costmodel import TokenDistribution, shannon_entropy
from .exceptions import DataError

__all__ = [
    "BOS",
    "PositionProfile",
    "NgramLM",
    "load_distributions",
    "profiles_from_distributions",
]

BOS = "<s>"
MODEL_FORMAT = "apc-ngram"
MODEL_VERSION = 1


@dataclass(frozen=True)
class PositionProfile:
    token: str
    confidence: float
    entropy: float


class NgramLM(BaseEstimator):
    """Add-k smoothed n-gram model.

    Parameters
    ----------
    order : int, default=3
        Number of units per n-gram; contexts hold ``order - 1`` units, padded
        on the left with ``BOS``.
    smoothing_k : float, default=1.0
        Pseudo-count added to every vocabulary unit.
    mode : {"char", "word"}, default="char"
        Tokenization of raw text.

    A context never seen in training gets the uniform distribution over the
    vocabulary, which is also what add-k gives for a zero-count context.
    """

    def __init__(self, order=3, smoothing_k=1.0, mode="char"):
        self.order = order
        self.smoothing_k = smoothing_k
        self.mode = mode

    def _validate_params(self):
        if int(self.order) != self.order or self.order < 1:
            raise ValueError("order must be a positive integer")
        if not self.smoothing_k > 0:
            raise ValueError("smoothing_k must be positive")
        if self.mode not in ("char", "word"):
            raise ValueError("mode must be 'char' or 'word'")

    def fit(self, X, y=None):
        """Count n-grams over the documents in ``X`` (a string or an iterable of strings)."""
        self._validate_params()
        docs = [X] if isinstance(X, str) else list(X)
        n = int(self.order)
        counts: dict[tuple, Counter] = defaultdict(Counter)
        vocab: set[str] = set()
        for doc in docs:
            units = tokenize(doc, self.mode)
            vocab.update(units)
            padded = [BOS] * (n - 1) + units
            for i, unit in enumerate(units):
                counts[tuple(padded[i : i + n - 1])][unit] += 1
        if not vocab:
            raise DataError("empty training corpus")
        self._set_state(sorted(vocab), {ctx: dict(c) for ctx, c in counts.items()})
        return self

    def _set_state(self, vocab, counts):
        self.vocab_ = list(vocab)
        self.counts_ = counts
        self.context_totals_ = {ctx: sum(c.values()) for ctx, c in counts.items()}
        self._cache = {}

    def _check_fitted(self):
        if not hasattr(self, "vocab_"):
            raise NotFittedError("NgramLM is not fitted yet; call fit first")

    def _context_key(self, context: Sequence[str]) -> tuple:
        width = int(self.order) - 1
        if width == 0:
            return ()
        tail = list(context)[-width:] if context else []
        return tuple([BOS] * (width - len(tail)) + tail)

    def next_dist(self, context: Sequence[str] = ()) -> TokenDistribution:
        """Distribution of the next unit given preceding units ``context``."""
        self._check_fitted()
        key = self._context_key(context)
        cache = self.__dict__.setdefault("_cache", {})
        if key in cache:
            return cache[key]
        observed = self.counts_.get(key, {})
        k = float(self.smoothing_k)
        denom = self.context_totals_.get(key, 0) + k * len(self.vocab_)
        dist = TokenDistribution({tok: (observed.get(tok, 0) + k) / denom for tok in self.vocab_})
        cache[key] = dist
        return dist

    def sequence_profile(self, units, history: Sequence[str] = ()) -> list[PositionProfile]:
        """Confidence and entropy at every position of ``units``.

        Position ``i`` is scored with the distribution conditioned on
        ``history`` followed by ``units[:i]``. Raw text is tokenized first.
        """
        if isinstance(units, str):
            units = tokenize(units, self.mode)
        if isinstance(history, str):
            history = tokenize(history, self.mode)
        context = list(history)
        out = []
        for unit in units:
            dist = self.next_dist(context)
            out.append(PositionProfile(unit, dist.pmax, shannon_entropy(dist)))
            context.append(unit)
        return out

    def to_dict(self) -> dict:
        self._check_fitted()
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "order": int(self.order),
            "smoothing_k": float(self.smoothing_k),
            "mode": self.mode,
            "vocab": self.vocab_,
            "counts": [
                [list(ctx), dict(sorted(c.items()))] for ctx, c in sorted(self.counts_.items())
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=True) + "\n"

    def save(self, path) -> None:
        atomic_write_text(path, self.dumps())

    @classmethod
    def from_dict(cls, data: dict) -> "NgramLM":
        if data.get("format") != MODEL_FORMAT:
            raise DataError("not an n-gram model file")
        if data.get("version") != MODEL_VERSION:
            raise DataError(f"unsupported model version {data.get('version')}")
        model = cls(order=data["order"], smoothing_k=data["smoothing_k"], mode=data["mode"])
        model._validate_params()
        counts = {tuple(ctx): {t: int(n) for t, n in c.items()} for ctx, c in data["counts"]}
        model._set_state(data["vocab"], counts)
        return model

    @classmethod
    def load(cls, path) -> "NgramLM":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"model file is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def load_distributions(path) -> list[TokenDistribution]:
    """Read one ``{"candidates": [...], "probs": [...]}`` object per line."""
    dists = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                dists.append(TokenDistribution.from_pairs(obj["candidates"], obj["probs"]))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(str(exc), line=lineno) from exc
    return dists


def profiles_from_distributions(
    dists: Iterable[TokenDistribution], tokens: Sequence[str] | None = None
) -> list[PositionProfile]:
    """Profiles for injected distributions; tokens default to the greedy choice."""
    dists = list(dists)
    if tokens is not None and len(tokens) != len(dists):
        raise ValueError("tokens and distributions differ in length")
    return [
        PositionProfile(
            tokens[i] if tokens is not None else d.argmax,
            d.pmax,
            shannon_entropy(d),
        )
        for i, d in enumerate(dists)
    ]

