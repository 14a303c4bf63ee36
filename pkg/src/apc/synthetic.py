"""Synthetic code-like corpora with engineered ambiguous slots.

Each line is a fixed template with one single-digit slot. In the
training corpus every slot is filled uniformly at random from ``k`` digits,
so a character model sees a k-way uniform continuation at each slot and
near-deterministic text elsewhere. ``k`` may also give one width per
template, which spreads slot entropies over several levels.
"""

from __future__ import annotations

import random

from .data import CompletionRecord, classify

TEMPLATES = (
    ("result = compute(", ")\n"),
    ("total += weight[", "]\n"),
    ("print(values[", "])\n"),
    ("grid[", "] = None\n"),
    ("return items[", "]\n"),
)


def _symbols(k) -> dict:
    """Slot alphabet per template; ``k`` is one width or one per template."""
    ks = (k,) * len(TEMPLATES) if isinstance(k, int) else tuple(k)
    if len(ks) != len(TEMPLATES):
        raise ValueError(f"need {len(TEMPLATES)} slot widths, got {len(ks)}")
    if not all(2 <= x <= 10 for x in ks):
        raise ValueError("slot widths must be between 2 and 10")
    return {t: "0123456789"[:x] for t, x in zip(TEMPLATES, ks)}


def _line(rng: random.Random, symbols: dict, template=None, slot=None) -> tuple[str, str, str]:
    template = template or rng.choice(TEMPLATES)
    head, tail = template
    return head, slot if slot is not None else rng.choice(symbols[template]), tail


def slot_corpus(n_lines: int = 2000, k=8, seed: int = 0) -> str:
    rng = random.Random(seed)
    symbols = _symbols(k)
    return "".join("".join(_line(rng, symbols)) for _ in range(n_lines))


def slot_benchmark(n: int = 200, k=8, seed: int = 1, match_rate: float = 0.3) -> list[CompletionRecord]:
    """Records whose prediction and truth differ only at the slot (unless they match).

    Mismatching records are rewritten into placeholder form with the original
    text in ``user_final`` and the slot span in ``annotations``; matching ones
    keep their truth and get an empty annotation list.
    """
    rng = random.Random(seed)
    symbols = _symbols(k)
    raw = []
    for i in range(n):
        prev = "".join(_line(rng, symbols))
        template = rng.choice(TEMPLATES)
        alphabet = symbols[template]
        truth_slot = rng.choice(alphabet)
        if rng.random() < match_rate:
            pred_slot = truth_slot
        else:
            pred_slot = rng.choice([s for s in alphabet if s != truth_slot])
        head, _, tail = _line(rng, symbols, template, truth_slot)
        raw.append(
            CompletionRecord(
                id=f"syn-{i:05d}",
                prefix=prev,
                prediction=head + pred_slot + tail,
                truth=head + truth_slot + tail,
            )
        )
    hc, pc = classify(raw, mode="word")
    rewritten = {r.id: r for r in pc}
    out = []
    for rec in raw:
        if rec.id in rewritten:
            out.append(rewritten[rec.id])
        else:
            out.append(CompletionRecord(rec.id, rec.prediction, rec.truth, rec.prefix, annotations=()))
    return out
