"""Sequence alignment primitives and placeholder instance construction.

Sequences are any ``Sequence[str]`` of units. A plain ``str`` is already a
sequence of characters, so char-mode callers can pass text directly; word
mode goes through :func:`tokenize`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .exceptions import CursorError

__all__ = [
    "CURSOR",
    "CURSOR_TEXT",
    "Kind",
    "DiffSegment",
    "normalize_cursor",
    "denormalize_cursor",
    "tokenize",
    "detokenize",
    "lcs_len",
    "levenshtein",
    "diff_segments",
    "make_pc_instance",
    "pc_spans",
    "is_subsequence",
]

#: Internal single-character placeholder (Unicode private use area).
CURSOR = "\ue000"
#: Textual form of the placeholder in every file format.
CURSOR_TEXT = "<|cursor|>"

_WORD_RE = re.compile("\ue000|" r"[^\W\d]\w*|\d+|\s+|.", re.DOTALL)


def normalize_cursor(text: str) -> str:
    """Replace each literal ``<|cursor|>`` with the internal sentinel."""
    return text.replace(CURSOR_TEXT, CURSOR)


def denormalize_cursor(text: str) -> str:
    return text.replace(CURSOR, CURSOR_TEXT)


def tokenize(text: str, mode: str = "word") -> list[str]:
    """Split ``text`` into units.

    ``char`` mode yields one unit per character. ``word`` mode yields maximal
    identifier runs, digit runs, whitespace runs and single punctuation
    characters; joining the units gives back ``text``. In both modes the
    cursor is normalized first and becomes a unit of its own.
    """
    text = normalize_cursor(text)
    if mode == "char":
        return list(text)
    if mode == "word":
        return _WORD_RE.findall(text)
    raise ValueError(f"unknown tokenization mode {mode!r}; expected 'char' or 'word'")


def detokenize(units: Sequence[str]) -> str:
    return "".join(units)


def lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of a longest common subsequence of ``a`` and ``b``."""
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            if x == y:
                cur.append(prev[j] + 1)
            else:
                cur.append(max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def levenshtein(a: Sequence[str], b: Sequence[str]) -> int:
    """Unit-cost edit distance (insert, delete, substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def is_subsequence(needle: Sequence[str], haystack: Sequence[str]) -> bool:
    it = iter(haystack)
    return all(any(x == y for y in it) for x in needle)


class Kind(str, Enum):
    COMMON = "common"
    PRED_ONLY = "pred_only"
    TRUTH_ONLY = "truth_only"


@dataclass(frozen=True)
class DiffSegment:
    kind: Kind
    units: tuple[str, ...]

    @property
    def text(self) -> str:
        return "".join(self.units)


def _suffix_lcs_table(a: Sequence[str], b: Sequence[str]) -> list[list[int]]:
    # table[i][j] = LCS length of a[i:] and b[j:]
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = table[i], table[i + 1]
        ai = a[i]
        for j in range(m - 1, -1, -1):
            if ai == b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = max(below[j], row[j + 1])
    return table


def _alignment(pred: Sequence[str], truth: Sequence[str]) -> list[tuple[int | None, int | None]]:
    """Walk one LCS alignment as (pred index, truth index) pairs.

    Equal heads are always matched. On a tie the truth unit is skipped, which
    keeps the current pred unit available and so prefers matching units that
    occur earlier in ``pred``.
    """
    table = _suffix_lcs_table(pred, truth)
    i = j = 0
    steps: list[tuple[int | None, int | None]] = []
    while i < len(pred) and j < len(truth):
        if pred[i] == truth[j]:
            steps.append((i, j))
            i += 1
            j += 1
        elif table[i][j + 1] >= table[i + 1][j]:
            steps.append((None, j))
            j += 1
        else:
            steps.append((i, None))
            i += 1
    steps.extend((k, None) for k in range(i, len(pred)))
    steps.extend((None, k) for k in range(j, len(truth)))
    return steps


def _gaps(pred: Sequence[str], truth: Sequence[str]):
    """Yield ("common", units) runs and ("gap", pred_units, truth_units) runs."""
    common: list[str] = []
    gap_pred: list[str] = []
    gap_truth: list[str] = []
    for pi, ti in _alignment(pred, truth):
        if pi is not None and ti is not None:
            if gap_pred or gap_truth:
                yield ("gap", gap_pred, gap_truth)
                gap_pred, gap_truth = [], []
            common.append(pred[pi])
            continue
        if common:
            yield ("common", common)
            common = []
        if pi is not None:
            gap_pred.append(pred[pi])
        else:
            gap_truth.append(truth[ti])
    if common:
        yield ("common", common)
    if gap_pred or gap_truth:
        yield ("gap", gap_pred, gap_truth)


def diff_segments(pred: Sequence[str], truth: Sequence[str]) -> list[DiffSegment]:
    """Decompose the pair into maximal common runs and the gaps between them.

    Inside a gap the pred-only units come before the truth-only units.
    """
    segments: list[DiffSegment] = []
    for item in _gaps(pred, truth):
        if item[0] == "common":
            segments.append(DiffSegment(Kind.COMMON, tuple(item[1])))
        else:
            _, gp, gt = item
            if gp:
                segments.append(DiffSegment(Kind.PRED_ONLY, tuple(gp)))
            if gt:
                segments.append(DiffSegment(Kind.TRUTH_ONLY, tuple(gt)))
    return segments


def _check_no_cursor(units: Sequence[str], name: str) -> None:
    if any(CURSOR in u for u in units):
        raise CursorError(f"{name} already contains a cursor placeholder")


def _as_units(seq, mode):
    if isinstance(seq, str):
        return tokenize(seq, mode)
    return list(seq)


def make_pc_instance(pred, truth, mode: str = "word"):
    """Rewrite ``truth`` with each mismatched region replaced by one cursor.

    Accepts raw text (tokenized with ``mode``) or pre-split unit sequences.
    Returns text when given text, otherwise a list of units.
    """
    as_text = isinstance(truth, str)
    p, t = _as_units(pred, mode), _as_units(truth, mode)
    _check_no_cursor(p, "prediction")
    _check_no_cursor(t, "ground truth")
    out: list[str] = []
    for seg in diff_segments(p, t):
        if seg.kind is Kind.COMMON:
            out.extend(seg.units)
        elif not out or out[-1] != CURSOR:
            out.append(CURSOR)
    return "".join(out) if as_text else out


def pc_spans(pred, truth, mode: str = "word") -> list[tuple[int, int]]:
    """Character spans of ``truth`` covered by each placeholder.

    One ``(start, end)`` pair per cursor emitted by :func:`make_pc_instance`,
    in the same order. A gap holding only prediction-side units gives an
    empty span at the insertion point.
    """
    p, t = _as_units(pred, mode), _as_units(truth, mode)
    _check_no_cursor(p, "prediction")
    _check_no_cursor(t, "ground truth")
    spans: list[tuple[int, int]] = []
    offset = 0
    in_gap = False
    for seg in diff_segments(p, t):
        width = sum(len(u) for u in seg.units)
        if seg.kind is Kind.COMMON:
            offset += width
            in_gap = False
            continue
        if not in_gap:
            spans.append((offset, offset))
            in_gap = True
        if seg.kind is Kind.TRUTH_ONLY:
            start, _ = spans[-1]
            offset += width
            spans[-1] = (start, offset)
    return spans
