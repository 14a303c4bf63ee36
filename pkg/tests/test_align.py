import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apc.align import (
    CURSOR,
    CURSOR_TEXT,
    DiffSegment,
    Kind,
    diff_segments,
    is_subsequence,
    lcs_len,
    levenshtein,
    make_pc_instance,
    pc_spans,
    tokenize,
)
from apc.exceptions import CursorError

from oracles import lcs_oracle, levenshtein_oracle, subsequence_oracle

short = st.lists(st.sampled_from("abcx"), max_size=8)
text = st.text(alphabet="ab(), _x1\n", max_size=16)


def _join(segments, kinds):
    return [u for s in segments if s.kind in kinds for u in s.units]


class TestDiffSegments:
    def test_substitution(self):
        segs = diff_segments(list("abc"), list("axc"))
        assert segs == [
            DiffSegment(Kind.COMMON, ("a",)),
            DiffSegment(Kind.PRED_ONLY, ("b",)),
            DiffSegment(Kind.TRUTH_ONLY, ("x",)),
            DiffSegment(Kind.COMMON, ("c",)),
        ]

    def test_identical(self):
        assert diff_segments("hello", "hello") == [DiffSegment(Kind.COMMON, tuple("hello"))]

    def test_empty_pred(self):
        assert diff_segments([], ["a"]) == [DiffSegment(Kind.TRUTH_ONLY, ("a",))]

    def test_both_empty(self):
        assert diff_segments("", "") == []

    def test_tie_prefers_earlier_pred_match(self):
        # "ab" vs "ba": either letter can be the LCS; the earlier pred unit wins
        segs = diff_segments("ab", "ba")
        common = _join(segs, {Kind.COMMON})
        assert common == ["a"]

    @given(short, short)
    def test_reconstruction(self, a, b):
        segs = diff_segments(a, b)
        assert _join(segs, {Kind.COMMON, Kind.TRUTH_ONLY}) == b
        assert _join(segs, {Kind.COMMON, Kind.PRED_ONLY}) == a

    @given(short, short)
    def test_counts_match_lcs(self, a, b):
        segs = diff_segments(a, b)
        lcs = lcs_oracle(a, b)
        assert len(_join(segs, {Kind.COMMON})) == lcs
        assert len(_join(segs, {Kind.PRED_ONLY})) == len(a) - lcs
        assert len(_join(segs, {Kind.TRUTH_ONLY})) == len(b) - lcs

    @given(short, short)
    def test_segments_nonempty_and_common_runs_maximal(self, a, b):
        segs = diff_segments(a, b)
        assert all(s.units for s in segs)
        for left, right in zip(segs, segs[1:]):
            assert left.kind != right.kind


class TestLevenshtein:
    @pytest.mark.parametrize(
        "a, b, expected",
        [("kitten", "sitting", 3), ("flaw", "flaw", 0), ("", "abc", 3), ("abc", "", 3)],
    )
    def test_examples(self, a, b, expected):
        assert levenshtein(a, b) == expected

    @given(short, short)
    def test_matches_full_matrix(self, a, b):
        assert levenshtein(a, b) == levenshtein_oracle(a, b)

    @given(short, short, short)
    def test_metric_axioms(self, a, b, c):
        assert levenshtein(a, b) == levenshtein(b, a)
        assert (levenshtein(a, b) == 0) == (a == b)
        assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


class TestLcsLen:
    @pytest.mark.parametrize("a, b, expected", [("abcd", "abxd", 3), ("same", "same", 4), ("ab", "cd", 0)])
    def test_examples(self, a, b, expected):
        assert lcs_len(a, b) == expected

    @given(short, short)
    def test_properties(self, a, b):
        n = lcs_len(a, b)
        assert n == lcs_oracle(a, b) == lcs_len(b, a)
        assert n <= min(len(a), len(b))
        assert (n == len(a)) == subsequence_oracle(a, b)


class TestTokenize:
    def test_word_units(self):
        assert tokenize("foo(a, b1) 42", "word") == ["foo", "(", "a", ",", " ", "b1", ")", " ", "42"]

    def test_cursor_is_one_unit(self):
        assert tokenize(f"x{CURSOR_TEXT}y", "word") == ["x", CURSOR, "y"]
        assert tokenize(f"x{CURSOR_TEXT}y", "char") == ["x", CURSOR, "y"]

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            tokenize("x", "bpe")

    @given(st.text(max_size=40))
    def test_word_mode_is_reversible(self, s):
        units = tokenize(s, "word")
        assert "".join(units) == s.replace(CURSOR_TEXT, CURSOR)
        assert all(units)
        assert all(u == CURSOR or CURSOR not in u for u in units)


class TestMakePcInstance:
    def test_word_example(self):
        assert make_pc_instance("foo(a, b)", "foo(a, c)") == f"foo(a, {CURSOR})"

    def test_identical(self):
        assert make_pc_instance("x = 1", "x = 1") == "x = 1"

    def test_no_common_units_collapse(self):
        assert make_pc_instance("xyz", "abc") == CURSOR

    def test_prediction_only_gap_still_marked(self):
        assert make_pc_instance("foo(xx)", "foo()") == f"foo({CURSOR})"

    def test_unit_lists_in_lists_out(self):
        assert make_pc_instance(list("abc"), list("axc")) == ["a", CURSOR, "c"]

    def test_rejects_sentinel_input(self):
        with pytest.raises(CursorError):
            make_pc_instance("a" + CURSOR_TEXT, "ab")
        with pytest.raises(CursorError):
            make_pc_instance("ab", "a" + CURSOR)

    @given(text, text)
    def test_properties(self, pred, truth):
        out = make_pc_instance(pred, truth)
        stripped = out.replace(CURSOR, "")
        assert is_subsequence(stripped, truth)
        assert (CURSOR in out) == (pred != truth)
        assert CURSOR * 2 not in out

    @given(short, short)
    @settings(max_examples=200)
    def test_reapplying_keeps_every_kept_unit(self, pred, truth):
        once = make_pc_instance(pred, truth)
        kept = [u for u in once if u != CURSOR]
        twice = make_pc_instance(kept, truth)
        assert [u for u in twice if u != CURSOR] == kept


class TestPcSpans:
    def test_example(self):
        assert pc_spans("foo(a, b)", "foo(a, c)") == [(7, 8)]

    def test_insertion_point_for_prediction_only_gap(self):
        assert pc_spans("foo(xx)", "foo()") == [(4, 4)]

    @given(text, text)
    def test_one_span_per_cursor_and_covers_removed_text(self, pred, truth):
        out = make_pc_instance(pred, truth)
        spans = pc_spans(pred, truth)
        assert len(spans) == out.count(CURSOR)
        rebuilt, pos = [], 0
        for start, end in spans:
            rebuilt.append(truth[pos:start])
            rebuilt.append(CURSOR)
            pos = end
        rebuilt.append(truth[pos:])
        assert "".join(rebuilt) == out
