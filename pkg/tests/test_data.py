import json

import pytest

from apc.align import CURSOR, CURSOR_TEXT
from apc.data import (
    CompletionRecord,
    build_dataset,
    classify,
    ingest,
    write_records,
    write_split,
)
from apc.exceptions import DataError


def _write_lines(path, objs):
    path.write_text("".join(json.dumps(o) + "\n" for o in objs), encoding="utf-8")
    return path


def _records(n_hc, n_pc):
    recs = [CompletionRecord(f"h{i}", f"x = {i}", f"x = {i}") for i in range(n_hc)]
    recs += [CompletionRecord(f"p{i}", f"y = f({i})", f"y = g({i})") for i in range(n_pc)]
    return recs


class TestIngest:
    def test_three_lines(self, tmp_path):
        path = _write_lines(
            tmp_path / "r.jsonl",
            [{"id": str(i), "prediction": "a", "truth": "b", "prefix": "p"} for i in range(3)],
        )
        recs = ingest(path)
        assert [r.id for r in recs] == ["0", "1", "2"]
        assert recs[0].prefix == "p" and recs[0].suffix == ""

    def test_missing_truth(self, tmp_path):
        path = _write_lines(tmp_path / "r.jsonl", [{"id": "a", "prediction": "x", "truth": "x"}, {"id": "b", "prediction": "x"}])
        with pytest.raises(DataError, match="line 2.*truth"):
            ingest(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "r.jsonl"
        path.write_text('{"id": "a", "prediction": "x", "truth": "x"}\n{oops\n')
        with pytest.raises(DataError, match="line 2"):
            ingest(path)

    def test_duplicate_id(self, tmp_path):
        path = _write_lines(tmp_path / "r.jsonl", [{"id": "a", "prediction": "x", "truth": "x"}] * 2)
        with pytest.raises(DataError, match="duplicate"):
            ingest(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "r.jsonl"
        path.write_text("")
        assert ingest(path) == []

    def test_cursor_text_normalized(self, tmp_path):
        path = _write_lines(tmp_path / "r.jsonl", [{"id": "a", "prediction": f"f({CURSOR_TEXT})", "truth": "f(x)"}])
        assert ingest(path)[0].prediction == f"f({CURSOR})"

    @pytest.mark.parametrize("spans", [[[0, 9]], [[2, 1]], [[0, 2], [1, 3]], "x", [[0, "1"]]])
    def test_bad_annotations(self, tmp_path, spans):
        path = _write_lines(tmp_path / "r.jsonl", [{"id": "a", "prediction": "x", "truth": "abc", "annotations": spans}])
        with pytest.raises(DataError, match="line 1"):
            ingest(path)

    def test_round_trip(self, tmp_path):
        objs = [
            {"id": "a", "prefix": "def f():\n", "suffix": "", "prediction": f"  return {CURSOR_TEXT}", "truth": "  return 1"},
            {
                "id": "b",
                "prefix": "",
                "suffix": "\n",
                "prediction": "x",
                "truth": f"{CURSOR_TEXT}",
                "user_final": "y",
                "annotations": [[0, 1]],
                "source": "log-7",
            },
        ]
        src = _write_lines(tmp_path / "in.jsonl", objs)
        out = tmp_path / "out.jsonl"
        write_records(out, ingest(src))
        again = [json.loads(line) for line in out.read_text().splitlines()]
        assert again == objs


class TestBuildDataset:
    def test_classification(self):
        hc, pc = classify(_records(2, 1))
        assert [r.id for r in hc] == ["h0", "h1"]
        (p,) = pc
        assert p.truth == f"y = {CURSOR}(0)"
        assert p.truth.count(CURSOR) == 1
        assert p.user_final == "y = g(0)"
        assert p.annotations == ((4, 5),)

    def test_partition_before_downsampling(self):
        recs = _records(7, 9)
        hc, pc = classify(recs)
        assert sorted(r.id for r in hc + pc) == sorted(r.id for r in recs)

    def test_exact_availability(self):
        split = build_dataset(_records(30, 60), (1, 2), seed=1)
        assert (len(split.hc), len(split.pc)) == (30, 60)

    def test_downsamples_to_ratio(self):
        split = build_dataset(_records(50, 60), (1, 2), seed=1)
        assert (len(split.hc), len(split.pc)) == (30, 60)
        assert all(r.prediction == r.truth for r in split.hc)
        assert all(CURSOR in r.truth for r in split.pc)

    def test_seeded_determinism(self):
        recs = _records(40, 90)
        a = build_dataset(recs, (1, 2), seed=9)
        b = build_dataset(recs, (1, 2), seed=9)
        c = build_dataset(recs, (1, 2), seed=10)
        assert a == b
        assert [r.id for r in a.hc] != [r.id for r in c.hc] or [r.id for r in a.pc] != [r.id for r in c.pc]

    def test_insufficient(self):
        with pytest.raises(DataError, match="0 HC and 5 PC"):
            build_dataset(_records(0, 5), (1, 2))

    def test_zero_weight_class(self):
        split = build_dataset(_records(0, 5), (0, 1))
        assert (len(split.hc), len(split.pc)) == (0, 5)

    @pytest.mark.parametrize("ratio", [(0, 0), (-1, 2)])
    def test_bad_ratio(self, ratio):
        with pytest.raises(ValueError):
            build_dataset(_records(3, 3), ratio)

    def test_cursor_in_truth(self):
        with pytest.raises(DataError):
            classify([CompletionRecord("a", "x", f"x{CURSOR}")])

    def test_write_split(self, tmp_path):
        split = build_dataset(_records(4, 8), (1, 2))
        hc_path, pc_path = write_split(split, tmp_path / "out")
        assert len(hc_path.read_text().splitlines()) == 4
        pc_lines = [json.loads(x) for x in pc_path.read_text().splitlines()]
        assert all(CURSOR_TEXT in o["truth"] and CURSOR not in o["truth"] for o in pc_lines)
