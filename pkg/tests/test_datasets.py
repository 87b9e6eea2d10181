"""Dataset pipeline: extraction, labeling, NQ-open ingest, IO, conversion.

The synthetic fixtures have hand-counted pair totals and split sizes; those
counts are the small-scale stand-in for the released-data reproduction.
"""

import json
import zipfile
from pathlib import Path

import pytest

from anssim.datasets import (
    Correctness,
    NqOpenRecord,
    QaRecord,
    attach_labels,
    convert_release_archive,
    extract_pairs,
    ingest_nq_open,
    load_label_rows,
    load_nq_open_jsonl,
    load_squad_json,
    read_pairs_jsonl,
    split_counts,
    write_pairs_jsonl,
)
from anssim.errors import MissingTieBreaker, UnknownPairId
from anssim.lexical import lexical_split_of
from anssim.records import Answer, LexicalSplit, SimilarityLabel, Source
from anssim.textnorm import EN_PROFILE

FIXTURES = Path(__file__).parent / "fixtures"

# hand-counted totals for the synthetic fixtures
SQUAD_COUNTS = {"total": 7, "f1_zero": 4, "f1_positive": 3}
GERMAN_COUNTS = {"total": 6, "f1_zero": 4, "f1_positive": 2}
NQ_COUNTS = {"total": 6, "f1_zero": 3, "f1_positive": 3}


def _record(qid, answers):
    return QaRecord(
        question_id=qid,
        question="?",
        answers=tuple(Answer(text=a) for a in answers),
    )


class TestExtractPairs:
    def test_identical_answers_make_no_pairs(self):
        pairs = extract_pairs([_record("q", ["40,000", "40,000"])])
        assert pairs == []

    def test_case_variants_make_no_pairs(self):
        pairs = extract_pairs([_record("q", ["UV", "uv"])])
        assert pairs == []

    def test_three_distinct_answers_make_three_pairs(self):
        pairs = extract_pairs(
            [_record("q", ["Joseph Priestley", "Priestley", "Priestly"])]
        )
        assert [p.pair_id for p in pairs] == ["q:0:1", "q:0:2", "q:1:2"]

    def test_duplicate_pairs_within_question_are_merged(self):
        pairs = extract_pairs([_record("q", ["a1 x", "b2 y", "A1 x!"])])
        # answers 0 and 2 normalize identically, so only one distinct pair
        assert len(pairs) == 1
        assert pairs[0].pair_id == "q:0:1"

    def test_duplicate_pairs_across_questions_are_kept(self):
        records = [_record("q1", ["x", "y"]), _record("q2", ["x", "y"])]
        pairs = extract_pairs(records)
        assert len(pairs) == 2

    def test_split_tags_match_recomputation(self):
        records = load_squad_json(FIXTURES / "squad_synthetic.json")
        for pair in extract_pairs(records, source=Source.SQUAD):
            assert pair.lexical_split is lexical_split_of(
                pair.first.text, pair.second.text, EN_PROFILE
            )

    def test_deterministic_and_idempotent(self):
        records = load_squad_json(FIXTURES / "squad_synthetic.json")
        first = extract_pairs(records, source=Source.SQUAD)
        second = extract_pairs(records, source=Source.SQUAD)
        assert first == second

    def test_synthetic_squad_counts(self):
        records = load_squad_json(FIXTURES / "squad_synthetic.json")
        pairs = extract_pairs(records, source=Source.SQUAD)
        assert split_counts(pairs) == SQUAD_COUNTS

    def test_synthetic_german_counts_use_german_profile(self):
        records = load_squad_json(FIXTURES / "germanquad_synthetic.json")
        pairs = extract_pairs(records, source=Source.GERMANQUAD)
        assert split_counts(pairs) == GERMAN_COUNTS
        die_mauer = next(p for p in pairs if p.first.text == "die Mauer")
        assert die_mauer.second.text == "Mauer"
        # German profile keeps the article, so "die Mauer"/"Mauer" overlap
        assert die_mauer.lexical_split is LexicalSplit.F1_POSITIVE


class TestAttachLabels:
    def _pairs(self):
        records = load_squad_json(FIXTURES / "squad_synthetic.json")
        return extract_pairs(records, source=Source.SQUAD)

    def test_full_fixture_labeling(self):
        rows = load_label_rows(FIXTURES / "squad_synthetic_labels.jsonl")
        labeled = attach_labels(self._pairs(), rows)
        assert all(p.majority_label is not None for p in labeled)
        by_id = {p.pair_id: p for p in labeled}
        assert by_id["q1:0:1"].majority_label is SimilarityLabel(1)
        assert by_id["q2:1:2"].majority_label is SimilarityLabel(2)

    def test_tie_breaker_decides(self):
        rows = load_label_rows(FIXTURES / "squad_synthetic_labels.jsonl")
        labeled = attach_labels(self._pairs(), rows)
        by_id = {p.pair_id: p for p in labeled}
        disagreeing = by_id["q2:0:2"]
        assert len(disagreeing.annotator_labels) == 3
        assert disagreeing.majority_label is SimilarityLabel(1)
        tie_broken = by_id["q4:1:2"]
        assert tie_broken.majority_label is SimilarityLabel(2)

    def test_agreement_pairs_carry_two_labels(self):
        rows = load_label_rows(FIXTURES / "squad_synthetic_labels.jsonl")
        labeled = attach_labels(self._pairs(), rows)
        for pair in labeled:
            first_two = [label for _, label in pair.annotator_labels[:2]]
            if first_two[0] == first_two[1]:
                assert len(pair.annotator_labels) == 2
            else:
                assert len(pair.annotator_labels) == 3

    def test_unknown_pair_id(self):
        with pytest.raises(UnknownPairId):
            attach_labels(self._pairs(), [("ghost", "a1", SimilarityLabel(0))])

    def test_missing_tie_breaker(self):
        pairs = self._pairs()
        rows = [
            (pairs[0].pair_id, "a1", SimilarityLabel(0)),
            (pairs[0].pair_id, "a2", SimilarityLabel(2)),
        ]
        with pytest.raises(MissingTieBreaker):
            attach_labels(pairs, rows)

    def test_single_annotation_rejected(self):
        pairs = self._pairs()
        with pytest.raises(MissingTieBreaker):
            attach_labels(pairs, [(pairs[0].pair_id, "a1", SimilarityLabel(1))])

    def test_unlabeled_pairs_pass_through(self):
        pairs = self._pairs()
        labeled = attach_labels(pairs, [])
        assert labeled == pairs


class TestNqOpen:
    def test_fixture_counts(self):
        records = load_nq_open_jsonl(FIXTURES / "nq_synthetic.jsonl")
        assert len(records) == 8
        pairs = ingest_nq_open(records)
        assert split_counts(pairs) == NQ_COUNTS

    def test_multi_gold_records_dropped(self):
        records = [
            NqOpenRecord("q", ("a", "b"), "a", Correctness.DEF_CORRECT),
            NqOpenRecord("q", ("only",), "only", Correctness.DEF_CORRECT),
        ]
        pairs = ingest_nq_open(records)
        assert len(pairs) == 1
        assert pairs[0].first.text == "only"

    def test_correctness_maps_to_labels(self):
        records = load_nq_open_jsonl(FIXTURES / "nq_synthetic.jsonl")
        pairs = ingest_nq_open(records)
        by_first = {p.first.text: p for p in pairs}
        assert by_first["40,000"].majority_label is SimilarityLabel(1)
        assert by_first["power steering"].majority_label is SimilarityLabel(0)
        assert by_first["the wall"].majority_label is SimilarityLabel(2)

    def test_correctness_parsing(self):
        assert Correctness.parse(0) is Correctness.DEF_INCORRECT
        assert Correctness.parse("possibly correct") is Correctness.POSSIBLY_CORRECT
        assert Correctness.parse("DEFINITELY_CORRECT") is Correctness.DEF_CORRECT
        with pytest.raises(ValueError):
            Correctness.parse("maybe")

    def test_bad_row_reports_line(self):
        import io

        bad = FIXTURES / "nq_synthetic.jsonl"
        good_first = load_nq_open_jsonl(bad)  # sanity: fixture parses
        assert good_first
        with pytest.raises(ValueError, match=":2:"):
            path = FIXTURES.parent / "tmp_bad_nq.jsonl"
            path.write_text(
                '{"gold_answers": ["a"], "prediction": "b", "correctness": 1}\n'
                '{"prediction": "b"}\n',
                encoding="utf-8",
            )
            try:
                load_nq_open_jsonl(path)
            finally:
                path.unlink()


class TestPairIo:
    def test_round_trip(self, tmp_path):
        records = load_squad_json(FIXTURES / "squad_synthetic.json")
        pairs = attach_labels(
            extract_pairs(records, source=Source.SQUAD),
            load_label_rows(FIXTURES / "squad_synthetic_labels.jsonl"),
        )
        path = tmp_path / "pairs.jsonl"
        write_pairs_jsonl(pairs, path)
        loaded = read_pairs_jsonl(path)
        assert [p.pair_id for p in loaded] == [p.pair_id for p in pairs]
        assert [p.majority_label for p in loaded] == [p.majority_label for p in pairs]
        assert [p.lexical_split for p in loaded] == [p.lexical_split for p in pairs]
        # byte-identical rewrite
        path2 = tmp_path / "pairs2.jsonl"
        write_pairs_jsonl(loaded, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_split_is_recomputed_when_absent(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        path.write_text(
            json.dumps({"id": "x", "source": "squad", "first": "a b", "second": "c"})
            + "\n",
            encoding="utf-8",
        )
        (pair,) = read_pairs_jsonl(path)
        assert pair.lexical_split is LexicalSplit.F1_ZERO

    def test_contradictory_stored_split_rejected(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        path.write_text(
            json.dumps(
                {
                    "id": "x",
                    "source": "squad",
                    "first": "same",
                    "second": "same word",
                    "lexical_split": "F1_ZERO",
                }
            )
            + "\n",
            encoding="utf-8",
        )
        with pytest.raises(ValueError, match="lexical_split"):
            read_pairs_jsonl(path)

    def test_german_split_uses_german_profile(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        path.write_text(
            json.dumps(
                {
                    "id": "g",
                    "source": "germanquad",
                    "first": "die Mauer",
                    "second": "die Wand",
                }
            )
            + "\n",
            encoding="utf-8",
        )
        (pair,) = read_pairs_jsonl(path)
        # "die" counts under the German profile
        assert pair.lexical_split is LexicalSplit.F1_POSITIVE

    def test_malformed_line_reports_position(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        path.write_text('{"id": "x", "first": "a", "second": "b"}\nnot json\n')
        with pytest.raises(ValueError, match=":2:"):
            read_pairs_jsonl(path)


class TestConvertReleaseArchive:
    def _build_zip(self, tmp_path) -> Path:
        zip_path = tmp_path / "release.zip"
        with zipfile.ZipFile(zip_path, "w") as archive:
            archive.write(FIXTURES / "squad_synthetic.json", "data/squad_test.json")
            archive.write(
                FIXTURES / "germanquad_synthetic.json", "data/germanquad_test.json"
            )
            archive.write(FIXTURES / "nq_synthetic.jsonl", "data/nq_open_test.jsonl")
            archive.writestr("__MACOSX/ignored.json", "junk")
            archive.writestr("data/.hidden", "junk")
        return zip_path

    def test_mixed_archive(self, tmp_path):
        converted = convert_release_archive(self._build_zip(tmp_path))
        assert set(converted) == {"squad", "germanquad", "nq-open"}
        assert split_counts(converted["squad"]) == SQUAD_COUNTS
        assert split_counts(converted["germanquad"]) == GERMAN_COUNTS
        assert split_counts(converted["nq-open"]) == NQ_COUNTS

    def test_pair_jsonl_member(self, tmp_path):
        zip_path = tmp_path / "pairs.zip"
        rows = [
            {"id": "p0", "source": "squad", "first": "a", "second": "b",
             "labels": [{"annotator": "a1", "label": 0}, {"annotator": "a2", "label": 0}],
             "majority": 0},
        ]
        with zipfile.ZipFile(zip_path, "w") as archive:
            archive.writestr(
                "squad_pairs.jsonl", "\n".join(json.dumps(r) for r in rows)
            )
        converted = convert_release_archive(zip_path)
        assert len(converted["squad"]) == 1
        assert converted["squad"][0].majority_label is SimilarityLabel(0)

    def test_delimited_member(self, tmp_path):
        zip_path = tmp_path / "table.zip"
        csv_text = (
            "first,second,label1,label2,label3\n"
            "UV,ultraviolet,2,2,\n"
            "power steering,air conditioning,0,1,0\n"
        )
        with zipfile.ZipFile(zip_path, "w") as archive:
            archive.writestr("other_annotations.csv", csv_text)
        converted = convert_release_archive(zip_path)
        pairs = converted["other_annotations"]
        assert len(pairs) == 2
        assert pairs[0].majority_label is SimilarityLabel(2)
        assert pairs[1].majority_label is SimilarityLabel(0)  # tie-break column

    def test_tab_delimited_member(self, tmp_path):
        zip_path = tmp_path / "table.zip"
        tsv_text = "first\tsecond\tlabel\nUV\tultraviolet\t2\n"
        with zipfile.ZipFile(zip_path, "w") as archive:
            archive.writestr("extras.tsv", tsv_text)
        converted = convert_release_archive(zip_path)
        assert converted["extras"][0].majority_label is SimilarityLabel(2)
