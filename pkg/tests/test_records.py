"""Core data model: construction invariants, majority vote, JSON codec."""

import pytest

from anssim.records import (
    Answer,
    AnswerPair,
    LexicalSplit,
    MetricScore,
    SimilarityLabel,
    Source,
    majority_vote,
    pair_fields_from_json_dict,
    pair_to_json_dict,
)

L = SimilarityLabel


class TestAnswer:
    def test_plain_text(self):
        assert Answer(text="").text == ""
        assert Answer(text="x").span is None

    def test_valid_span(self):
        answer = Answer(text="abc", span=(3, 6), context_id="c")
        assert answer.span == (3, 6)

    @pytest.mark.parametrize("span", [(5, 5), (6, 3), (-1, 4), (0, -2)])
    def test_invalid_spans(self, span):
        with pytest.raises(ValueError):
            Answer(text="abc", span=span)

    def test_none_text_rejected(self):
        with pytest.raises(ValueError):
            Answer(text=None)


class TestMajorityVote:
    @pytest.mark.parametrize(
        "labels,expected",
        [
            ([L(2), L(2), L(2)], L(2)),
            ([L(1), L(2), L(2)], L(2)),
            ([L(0), L(1)], None),
            ([L(0)], L(0)),
            ([L(0), L(1), L(2)], None),
            ([L(1), L(1), L(0), L(2)], None),  # 2 of 4 is not strict
            ([L(1), L(1), L(1), L(0), L(2)], L(1)),
        ],
    )
    def test_vote(self, labels, expected):
        assert majority_vote(labels) == expected

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            majority_vote([])

    def test_permutation_invariance(self):
        import itertools

        labels = [L(0), L(2), L(2)]
        results = {
            majority_vote(list(p)) for p in itertools.permutations(labels)
        }
        assert results == {L(2)}


def _pair(**overrides):
    defaults = dict(
        pair_id="p1",
        first=Answer(text="UV"),
        second=Answer(text="ultraviolet"),
        lexical_split=LexicalSplit.F1_ZERO,
        source=Source.SQUAD,
    )
    defaults.update(overrides)
    return AnswerPair(**defaults)


class TestAnswerPair:
    def test_majority_must_match_strict_majority(self):
        with pytest.raises(ValueError):
            _pair(
                annotator_labels=(("a1", L(2)), ("a2", L(2))),
                majority_label=L(0),
            )

    def test_agreeing_annotators(self):
        pair = _pair(
            annotator_labels=(("a1", L(2)), ("a2", L(2))), majority_label=L(2)
        )
        assert pair.majority_label is L(2)
        assert pair.labels == [L(2), L(2)]

    def test_tie_broken_majority_is_accepted(self):
        pair = _pair(
            annotator_labels=(("a1", L(0)), ("a2", L(1)), ("a3", L(1))),
            majority_label=L(1),
        )
        assert pair.majority_label is L(1)

    def test_tie_breaker_choosing_third_value_is_decisive(self):
        # no strict majority exists; the stored label must come from a row
        pair = _pair(
            annotator_labels=(("a1", L(0)), ("a2", L(1)), ("a3", L(2))),
            majority_label=L(2),
        )
        assert pair.majority_label is L(2)

    def test_majority_from_nowhere_rejected(self):
        with pytest.raises(ValueError):
            _pair(
                annotator_labels=(("a1", L(0)), ("a2", L(1))),
                majority_label=L(2),
            )

    def test_label_free_pair_with_majority_is_fine(self):
        # NQ-open pairs carry a merged label but no per-annotator rows
        pair = _pair(majority_label=L(2))
        assert pair.annotator_labels == ()


class TestMetricScore:
    def test_valid(self):
        assert MetricScore("f1", 0.5, "p1").value == 0.5
        assert MetricScore("sas", None, "p1").value is None

    @pytest.mark.parametrize("value", [-0.1, 1.1, 2.0])
    def test_out_of_range(self, value):
        with pytest.raises(ValueError):
            MetricScore("f1", value, "p1")


class TestJsonCodec:
    def test_round_trip(self):
        pair = _pair(
            annotator_labels=(("a1", L(0)), ("a2", L(1)), ("a3", L(1))),
            majority_label=L(1),
        )
        obj = pair_to_json_dict(pair)
        assert obj["id"] == "p1"
        assert obj["labels"] == [
            {"annotator": "a1", "label": 0},
            {"annotator": "a2", "label": 1},
            {"annotator": "a3", "label": 1},
        ]
        assert obj["majority"] == 1
        assert obj["lexical_split"] == "F1_ZERO"
        fields = pair_fields_from_json_dict(obj)
        assert fields["pair_id"] == "p1"
        assert fields["first"].text == "UV"
        assert fields["annotator_labels"] == pair.annotator_labels
        assert fields["majority_label"] is L(1)
        assert fields["stored_split"] == "F1_ZERO"

    def test_unknown_fields_ignored(self):
        fields = pair_fields_from_json_dict(
            {"id": "x", "first": "a", "second": "b", "bogus": 1, "extra": [2]}
        )
        assert fields["pair_id"] == "x"
        assert fields["majority_label"] is None
        assert fields["annotator_labels"] == ()

    def test_missing_required_field(self):
        with pytest.raises(ValueError):
            pair_fields_from_json_dict({"id": "x", "first": "a"})

    def test_unknown_source_maps_to_other(self):
        fields = pair_fields_from_json_dict(
            {"id": "x", "first": "a", "second": "b", "source": "trivia-qa"}
        )
        assert fields["source"] is Source.OTHER

    def test_source_parsing(self):
        assert Source.from_string("SQuAD") is Source.SQUAD
        assert Source.from_string("nq-open") is Source.NQ_OPEN
        assert Source.from_string("germanquad") is Source.GERMANQUAD
