import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from facdec.checkworthy import (
    CheckworthyVerdict,
    FilterReason,
    first_person_mentions,
    is_checkworthy,
)
from facdec.errors import InvalidSpan


def span_over(text, surface, label="PERSON"):
    start = text.index(surface)
    return (start, start + len(surface), label)


class TestFilterRules:
    def test_plain_claim_is_checkworthy(self):
        text = "Obama was born in Hawaii ."
        verdict = is_checkworthy(text, [span_over(text, "Obama")])
        assert verdict.checkworthy
        assert verdict.reasons == frozenset()

    def test_no_entity_rejected(self):
        verdict = is_checkworthy("Check this out", [])
        assert not verdict.checkworthy
        assert verdict.reasons == {FilterReason.NO_NAMED_ENTITY}

    def test_first_person_rejected(self):
        text = "I think Obama was born in Hawaii ."
        verdict = is_checkworthy(text, [span_over(text, "Obama")])
        assert not verdict.checkworthy
        assert verdict.reasons == {FilterReason.FIRST_PERSON}

    def test_question_mark_rejected(self):
        text = "Was Obama born in Hawaii ?"
        verdict = is_checkworthy(text, [span_over(text, "Obama")])
        assert not verdict.checkworthy
        assert verdict.reasons == {FilterReason.QUESTION_MARK}

    def test_reasons_accumulate(self):
        verdict = is_checkworthy("Do I know this ? No idea .", [])
        assert verdict.reasons == {
            FilterReason.NO_NAMED_ENTITY,
            FilterReason.FIRST_PERSON,
            FilterReason.QUESTION_MARK,
        }

    def test_verdict_consistency_enforced(self):
        with pytest.raises(ValueError):
            CheckworthyVerdict(checkworthy=True, reasons=frozenset({FilterReason.FIRST_PERSON}))


class TestFirstPersonDetection:
    @pytest.mark.parametrize(
        "text",
        [
            "I saw it",
            "i saw it",
            "We did this",
            "they told us about it",
            "I'm sure of it",
            "I've been there",
            "I'd say so",
            "I'll check",
            "we're ready",
            "we've arrived",
            "we'd agree",
            "we'll see",
        ],
    )
    def test_detected(self, text):
        assert first_person_mentions(text)

    @pytest.mark.parametrize(
        "text",
        [
            "the bus arrived",      # us inside a word
            "Willem de Kooning",    # we inside a word
            "Illinois is a state",  # i inside a word
            "the weather was fine",
            "Usain Bolt ran fast",
        ],
    )
    def test_not_detected_inside_words(self, text):
        assert not first_person_mentions(text)

    def test_curly_apostrophe_contraction(self):
        assert first_person_mentions("I’m certain")

    def test_sentence_boundary_positions(self):
        assert first_person_mentions("He asked. I answered.")
        assert first_person_mentions("Trust us.")


class TestSpanValidation:
    def test_span_outside_text_rejected(self):
        with pytest.raises(InvalidSpan):
            is_checkworthy("short", [(0, 99, "X")])

    def test_reversed_span_rejected(self):
        with pytest.raises(InvalidSpan):
            is_checkworthy("short", [(3, 2, "X")])

    def test_negative_start_rejected(self):
        with pytest.raises(InvalidSpan):
            is_checkworthy("short", [(-1, 2, "X")])


class TestProperties:
    @given(st.text(alphabet=st.characters(blacklist_characters="?"), max_size=80))
    @settings(max_examples=80, deadline=None)
    def test_adding_question_mark_always_rejects(self, text):
        spans = [(0, 1, "X")] if len(text) >= 1 else []
        before = is_checkworthy(text, spans)
        after = is_checkworthy(text + "?", spans)
        assert FilterReason.QUESTION_MARK not in before.reasons
        assert FilterReason.QUESTION_MARK in after.reasons
        assert not after.checkworthy

    @given(st.text(max_size=80))
    @settings(max_examples=80, deadline=None)
    def test_checkworthy_iff_no_reasons(self, text):
        spans = [(0, len(text), "X")] if text else []
        verdict = is_checkworthy(text, spans)
        assert verdict.checkworthy == (not verdict.reasons)
