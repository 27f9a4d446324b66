"""Check-worthiness filter for generated continuations.

A continuation is worth fact-checking only if it makes an objective,
entity-anchored claim. Three wholesale rejection rules apply, each with a
machine-readable reason: no named entity detected, first-person voice
(chit-chat rather than encyclopedic claims), or a question mark anywhere
(questions assert nothing). A continuation is checkworthy exactly when no
rule fires.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import InvalidSpan

# whole words only, case-insensitive; contractions listed before their bases
# so the regex consumes "I'm" rather than stopping at "I"
_FIRST_PERSON_RE = re.compile(
    r"(?<!\w)(?:i'm|i've|i'd|i'll|we're|we've|we'd|we'll|i|we|us)(?!\w)",
    re.IGNORECASE,
)


class FilterReason(str, Enum):
    NO_NAMED_ENTITY = "no_named_entity"
    FIRST_PERSON = "first_person"
    QUESTION_MARK = "question_mark"


@dataclass(frozen=True)
class CheckworthyVerdict:
    checkworthy: bool
    reasons: frozenset[FilterReason]

    def __post_init__(self) -> None:
        if self.checkworthy != (not self.reasons):
            raise ValueError("verdict inconsistent with reasons")


def first_person_mentions(text: str) -> list[str]:
    """Whole-word first-person pronouns and contractions found in text."""
    normalized = text.replace("’", "'")
    return _FIRST_PERSON_RE.findall(normalized)


def is_checkworthy(
    text: str, ne_spans: Sequence[tuple[int, int, str]]
) -> CheckworthyVerdict:
    """Apply the three rejection rules to one continuation.

    ``ne_spans`` are (start, end, label) character spans from an entity
    recognizer run over ``text``. Spans must lie inside the text.
    """
    for start, end, _label in ne_spans:
        if not (0 <= start < end <= len(text)):
            raise InvalidSpan(f"span ({start}, {end}) outside text of length {len(text)}")
    reasons = set()
    if not ne_spans:
        reasons.add(FilterReason.NO_NAMED_ENTITY)
    if first_person_mentions(text):
        reasons.add(FilterReason.FIRST_PERSON)
    if "?" in text:
        reasons.add(FilterReason.QUESTION_MARK)
    return CheckworthyVerdict(checkworthy=not reasons, reasons=frozenset(reasons))
