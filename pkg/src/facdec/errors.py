"""Exception types raised across the library.

Every error carries enough context to locate the offending input (line
numbers for file parsers, ids for store lookups) without holding references
to large objects.
"""

from __future__ import annotations


class FacdecError(Exception):
    """Base class for all library-specific errors."""


# --- corpus / file parsing ---------------------------------------------------


class MalformedRecord(FacdecError):
    """A JSONL line is not valid JSON or is missing required fields."""

    def __init__(self, line_no: int, detail: str):
        self.line_no = line_no
        self.detail = detail
        super().__init__(f"line {line_no}: {detail}")


class DuplicateId(FacdecError):
    """Two records in one file share an id."""

    def __init__(self, record_id: str, line_no: int):
        self.record_id = record_id
        self.line_no = line_no
        super().__init__(f"duplicate id {record_id!r} at line {line_no}")


class EmptyFile(FacdecError):
    """An input file contains no records."""


class MalformedDoc(FacdecError):
    """A knowledge document violates its structural constraints."""


class MissingDoc(FacdecError):
    """A referenced knowledge document is absent from the store."""

    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"knowledge doc {doc_id!r} not found")


# --- language-model backends -------------------------------------------------


class BackendUnavailable(FacdecError):
    """A remote model server cannot be reached or returned garbage."""


class UnknownToken(FacdecError):
    """A token id or surface form is outside the backend vocabulary."""


class UnknownContext(FacdecError):
    """A table backend has no entry for the context or any suffix of it."""


class EmptyCorpus(FacdecError):
    """N-gram training received no usable tokens."""


class ZeroProbabilityToken(FacdecError):
    """Perplexity scoring hit a token with probability zero."""

    def __init__(self, position: int, token_id: int):
        self.position = position
        self.token_id = token_id
        super().__init__(f"zero probability for token {token_id} at position {position}")


# --- claim filtering ---------------------------------------------------------


class InvalidSpan(FacdecError):
    """An entity span does not fit inside its text."""


# --- retrieval ---------------------------------------------------------------


class EmptyCandidates(FacdecError):
    """Retrieval was asked to rank an empty candidate pool."""


# --- providers ---------------------------------------------------------------


class ProviderUnavailable(FacdecError):
    """A remote annotation service cannot be reached or returned garbage."""


class NliUnavailable(ProviderUnavailable):
    """The entailment provider cannot be reached."""


class EmbedderUnavailable(ProviderUnavailable):
    """The embedding provider cannot be reached."""


# --- metrics -----------------------------------------------------------------


class NoEntitiesInCorpus(FacdecError):
    """Entity error rate is undefined: no entities in any scored generation."""


class EmptyEvidence(FacdecError):
    """An evidence bundle holds no sentences to score against."""


# --- training prep -----------------------------------------------------------


class EmptyTitle(FacdecError):
    """A document title is empty after stripping whitespace."""


class MissingSeed(FacdecError):
    """The random pivot strategy needs a seed and none was given."""


class MissingRootIndex(FacdecError):
    """The root pivot strategy needs a root annotation and none was given."""


class MissingRootAnnotation(FacdecError):
    """A sentence has no entry in the root-annotation sidecar."""

    def __init__(self, doc_id: str, sent_idx: int):
        self.doc_id = doc_id
        self.sent_idx = sent_idx
        super().__init__(f"no root annotation for {doc_id!r} sentence {sent_idx}")


class PivotOutOfRange(FacdecError):
    """A loss-mask pivot lies outside [0, sentence length]."""


# --- benchmark ---------------------------------------------------------------


class TooFewReports(FacdecError):
    """Trade-off curves need at least two reports."""
