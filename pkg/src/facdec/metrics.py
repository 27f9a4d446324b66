"""Corpus-level factuality and fluency metrics.

Hallucination is measured against ground-truth documents: a named entity
in a generation is matched when any contiguous content-word n-gram of the
entity appears in the document's content-word stream; unmatched entities
are hallucinated. Verifiability is an entailment score over retrieved
evidence sentences. Diversity is distinct-4-gram mass pooled per prompt,
and a cheap suffix-periodicity check flags degenerate repetition. Every
fold is a plain accumulator with an associative merge so corpus runs can
fan out over workers and combine exactly.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .corpus import Generation, ReportCounts
from .errors import EmptyEvidence, InvalidSpan, NoEntitiesInCorpus
from .providers import EntailmentKind, NerProvider, NliProvider
from .retrieval import EvidenceBundle
from .textproc import content_words, first_sentence

REPETITION_MIN_COPIES = 3
REPETITION_MAX_PERIOD = 20
DIVERSITY_NGRAM = 4


@dataclass(frozen=True)
class NamedEntity:
    """An entity mention plus its content-word n-gram inventory."""

    surface: str
    label: str
    content_tokens: tuple[str, ...] = field(init=False)
    token_ngrams: frozenset[tuple[str, ...]] = field(init=False)

    def __post_init__(self) -> None:
        toks = tuple(content_words(self.surface))
        grams = frozenset(
            tuple(toks[i : i + n])
            for n in range(1, len(toks) + 1)
            for i in range(len(toks) - n + 1)
        )
        object.__setattr__(self, "content_tokens", toks)
        object.__setattr__(self, "token_ngrams", grams)


def entities_from_spans(text: str, spans) -> list[NamedEntity]:
    """Lift recognizer spans into NamedEntity values.

    Span offsets are validated against the text; a span whose recorded
    surface disagrees with the text at those offsets is rejected.
    """
    entities = []
    for span in spans:
        if not (0 <= span.start < span.end <= len(text)):
            raise InvalidSpan(f"span ({span.start}, {span.end}) outside text")
        if text[span.start : span.end] != span.text:
            raise InvalidSpan(
                f"span text {span.text!r} disagrees with offsets "
                f"({span.start}, {span.end})"
            )
        entities.append(NamedEntity(surface=span.text, label=span.label))
    return entities


def detect_entities(text: str, provider: NerProvider) -> list[NamedEntity]:
    """Run a recognizer over the text and validate what it returns."""
    return entities_from_spans(text, provider.ner(text))


def content_stream(doc_text: str) -> tuple[str, ...]:
    """Lowercased content-word stream of a document, for ne_match."""
    return tuple(content_words(doc_text))


def ne_match(entity: NamedEntity, doc: str | Sequence[str]) -> bool:
    """True when any content n-gram of the entity occurs contiguously in
    the document's content-word stream.

    A contiguous n-gram is present iff its first unigram is, so membership
    reduces to a unigram-set intersection; the n-gram inventory on the
    entity stays available for diagnostics. An entity with no content
    tokens (all stopwords) can never match and counts as hallucinated.
    """
    stream = content_stream(doc) if isinstance(doc, str) else doc
    if not entity.content_tokens:
        return False
    stream_set = set(stream)
    return any(tok in stream_set for tok in entity.content_tokens)


def ne_error(
    items: Iterable[tuple[Generation, Sequence[NamedEntity]]],
    doc_text_by_prompt: Mapping[str, str],
) -> float:
    """Micro-averaged hallucinated-entity rate over scored generations.

    Every detected entity across the corpus lands in one denominator;
    entities failing ne_match against their prompt's ground-truth text are
    the numerator. Undefined (raises) when no generation has any entity.
    """
    streams: dict[str, tuple[str, ...]] = {}
    total = 0
    hallu = 0
    for gen, entities in items:
        if gen.prompt_id not in streams:
            streams[gen.prompt_id] = content_stream(doc_text_by_prompt[gen.prompt_id])
        stream = streams[gen.prompt_id]
        for ent in entities:
            total += 1
            if not ne_match(ent, stream):
                hallu += 1
    if total == 0:
        raise NoEntitiesInCorpus("no named entities in any scored generation")
    return hallu / total


def entail_single(text: str, bundle: EvidenceBundle, nli: NliProvider) -> bool:
    """Whether any evidence sentence entails the generation's first
    sentence (premise = evidence, hypothesis = truncated first sentence)."""
    if not bundle.sentence_level:
        raise EmptyEvidence("bundle holds no evidence sentences")
    hypothesis = first_sentence(text)
    for ev in bundle.sentence_level:
        if nli.classify(ev.text, hypothesis).kind is EntailmentKind.ENTAILMENT:
            return True
    return False


@dataclass(frozen=True)
class EntailmentCounts:
    entailed: int
    scored: int
    skipped_no_evidence: int

    @property
    def ratio(self) -> float:
        return self.entailed / self.scored if self.scored else 0.0


def entailment_counts(
    items: Iterable[tuple[Generation, EvidenceBundle]], nli: NliProvider
) -> EntailmentCounts:
    """Fold entail_single over scored generations; bundles with no
    sentences are skipped and tallied rather than raising."""
    entailed = 0
    scored = 0
    skipped = 0
    for gen, bundle in items:
        if not bundle.sentence_level:
            skipped += 1
            continue
        scored += 1
        if entail_single(gen.text, bundle, nli):
            entailed += 1
    return EntailmentCounts(entailed=entailed, scored=scored, skipped_no_evidence=skipped)


def entail_ratio(
    items: Iterable[tuple[Generation, EvidenceBundle]], nli: NliProvider
) -> float:
    return entailment_counts(items, nli).ratio


def ngrams(seq: Sequence[Hashable], n: int) -> Iterable[tuple]:
    for i in range(len(seq) - n + 1):
        yield tuple(seq[i : i + n])


def diversity(
    groups: Iterable[Sequence[Sequence[Hashable]]], n: int = DIVERSITY_NGRAM
) -> float:
    """Mean over prompts of distinct-n-grams / total-n-grams, pooling each
    prompt's generations. Groups yielding no n-grams at all (every
    generation shorter than n) drop out of the mean; 0.0 when every group
    is empty."""
    ratios = []
    for group in groups:
        distinct: set[tuple] = set()
        total = 0
        for seq in group:
            for gram in ngrams(seq, n):
                distinct.add(gram)
                total += 1
        if total > 0:
            ratios.append(len(distinct) / total)
    return sum(ratios) / len(ratios) if ratios else 0.0


def repetition_flag(
    tokens: Sequence[Hashable],
    min_copies: int = REPETITION_MIN_COPIES,
    max_period: int = REPETITION_MAX_PERIOD,
) -> bool:
    """True when the sequence ends in min_copies back-to-back copies of
    some block of length 1..max_period."""
    tokens = list(tokens)
    for k in range(1, max_period + 1):
        span = min_copies * k
        if span > len(tokens):
            break
        tail = tokens[-span:]
        if all(tail[i] == tail[i - k] for i in range(k, span)):
            return True
    return False


def repetition_rate(
    sequences: Iterable[Sequence[Hashable]],
    min_copies: int = REPETITION_MIN_COPIES,
    max_period: int = REPETITION_MAX_PERIOD,
) -> float:
    flags = 0
    total = 0
    for seq in sequences:
        total += 1
        if repetition_flag(seq, min_copies, max_period):
            flags += 1
    return flags / total if total else 0.0


@dataclass
class MetricAccumulator:
    """Associative fold state for one decoding configuration.

    Per-prompt n-gram pools are kept as sets keyed by prompt id, so
    absorbing partial accumulators from different workers, in any order
    or grouping, finalizes to identical numbers.
    """

    generations: int = 0
    checkworthy: int = 0
    all_ne: int = 0
    hallu_ne: int = 0
    entailed: int = 0
    entail_scored: int = 0
    skipped_no_evidence: int = 0
    repetition_flags: int = 0
    ppl_sum: float = 0.0
    ppl_count: int = 0
    prompt_ids: set = field(default_factory=set)
    ngram_distinct: dict = field(default_factory=dict)
    ngram_total: dict = field(default_factory=dict)

    def record(
        self,
        prompt_id: str,
        continuation_tokens: Sequence[Hashable],
        checkworthy: bool,
        ne_total: int = 0,
        ne_hallu: int = 0,
        entail_scored: bool = False,
        entailed: bool = False,
        skipped_no_evidence: bool = False,
        perplexity: float | None = None,
    ) -> None:
        self.generations += 1
        self.prompt_ids.add(prompt_id)
        if checkworthy:
            self.checkworthy += 1
        self.all_ne += ne_total
        self.hallu_ne += ne_hallu
        if entail_scored:
            self.entail_scored += 1
            if entailed:
                self.entailed += 1
        if skipped_no_evidence:
            self.skipped_no_evidence += 1
        if repetition_flag(continuation_tokens):
            self.repetition_flags += 1
        pool = self.ngram_distinct.setdefault(prompt_id, set())
        count = 0
        for gram in ngrams(continuation_tokens, DIVERSITY_NGRAM):
            pool.add(gram)
            count += 1
        self.ngram_total[prompt_id] = self.ngram_total.get(prompt_id, 0) + count
        if perplexity is not None:
            self.ppl_sum += perplexity
            self.ppl_count += 1

    def absorb(self, other: "MetricAccumulator") -> None:
        self.generations += other.generations
        self.checkworthy += other.checkworthy
        self.all_ne += other.all_ne
        self.hallu_ne += other.hallu_ne
        self.entailed += other.entailed
        self.entail_scored += other.entail_scored
        self.skipped_no_evidence += other.skipped_no_evidence
        self.repetition_flags += other.repetition_flags
        self.ppl_sum += other.ppl_sum
        self.ppl_count += other.ppl_count
        self.prompt_ids |= other.prompt_ids
        for pid, pool in other.ngram_distinct.items():
            self.ngram_distinct.setdefault(pid, set()).update(pool)
        for pid, count in other.ngram_total.items():
            self.ngram_total[pid] = self.ngram_total.get(pid, 0) + count

    @property
    def ne_error(self) -> float | None:
        return self.hallu_ne / self.all_ne if self.all_ne else None

    @property
    def entail_ratio(self) -> float | None:
        return self.entailed / self.entail_scored if self.entail_scored else None

    @property
    def diversity(self) -> float:
        ratios = [
            len(self.ngram_distinct[pid]) / self.ngram_total[pid]
            for pid in self.ngram_total
            if self.ngram_total[pid] > 0
        ]
        return sum(ratios) / len(ratios) if ratios else 0.0

    @property
    def repetition(self) -> float:
        return self.repetition_flags / self.generations if self.generations else 0.0

    @property
    def mean_perplexity(self) -> float | None:
        return self.ppl_sum / self.ppl_count if self.ppl_count else None

    def counts(self) -> ReportCounts:
        return ReportCounts(
            prompts=len(self.prompt_ids),
            generations=self.generations,
            checkworthy=self.checkworthy,
            all_ne=self.all_ne,
            hallu_ne=self.hallu_ne,
            entailed=self.entailed,
            skipped_no_evidence=self.skipped_no_evidence,
        )
