"""Benchmark corpus types and their JSONL serialization.

Prompts, knowledge documents, decoded generations, and per-run factuality
reports all live here. File parsers are strict: a bad line aborts the load
with its line number rather than silently dropping records. Writers emit a
canonical byte form (compact JSON, sorted nowhere, one record per line) so
that serialize(parse(f)) is byte-identical to a canonically written f.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import NamedTuple

from .errors import (
    DuplicateId,
    EmptyFile,
    MalformedDoc,
    MalformedRecord,
    MissingDoc,
)

SCHEMA_VERSION = 1


class PromptLabel(str, Enum):
    """Whether a prompt's own content is factually grounded."""

    FACTUAL = "factual"
    NONFACTUAL = "nonfactual"


@dataclass(frozen=True)
class Prompt:
    """One benchmark prompt with its ground-truth document links."""

    id: str
    text: str
    label: PromptLabel
    evidence_doc_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("prompt id is empty")
        if not self.text.strip():
            raise ValueError(f"prompt {self.id!r} has empty text")
        if not self.evidence_doc_ids:
            raise ValueError(f"prompt {self.id!r} lists no evidence docs")


@dataclass(frozen=True)
class KnowledgeDoc:
    """A ground-truth article, pre-split into sentences."""

    doc_id: str
    title: str
    sentences: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise MalformedDoc("doc has empty id")
        if not self.sentences:
            raise MalformedDoc(f"doc {self.doc_id!r} has no sentences")

    @property
    def full_text(self) -> str:
        return " ".join(self.sentences)


class TraceStep(NamedTuple):
    """Decoding trace entry for one generated token."""

    t: int
    p_used: float
    reset: bool


@dataclass(frozen=True)
class Generation:
    """One decoded continuation.

    ``tokens`` holds prompt ids followed by generated ids; ``step_trace``
    covers generated tokens only, so the prompt length is
    ``len(tokens) - len(step_trace)``. ``text`` is the detokenized
    continuation without the prompt.
    """

    prompt_id: str
    seed: int
    tokens: tuple[int, ...]
    text: str
    step_trace: tuple[TraceStep, ...]

    def __post_init__(self) -> None:
        if len(self.step_trace) > len(self.tokens):
            raise ValueError("trace longer than token sequence")

    @property
    def prompt_len(self) -> int:
        return len(self.tokens) - len(self.step_trace)

    @property
    def continuation_tokens(self) -> tuple[int, ...]:
        return self.tokens[self.prompt_len :]


class ReportCounts(NamedTuple):
    """Raw tallies behind the ratios in a FactualityReport."""

    prompts: int
    generations: int
    checkworthy: int
    all_ne: int
    hallu_ne: int
    entailed: int
    skipped_no_evidence: int


@dataclass
class FactualityReport:
    """Corpus-level metrics for one decoding configuration."""

    config_label: str
    config: dict
    seed: int
    ne_error: float | None
    entail_ratio: float | None
    diversity: float
    repetition: float
    mean_perplexity: float | None
    counts: ReportCounts
    schema_version: int = SCHEMA_VERSION
    code_version: str = ""

    def to_dict(self) -> dict:
        d = {
            "schema_version": self.schema_version,
            "code_version": self.code_version,
            "config_label": self.config_label,
            "config": self.config,
            "seed": self.seed,
            "ne_error": self.ne_error,
            "entail_ratio": self.entail_ratio,
            "diversity": self.diversity,
            "repetition": self.repetition,
            "mean_perplexity": self.mean_perplexity,
            "counts": self.counts._asdict(),
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FactualityReport":
        return cls(
            config_label=d["config_label"],
            config=d["config"],
            seed=d["seed"],
            ne_error=d["ne_error"],
            entail_ratio=d["entail_ratio"],
            diversity=d["diversity"],
            repetition=d["repetition"],
            mean_perplexity=d["mean_perplexity"],
            counts=ReportCounts(**d["counts"]),
            schema_version=d["schema_version"],
            code_version=d.get("code_version", ""),
        )


class KnowledgeStore(Mapping[str, KnowledgeDoc]):
    """Insertion-ordered doc_id -> KnowledgeDoc map with typed misses."""

    def __init__(self, docs: Iterable[KnowledgeDoc]):
        self._docs: dict[str, KnowledgeDoc] = {}
        for doc in docs:
            if doc.doc_id in self._docs:
                raise MalformedDoc(f"duplicate doc id {doc.doc_id!r}")
            self._docs[doc.doc_id] = doc

    def __getitem__(self, doc_id: str) -> KnowledgeDoc:
        try:
            return self._docs[doc_id]
        except KeyError:
            raise MissingDoc(doc_id) from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._docs)

    def __len__(self) -> int:
        return len(self._docs)


def _dumps(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    count = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(line_no, f"invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise MalformedRecord(line_no, "record is not an object")
            count += 1
            yield line_no, obj
    if count == 0:
        raise EmptyFile(str(path))


def _require(obj: dict, key: str, line_no: int):
    if key not in obj:
        raise MalformedRecord(line_no, f"missing field {key!r}")
    return obj[key]


def parse_prompts_file(path: str | Path) -> list[Prompt]:
    """Load a prompts JSONL file, rejecting duplicates and bad records."""
    prompts: list[Prompt] = []
    seen: set[str] = set()
    for line_no, obj in _iter_jsonl(path):
        pid = _require(obj, "id", line_no)
        if pid in seen:
            raise DuplicateId(pid, line_no)
        seen.add(pid)
        label_raw = _require(obj, "label", line_no)
        try:
            label = PromptLabel(label_raw)
        except ValueError:
            raise MalformedRecord(line_no, f"unknown label {label_raw!r}") from None
        docs = _require(obj, "evidence_docs", line_no)
        try:
            prompt = Prompt(
                id=pid,
                text=_require(obj, "prompt", line_no),
                label=label,
                evidence_doc_ids=tuple(docs),
            )
        except ValueError as exc:
            raise MalformedRecord(line_no, str(exc)) from None
        prompts.append(prompt)
    return prompts


def write_prompts_file(prompts: Iterable[Prompt], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in prompts:
            fh.write(
                _dumps(
                    {
                        "id": p.id,
                        "prompt": p.text,
                        "label": p.label.value,
                        "evidence_docs": list(p.evidence_doc_ids),
                    }
                )
            )
            fh.write("\n")


def load_knowledge_store(path: str | Path) -> KnowledgeStore:
    """Load a knowledge JSONL file into an ordered store."""
    docs: list[KnowledgeDoc] = []
    seen: set[str] = set()
    for line_no, obj in _iter_jsonl(path):
        doc_id = _require(obj, "doc_id", line_no)
        if doc_id in seen:
            raise DuplicateId(doc_id, line_no)
        seen.add(doc_id)
        sentences = _require(obj, "sentences", line_no)
        if not isinstance(sentences, list) or not all(
            isinstance(s, str) for s in sentences
        ):
            raise MalformedRecord(line_no, "sentences must be a list of strings")
        docs.append(
            KnowledgeDoc(
                doc_id=doc_id,
                title=_require(obj, "title", line_no),
                sentences=tuple(sentences),
            )
        )
    return KnowledgeStore(docs)


def write_knowledge_file(docs: Iterable[KnowledgeDoc], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(
                _dumps(
                    {
                        "doc_id": doc.doc_id,
                        "title": doc.title,
                        "sentences": list(doc.sentences),
                    }
                )
            )
            fh.write("\n")


def write_generations_file(gens: Iterable[Generation], path: str | Path) -> None:
    """Write generations JSONL; trace rows are [t, p_used, reset] triples."""
    with open(path, "w", encoding="utf-8") as fh:
        for g in gens:
            fh.write(
                _dumps(
                    {
                        "prompt_id": g.prompt_id,
                        "seed": g.seed,
                        "text": g.text,
                        "tokens": list(g.tokens),
                        "trace": [[s.t, s.p_used, s.reset] for s in g.step_trace],
                    }
                )
            )
            fh.write("\n")


def read_generations_file(path: str | Path) -> list[Generation]:
    gens: list[Generation] = []
    for line_no, obj in _iter_jsonl(path):
        trace_raw = _require(obj, "trace", line_no)
        try:
            trace = tuple(TraceStep(int(t), float(p), bool(r)) for t, p, r in trace_raw)
        except (TypeError, ValueError):
            raise MalformedRecord(line_no, "bad trace row") from None
        gens.append(
            Generation(
                prompt_id=_require(obj, "prompt_id", line_no),
                seed=int(_require(obj, "seed", line_no)),
                tokens=tuple(int(t) for t in _require(obj, "tokens", line_no)),
                text=_require(obj, "text", line_no),
                step_trace=trace,
            )
        )
    return gens


def write_report(report: FactualityReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(report.to_dict(), ensure_ascii=False, indent=2, sort_keys=True))
        fh.write("\n")


def read_report(path: str | Path) -> FactualityReport:
    with open(path, encoding="utf-8") as fh:
        return FactualityReport.from_dict(json.load(fh))


@dataclass
class PromptStats:
    """Whitespace-token statistics for a prompt set, split by label."""

    count: dict[PromptLabel, int] = field(
        default_factory=lambda: {lab: 0 for lab in PromptLabel}
    )
    mean_tokens: dict[PromptLabel, float] = field(
        default_factory=lambda: {lab: 0.0 for lab in PromptLabel}
    )


def prompt_statistics(prompts: Iterable[Prompt]) -> PromptStats:
    """Count prompts and average whitespace-token length per label."""
    totals = {lab: 0 for lab in PromptLabel}
    counts = {lab: 0 for lab in PromptLabel}
    for p in prompts:
        counts[p.label] += 1
        totals[p.label] += len(p.text.split())
    stats = PromptStats()
    for lab in PromptLabel:
        stats.count[lab] = counts[lab]
        stats.mean_tokens[lab] = totals[lab] / counts[lab] if counts[lab] else 0.0
    return stats
