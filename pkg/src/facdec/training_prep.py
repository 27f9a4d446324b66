"""Factuality-oriented training-data preparation.

Two transformations: every sentence of a document gets its article title
prepended as an explicit topic marker (``title ==> sentence``), restoring
the context a standalone sentence lost; and a sentence-completion loss
mask zeroes the loss on tokens before a pivot so training concentrates on
finishing sentences rather than restating their beginnings. Pivots come
from one of three strategies: the sentence midpoint, a seeded uniform
draw from the middle half, or an annotated syntactic root.
"""

from __future__ import annotations

import json
import warnings
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .corpus import KnowledgeDoc, KnowledgeStore
from .errors import (
    EmptyTitle,
    MalformedRecord,
    MissingRootAnnotation,
    MissingRootIndex,
    MissingSeed,
    PivotOutOfRange,
)

TOPIC_SEPARATOR = " ==> "


@dataclass(frozen=True)
class PrefixedSentence:
    """One sentence with its topic marker attached."""

    topic: str
    sentence: str

    @property
    def rendered(self) -> str:
        return f"{self.topic}{TOPIC_SEPARATOR}{self.sentence}"


def split_rendered(rendered: str) -> tuple[str, str]:
    """Invert PrefixedSentence.rendered at the first separator."""
    topic, sep, sentence = rendered.partition(TOPIC_SEPARATOR)
    if not sep:
        raise ValueError(f"no topic separator in {rendered!r}")
    return topic, sentence


def topic_prefix(doc: KnowledgeDoc) -> list[PrefixedSentence]:
    """Prefix every sentence of a document with its title."""
    topic = doc.title.strip()
    if not topic:
        raise EmptyTitle(f"doc {doc.doc_id!r} has a blank title")
    return [PrefixedSentence(topic=topic, sentence=s) for s in doc.sentences]


class PivotStrategy(str, Enum):
    SC_HALF = "half"
    SC_RANDOM = "random"
    SC_ROOT = "root"


def sc_pivot(
    sentence_token_count: int,
    strategy: PivotStrategy,
    rng_seed: int | None = None,
    root_index: int | None = None,
) -> int:
    """Pivot position (0-based, in [0, length]) for one sentence.

    SC_HALF takes floor(L/2), so ceil(L/2) tokens keep loss. SC_RANDOM
    takes floor(u*L) with u drawn uniformly from [0.25, 0.75) under the
    given seed. SC_ROOT passes through the annotated root index, which
    must lie inside the sentence.
    """
    length = int(sentence_token_count)
    if length < 1:
        raise PivotOutOfRange("sentence has no tokens")
    if strategy is PivotStrategy.SC_HALF:
        return length // 2
    if strategy is PivotStrategy.SC_RANDOM:
        if rng_seed is None:
            raise MissingSeed("SC_RANDOM needs rng_seed")
        u = 0.25 + 0.5 * float(np.random.default_rng(int(rng_seed)).random())
        return int(u * length)
    if root_index is None:
        raise MissingRootIndex("SC_ROOT needs root_index")
    if not 0 <= root_index < length:
        raise PivotOutOfRange(
            f"root index {root_index} outside sentence of {length} tokens"
        )
    return int(root_index)


@dataclass(frozen=True)
class LossMask:
    """Per-token 0/1 loss weights for one prefixed sentence."""

    pivot: int
    mask: tuple[int, ...]
    strategy: PivotStrategy


def loss_mask(
    sentence_tokens: Iterable[str],
    pivot: int,
    strategy: PivotStrategy,
    prefix_len: int = 0,
) -> LossMask:
    """Zero loss before the pivot, keep it from the pivot on.

    ``prefix_len`` extra leading zeros cover topic-marker tokens, which
    never receive loss. A pivot equal to the sentence length is legal but
    masks everything, which is almost never intended; it warns.
    """
    toks = list(sentence_tokens)
    length = len(toks)
    if not 0 <= pivot <= length:
        raise PivotOutOfRange(f"pivot {pivot} outside [0, {length}]")
    if pivot == length and length > 0:
        warnings.warn(
            f"pivot {pivot} masks the entire sentence", RuntimeWarning, stacklevel=2
        )
    mask = [0] * prefix_len + [0] * pivot + [1] * (length - pivot)
    return LossMask(pivot=pivot, mask=tuple(mask), strategy=strategy)


def load_root_annotations(path: str | Path) -> dict[tuple[str, int], int]:
    """Read a root-annotation sidecar JSONL of
    ``{"doc_id", "sent_idx", "root_index"}`` records."""
    table: dict[tuple[str, int], int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                key = (str(obj["doc_id"]), int(obj["sent_idx"]))
                table[key] = int(obj["root_index"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                raise MalformedRecord(line_no, "bad root annotation") from None
    return table


def _sentence_seed(base_seed: int, doc_id: str, sent_idx: int) -> int:
    import hashlib

    h = hashlib.sha256()
    h.update(str(int(base_seed)).encode("ascii"))
    h.update(b"\x00")
    h.update(doc_id.encode("utf-8"))
    h.update(b"\x00")
    h.update(str(int(sent_idx)).encode("ascii"))
    return int.from_bytes(h.digest()[:8], "little") & 0x7FFFFFFFFFFFFFFF


def prepare_corpus(
    store: KnowledgeStore,
    strategy: PivotStrategy,
    seed: int,
    out_path: str | Path,
    root_annotations: dict[tuple[str, int], int] | None = None,
    tokenizer: Callable[[str], list[str]] = str.split,
) -> int:
    """Write one masked training record per sentence; returns the count.

    Records are JSONL with rendered text, its tokens, the 0/1 mask over
    those tokens, the pivot, and the strategy. SC_RANDOM derives one seed
    per (doc, sentence) from the run seed so output is reproducible and
    order-independent. SC_ROOT requires an annotation for every sentence.
    """
    written = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for doc_id in store:
            doc = store[doc_id]
            for sent_idx, pref in enumerate(topic_prefix(doc)):
                sent_tokens = tokenizer(pref.sentence)
                prefix_tokens = tokenizer(pref.topic + TOPIC_SEPARATOR.rstrip())
                if strategy is PivotStrategy.SC_RANDOM:
                    pivot = sc_pivot(
                        len(sent_tokens),
                        strategy,
                        rng_seed=_sentence_seed(seed, doc_id, sent_idx),
                    )
                elif strategy is PivotStrategy.SC_ROOT:
                    if root_annotations is None or (doc_id, sent_idx) not in root_annotations:
                        raise MissingRootAnnotation(doc_id, sent_idx)
                    pivot = sc_pivot(
                        len(sent_tokens),
                        strategy,
                        root_index=root_annotations[(doc_id, sent_idx)],
                    )
                else:
                    pivot = sc_pivot(len(sent_tokens), strategy)
                lm = loss_mask(
                    sent_tokens, pivot, strategy, prefix_len=len(prefix_tokens)
                )
                record = {
                    "doc_id": doc_id,
                    "sent_idx": sent_idx,
                    "text": pref.rendered,
                    "tokens": prefix_tokens + sent_tokens,
                    "mask": list(lm.mask),
                    "pivot": pivot,
                    "strategy": strategy.value,
                }
                fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
                fh.write("\n")
                written += 1
    return written
