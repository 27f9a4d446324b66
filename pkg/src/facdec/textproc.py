"""Shared lexical plumbing: tokenization, stopwords, sentence splitting."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

# word characters minus underscore; unicode-aware
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)
_SENT_END_RE = re.compile(r"[.!?]")


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; punctuation and underscores split words."""
    return [m.group(0).lower() for m in _WORD_RE.finditer(text)]


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The bundled 179-entry English stopword list."""
    raw = resources.files("facdec.data").joinpath("stopwords.txt").read_text("utf-8")
    words = frozenset(line.strip() for line in raw.splitlines() if line.strip())
    return words


def content_words(text: str) -> list[str]:
    """Tokenize and drop stopwords; order and multiplicity preserved."""
    stops = stopwords()
    return [tok for tok in tokenize(text) if tok not in stops]


def first_sentence(text: str, limit: int = 300) -> str:
    """Text up to and including the first sentence terminator, capped.

    With no terminator the whole text is the sentence. The cap guards
    downstream entailment models with bounded input lengths.
    """
    m = _SENT_END_RE.search(text)
    sent = text[: m.end()] if m else text
    return sent.strip()[:limit]
