"""Annotation providers: named entities, entailment, embeddings, roots.

Each capability is a small protocol so tests and desk-scale runs can plug
in deterministic local implementations while production runs point the
HTTP clients at real model servers. The local providers are honestly
named for what they are (gazetteer matching, lexical overlap, feature
hashing); they are stand-ins with the right contracts, not distill tests
of any particular pretrained model.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Protocol, Sequence, runtime_checkable

import numpy as np

from .errors import (
    EmbedderUnavailable,
    NliUnavailable,
    ProviderUnavailable,
)
from .textproc import content_words

_PROB_ATOL = 1e-4


class NerSpan(NamedTuple):
    """One recognized entity mention as character offsets into the text."""

    start: int
    end: int
    label: str
    text: str


class EntailmentKind(str, Enum):
    ENTAILMENT = "entailment"
    NEUTRAL = "neutral"
    CONTRADICTION = "contradiction"


_KIND_ORDER = (
    EntailmentKind.ENTAILMENT,
    EntailmentKind.NEUTRAL,
    EntailmentKind.CONTRADICTION,
)


@dataclass(frozen=True)
class EntailmentLabel:
    """Classifier output: winning label plus its 3-way distribution.

    ``probs`` is ordered (entailment, neutral, contradiction); the label
    must be one of the argmax entries and the probabilities must form a
    distribution.
    """

    kind: EntailmentKind
    probs: tuple[float, float, float]

    def __post_init__(self) -> None:
        if len(self.probs) != 3 or any(p < 0 for p in self.probs):
            raise ValueError("probs must be three non-negative floats")
        if abs(sum(self.probs) - 1.0) > _PROB_ATOL:
            raise ValueError(f"probs sum to {sum(self.probs)}")
        top = max(self.probs)
        winners = {k for k, p in zip(_KIND_ORDER, self.probs) if p == top}
        if self.kind not in winners:
            raise ValueError("label disagrees with argmax of probs")


@runtime_checkable
class NerProvider(Protocol):
    def ner(self, text: str) -> list[NerSpan]: ...


@runtime_checkable
class NliProvider(Protocol):
    def classify(self, premise: str, hypothesis: str) -> EntailmentLabel: ...


@runtime_checkable
class Embedder(Protocol):
    def embed(self, texts: Sequence[str]) -> list[np.ndarray]: ...


_WORD_RUN_RE = re.compile(r"\w+")


def _is_word_char(ch: str) -> bool:
    return bool(ch) and (ch.isalnum() or ch == "_")


class GazetteerNer:
    """Case-sensitive longest-match entity tagging from a fixed name list.

    Matches run left to right without overlap; at each position the
    longest listed surface wins, and both ends must sit on word
    boundaries. Entries are indexed by their first word-character run, so
    tagging stays fast even with thousands of entries.
    """

    def __init__(self, entries: Sequence[str], label: str = "ENTITY"):
        self.entries = tuple(sorted(set(e for e in entries if e.strip())))
        self.label = label
        # first word run -> [(offset of run inside entry, entry)], longest first
        self._index: dict[str, list[tuple[int, str]]] = {}
        for entry in self.entries:
            m = _WORD_RUN_RE.search(entry)
            if m is None:
                continue
            self._index.setdefault(m.group(0), []).append((m.start(), entry))
        for bucket in self._index.values():
            bucket.sort(key=lambda pair: len(pair[1]), reverse=True)

    @classmethod
    def from_file(cls, path: str | Path, label: str = "ENTITY") -> "GazetteerNer":
        lines = Path(path).read_text("utf-8").splitlines()
        return cls([ln.strip() for ln in lines if ln.strip()], label=label)

    def ner(self, text: str) -> list[NerSpan]:
        spans: list[NerSpan] = []
        cursor = 0
        for run in _WORD_RUN_RE.finditer(text):
            if run.start() < cursor:
                continue
            bucket = self._index.get(run.group(0))
            if not bucket:
                continue
            for offset, entry in bucket:
                start = run.start() - offset
                end = start + len(entry)
                if start < cursor or start < 0 or end > len(text):
                    continue
                if text[start:end] != entry:
                    continue
                if start > 0 and _is_word_char(text[start - 1]):
                    continue
                if end < len(text) and _is_word_char(text[end]):
                    continue
                spans.append(NerSpan(start, end, self.label, entry))
                cursor = end
                break
        return spans


class LexicalOverlapNli:
    """Containment heuristic: premise covering all hypothesis content words
    counts as entailment, anything else as neutral. Deterministic, reflexive
    (every text entails itself), and cheap; a desk-scale stand-in only.
    """

    def classify(self, premise: str, hypothesis: str) -> EntailmentLabel:
        hyp = content_words(hypothesis)
        prem = set(content_words(premise))
        # vacuous containment keeps reflexivity for stopword-only texts
        if all(tok in prem for tok in hyp):
            return EntailmentLabel(EntailmentKind.ENTAILMENT, (0.9, 0.08, 0.02))
        return EntailmentLabel(EntailmentKind.NEUTRAL, (0.05, 0.9, 0.05))


class HashingEmbedder:
    """Feature-hashed character trigram bag, L2-normalized.

    Identical texts map to identical vectors; texts sharing substrings
    land near each other. Vectors are cached per text.
    """

    def __init__(self, dim: int = 128):
        if dim < 8:
            raise ValueError("dim must be >= 8")
        self.dim = dim
        self._cache: dict[str, np.ndarray] = {}

    def _vector(self, text: str) -> np.ndarray:
        cached = self._cache.get(text)
        if cached is not None:
            return cached
        vec = np.zeros(self.dim, dtype=np.float64)
        padded = f" {text.lower()} "
        for i in range(len(padded) - 2):
            gram = padded[i : i + 3]
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
            vec[int.from_bytes(digest, "little") % self.dim] += 1.0
        norm = float(np.linalg.norm(vec))
        if norm > 0:
            vec /= norm
        vec.setflags(write=False)
        self._cache[text] = vec
        return vec

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self._vector(t) for t in texts]


def _post_json(url: str, payload: dict, timeout: float, err_cls) -> dict:
    import requests

    try:
        resp = requests.post(url, json=payload, timeout=timeout)
        resp.raise_for_status()
        return resp.json()
    except (requests.RequestException, ValueError) as exc:
        raise err_cls(f"{url}: {exc}") from exc


class HttpNer:
    """Client for ``POST {base}/ner`` with ``{"text": ...}`` returning
    ``{"entities": [{"start", "end", "label", "text"}, ...]}``."""

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def ner(self, text: str) -> list[NerSpan]:
        data = _post_json(
            f"{self.base_url}/ner", {"text": text}, self.timeout, ProviderUnavailable
        )
        try:
            return [
                NerSpan(int(e["start"]), int(e["end"]), str(e["label"]), str(e["text"]))
                for e in data["entities"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderUnavailable(f"bad ner payload: {exc}") from exc


class HttpNli:
    """Client for ``POST {base}/nli`` with ``{"premise", "hypothesis"}``
    returning ``{"label": str, "probs": [e, n, c]}``."""

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def classify(self, premise: str, hypothesis: str) -> EntailmentLabel:
        data = _post_json(
            f"{self.base_url}/nli",
            {"premise": premise, "hypothesis": hypothesis},
            self.timeout,
            NliUnavailable,
        )
        try:
            kind = EntailmentKind(str(data["label"]).lower())
            probs = tuple(float(p) for p in data["probs"])
            return EntailmentLabel(kind, probs)  # type: ignore[arg-type]
        except (KeyError, TypeError, ValueError) as exc:
            raise NliUnavailable(f"bad nli payload: {exc}") from exc


class HttpEmbedder:
    """Client for ``POST {base}/embed`` with ``{"texts": [...]}`` returning
    ``{"vectors": [[...], ...]}``; responses are memoized per text."""

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._cache: dict[str, np.ndarray] = {}

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        missing = [t for t in texts if t not in self._cache]
        if missing:
            data = _post_json(
                f"{self.base_url}/embed",
                {"texts": missing},
                self.timeout,
                EmbedderUnavailable,
            )
            try:
                vectors = [np.asarray(v, dtype=np.float64) for v in data["vectors"]]
            except (KeyError, TypeError, ValueError) as exc:
                raise EmbedderUnavailable(f"bad embed payload: {exc}") from exc
            if len(vectors) != len(missing):
                raise EmbedderUnavailable(
                    f"asked for {len(missing)} vectors, got {len(vectors)}"
                )
            for text, vec in zip(missing, vectors):
                vec.setflags(write=False)
                self._cache[text] = vec
        return [self._cache[t] for t in texts]
