"""Next-token-distribution backends.

A backend exposes a vocabulary and a ``next_distribution(context)`` method
returning a dense probability vector over that vocabulary. Three concrete
backends ship here: an explicit lookup table (tests, toy worlds), an
additive-smoothed n-gram model with longest-suffix backoff (desk-scale
experiments), and an HTTP client for a remote model server. All are
deterministic and safe to share across worker threads.
"""

from __future__ import annotations

import math
import struct
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import (
    BackendUnavailable,
    EmptyCorpus,
    UnknownContext,
    UnknownToken,
    ZeroProbabilityToken,
)

_DIST_ATOL = 1e-6


@dataclass(frozen=True)
class Vocabulary:
    """Dense token-id space with sentence-end and end-of-text markers."""

    tokens: tuple[str, ...]
    sentence_end_ids: frozenset[int]
    eot_id: int | None = None

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError("vocabulary is empty")
        index: dict[str, int] = {}
        for i, tok in enumerate(self.tokens):
            if tok in index:
                raise ValueError(f"duplicate token {tok!r}")
            index[tok] = i
        for sid in self.sentence_end_ids:
            if not 0 <= sid < len(self.tokens):
                raise ValueError(f"sentence-end id {sid} out of range")
        if self.eot_id is not None and not 0 <= self.eot_id < len(self.tokens):
            raise ValueError(f"eot id {self.eot_id} out of range")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_tokens(
        cls,
        tokens: Sequence[str],
        sentence_end_tokens: Sequence[str] = (".",),
        eot_token: str | None = None,
    ) -> "Vocabulary":
        tokens = tuple(tokens)
        lookup = {tok: i for i, tok in enumerate(tokens)}
        end_ids = frozenset(lookup[t] for t in sentence_end_tokens if t in lookup)
        eot_id = lookup[eot_token] if eot_token is not None else None
        return cls(tokens=tokens, sentence_end_ids=end_ids, eot_id=eot_id)

    @property
    def size(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        try:
            return self._index[token]  # type: ignore[attr-defined]
        except KeyError:
            raise UnknownToken(f"token {token!r} not in vocabulary") from None

    def encode(self, text: str) -> list[int]:
        """Whitespace-tokenize and map to ids."""
        return [self.id_of(tok) for tok in text.split()]

    def decode(self, ids: Iterable[int]) -> str:
        out = []
        for i in ids:
            if not 0 <= i < len(self.tokens):
                raise UnknownToken(f"token id {i} out of range")
            out.append(self.tokens[i])
        return " ".join(out)


@dataclass(frozen=True)
class TokenDistribution:
    """A validated dense probability vector over the vocabulary."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("distribution must be a non-empty 1-d vector")
        if np.any(probs < 0):
            raise ValueError("distribution has negative mass")
        total = float(probs.sum())
        if abs(total - 1.0) > _DIST_ATOL:
            raise ValueError(f"distribution sums to {total}, expected 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


@runtime_checkable
class Backend(Protocol):
    """Anything that can score the next token."""

    vocab: Vocabulary

    def next_distribution(self, context: Sequence[int]) -> TokenDistribution: ...


class TableBackend:
    """Distributions from an explicit context table, longest-suffix lookup.

    The table maps context tuples (any length, possibly empty) to dense
    probability rows. Lookup tries the full trailing context first, then
    progressively shorter suffixes, then the empty context.
    """

    def __init__(self, vocab: Vocabulary, table: dict[tuple[int, ...], Sequence[float]]):
        self.vocab = vocab
        self._table: dict[tuple[int, ...], TokenDistribution] = {}
        for ctx, row in table.items():
            probs = np.asarray(row, dtype=np.float64)
            if probs.shape != (vocab.size,):
                raise ValueError(f"row for context {ctx} has wrong width")
            self._table[tuple(int(t) for t in ctx)] = TokenDistribution(probs)

    def next_distribution(self, context: Sequence[int]) -> TokenDistribution:
        ctx = tuple(int(t) for t in context)
        for k in range(len(ctx), -1, -1):
            key = ctx[len(ctx) - k :] if k else ()
            if key in self._table:
                return self._table[key]
        raise UnknownContext(f"no table entry for any suffix of {ctx}")


class UniformBackend:
    """Every token equally likely; handy for perplexity sanity checks."""

    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self._dist = TokenDistribution(np.full(vocab.size, 1.0 / vocab.size))

    def next_distribution(self, context: Sequence[int]) -> TokenDistribution:
        return self._dist


@dataclass
class NGramModel:
    """Additive-smoothed n-gram counts with longest-suffix backoff.

    Counts are kept for every context length from 0 to n-1, so a context
    shorter than n-1 tokens (a one-token prompt under a trigram model, say)
    conditions on its own full length instead of falling straight to
    unigrams. Unseen full contexts back off to their longest seen suffix.
    """

    n: int
    alpha: float
    vocab: Vocabulary
    counts: dict[tuple[int, ...], dict[int, int]]
    _totals: dict[tuple[int, ...], int] = field(default_factory=dict, repr=False)
    _dist_cache: dict[tuple[int, ...], TokenDistribution] = field(
        default_factory=dict, repr=False
    )

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        for ctx, succ in self.counts.items():
            self._totals[ctx] = sum(succ.values())

    def _resolve(self, context: Sequence[int]) -> tuple[int, ...]:
        ctx = tuple(int(t) for t in context)
        if self.n > 1:
            ctx = ctx[-(self.n - 1) :]
        else:
            ctx = ()
        while ctx and ctx not in self.counts:
            ctx = ctx[1:]
        if ctx not in self.counts:
            raise UnknownContext("model has no counts at all")
        return ctx

    def next_distribution(self, context: Sequence[int]) -> TokenDistribution:
        ctx = self._resolve(context)
        cached = self._dist_cache.get(ctx)
        if cached is not None:
            return cached
        succ = self.counts[ctx]
        total = self._totals[ctx]
        v = self.vocab.size
        probs = np.full(v, self.alpha, dtype=np.float64)
        for tok, c in succ.items():
            probs[tok] += c
        denom = total + self.alpha * v
        if denom <= 0:
            raise ZeroProbabilityToken(0, -1)
        probs /= denom
        dist = TokenDistribution(probs)
        self._dist_cache[ctx] = dist
        return dist

    def count(self, context: Sequence[int], token: int) -> int:
        return self.counts.get(tuple(context), {}).get(token, 0)


def train_ngram(
    corpus: Iterable[Sequence[int]],
    n: int,
    alpha: float,
    vocab: Vocabulary,
) -> NGramModel:
    """Count n-grams of every order up to n over token-id sequences."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    counts: dict[tuple[int, ...], dict[int, int]] = {}
    total_tokens = 0
    for seq in corpus:
        seq = [int(t) for t in seq]
        for t in seq:
            if not 0 <= t < vocab.size:
                raise UnknownToken(f"token id {t} out of range for |V|={vocab.size}")
        for i, tok in enumerate(seq):
            total_tokens += 1
            max_ctx = min(n - 1, i)
            for ctx_len in range(max_ctx + 1):
                ctx = tuple(seq[i - ctx_len : i])
                counts.setdefault(ctx, {})
                counts[ctx][tok] = counts[ctx].get(tok, 0) + 1
    if total_tokens == 0:
        raise EmptyCorpus("no tokens in training corpus")
    return NGramModel(n=n, alpha=alpha, vocab=vocab, counts=counts)


def sequence_perplexity(
    model: Backend, tokens: Sequence[int], context: Sequence[int] = ()
) -> float:
    """exp(-(1/L) * sum log P(token_i | context, tokens_<i)) for L tokens."""
    tokens = [int(t) for t in tokens]
    if not tokens:
        raise ValueError("cannot score an empty sequence")
    running = [int(t) for t in context]
    log_sum = 0.0
    for i, tok in enumerate(tokens):
        dist = model.next_distribution(running)
        if not 0 <= tok < dist.probs.size:
            raise UnknownToken(f"token id {tok} out of range")
        p = float(dist.probs[tok])
        if p <= 0.0:
            raise ZeroProbabilityToken(i, tok)
        log_sum += math.log(p)
        running.append(tok)
    return math.exp(-log_sum / len(tokens))


class HttpBackend:
    """Client for a remote next-token server.

    Wire protocol: ``POST {base}/vocab`` with an empty JSON object returns
    ``{"tokens": [...], "sentence_end_ids": [...], "eot_id": int|null}``;
    ``POST {base}/next_token_dist`` with ``{"context": [ids]}`` returns
    ``{"logprobs": [...]}``. Log-probabilities are normalized locally via
    softmax, so unnormalized logits are accepted too.
    """

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._vocab: Vocabulary | None = None

    def _post(self, path: str, payload: dict) -> dict:
        import requests

        try:
            resp = requests.post(
                f"{self.base_url}{path}", json=payload, timeout=self.timeout
            )
            resp.raise_for_status()
            return resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise BackendUnavailable(f"{self.base_url}{path}: {exc}") from exc

    @property
    def vocab(self) -> Vocabulary:
        if self._vocab is None:
            data = self._post("/vocab", {})
            try:
                tokens = tuple(data["tokens"])
                end_ids = frozenset(int(i) for i in data["sentence_end_ids"])
                eot = data.get("eot_id")
            except (KeyError, TypeError) as exc:
                raise BackendUnavailable(f"bad vocab payload: {exc}") from exc
            self._vocab = Vocabulary(
                tokens=tokens,
                sentence_end_ids=end_ids,
                eot_id=None if eot is None else int(eot),
            )
        return self._vocab

    def next_distribution(self, context: Sequence[int]) -> TokenDistribution:
        data = self._post("/next_token_dist", {"context": [int(t) for t in context]})
        try:
            logprobs = np.asarray(data["logprobs"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendUnavailable(f"bad distribution payload: {exc}") from exc
        if logprobs.shape != (self.vocab.size,):
            raise BackendUnavailable(
                f"server returned {logprobs.size} logprobs for |V|={self.vocab.size}"
            )
        shifted = logprobs - logprobs.max()
        probs = np.exp(shifted)
        probs /= probs.sum()
        return TokenDistribution(probs)


_MAGIC = b"FNGM"
_VERSION = 1


def save_ngram(model: NGramModel, path: str | Path) -> None:
    """Write a model to the little-endian FNGM binary format.

    Layout: magic ``FNGM``, u32 version, u32 n, f64 alpha, vocab block
    (u32 count, then length-prefixed UTF-8 tokens), u32 sentence-end count
    plus ids, i32 eot id (-1 for none), u64 context count, then per context:
    u32 length, u32 ids, u32 successor count, (u32 token, u64 count) pairs.
    Contexts and successors are sorted so identical models serialize to
    identical bytes.
    """
    buf = bytearray()
    buf += _MAGIC
    buf += struct.pack("<I", _VERSION)
    buf += struct.pack("<I", model.n)
    buf += struct.pack("<d", model.alpha)
    buf += struct.pack("<I", model.vocab.size)
    for tok in model.vocab.tokens:
        raw = tok.encode("utf-8")
        buf += struct.pack("<I", len(raw))
        buf += raw
    end_ids = sorted(model.vocab.sentence_end_ids)
    buf += struct.pack("<I", len(end_ids))
    for sid in end_ids:
        buf += struct.pack("<I", sid)
    buf += struct.pack("<i", -1 if model.vocab.eot_id is None else model.vocab.eot_id)
    contexts = sorted(model.counts, key=lambda c: (len(c), c))
    buf += struct.pack("<Q", len(contexts))
    for ctx in contexts:
        buf += struct.pack("<I", len(ctx))
        for t in ctx:
            buf += struct.pack("<I", t)
        succ = model.counts[ctx]
        buf += struct.pack("<I", len(succ))
        for tok in sorted(succ):
            buf += struct.pack("<IQ", tok, succ[tok])
    Path(path).write_bytes(bytes(buf))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise ValueError("truncated model file")
        vals = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return vals if len(vals) > 1 else vals[0]

    def take_bytes(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise ValueError("truncated model file")
        raw = self.data[self.pos : self.pos + size]
        self.pos += size
        return raw


def load_ngram(path: str | Path) -> NGramModel:
    """Read a model saved by :func:`save_ngram`."""
    data = Path(path).read_bytes()
    r = _Reader(data)
    if r.take_bytes(4) != _MAGIC:
        raise ValueError("not an FNGM file")
    version = r.take("<I")
    if version != _VERSION:
        raise ValueError(f"unsupported FNGM version {version}")
    n = r.take("<I")
    alpha = r.take("<d")
    vocab_size = r.take("<I")
    tokens = []
    for _ in range(vocab_size):
        length = r.take("<I")
        tokens.append(r.take_bytes(length).decode("utf-8"))
    end_count = r.take("<I")
    end_ids = frozenset(r.take("<I") for _ in range(end_count))
    eot = r.take("<i")
    vocab = Vocabulary(
        tokens=tuple(tokens),
        sentence_end_ids=end_ids,
        eot_id=None if eot < 0 else eot,
    )
    ctx_count = r.take("<Q")
    counts: dict[tuple[int, ...], dict[int, int]] = {}
    for _ in range(ctx_count):
        ctx_len = r.take("<I")
        ctx = tuple(r.take("<I") for _ in range(ctx_len))
        succ_count = r.take("<I")
        succ: dict[int, int] = {}
        for _ in range(succ_count):
            tok, c = r.take("<IQ")
            succ[tok] = c
        counts[ctx] = succ
    return NGramModel(n=n, alpha=alpha, vocab=vocab, counts=counts)
