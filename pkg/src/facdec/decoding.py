"""Sampling algorithms with a per-sentence nucleus schedule.

The factual-nucleus rule makes the nucleus threshold decay within a
sentence and snap back at sentence starts:

    p_t = max(omega, p * lambda ** (t - 1))

where t counts generated tokens from 1 and restarts at 1 on the token
after a sentence end. Early tokens of a sentence sample broadly; later
tokens, which tend to carry the factual payload, sample from a tighter
nucleus bounded below by omega so generation never collapses to greedy.
Setting lambda=1 with omega=0 (or omega=p) recovers plain top-p sampling.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .backends import Backend, TokenDistribution, Vocabulary
from .corpus import Generation, TraceStep


class DecodeAlgorithm(str, Enum):
    GREEDY = "greedy"
    TOP_P = "topp"
    FACTUAL_NUCLEUS = "factual"


@dataclass(frozen=True)
class DecodeConfig:
    """Sampling parameters for one run.

    ``lam`` is the within-sentence decay factor and ``omega`` the lower
    bound of the dynamic threshold; both are ignored by GREEDY and TOP_P.
    """

    algorithm: DecodeAlgorithm = DecodeAlgorithm.FACTUAL_NUCLEUS
    p: float = 0.9
    lam: float = 0.9
    omega: float = 0.3
    max_new_tokens: int = 150
    num_generations: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must be in (0, 1]")
        if not 0.0 < self.lam <= 1.0:
            raise ValueError("lambda must be in (0, 1]")
        if not 0.0 <= self.omega <= self.p:
            raise ValueError("omega must be in [0, p]")
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be >= 1")
        if self.num_generations < 1:
            raise ValueError("num_generations must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def label(self) -> str:
        if self.algorithm is DecodeAlgorithm.GREEDY:
            return "greedy"
        if self.algorithm is DecodeAlgorithm.TOP_P:
            return f"top-p {_fmt(self.p)}"
        return f"factual {_fmt(self.p)}|{_fmt(self.lam)}|{_fmt(self.omega)}"

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm.value,
            "p": self.p,
            "lambda": self.lam,
            "omega": self.omega,
            "max_new_tokens": self.max_new_tokens,
            "num_generations": self.num_generations,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecodeConfig":
        return cls(
            algorithm=DecodeAlgorithm(d.get("algorithm", "factual")),
            p=float(d.get("p", 0.9)),
            lam=float(d.get("lambda", 0.9)),
            omega=float(d.get("omega", 0.3)),
            max_new_tokens=int(d.get("max_new_tokens", 150)),
            num_generations=int(d.get("num_generations", 10)),
            seed=int(d.get("seed", 0)),
        )


def _fmt(x: float) -> str:
    s = f"{x:g}"
    return s


def dynamic_p(p: float, lam: float, omega: float, t: int) -> float:
    """Nucleus threshold for the t-th token of the current sentence."""
    if t < 1:
        raise ValueError("t counts from 1")
    return max(omega, p * lam ** (t - 1))


class Nucleus(NamedTuple):
    """Top-p candidate set: token ids and renormalized probabilities."""

    ids: np.ndarray
    probs: np.ndarray


def nucleus_set(dist: TokenDistribution, p: float) -> Nucleus:
    """Smallest descending-probability prefix with cumulative mass >= p.

    Ties between equal probabilities break toward the lower token id. The
    boundary is inclusive: the token that pushes the cumulative over p is
    kept. If rounding keeps the cumulative below p even over the full
    support (p=1.0 with a float sum of 0.999...), the whole support is the
    nucleus. Zero-probability tokens never enter.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError("p must be in (0, 1]")
    probs = dist.probs
    # stable sort on negated values: descending probability, ascending id
    order = np.argsort(-probs, kind="stable")
    sorted_probs = probs[order]
    support = int(np.count_nonzero(sorted_probs))
    cum = np.cumsum(sorted_probs[:support])
    cut = int(np.searchsorted(cum, p, side="left"))
    if cut >= support:
        cut = support - 1
    ids = order[: cut + 1]
    members = sorted_probs[: cut + 1] / cum[cut]
    return Nucleus(ids=ids, probs=members)


def is_sentence_end(token_id: int, vocab: Vocabulary) -> bool:
    return token_id in vocab.sentence_end_ids


def derive_generation_seed(base_seed: int, prompt_id: str, generation_index: int) -> int:
    """Stable 63-bit per-generation seed from run seed, prompt, and index.

    SHA-256 keyed mixing keeps streams independent across prompts and
    generation indices while staying identical across platforms and runs.
    """
    h = hashlib.sha256()
    h.update(str(int(base_seed)).encode("ascii"))
    h.update(b"\x00")
    h.update(prompt_id.encode("utf-8"))
    h.update(b"\x00")
    h.update(str(int(generation_index)).encode("ascii"))
    return int.from_bytes(h.digest()[:8], "little") & 0x7FFFFFFFFFFFFFFF


def _sample(nuc: Nucleus, u: float) -> int:
    cum = np.cumsum(nuc.probs)
    idx = int(np.searchsorted(cum, u, side="right"))
    if idx >= nuc.ids.size:
        idx = nuc.ids.size - 1
    return int(nuc.ids[idx])


def decode(
    model: Backend,
    prompt_tokens: Sequence[int],
    config: DecodeConfig,
    seed: int,
    prompt_id: str = "",
) -> Generation:
    """Generate one continuation.

    ``seed`` is the per-generation stream seed (see
    :func:`derive_generation_seed`); the same seed replays the same tokens.
    The trace records, per generated token, the 1-based within-sentence
    position t, the nucleus threshold used, and whether the sentence
    position was just reset. Prompt tokens advance neither t nor the trace.
    GREEDY records a threshold of 0.0, the argmax being the p -> 0 limit
    of nucleus sampling. Generation stops at the end-of-text token or
    after ``config.max_new_tokens`` tokens; the end-of-text marker stays
    in ``tokens`` but is dropped from the detokenized ``text``.
    """
    tokens = [int(t) for t in prompt_tokens]
    if not tokens:
        raise ValueError("prompt_tokens is empty")
    vocab = model.vocab
    rng = np.random.default_rng(int(seed))
    algo = config.algorithm
    trace: list[TraceStep] = []
    t = 1
    reset = False
    for _ in range(config.max_new_tokens):
        dist = model.next_distribution(tokens)
        if algo is DecodeAlgorithm.GREEDY:
            token = int(np.argmax(dist.probs))
            p_used = 0.0
        else:
            if algo is DecodeAlgorithm.TOP_P:
                p_used = config.p
            else:
                p_used = dynamic_p(config.p, config.lam, config.omega, t)
            nuc = nucleus_set(dist, p_used)
            token = _sample(nuc, float(rng.random()))
        trace.append(TraceStep(t=t, p_used=p_used, reset=reset))
        tokens.append(token)
        if vocab.eot_id is not None and token == vocab.eot_id:
            break
        if is_sentence_end(token, vocab):
            t = 1
            reset = True
        else:
            t += 1
            reset = False
    prompt_len = len(tokens) - len(trace)
    visible = [t for t in tokens[prompt_len:] if t != vocab.eot_id]
    text = vocab.decode(visible)
    return Generation(
        prompt_id=prompt_id,
        seed=int(seed),
        tokens=tuple(tokens),
        text=text,
        step_trace=tuple(trace),
    )


def decode_many(
    model: Backend,
    prompt_tokens: Sequence[int],
    config: DecodeConfig,
    prompt_id: str,
) -> list[Generation]:
    """All ``config.num_generations`` continuations for one prompt."""
    out = []
    for k in range(config.num_generations):
        gen_seed = derive_generation_seed(config.seed, prompt_id, k)
        out.append(decode(model, prompt_tokens, config, gen_seed, prompt_id=prompt_id))
    return out
