"""Evidence selection for fact-checking a generation.

Two granularities: document-level ground truth follows the prompt's
hard-wired links into the knowledge store, and sentence-level retrieval
ranks the sentences of those documents against the generation. Sentence
ranking runs twice, once with TF-IDF and once with a contextual embedder
when one is supplied; the two winners (deduplicated) form the evidence
bundle, at most two sentences.

The TF-IDF scheme: raw term counts, smoothed idf ln((1+N)/(1+df)) + 1,
L2-normalized vectors, cosine scoring. Document frequencies come from the
candidate pool itself, so scores are comparable only within one query's
pool, which is all the pipeline needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import KnowledgeDoc, KnowledgeStore, Prompt
from .errors import EmptyCandidates
from .providers import Embedder
from .textproc import tokenize

MAX_EVIDENCE_SENTENCES = 2


@dataclass(frozen=True)
class TfidfIndex:
    """Vectorized candidate pool: vocabulary, idf, and unit doc vectors."""

    vocabulary: dict[str, int]
    idf: np.ndarray
    doc_vectors: np.ndarray  # shape (num_docs, vocab_size), rows L2-normalized

    @classmethod
    def build(cls, candidates: Sequence[str]) -> "TfidfIndex":
        if not candidates:
            raise EmptyCandidates("cannot index an empty candidate pool")
        tokenized = [tokenize(c) for c in candidates]
        vocabulary: dict[str, int] = {}
        for toks in tokenized:
            for tok in toks:
                if tok not in vocabulary:
                    vocabulary[tok] = len(vocabulary)
        width = max(len(vocabulary), 1)
        n_docs = len(candidates)
        tf = np.zeros((n_docs, width), dtype=np.float64)
        for row, toks in enumerate(tokenized):
            for tok in toks:
                tf[row, vocabulary[tok]] += 1.0
        df = np.count_nonzero(tf, axis=0).astype(np.float64)
        idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
        vectors = tf * idf
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        vectors /= norms
        return cls(vocabulary=vocabulary, idf=idf, doc_vectors=vectors)

    def query_vector(self, text: str) -> np.ndarray:
        vec = np.zeros(self.doc_vectors.shape[1], dtype=np.float64)
        for tok in tokenize(text):
            col = self.vocabulary.get(tok)
            if col is not None:
                vec[col] += 1.0
        vec *= self.idf
        norm = float(np.linalg.norm(vec))
        if norm > 0:
            vec /= norm
        return vec


def tfidf_retrieve(query: str, candidates: Sequence[str]) -> tuple[int, float]:
    """Index of the best candidate and its cosine score; ties take the
    lowest index. A query sharing no terms with the pool scores 0.0 and
    falls back to index 0."""
    index = TfidfIndex.build(candidates)
    scores = index.doc_vectors @ index.query_vector(query)
    best = int(np.argmax(scores))
    return best, float(scores[best])


def embed_retrieve(
    query: str, candidates: Sequence[str], embedder: Embedder
) -> tuple[int, float]:
    """Best candidate by embedding cosine; one batched embed call covers
    the query and every candidate, order preserved. Zero vectors score 0."""
    if not candidates:
        raise EmptyCandidates("cannot rank an empty candidate pool")
    vectors = embedder.embed([query, *candidates])
    q = np.asarray(vectors[0], dtype=np.float64)
    qn = float(np.linalg.norm(q))
    scores = np.zeros(len(candidates), dtype=np.float64)
    if qn > 0:
        for i, vec in enumerate(vectors[1:]):
            v = np.asarray(vec, dtype=np.float64)
            vn = float(np.linalg.norm(v))
            if vn > 0:
                scores[i] = float(q @ v) / (qn * vn)
    best = int(np.argmax(scores))
    return best, float(scores[best])


@dataclass(frozen=True)
class EvidenceSentence:
    text: str
    doc_id: str
    sent_index: int
    method: str  # "tfidf" or "embedding"
    score: float


@dataclass(frozen=True)
class EvidenceBundle:
    query_text: str
    doc_level: tuple[KnowledgeDoc, ...]
    sentence_level: tuple[EvidenceSentence, ...]

    def __post_init__(self) -> None:
        if len(self.sentence_level) > MAX_EVIDENCE_SENTENCES:
            raise ValueError("too many evidence sentences")


def doc_ground_truth(prompt: Prompt, store: KnowledgeStore) -> list[KnowledgeDoc]:
    """The documents a prompt is hard-linked to, in link order."""
    return [store[doc_id] for doc_id in prompt.evidence_doc_ids]


def build_evidence(
    generation_text: str,
    prompt: Prompt,
    store: KnowledgeStore,
    embedder: Embedder | None = None,
) -> EvidenceBundle:
    """Assemble the evidence bundle for one generation.

    Candidates are every sentence of every linked document, in document
    order. The TF-IDF winner always enters; the embedding winner enters
    when an embedder is given. Both pointing at the same sentence collapse
    to one entry.
    """
    docs = doc_ground_truth(prompt, store)
    flat: list[tuple[str, int, str]] = []
    for doc in docs:
        for idx, sent in enumerate(doc.sentences):
            flat.append((doc.doc_id, idx, sent))
    texts = [sent for _, _, sent in flat]
    picks: list[EvidenceSentence] = []
    chosen: set[tuple[str, int]] = set()
    t_idx, t_score = tfidf_retrieve(generation_text, texts)
    doc_id, sent_idx, sent = flat[t_idx]
    picks.append(EvidenceSentence(sent, doc_id, sent_idx, "tfidf", t_score))
    chosen.add((doc_id, sent_idx))
    if embedder is not None:
        e_idx, e_score = embed_retrieve(generation_text, texts, embedder)
        doc_id, sent_idx, sent = flat[e_idx]
        if (doc_id, sent_idx) not in chosen:
            picks.append(
                EvidenceSentence(sent, doc_id, sent_idx, "embedding", e_score)
            )
    return EvidenceBundle(
        query_text=generation_text,
        doc_level=tuple(docs),
        sentence_level=tuple(picks),
    )
