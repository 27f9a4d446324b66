"""Deterministic synthetic fact worlds for desk-scale experiments.

A fact world is a closed universe of invented people and invented proper
names for what they admire, study, visit, and paint. Every fact is
rendered as a four-token sentence ("Belora visits Dukane .") repeated a
few times inside that entity's document, so a trigram model trained on
the corpus concentrates most next-token mass on the true continuation at
every slot. Against that model, nucleus thresholds directly control how
much off-fact probability leaks into the sample, which makes
hallucination measurable, seedable, and fast. Generated names are checked
against the stopword list and first-person pronouns so every entity
survives content-word filtering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .backends import NGramModel, Vocabulary, save_ngram, train_ngram
from .corpus import (
    KnowledgeDoc,
    KnowledgeStore,
    Prompt,
    PromptLabel,
    write_knowledge_file,
    write_prompts_file,
)
from .textproc import stopwords

VERBS = ("admires", "studies", "visits", "paints")
_INTRO_WORDS = ("is", "famous")
_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


@dataclass
class FactWorld:
    """A generated universe plus everything needed to benchmark on it."""

    vocab: Vocabulary
    store: KnowledgeStore
    prompts: list[Prompt]
    gazetteer_entries: tuple[str, ...]
    corpus_token_ids: list[list[int]]
    facts: dict[tuple[str, str], tuple[str, ...]]
    seed: int

    @property
    def sentence_count(self) -> int:
        return sum(len(self.store[d].sentences) for d in self.store)

    def suggested_alpha(self) -> float:
        # keeps total smoothing mass near one count, so repeated facts
        # stay dominant while every token remains reachable
        return 1.0 / self.vocab.size


def _pronounceable(rng: np.random.Generator, syllables: int, capital: bool) -> str:
    chars = []
    for _ in range(syllables):
        chars.append(_CONSONANTS[int(rng.integers(len(_CONSONANTS)))])
        chars.append(_VOWELS[int(rng.integers(len(_VOWELS)))])
    word = "".join(chars)
    return word.capitalize() if capital else word


def _fresh_name(rng: np.random.Generator, used: set[str], banned: set[str]) -> str:
    while True:
        word = _pronounceable(rng, syllables=3, capital=True)
        low = word.lower()
        if low in banned or low in used:
            continue
        used.add(low)
        return word


def build_fact_world(
    n_entities: int = 200,
    values_per_fact: int = 2,
    renditions: int = 3,
    seed: int = 20260823,
) -> FactWorld:
    """Generate entities, facts, documents, prompts, and the gazetteer.

    Each entity's document holds one intro sentence plus
    ``len(VERBS) * values_per_fact * renditions`` fact sentences, shuffled
    per document; defaults give 25 sentences per document. Prompt text is
    the bare entity name, whose document is its evidence.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    banned = set(stopwords()) | {"i", "we", "us"} | set(VERBS) | set(_INTRO_WORDS)
    used: set[str] = set()
    names = [_fresh_name(rng, used, banned) for _ in range(n_entities)]
    facts: dict[tuple[str, str], tuple[str, ...]] = {}
    values: list[str] = []
    for name in names:
        for verb in VERBS:
            vals = tuple(
                _fresh_name(rng, used, banned) for _ in range(values_per_fact)
            )
            facts[(name, verb)] = vals
            values.extend(vals)

    tokens = [".", *_INTRO_WORDS, *VERBS, *names, *values]
    vocab = Vocabulary.from_tokens(tokens, sentence_end_tokens=(".",))

    docs: list[KnowledgeDoc] = []
    prompts: list[Prompt] = []
    corpus_token_ids: list[list[int]] = []
    for idx, name in enumerate(names):
        sentences = [f"{name} is famous ."]
        for verb in VERBS:
            for value in facts[(name, verb)]:
                sentences.extend([f"{name} {verb} {value} ."] * renditions)
        doc_rng = np.random.default_rng(np.random.SeedSequence([seed, 2, idx]))
        order = doc_rng.permutation(len(sentences))
        shuffled = [sentences[i] for i in order]
        doc_id = f"d{idx:03d}"
        docs.append(KnowledgeDoc(doc_id=doc_id, title=name, sentences=tuple(shuffled)))
        prompts.append(
            Prompt(
                id=f"p{idx:03d}",
                text=name,
                label=PromptLabel.FACTUAL,
                evidence_doc_ids=(doc_id,),
            )
        )
        stream: list[int] = []
        for sent in shuffled:
            stream.extend(vocab.encode(sent))
        corpus_token_ids.append(stream)

    return FactWorld(
        vocab=vocab,
        store=KnowledgeStore(docs),
        prompts=prompts,
        gazetteer_entries=tuple(names) + tuple(values),
        corpus_token_ids=corpus_token_ids,
        facts=facts,
        seed=seed,
    )


def train_world_model(
    world: FactWorld, n: int = 3, alpha: float | None = None
) -> NGramModel:
    """Trigram model over the world corpus with the world's default
    smoothing unless overridden."""
    if alpha is None:
        alpha = world.suggested_alpha()
    return train_ngram(world.corpus_token_ids, n=n, alpha=alpha, vocab=world.vocab)


def write_fact_world(world: FactWorld, out_dir: str | Path) -> dict[str, Path]:
    """Materialize a world as benchmark input files.

    Writes prompts.jsonl, knowledge.jsonl, gazetteer.txt, and a trained
    trigram model.fngm; returns the paths keyed by role.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "prompts": out / "prompts.jsonl",
        "knowledge": out / "knowledge.jsonl",
        "gazetteer": out / "gazetteer.txt",
        "model": out / "model.fngm",
        "summary": out / "world.json",
    }
    write_prompts_file(world.prompts, paths["prompts"])
    write_knowledge_file((world.store[d] for d in world.store), paths["knowledge"])
    paths["gazetteer"].write_text(
        "\n".join(world.gazetteer_entries) + "\n", encoding="utf-8"
    )
    save_ngram(train_world_model(world), paths["model"])
    summary = {
        "entities": len(world.prompts),
        "sentences": world.sentence_count,
        "vocab": world.vocab.size,
        "seed": world.seed,
    }
    paths["summary"].write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return paths


def build_tiny_world(seed: int = 7) -> FactWorld:
    """Small world (20 entities) backing the bundled demo model."""
    return build_fact_world(n_entities=20, seed=seed)


def bundled_model_path() -> Path:
    """Trigram model shipped with the package, trained on the tiny world.

    The file is byte-identical to ``save_ngram(train_world_model(
    build_tiny_world()))``; a test pins that equality.
    """
    from importlib import resources

    return Path(str(resources.files("facdec.data").joinpath("tiny_lm.fngm")))
