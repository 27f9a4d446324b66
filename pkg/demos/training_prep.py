#!/usr/bin/env python3
"""Show topic-prefixed sentences and sentence-completion loss masks."""

from facdec import (
    KnowledgeDoc,
    PivotStrategy,
    loss_mask,
    sc_pivot,
    topic_prefix,
)

doc = KnowledgeDoc(
    doc_id="obama",
    title="Barack Obama",
    sentences=(
        "He was the first African-American president of the United States.",
        "He was born in Honolulu.",
    ),
)

prefs = topic_prefix(doc)
for pref in prefs:
    print(pref.rendered)
print()

sentence = prefs[0].sentence
tokens = sentence.split()
prefix = (prefs[0].topic + " ==>").split()

for strategy, kw in [
    (PivotStrategy.SC_HALF, {}),
    (PivotStrategy.SC_RANDOM, {"rng_seed": 42}),
    (PivotStrategy.SC_ROOT, {"root_index": 2}),  # pretend "the" heads the parse
]:
    pivot = sc_pivot(len(tokens), strategy, **kw)
    lm = loss_mask(tokens, pivot, strategy, prefix_len=len(prefix))
    print(f"{strategy.value:>6}: pivot={pivot}")
    for tok, bit in zip(prefix + tokens, lm.mask):
        marker = "^" if bit else " "
        print(f"         {marker} {tok}")
    print()
print("tokens marked ^ keep their loss; the rest are masked to zero")
