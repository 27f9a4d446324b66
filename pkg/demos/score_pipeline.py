#!/usr/bin/env python3
"""Walk one continuation through the whole scoring pipeline by hand:
entity detection, check-worthiness, evidence retrieval, entailment, and
the hallucinated-entity check.
"""

from facdec import (
    GazetteerNer,
    KnowledgeDoc,
    KnowledgeStore,
    LexicalOverlapNli,
    NamedEntity,
    Prompt,
    PromptLabel,
    build_evidence,
    detect_entities,
    entail_single,
    is_checkworthy,
    ne_match,
)

doc = KnowledgeDoc(
    doc_id="obama",
    title="Barack Obama",
    sentences=(
        "Barack Hussein Obama II was born in Honolulu, Hawaii.",
        "He served as the 44th president of the United States.",
        "Obama represented Illinois in the Senate before that.",
    ),
)
store = KnowledgeStore([doc])
prompt = Prompt(
    id="p1",
    text="Barack Obama",
    label=PromptLabel.FACTUAL,
    evidence_doc_ids=("obama",),
)

ner = GazetteerNer(
    ["Barack Obama", "Obama", "Honolulu", "Kenya", "Illinois", "United States"]
)
nli = LexicalOverlapNli()

texts = [
    "Obama was born in Honolulu, Hawaii.",   # grounded
    "Obama was born in Kenya.",              # hallucinated place
    "I think Obama was a good president.",   # first person, filtered
    "Was Obama born in Hawaii?",             # question, filtered
]

for text in texts:
    print(f"text: {text!r}")
    spans = ner.ner(text)
    verdict = is_checkworthy(text, [(s.start, s.end, s.label) for s in spans])
    if not verdict.checkworthy:
        reasons = ", ".join(r.value for r in verdict.reasons)
        print(f"  filtered out ({reasons})")
        print()
        continue

    entities = detect_entities(text, ner)
    for ent in entities:
        ok = ne_match(ent, doc.full_text)
        print(f"  entity {ent.surface!r}: {'grounded' if ok else 'HALLUCINATED'}")

    bundle = build_evidence(text, prompt, store, embedder=None)
    for ev in bundle.sentence_level:
        print(f"  evidence ({ev.method}, {ev.score:.3f}): {ev.text}")
    entailed = entail_single(text, bundle, nli)
    print(f"  entailed by evidence: {entailed}")
    print()
