#!/usr/bin/env python3
"""Decode one prompt with greedy, top-p, and factual-nucleus sampling.

Uses the bundled trigram model trained on a small synthetic fact corpus.
The trace printed under each sample shows the per-token threshold and
where sentence resets happened.
"""

from facdec import (
    DecodeAlgorithm,
    DecodeConfig,
    build_tiny_world,
    bundled_model_path,
    decode,
    load_ngram,
)

model = load_ngram(bundled_model_path())
world = build_tiny_world()

prompt = world.prompts[0]
prompt_tokens = model.vocab.encode(prompt.text)
print(f"prompt: {prompt.text!r}  (doc {prompt.evidence_doc_ids[0]})")
print("ground truth sample:", world.store[prompt.evidence_doc_ids[0]].sentences[0])
print()

configs = [
    DecodeConfig(algorithm=DecodeAlgorithm.GREEDY, max_new_tokens=16),
    DecodeConfig(algorithm=DecodeAlgorithm.TOP_P, p=0.9, max_new_tokens=16),
    DecodeConfig(
        algorithm=DecodeAlgorithm.FACTUAL_NUCLEUS,
        p=0.9, lam=0.9, omega=0.3, max_new_tokens=16,
    ),
]

for config in configs:
    gen = decode(model, prompt_tokens, config, seed=17, prompt_id=prompt.id)
    print(f"[{config.label}]")
    print(" ", gen.text)
    sched = " ".join(
        f"{s.p_used:.3f}{'*' if s.reset else ''}" for s in gen.step_trace[:12]
    )
    print("  thresholds:", sched, "(* = sentence reset)")
    print()
