#!/usr/bin/env python3
"""Small end-to-end benchmark sweep on a synthetic fact world.

Builds a closed universe of invented facts, trains a trigram model on it,
then sweeps decoding configurations and prints the factuality/diversity
trade-off. Takes roughly ten seconds. The same sweep is reachable from
the command line via `facdec sweep --spec ...`.
"""

import tempfile
from pathlib import Path

from facdec import (
    DecodeAlgorithm,
    DecodeConfig,
    GazetteerNer,
    LexicalOverlapNli,
    build_fact_world,
    emit_tradeoff_curves,
    load_curve,
    reference_curve_path,
    run_config,
    train_world_model,
)

world = build_fact_world(n_entities=60, seed=11)
model = train_world_model(world)
ner = GazetteerNer(world.gazetteer_entries)
nli = LexicalOverlapNli()
print(
    f"world: {len(world.prompts)} entities, {world.sentence_count} sentences, "
    f"vocab {world.vocab.size}"
)


def cfg(algorithm, p, lam=0.9, omega=0.3):
    return DecodeConfig(
        algorithm=algorithm, p=p, lam=lam, omega=omega,
        max_new_tokens=32, num_generations=8, seed=0,
    )


sweep = [
    cfg(DecodeAlgorithm.TOP_P, 0.5),
    cfg(DecodeAlgorithm.TOP_P, 0.9),
    cfg(DecodeAlgorithm.FACTUAL_NUCLEUS, 0.9, 0.9, 0.3),
    cfg(DecodeAlgorithm.FACTUAL_NUCLEUS, 0.9, 0.5, 0.3),
]

reports = []
for config in sweep:
    result = run_config(
        model, world.prompts, world.store, config, ner, nli=nli, workers=4
    )
    reports.append(result.report)
    r = result.report
    print(
        f"{config.label:>20}: ne_error={r.ne_error:.3f} "
        f"entail={r.entail_ratio:.3f} diversity={r.diversity:.3f} "
        f"repetition={r.repetition:.3f}"
    )

out = Path(tempfile.mkdtemp()) / "tradeoff.csv"
emit_tradeoff_curves(reports, out)
print(f"\nwrote {out}")

print("\nbundled reference curve (large-model numbers, for comparison):")
for row in load_curve(reference_curve_path()):
    print(
        f"{row['config']:>20}: ne_error={row['ne_error']:.3f} "
        f"diversity={row['diversity']:.3f}"
    )
