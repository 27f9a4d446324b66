"""Shared fixtures: tiny worlds, trained models, scripted stub providers.

Scripted stubs let the whole suite run with no external annotation
services: the NER stub replays canned spans per text, the NLI stub
replays labels per (premise, hypothesis) pair, and the embedder stub
returns fixed vectors. Tests that exercise real provider logic use the
deterministic built-ins instead.
"""

from __future__ import annotations

import numpy as np
import pytest

from facdec.providers import EntailmentKind, EntailmentLabel, NerSpan
from facdec.synthetic import build_fact_world, train_world_model


def pytest_runtest_logreport(report):
    """Print one pass/fail line per acceptance criterion."""
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    parts = name.split("_")
    num = int(parts[2])
    label = " ".join(parts[3:])
    if report.when == "call":
        outcome = "PASS" if report.passed else "FAIL"
    elif report.failed:
        outcome = "FAIL"
    else:
        return
    print(f"\nACCEPTANCE {num} ({label}): {outcome}", flush=True)


class ScriptedNer:
    """Replays canned spans; texts without a script entry get none."""

    def __init__(self, script: dict[str, list[NerSpan]] | None = None):
        self.script = script or {}
        self.calls: list[str] = []

    def ner(self, text: str) -> list[NerSpan]:
        self.calls.append(text)
        return list(self.script.get(text, []))


class ScriptedNli:
    """Replays labels per (premise, hypothesis); defaults to neutral."""

    def __init__(self, script: dict[tuple[str, str], EntailmentKind] | None = None,
                 default: EntailmentKind = EntailmentKind.NEUTRAL):
        self.script = script or {}
        self.default = default
        self.calls: list[tuple[str, str]] = []

    def classify(self, premise: str, hypothesis: str) -> EntailmentLabel:
        self.calls.append((premise, hypothesis))
        kind = self.script.get((premise, hypothesis), self.default)
        probs = {
            EntailmentKind.ENTAILMENT: (0.9, 0.06, 0.04),
            EntailmentKind.NEUTRAL: (0.06, 0.9, 0.04),
            EntailmentKind.CONTRADICTION: (0.04, 0.06, 0.9),
        }[kind]
        return EntailmentLabel(kind, probs)


class ScriptedEmbedder:
    """Replays fixed vectors per text; unknown texts get the default."""

    def __init__(self, script: dict[str, list[float]] | None = None,
                 default: list[float] | None = None, dim: int = 4):
        self.script = script or {}
        self.default = default if default is not None else [0.0] * dim
        self.calls: list[list[str]] = []

    def embed(self, texts):
        self.calls.append(list(texts))
        return [
            np.asarray(self.script.get(t, self.default), dtype=np.float64)
            for t in texts
        ]


@pytest.fixture
def scripted_ner_cls():
    return ScriptedNer


@pytest.fixture
def scripted_nli_cls():
    return ScriptedNli


@pytest.fixture
def scripted_embedder_cls():
    return ScriptedEmbedder


@pytest.fixture(scope="session")
def tiny_world():
    return build_fact_world(n_entities=20, seed=7)


@pytest.fixture(scope="session")
def tiny_model(tiny_world):
    return train_world_model(tiny_world)
