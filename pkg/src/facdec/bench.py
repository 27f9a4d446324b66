"""End-to-end benchmark runs: decode, filter, retrieve, score, report.

A run takes a prompt file, a knowledge store, one backend, and a list of
decoding configurations. Each configuration decodes every prompt
``num_generations`` times, pushes the continuations through the
check-worthiness filter, scores hallucination against ground-truth
documents and entailment against retrieved evidence, and lands in one
report directory: ``<out>/<config-slug>/generations.jsonl`` plus
``report.json``, with a run-level ``manifest.json``. Reruns with the same
inputs produce byte-identical artifacts; nothing time- or host-dependent
is written.
"""

from __future__ import annotations

import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .backends import (
    Backend,
    HttpBackend,
    TableBackend,
    Vocabulary,
    load_ngram,
    sequence_perplexity,
)
from .corpus import (
    FactualityReport,
    Generation,
    KnowledgeStore,
    Prompt,
    SCHEMA_VERSION,
    load_knowledge_store,
    parse_prompts_file,
    write_generations_file,
    write_report,
)
from .checkworthy import is_checkworthy
from .decoding import DecodeAlgorithm, DecodeConfig, decode_many
from .errors import FacdecError, MissingDoc, TooFewReports
from .metrics import MetricAccumulator, entail_single, entities_from_spans, ne_match
from .providers import (
    Embedder,
    GazetteerNer,
    HashingEmbedder,
    HttpEmbedder,
    HttpNer,
    HttpNli,
    LexicalOverlapNli,
    NerProvider,
    NliProvider,
)
from .retrieval import build_evidence, doc_ground_truth
from .textproc import content_words

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def config_slug(config: DecodeConfig) -> str:
    if config.algorithm is DecodeAlgorithm.GREEDY:
        return "greedy"
    if config.algorithm is DecodeAlgorithm.TOP_P:
        return f"topp-{config.p:g}"
    return f"factual-{config.p:g}-{config.lam:g}-{config.omega:g}"


def resolve_backend(spec: str) -> Backend:
    """Backend from a spec string: ``ngram:FILE``, ``table:FILE`` (JSON),
    or ``http:URL``."""
    kind, _, arg = spec.partition(":")
    if kind == "ngram" and arg:
        return load_ngram(arg)
    if kind == "table" and arg:
        return load_table_backend(arg)
    if kind == "http" and arg:
        return HttpBackend(arg)
    raise ValueError(f"bad backend spec {spec!r}")


def load_table_backend(path: str | Path) -> TableBackend:
    """Read a JSON table backend: tokens, sentence_ends, eot, and rows of
    {"context": [ids], "probs": [...]}."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    vocab = Vocabulary.from_tokens(
        data["tokens"],
        sentence_end_tokens=data.get("sentence_ends", ["."]),
        eot_token=data.get("eot"),
    )
    table = {tuple(row["context"]): row["probs"] for row in data["rows"]}
    return TableBackend(vocab, table)


def resolve_ner(spec: str) -> NerProvider:
    kind, _, arg = spec.partition(":")
    if kind == "gazetteer" and arg:
        return GazetteerNer.from_file(arg)
    if kind == "http" and arg:
        return HttpNer(arg)
    raise ValueError(f"bad ner spec {spec!r}")


def resolve_nli(spec: str | None) -> NliProvider | None:
    if spec is None or spec == "":
        return None
    if spec == "lexical":
        return LexicalOverlapNli()
    kind, _, arg = spec.partition(":")
    if kind == "http" and arg:
        return HttpNli(arg)
    raise ValueError(f"bad nli spec {spec!r}")


def resolve_embedder(spec: str | None) -> Embedder | None:
    if spec is None or spec == "":
        return None
    if spec == "hashing":
        return HashingEmbedder()
    kind, _, arg = spec.partition(":")
    if kind == "http" and arg:
        return HttpEmbedder(arg)
    raise ValueError(f"bad embedder spec {spec!r}")


@dataclass
class RunSpec:
    """Everything one benchmark invocation needs."""

    prompts_path: str
    knowledge_path: str
    backend: str
    out_dir: str
    configs: list[DecodeConfig]
    ner: str
    nli: str | None = None
    embedder: str | None = None
    workers: int = 1
    skip_missing: bool = False
    score_perplexity: bool = True


def load_sweep_spec(path: str | Path) -> RunSpec:
    """Parse a TOML sweep file; relative paths resolve against the file."""
    path = Path(path)
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    base = path.parent

    def resolve_path(p: str) -> str:
        q = Path(p)
        return str(q if q.is_absolute() else base / q)

    def resolve_spec(value: str | None) -> str | None:
        if value is None:
            return None
        kind, _, arg = value.partition(":")
        if kind in ("ngram", "table", "gazetteer") and arg:
            return f"{kind}:{resolve_path(arg)}"
        return value

    defaults = {
        "seed": int(data.get("seed", 0)),
        "max_new_tokens": int(data.get("max_new_tokens", 150)),
        "num_generations": int(data.get("num_generations", 10)),
    }
    configs = []
    for row in data.get("configs", []):
        merged = {**defaults, **row}
        configs.append(DecodeConfig.from_dict(merged))
    if not configs:
        raise ValueError("sweep spec lists no configs")
    return RunSpec(
        prompts_path=resolve_path(data["prompts"]),
        knowledge_path=resolve_path(data["knowledge"]),
        backend=resolve_spec(data["backend"]),
        out_dir=resolve_path(data["out"]),
        configs=configs,
        ner=resolve_spec(data["ner"]),
        nli=resolve_spec(data.get("nli")),
        embedder=resolve_spec(data.get("embedder")),
        workers=int(data.get("workers", 1)),
        skip_missing=bool(data.get("skip_missing", False)),
        score_perplexity=bool(data.get("score_perplexity", True)),
    )


@dataclass
class ConfigResult:
    config: DecodeConfig
    report: FactualityReport
    generations: list[Generation]
    skipped_prompts: list[str] = field(default_factory=list)


def _score_generation(
    gen: Generation,
    prompt: Prompt,
    store: KnowledgeStore,
    doc_stream: tuple[str, ...],
    acc: MetricAccumulator,
    ner: NerProvider,
    nli: NliProvider | None,
    embedder: Embedder | None,
    ppl_model: Backend | None,
) -> None:
    spans = ner.ner(gen.text)
    entities = entities_from_spans(gen.text, spans)
    verdict = is_checkworthy(gen.text, [(s.start, s.end, s.label) for s in spans])
    ne_total = 0
    ne_hallu = 0
    entail_scored = False
    entailed = False
    skipped_no_evidence = False
    if verdict.checkworthy:
        ne_total = len(entities)
        ne_hallu = sum(1 for e in entities if not ne_match(e, doc_stream))
        if nli is not None:
            bundle = build_evidence(gen.text, prompt, store, embedder)
            if bundle.sentence_level:
                entail_scored = True
                entailed = entail_single(gen.text, bundle, nli)
            else:
                skipped_no_evidence = True
    ppl = None
    cont = gen.continuation_tokens
    if ppl_model is not None and cont:
        ppl = sequence_perplexity(ppl_model, cont, context=gen.tokens[: gen.prompt_len])
    acc.record(
        prompt_id=prompt.id,
        continuation_tokens=cont,
        checkworthy=verdict.checkworthy,
        ne_total=ne_total,
        ne_hallu=ne_hallu,
        entail_scored=entail_scored,
        entailed=entailed,
        skipped_no_evidence=skipped_no_evidence,
        perplexity=ppl,
    )


def _prompt_doc_stream(prompt: Prompt, store: KnowledgeStore) -> tuple[str, ...]:
    docs = doc_ground_truth(prompt, store)
    return tuple(tok for doc in docs for tok in content_words(doc.full_text))


def _score_prompt(
    model: Backend,
    prompt: Prompt,
    store: KnowledgeStore,
    config: DecodeConfig,
    ner: NerProvider,
    nli: NliProvider | None,
    embedder: Embedder | None,
    score_perplexity: bool,
) -> tuple[list[Generation], MetricAccumulator]:
    doc_stream = _prompt_doc_stream(prompt, store)
    prompt_tokens = model.vocab.encode(prompt.text)
    gens = decode_many(model, prompt_tokens, config, prompt.id)
    acc = MetricAccumulator()
    for gen in gens:
        _score_generation(
            gen,
            prompt,
            store,
            doc_stream,
            acc,
            ner,
            nli,
            embedder,
            model if score_perplexity else None,
        )
    return gens, acc


def score_generations_file(
    generations_path: str | Path,
    prompts_path: str | Path,
    knowledge_path: str | Path,
    out_path: str | Path,
    ner: NerProvider,
    nli: NliProvider | None = None,
    embedder: Embedder | None = None,
    model: Backend | None = None,
) -> FactualityReport:
    """Score a pre-existing generations file and write the report.

    Perplexity is included only when a backend is supplied. Every
    generation must reference a prompt from the prompt file.
    """
    from .corpus import read_generations_file

    gens = read_generations_file(generations_path)
    prompts = {p.id: p for p in parse_prompts_file(prompts_path)}
    store = load_knowledge_store(knowledge_path)
    acc = MetricAccumulator()
    streams: dict[str, tuple[str, ...]] = {}
    for gen in gens:
        if gen.prompt_id not in prompts:
            raise FacdecError(
                f"generation references unknown prompt {gen.prompt_id!r}"
            )
        prompt = prompts[gen.prompt_id]
        if prompt.id not in streams:
            streams[prompt.id] = _prompt_doc_stream(prompt, store)
        _score_generation(
            gen, prompt, store, streams[prompt.id], acc, ner, nli, embedder, model
        )
    report = FactualityReport(
        config_label="eval",
        config={},
        seed=0,
        ne_error=acc.ne_error,
        entail_ratio=acc.entail_ratio,
        diversity=acc.diversity,
        repetition=acc.repetition,
        mean_perplexity=acc.mean_perplexity,
        counts=acc.counts(),
        schema_version=SCHEMA_VERSION,
        code_version=__version__,
    )
    write_report(report, out_path)
    return report


def run_config(
    model: Backend,
    prompts: list[Prompt],
    store: KnowledgeStore,
    config: DecodeConfig,
    ner: NerProvider,
    nli: NliProvider | None = None,
    embedder: Embedder | None = None,
    workers: int = 1,
    skip_missing: bool = False,
    score_perplexity: bool = True,
) -> ConfigResult:
    """Decode and score every prompt under one configuration.

    Work fans out per prompt; results are folded in prompt order, so the
    outcome is independent of worker count.
    """
    usable: list[Prompt] = []
    skipped: list[str] = []
    for prompt in prompts:
        try:
            doc_ground_truth(prompt, store)
        except MissingDoc:
            if not skip_missing:
                raise
            skipped.append(prompt.id)
            continue
        usable.append(prompt)

    def task(prompt: Prompt):
        return _score_prompt(
            model, prompt, store, config, ner, nli, embedder, score_perplexity
        )

    results: list[tuple[list[Generation], MetricAccumulator]]
    if workers > 1 and len(usable) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, usable))
    else:
        results = [task(p) for p in usable]

    acc = MetricAccumulator()
    all_gens: list[Generation] = []
    for gens, partial in results:
        all_gens.extend(gens)
        acc.absorb(partial)
    report = FactualityReport(
        config_label=config.label,
        config=config.to_dict(),
        seed=config.seed,
        ne_error=acc.ne_error,
        entail_ratio=acc.entail_ratio,
        diversity=acc.diversity,
        repetition=acc.repetition,
        mean_perplexity=acc.mean_perplexity,
        counts=acc.counts(),
        schema_version=SCHEMA_VERSION,
        code_version=__version__,
    )
    return ConfigResult(
        config=config, report=report, generations=all_gens, skipped_prompts=skipped
    )


def run_benchmark(spec: RunSpec) -> list[ConfigResult]:
    """Run every configuration of a spec and write the artifact tree."""
    prompts = parse_prompts_file(spec.prompts_path)
    store = load_knowledge_store(spec.knowledge_path)
    model = resolve_backend(spec.backend)
    ner = resolve_ner(spec.ner)
    nli = resolve_nli(spec.nli)
    embedder = resolve_embedder(spec.embedder)
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for config in spec.configs:
        result = run_config(
            model,
            prompts,
            store,
            config,
            ner,
            nli=nli,
            embedder=embedder,
            workers=spec.workers,
            skip_missing=spec.skip_missing,
            score_perplexity=spec.score_perplexity,
        )
        cfg_dir = out / config_slug(config)
        cfg_dir.mkdir(parents=True, exist_ok=True)
        write_generations_file(result.generations, cfg_dir / "generations.jsonl")
        write_report(result.report, cfg_dir / "report.json")
        results.append(result)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "code_version": __version__,
        "status": "partial" if any(r.skipped_prompts for r in results) else "complete",
        "num_prompts": len(prompts),
        "configs": [config_slug(r.config) for r in results],
        "skipped_prompts": {
            config_slug(r.config): r.skipped_prompts
            for r in results
            if r.skipped_prompts
        },
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    return results


def _sort_key(report: FactualityReport):
    ne = report.ne_error if report.ne_error is not None else float("inf")
    return (ne, report.config_label)


def emit_tradeoff_curves(
    reports: list[FactualityReport], out_path: str | Path
) -> Path:
    """Write the factuality/diversity trade-off table as CSV.

    Rows sort by entity error rate (undefined rates last), then label.
    Floats print with six decimals; missing metrics print empty.
    """
    if len(reports) < 2:
        raise TooFewReports(f"need at least 2 reports, got {len(reports)}")

    def cell(x: float | None) -> str:
        return "" if x is None else f"{x:.6f}"

    out_path = Path(out_path)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["config", "ne_error", "entail_ratio", "diversity", "repetition", "mean_perplexity"]
        )
        for report in sorted(reports, key=_sort_key):
            writer.writerow(
                [
                    report.config_label,
                    cell(report.ne_error),
                    cell(report.entail_ratio),
                    cell(report.diversity),
                    cell(report.repetition),
                    cell(report.mean_perplexity),
                ]
            )
    return out_path


def load_curve(path: str | Path) -> list[dict]:
    """Read a trade-off CSV back into dicts with floats (None for blank)."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            parsed: dict = {"config": row["config"]}
            for key in ("ne_error", "entail_ratio", "diversity", "repetition", "mean_perplexity"):
                parsed[key] = float(row[key]) if row[key] != "" else None
            rows.append(parsed)
    return rows


def reference_curve_path() -> Path:
    """Bundled large-model reference curve (for format checks and plots)."""
    from importlib import resources

    return Path(str(resources.files("facdec.data").joinpath("reference_tradeoff.csv")))
