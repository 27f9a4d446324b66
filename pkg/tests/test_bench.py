"""Benchmark harness tests: spec parsing, run bookkeeping, artifact
determinism, worker equivalence, and the trade-off CSV."""

import json
from pathlib import Path

import pytest

from facdec import (
    DecodeAlgorithm,
    DecodeConfig,
    FactualityReport,
    GazetteerNer,
    HttpBackend,
    KnowledgeDoc,
    KnowledgeStore,
    LexicalOverlapNli,
    MissingDoc,
    NGramModel,
    Prompt,
    PromptLabel,
    ReportCounts,
    RunSpec,
    TableBackend,
    TooFewReports,
    config_slug,
    emit_tradeoff_curves,
    load_curve,
    load_sweep_spec,
    read_report,
    reference_curve_path,
    run_benchmark,
    run_config,
    save_ngram,
    score_generations_file,
    write_fact_world,
    write_generations_file,
    write_knowledge_file,
    write_prompts_file,
)
from facdec.bench import (
    load_table_backend,
    resolve_backend,
    resolve_embedder,
    resolve_ner,
    resolve_nli,
)
from facdec.corpus import SCHEMA_VERSION

GREEDY = DecodeConfig(algorithm=DecodeAlgorithm.GREEDY)
TOPP = DecodeConfig(algorithm=DecodeAlgorithm.TOP_P, p=0.9)
FN = DecodeConfig(algorithm=DecodeAlgorithm.FACTUAL_NUCLEUS, p=0.9, lam=0.9, omega=0.3)


def small_config(algorithm=DecodeAlgorithm.FACTUAL_NUCLEUS, **kw):
    base = dict(p=0.9, lam=0.9, omega=0.3, max_new_tokens=12, num_generations=3, seed=0)
    base.update(kw)
    if algorithm is DecodeAlgorithm.GREEDY:
        base.pop("lam", None), base.pop("omega", None)
        return DecodeConfig(algorithm=algorithm, p=base["p"],
                            max_new_tokens=base["max_new_tokens"],
                            num_generations=base["num_generations"], seed=base["seed"])
    return DecodeConfig(algorithm=algorithm, **base)


class TestConfigSlug:
    def test_labels(self):
        assert config_slug(GREEDY) == "greedy"
        assert config_slug(TOPP) == "topp-0.9"
        assert config_slug(FN) == "factual-0.9-0.9-0.3"

    def test_short_float_formatting(self):
        cfg = DecodeConfig(algorithm=DecodeAlgorithm.TOP_P, p=0.5)
        assert config_slug(cfg) == "topp-0.5"


class TestResolvers:
    def test_ngram_spec(self, tmp_path, tiny_model):
        path = tmp_path / "m.fngm"
        save_ngram(tiny_model, path)
        model = resolve_backend(f"ngram:{path}")
        assert isinstance(model, NGramModel)
        assert model.vocab.size == tiny_model.vocab.size

    def test_table_spec(self, tmp_path):
        path = tmp_path / "table.json"
        path.write_text(
            json.dumps(
                {
                    "tokens": ["a", "b", "."],
                    "sentence_ends": ["."],
                    "eot": None,
                    "rows": [
                        {"context": [], "probs": [0.5, 0.25, 0.25]},
                        {"context": [0], "probs": [0.0, 1.0, 0.0]},
                    ],
                }
            ),
            encoding="utf-8",
        )
        model = resolve_backend(f"table:{path}")
        assert isinstance(model, TableBackend)
        assert model.next_distribution((0,)).probs[1] == 1.0

    def test_http_spec(self):
        model = resolve_backend("http:http://localhost:1")
        assert isinstance(model, HttpBackend)

    def test_bad_specs(self):
        for bad in ("", "ngram:", "mystery:x"):
            with pytest.raises(ValueError):
                resolve_backend(bad)
        with pytest.raises(ValueError):
            resolve_ner("nope")
        with pytest.raises(ValueError):
            resolve_nli("nope")
        with pytest.raises(ValueError):
            resolve_embedder("nope")

    def test_provider_specs(self, tmp_path):
        gaz = tmp_path / "g.txt"
        gaz.write_text("Oslo\n", encoding="utf-8")
        assert isinstance(resolve_ner(f"gazetteer:{gaz}"), GazetteerNer)
        assert isinstance(resolve_nli("lexical"), LexicalOverlapNli)
        assert resolve_nli(None) is None
        assert resolve_nli("") is None
        assert resolve_embedder(None) is None
        assert resolve_embedder("hashing") is not None


class TestSweepSpec:
    def write_spec(self, tmp_path, body):
        path = tmp_path / "sweep.toml"
        path.write_text(body, encoding="utf-8")
        return path

    def test_parse_and_path_resolution(self, tmp_path):
        path = self.write_spec(
            tmp_path,
            """
prompts = "prompts.jsonl"
knowledge = "knowledge.jsonl"
backend = "ngram:model.fngm"
out = "results"
ner = "gazetteer:gazetteer.txt"
nli = "lexical"
seed = 5
max_new_tokens = 30
num_generations = 4

[[configs]]
algorithm = "greedy"

[[configs]]
algorithm = "topp"
p = 0.9

[[configs]]
algorithm = "factual"
p = 0.9
lambda = 0.9
omega = 0.3
seed = 11
""",
        )
        spec = load_sweep_spec(path)
        assert spec.prompts_path == str(tmp_path / "prompts.jsonl")
        assert spec.backend == f"ngram:{tmp_path / 'model.fngm'}"
        assert spec.ner == f"gazetteer:{tmp_path / 'gazetteer.txt'}"
        assert spec.nli == "lexical"
        assert spec.embedder is None
        assert len(spec.configs) == 3
        # run-level defaults flow into each config
        greedy, topp, factual = spec.configs
        assert greedy.algorithm is DecodeAlgorithm.GREEDY
        assert greedy.seed == 5
        assert greedy.max_new_tokens == 30
        assert greedy.num_generations == 4
        assert topp.p == 0.9
        # per-config override beats the default
        assert factual.seed == 11

    def test_absolute_paths_kept(self, tmp_path):
        path = self.write_spec(
            tmp_path,
            f"""
prompts = "{tmp_path}/p.jsonl"
knowledge = "k.jsonl"
backend = "http:http://localhost:9"
out = "o"
ner = "http:http://localhost:9"

[[configs]]
algorithm = "greedy"
""",
        )
        spec = load_sweep_spec(path)
        assert spec.prompts_path == str(tmp_path / "p.jsonl")
        # http specs are never treated as paths
        assert spec.backend == "http:http://localhost:9"
        assert spec.ner == "http:http://localhost:9"

    def test_no_configs_rejected(self, tmp_path):
        path = self.write_spec(
            tmp_path,
            """
prompts = "p"
knowledge = "k"
backend = "http:x"
out = "o"
ner = "http:x"
""",
        )
        with pytest.raises(ValueError):
            load_sweep_spec(path)


@pytest.fixture(scope="module")
def world_kit(tiny_world, tiny_model):
    """Tiny world plus providers, trimmed to four prompts for speed."""
    return dict(
        model=tiny_model,
        prompts=tiny_world.prompts[:4],
        store=tiny_world.store,
        ner=GazetteerNer(tiny_world.gazetteer_entries),
        nli=LexicalOverlapNli(),
    )


class TestRunConfig:
    def test_bookkeeping(self, world_kit):
        cfg = small_config()
        result = run_config(
            world_kit["model"],
            world_kit["prompts"],
            world_kit["store"],
            cfg,
            world_kit["ner"],
            nli=world_kit["nli"],
        )
        report = result.report
        assert report.config_label == "factual 0.9|0.9|0.3"
        assert report.seed == 0
        assert report.counts.prompts == 4
        assert report.counts.generations == 4 * cfg.num_generations
        assert len(result.generations) == 4 * cfg.num_generations
        assert result.skipped_prompts == []
        assert report.counts.all_ne >= report.counts.hallu_ne >= 0
        assert report.mean_perplexity is not None

    def test_generations_carry_config_trace(self, world_kit):
        cfg = small_config()
        result = run_config(
            world_kit["model"],
            world_kit["prompts"][:1],
            world_kit["store"],
            cfg,
            world_kit["ner"],
        )
        for gen in result.generations:
            assert gen.prompt_id == world_kit["prompts"][0].id
            assert len(gen.step_trace) <= cfg.max_new_tokens
            assert gen.step_trace[0].p_used == cfg.p

    def test_degenerate_factual_equals_topp(self, world_kit):
        topp = small_config(DecodeAlgorithm.TOP_P)
        fn = small_config(lam=1.0, omega=0.9)
        r_topp = run_config(
            world_kit["model"], world_kit["prompts"], world_kit["store"],
            topp, world_kit["ner"], nli=world_kit["nli"],
        )
        r_fn = run_config(
            world_kit["model"], world_kit["prompts"], world_kit["store"],
            fn, world_kit["ner"], nli=world_kit["nli"],
        )
        assert [g.tokens for g in r_topp.generations] == [
            g.tokens for g in r_fn.generations
        ]
        a, b = r_topp.report.to_dict(), r_fn.report.to_dict()
        for skip in ("config_label", "config"):
            a.pop(skip), b.pop(skip)
        assert a == b

    def test_workers_do_not_change_results(self, world_kit):
        cfg = small_config()
        kw = dict(nli=world_kit["nli"])
        serial = run_config(
            world_kit["model"], world_kit["prompts"], world_kit["store"],
            cfg, world_kit["ner"], workers=1, **kw,
        )
        threaded = run_config(
            world_kit["model"], world_kit["prompts"], world_kit["store"],
            cfg, world_kit["ner"], workers=3, **kw,
        )
        assert [g.tokens for g in serial.generations] == [
            g.tokens for g in threaded.generations
        ]
        assert serial.report.to_dict() == threaded.report.to_dict()

    def test_missing_doc_raises_without_skip(self, world_kit):
        broken = Prompt(
            id="ghost", text="Ghost", label=PromptLabel.FACTUAL,
            evidence_doc_ids=("no-such-doc",),
        )
        with pytest.raises(MissingDoc):
            run_config(
                world_kit["model"],
                [broken, *world_kit["prompts"][:1]],
                world_kit["store"],
                small_config(),
                world_kit["ner"],
            )

    def test_skip_missing_records_partial(self, world_kit):
        broken = Prompt(
            id="ghost", text="Ghost", label=PromptLabel.FACTUAL,
            evidence_doc_ids=("no-such-doc",),
        )
        cfg = small_config()
        result = run_config(
            world_kit["model"],
            [broken, *world_kit["prompts"][:2]],
            world_kit["store"],
            cfg,
            world_kit["ner"],
            skip_missing=True,
        )
        assert result.skipped_prompts == ["ghost"]
        assert result.report.counts.prompts == 2
        assert len(result.generations) == 2 * cfg.num_generations

    def test_perplexity_can_be_disabled(self, world_kit):
        result = run_config(
            world_kit["model"], world_kit["prompts"][:1], world_kit["store"],
            small_config(), world_kit["ner"], score_perplexity=False,
        )
        assert result.report.mean_perplexity is None


@pytest.fixture(scope="module")
def world_dir(tmp_path_factory, tiny_world):
    out = tmp_path_factory.mktemp("world")
    paths = write_fact_world(tiny_world, out)
    return paths


def make_spec(paths, out_dir, configs=None, **kw):
    return RunSpec(
        prompts_path=str(paths["prompts"]),
        knowledge_path=str(paths["knowledge"]),
        backend=f"ngram:{paths['model']}",
        out_dir=str(out_dir),
        configs=configs or [small_config(DecodeAlgorithm.TOP_P), small_config()],
        ner=f"gazetteer:{paths['gazetteer']}",
        nli="lexical",
        **kw,
    )


class TestRunBenchmark:
    def test_artifact_tree(self, world_dir, tmp_path):
        out = tmp_path / "run"
        results = run_benchmark(make_spec(world_dir, out))
        assert (out / "topp-0.9" / "generations.jsonl").is_file()
        assert (out / "topp-0.9" / "report.json").is_file()
        assert (out / "factual-0.9-0.9-0.3" / "report.json").is_file()
        manifest = json.loads((out / "manifest.json").read_text("utf-8"))
        assert manifest["status"] == "complete"
        assert manifest["configs"] == ["topp-0.9", "factual-0.9-0.9-0.3"]
        assert manifest["schema_version"] == SCHEMA_VERSION
        assert manifest["skipped_prompts"] == {}
        assert len(results) == 2

    def test_reports_load_back(self, world_dir, tmp_path):
        out = tmp_path / "run"
        results = run_benchmark(make_spec(world_dir, out))
        loaded = read_report(out / "factual-0.9-0.9-0.3" / "report.json")
        assert loaded.to_dict() == results[1].report.to_dict()

    def test_reruns_are_byte_identical(self, world_dir, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_benchmark(make_spec(world_dir, out_a))
        run_benchmark(make_spec(world_dir, out_b))
        for rel in (
            "manifest.json",
            "topp-0.9/generations.jsonl",
            "topp-0.9/report.json",
            "factual-0.9-0.9-0.3/generations.jsonl",
            "factual-0.9-0.9-0.3/report.json",
        ):
            assert (out_a / rel).read_bytes() == (out_b / rel).read_bytes(), rel


class TestScoreGenerationsFile:
    def test_rescoring_matches_run_report(self, world_dir, tmp_path):
        out = tmp_path / "run"
        spec = make_spec(world_dir, out, configs=[small_config()])
        (result,) = run_benchmark(spec)
        report = score_generations_file(
            out / "factual-0.9-0.9-0.3" / "generations.jsonl",
            world_dir["prompts"],
            world_dir["knowledge"],
            tmp_path / "eval.json",
            ner=GazetteerNer.from_file(world_dir["gazetteer"]),
            nli=LexicalOverlapNli(),
            model=resolve_backend(f"ngram:{world_dir['model']}"),
        )
        for field in ("ne_error", "entail_ratio", "diversity", "repetition"):
            assert getattr(report, field) == getattr(result.report, field), field
        # summation order differs between the per-prompt fold and the flat
        # rescore, so the perplexity mean can move in its last bit
        assert report.mean_perplexity == pytest.approx(
            result.report.mean_perplexity, rel=1e-12
        )
        assert report.counts == result.report.counts
        assert (tmp_path / "eval.json").is_file()

    def test_unknown_prompt_rejected(self, world_dir, tmp_path):
        from facdec import FacdecError, Generation

        gens = [
            Generation(
                prompt_id="not-a-prompt", seed=1, tokens=(0,), text=".", step_trace=()
            )
        ]
        gen_path = tmp_path / "gens.jsonl"
        write_generations_file(gens, gen_path)
        with pytest.raises(FacdecError):
            score_generations_file(
                gen_path,
                world_dir["prompts"],
                world_dir["knowledge"],
                tmp_path / "eval.json",
                ner=GazetteerNer([]),
            )


def fake_report(label, ne_error, diversity=0.5, entail=None, ppl=None):
    return FactualityReport(
        config_label=label,
        config={},
        seed=0,
        ne_error=ne_error,
        entail_ratio=entail,
        diversity=diversity,
        repetition=0.0,
        mean_perplexity=ppl,
        counts=ReportCounts(1, 1, 1, 1, 0, 0, 0),
        schema_version=SCHEMA_VERSION,
        code_version="0.0.0",
    )


class TestTradeoffCurves:
    def test_rows_sorted_and_formatted(self, tmp_path):
        reports = [
            fake_report("top-p 0.9", 0.52, diversity=0.88, ppl=10.9),
            fake_report("factual 0.9|0.9|0.3", 0.42, diversity=0.55, entail=0.1),
            fake_report("no-entities", None),
        ]
        path = emit_tradeoff_curves(reports, tmp_path / "curve.csv")
        lines = path.read_text("utf-8").splitlines()
        assert lines[0] == (
            "config,ne_error,entail_ratio,diversity,repetition,mean_perplexity"
        )
        assert lines[1].startswith("factual 0.9|0.9|0.3,0.420000,0.100000,0.550000")
        assert lines[2].startswith("top-p 0.9,0.520000,,0.880000,0.000000,10.900000")
        # undefined entity error sorts last, blank cells stay blank
        assert lines[3].startswith("no-entities,,")

    def test_ties_break_on_label(self, tmp_path):
        reports = [
            fake_report("zeta", 0.4),
            fake_report("alpha", 0.4),
        ]
        path = emit_tradeoff_curves(reports, tmp_path / "curve.csv")
        rows = load_curve(path)
        assert [r["config"] for r in rows] == ["alpha", "zeta"]

    def test_too_few_reports(self, tmp_path):
        with pytest.raises(TooFewReports):
            emit_tradeoff_curves([fake_report("only", 0.1)], tmp_path / "c.csv")

    def test_load_curve_round_trip(self, tmp_path):
        reports = [
            fake_report("a", 0.1, diversity=0.9, entail=0.5, ppl=3.25),
            fake_report("b", None),
        ]
        rows = load_curve(emit_tradeoff_curves(reports, tmp_path / "c.csv"))
        assert rows[0] == {
            "config": "a",
            "ne_error": 0.1,
            "entail_ratio": 0.5,
            "diversity": 0.9,
            "repetition": 0.0,
            "mean_perplexity": 3.25,
        }
        assert rows[1]["ne_error"] is None
        assert rows[1]["entail_ratio"] is None

    def test_reference_curve_bundled(self):
        path = reference_curve_path()
        assert path.is_file()
        rows = load_curve(path)
        assert len(rows) == 6
        labels = {r["config"] for r in rows}
        assert "top-p 0.9" in labels
        assert "greedy" in labels
        errors = [r["ne_error"] for r in rows]
        assert errors == sorted(errors)
        # the nucleus-shrinking rows hold less entity error and less
        # diversity than plain top-p, the trade the package is about
        topp = next(r for r in rows if r["config"] == "top-p 0.9")
        for row in rows:
            if row["config"].startswith("factual"):
                assert row["ne_error"] < topp["ne_error"]
                assert row["diversity"] < topp["diversity"]
