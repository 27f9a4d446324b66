"""Factual-nucleus decoding and a factuality benchmark for open-ended
generation.

The decoder shrinks the nucleus-sampling threshold geometrically within
each sentence and restores it at sentence starts, trading a little
diversity for far fewer hallucinated entities. The rest of the package
measures that trade: check-worthiness filtering, evidence retrieval,
hallucinated-entity rate, entailment ratio, distinct-4-gram diversity,
and repetition, plus loss-masked training-data preparation and a seeded,
reproducible benchmark harness.
"""

__version__ = "0.1.0"

from .backends import (
    HttpBackend,
    NGramModel,
    TableBackend,
    TokenDistribution,
    UniformBackend,
    Vocabulary,
    load_ngram,
    save_ngram,
    sequence_perplexity,
    train_ngram,
)
from .bench import (
    RunSpec,
    config_slug,
    emit_tradeoff_curves,
    load_curve,
    load_sweep_spec,
    reference_curve_path,
    run_benchmark,
    run_config,
    score_generations_file,
)
from .checkworthy import (
    CheckworthyVerdict,
    FilterReason,
    first_person_mentions,
    is_checkworthy,
)
from .corpus import (
    FactualityReport,
    Generation,
    KnowledgeDoc,
    KnowledgeStore,
    Prompt,
    PromptLabel,
    ReportCounts,
    TraceStep,
    load_knowledge_store,
    parse_prompts_file,
    prompt_statistics,
    read_generations_file,
    read_report,
    write_generations_file,
    write_knowledge_file,
    write_prompts_file,
    write_report,
)
from .decoding import (
    DecodeAlgorithm,
    DecodeConfig,
    decode,
    decode_many,
    derive_generation_seed,
    dynamic_p,
    is_sentence_end,
    nucleus_set,
)
from .errors import (
    BackendUnavailable,
    DuplicateId,
    EmbedderUnavailable,
    EmptyCandidates,
    EmptyCorpus,
    EmptyEvidence,
    EmptyFile,
    EmptyTitle,
    FacdecError,
    InvalidSpan,
    MalformedDoc,
    MalformedRecord,
    MissingDoc,
    MissingRootAnnotation,
    MissingRootIndex,
    MissingSeed,
    NliUnavailable,
    NoEntitiesInCorpus,
    PivotOutOfRange,
    ProviderUnavailable,
    TooFewReports,
    UnknownContext,
    UnknownToken,
    ZeroProbabilityToken,
)
from .metrics import (
    EntailmentCounts,
    MetricAccumulator,
    NamedEntity,
    content_stream,
    detect_entities,
    diversity,
    entail_ratio,
    entail_single,
    entailment_counts,
    entities_from_spans,
    ne_error,
    ne_match,
    ngrams,
    repetition_flag,
    repetition_rate,
)
from .providers import (
    EntailmentKind,
    EntailmentLabel,
    GazetteerNer,
    HashingEmbedder,
    HttpEmbedder,
    HttpNer,
    HttpNli,
    LexicalOverlapNli,
    NerSpan,
)
from .retrieval import (
    EvidenceBundle,
    EvidenceSentence,
    TfidfIndex,
    build_evidence,
    doc_ground_truth,
    embed_retrieve,
    tfidf_retrieve,
)
from .synthetic import (
    FactWorld,
    build_fact_world,
    build_tiny_world,
    bundled_model_path,
    train_world_model,
    write_fact_world,
)
from .training_prep import (
    LossMask,
    PivotStrategy,
    PrefixedSentence,
    load_root_annotations,
    loss_mask,
    prepare_corpus,
    sc_pivot,
    split_rendered,
    topic_prefix,
)

__all__ = [
    "__version__",
    "BackendUnavailable",
    "CheckworthyVerdict",
    "DecodeAlgorithm",
    "DecodeConfig",
    "DuplicateId",
    "EmbedderUnavailable",
    "EmptyCandidates",
    "EmptyCorpus",
    "EmptyEvidence",
    "EmptyFile",
    "EmptyTitle",
    "EntailmentCounts",
    "EntailmentKind",
    "EntailmentLabel",
    "EvidenceBundle",
    "EvidenceSentence",
    "FacdecError",
    "FactWorld",
    "FactualityReport",
    "FilterReason",
    "GazetteerNer",
    "Generation",
    "HashingEmbedder",
    "HttpBackend",
    "HttpEmbedder",
    "HttpNer",
    "HttpNli",
    "InvalidSpan",
    "KnowledgeDoc",
    "KnowledgeStore",
    "LexicalOverlapNli",
    "LossMask",
    "MalformedDoc",
    "MalformedRecord",
    "MetricAccumulator",
    "MissingDoc",
    "MissingRootAnnotation",
    "MissingRootIndex",
    "MissingSeed",
    "NGramModel",
    "NamedEntity",
    "NerSpan",
    "NliUnavailable",
    "NoEntitiesInCorpus",
    "PivotOutOfRange",
    "PivotStrategy",
    "PrefixedSentence",
    "Prompt",
    "PromptLabel",
    "ProviderUnavailable",
    "ReportCounts",
    "RunSpec",
    "TableBackend",
    "TfidfIndex",
    "TokenDistribution",
    "TooFewReports",
    "TraceStep",
    "UniformBackend",
    "UnknownContext",
    "UnknownToken",
    "Vocabulary",
    "ZeroProbabilityToken",
    "build_evidence",
    "build_fact_world",
    "build_tiny_world",
    "bundled_model_path",
    "config_slug",
    "content_stream",
    "decode",
    "decode_many",
    "derive_generation_seed",
    "detect_entities",
    "diversity",
    "doc_ground_truth",
    "dynamic_p",
    "embed_retrieve",
    "emit_tradeoff_curves",
    "entail_ratio",
    "entail_single",
    "entailment_counts",
    "entities_from_spans",
    "first_person_mentions",
    "is_checkworthy",
    "is_sentence_end",
    "load_curve",
    "load_knowledge_store",
    "load_ngram",
    "load_root_annotations",
    "load_sweep_spec",
    "loss_mask",
    "ne_error",
    "ne_match",
    "ngrams",
    "nucleus_set",
    "parse_prompts_file",
    "prepare_corpus",
    "prompt_statistics",
    "read_generations_file",
    "read_report",
    "reference_curve_path",
    "repetition_flag",
    "repetition_rate",
    "run_benchmark",
    "run_config",
    "save_ngram",
    "sc_pivot",
    "score_generations_file",
    "sequence_perplexity",
    "split_rendered",
    "tfidf_retrieve",
    "topic_prefix",
    "train_ngram",
    "train_world_model",
    "write_fact_world",
    "write_generations_file",
    "write_knowledge_file",
    "write_prompts_file",
    "write_report",
]
