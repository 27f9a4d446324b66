"""Command-line entry points.

Subcommands: ``run`` decodes and scores one configuration, ``sweep``
runs every configuration in a TOML spec, ``curves`` folds report files
into a trade-off CSV, ``prep`` writes masked training data, and ``eval``
re-scores an existing generations file. Exit status is 0 on success, 2
when a run completed but skipped prompts, and 1 on failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    RunSpec,
    emit_tradeoff_curves,
    load_sweep_spec,
    resolve_backend,
    resolve_embedder,
    resolve_ner,
    resolve_nli,
    run_benchmark,
)
from .corpus import read_report
from .decoding import DecodeAlgorithm, DecodeConfig
from .errors import FacdecError
from .training_prep import (
    PivotStrategy,
    load_root_annotations,
    prepare_corpus,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARTIAL = 2


def _add_provider_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--ner",
        required=True,
        help="entity provider: gazetteer:FILE or http:URL",
    )
    parser.add_argument(
        "--nli", default=None, help="entailment provider: lexical or http:URL"
    )
    parser.add_argument(
        "--embedder", default=None, help="embedding provider: hashing or http:URL"
    )


def _add_decode_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--decode",
        choices=[a.value for a in DecodeAlgorithm],
        default=DecodeAlgorithm.FACTUAL_NUCLEUS.value,
    )
    parser.add_argument("--p", type=float, default=0.9)
    parser.add_argument("--lambda", type=float, default=0.9, dest="lam")
    parser.add_argument("--omega", type=float, default=0.3)
    parser.add_argument("--max-new-tokens", type=int, default=150)
    parser.add_argument("--num-gens", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facdec",
        description="Factual-nucleus decoding and factuality benchmarking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="decode and score one configuration")
    run.add_argument("--prompts", required=True)
    run.add_argument("--knowledge", required=True)
    run.add_argument(
        "--backend", required=True, help="ngram:FILE, table:FILE, or http:URL"
    )
    run.add_argument("--out", required=True)
    _add_decode_args(run)
    _add_provider_args(run)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--skip-missing", action="store_true")
    run.add_argument(
        "--no-perplexity", action="store_true", help="skip fluency scoring"
    )

    sweep = sub.add_parser("sweep", help="run every configuration in a TOML spec")
    sweep.add_argument("--spec", required=True)

    curves = sub.add_parser("curves", help="fold reports into a trade-off CSV")
    curves.add_argument(
        "--run-dir", required=True, help="directory holding <config>/report.json trees"
    )
    curves.add_argument("--out", required=True)

    prep = sub.add_parser("prep", help="write topic-prefixed masked training data")
    prep.add_argument("--knowledge", required=True)
    prep.add_argument(
        "--strategy", choices=[s.value for s in PivotStrategy], required=True
    )
    prep.add_argument("--seed", type=int, default=0)
    prep.add_argument("--out", required=True)
    prep.add_argument("--root-annotations", default=None)

    ev = sub.add_parser("eval", help="re-score an existing generations file")
    ev.add_argument("--generations", required=True)
    ev.add_argument("--prompts", required=True)
    ev.add_argument("--knowledge", required=True)
    ev.add_argument("--out", required=True)
    _add_provider_args(ev)
    ev.add_argument(
        "--backend", default=None, help="optional backend for perplexity scoring"
    )
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = DecodeConfig(
        algorithm=DecodeAlgorithm(args.decode),
        p=args.p,
        lam=args.lam,
        omega=args.omega,
        max_new_tokens=args.max_new_tokens,
        num_generations=args.num_gens,
        seed=args.seed,
    )
    spec = RunSpec(
        prompts_path=args.prompts,
        knowledge_path=args.knowledge,
        backend=args.backend,
        out_dir=args.out,
        configs=[config],
        ner=args.ner,
        nli=args.nli,
        embedder=args.embedder,
        workers=args.workers,
        skip_missing=args.skip_missing,
        score_perplexity=not args.no_perplexity,
    )
    results = run_benchmark(spec)
    return EXIT_PARTIAL if any(r.skipped_prompts for r in results) else EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = load_sweep_spec(args.spec)
    results = run_benchmark(spec)
    return EXIT_PARTIAL if any(r.skipped_prompts for r in results) else EXIT_OK


def _cmd_curves(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    reports = [
        read_report(path) for path in sorted(run_dir.glob("*/report.json"))
    ]
    emit_tradeoff_curves(reports, args.out)
    return EXIT_OK


def _cmd_prep(args: argparse.Namespace) -> int:
    from .corpus import load_knowledge_store

    store = load_knowledge_store(args.knowledge)
    strategy = PivotStrategy(args.strategy)
    roots = (
        load_root_annotations(args.root_annotations)
        if args.root_annotations
        else None
    )
    count = prepare_corpus(
        store, strategy, seed=args.seed, out_path=args.out, root_annotations=roots
    )
    print(f"wrote {count} records to {args.out}")
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    from .bench import score_generations_file

    report = score_generations_file(
        generations_path=args.generations,
        prompts_path=args.prompts,
        knowledge_path=args.knowledge,
        out_path=args.out,
        ner=resolve_ner(args.ner),
        nli=resolve_nli(args.nli),
        embedder=resolve_embedder(args.embedder),
        model=resolve_backend(args.backend) if args.backend else None,
    )
    print(
        f"scored {report.counts.generations} generations "
        f"({report.counts.checkworthy} checkworthy)"
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "curves": _cmd_curves,
        "prep": _cmd_prep,
        "eval": _cmd_eval,
    }
    try:
        return handlers[args.command](args)
    except FacdecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
