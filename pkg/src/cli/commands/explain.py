"""Подкоманда explain: атрибуции слов, типы смешения, калибровка и ошибки."""

import argparse
from pathlib import Path
from typing import List

import numpy as np

from src.cli.dependencies import (
    get_attribution_service,
    get_calibration_service,
    get_checkpoint_repository,
    get_failure_service,
    get_textprep_service,
)
from src.cli.options import (
    RunContext,
    add_common_arguments,
    add_dataset_arguments,
    load_dataset,
    output_dir,
    write_jsonl,
    write_text,
)
from src.core.exceptions import EXIT_OK
from src.core.logging import log
from src.schemas.explain import AttributionMethod, WordSummary
from src.services.training_service import EVAL_BATCH_SIZE

NAME = "explain"
# Сколько слов печатается в текстовой сводке атрибуций
SUMMARY_ROWS = 25


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        NAME,
        help="Объяснения и анализ ошибок",
        description="Атрибуции слов, отчет по типам смешения языков, калибровка и ошибочные предсказания.",
    )
    add_common_arguments(parser)
    add_dataset_arguments(parser)
    parser.add_argument("--checkpoint", type=Path, required=True, help="Каталог чекпойнта")
    parser.add_argument(
        "--method",
        type=AttributionMethod,
        choices=list(AttributionMethod),
        default=AttributionMethod.GRADIENT_X_INPUT,
        help="Метод атрибуции",
    )
    parser.add_argument("--patterns", type=Path, default=None, help="Корпус типов смешения (тип<TAB>предложение)")
    parser.add_argument("--limit", type=int, default=None, help="Атрибуции только для первых N образцов")
    parser.add_argument("--bins", type=int, default=10, help="Число корзин уверенности")
    parser.add_argument("--threshold", type=float, default=0.5, help="Порог предсказания BULLY")
    parser.add_argument("--plots", action="store_true", help="Сохранить графики калибровки (PNG)")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace, argv: List[str]) -> int:
    """Каждый отчет пишется парой: JSON-lines и текстовая таблица."""
    out = output_dir(args)
    with RunContext(args, argv, out) as run_context:
        model, preprocess = get_checkpoint_repository(args.checkpoint).load()
        run_context.config = {
            "checkpoint": str(args.checkpoint),
            "method": args.method.value,
            "preprocess": preprocess.model_dump(),
            "bins": args.bins,
            "threshold": args.threshold,
        }
        dataset = run_context.use_dataset(load_dataset(args))
        textprep_service = get_textprep_service()
        attribution_service = get_attribution_service()
        texts = textprep_service.preprocess_many(dataset.texts, preprocess)

        # Атрибуции слов
        limit = len(dataset) if args.limit is None else min(args.limit, len(dataset))
        log.info(f"Атрибуции {args.method.value} для {limit} образцов")
        per_sentence = [attribution_service.attribute(model, text, method=args.method) for text in texts[:limit]]
        rows = (
            {"id": sample.id, "rank": rank, **record.model_dump(mode="json")}
            for sample, records in zip(dataset.samples, per_sentence)
            for rank, record in enumerate(records, start=1)
        )
        run_context.artifact("attributions", write_jsonl(out / "attributions.jsonl", rows))
        summary = attribution_service.corpus_summary(per_sentence)
        run_context.artifact("words", write_jsonl(out / "words.jsonl", summary))
        run_context.artifact("words_table", write_text(out / "words.txt", _render_words(summary[:SUMMARY_ROWS])))

        # Типы смешения языков
        corpus = attribution_service.load_pattern_corpus(args.patterns)
        patterns = attribution_service.pattern_report(model, corpus, preprocess, method=args.method)
        run_context.artifact("patterns", write_jsonl(out / "patterns.jsonl", patterns))
        pattern_lines = [f"{'Pattern':<28}{'N':>4}{'MeanAttr':>10}  Top words"] + [
            f"{item.pattern.value:<28}{item.n_sentences:>4}{item.mean_attribution:>10.4f}  {', '.join(item.top_words)}"
            for item in patterns
        ]
        run_context.artifact("patterns_table", write_text(out / "patterns.txt", "\n".join(pattern_lines) + "\n"))

        # Калибровка
        calibration_service = get_calibration_service()
        scores = model.predict_proba(texts, batch_size=EVAL_BATCH_SIZE)
        edges = np.linspace(0.5, 1.0, args.bins + 1)
        calibration = calibration_service.calibration(dataset.labels, scores, edges, threshold=args.threshold)
        run_context.artifact("calibration", write_jsonl(out / "calibration.jsonl", calibration.bins))
        run_context.artifact(
            "calibration_table", write_text(out / "calibration.txt", calibration_service.render(calibration))
        )
        run_context.records.update(ece=calibration.ece, mce=calibration.mce, brier=calibration.brier)
        if args.plots:
            run_context.artifact(
                "reliability", calibration_service.plot_reliability(calibration, out / "reliability.png")
            )
            run_context.artifact(
                "correctness", calibration_service.plot_correctness_histogram(calibration, out / "correctness.png")
            )

        # Ошибочные предсказания
        failure_service = get_failure_service()
        cases = failure_service.failure_report(model, dataset, preprocess, threshold=args.threshold)
        run_context.artifact("failures", write_jsonl(out / "failures.jsonl", cases))
        run_context.artifact("failures_table", write_text(out / "failures.txt", failure_service.render(cases)))
        run_context.records["failures"] = len(cases)

    log.success(f"Отчеты объяснений записаны в {out}")
    return EXIT_OK


def _render_words(summary: List[WordSummary]) -> str:
    lines = [f"{'Word':<20}{'Lang':<10}{'Category':<28}{'MeanAttr':>10}{'N':>6}"]
    lines += [
        f"{item.word:<20}{item.lang_tag.value:<10}{item.category.value:<28}{item.mean_score:>10.4f}{item.occurrences:>6}"
        for item in summary
    ]
    return "\n".join(lines) + "\n"
