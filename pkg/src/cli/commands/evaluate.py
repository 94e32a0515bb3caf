"""Подкоманда evaluate: метрики сохраненного чекпойнта на датасете."""

import argparse
from pathlib import Path
from typing import List

from src.cli.dependencies import (
    get_checkpoint_repository,
    get_evaluation_service,
    get_textprep_service,
)
from src.cli.options import (
    RunContext,
    add_common_arguments,
    add_dataset_arguments,
    add_reference_arguments,
    load_dataset,
    output_dir,
    reference_table,
    write_jsonl,
    write_text,
)
from src.core.exceptions import EXIT_OK
from src.services.training_service import EVAL_BATCH_SIZE

NAME = "evaluate"
METRICS_FILE = "metrics.txt"
TABLE_FILE = "table.txt"
PREDICTIONS_FILE = "predictions.jsonl"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        NAME,
        help="Оценка чекпойнта",
        description="Считает метрики чекпойнта на датасете и печатает сравнительную таблицу.",
    )
    add_common_arguments(parser)
    add_dataset_arguments(parser)
    add_reference_arguments(parser)
    parser.add_argument("--checkpoint", type=Path, required=True, help="Каталог чекпойнта")
    parser.add_argument("--threshold", type=float, default=0.5, help="Порог предсказания BULLY")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace, argv: List[str]) -> int:
    """Пишет metrics.txt, table.txt и predictions.jsonl (оценка на образец)."""
    out = output_dir(args)
    with RunContext(args, argv, out) as run_context:
        model, preprocess = get_checkpoint_repository(args.checkpoint).load()
        reference = reference_table(args)
        run_context.config = {
            "checkpoint": str(args.checkpoint),
            "model": model.config.model_dump(mode="json"),
            "preprocess": preprocess.model_dump(),
            "threshold": args.threshold,
        }
        dataset = run_context.use_dataset(load_dataset(args))

        texts = get_textprep_service().preprocess_many(dataset.texts, preprocess)
        scores = model.predict_proba(texts, batch_size=EVAL_BATCH_SIZE)
        evaluation_service = get_evaluation_service()
        metrics = evaluation_service.compute_metrics(dataset.labels, scores, threshold=args.threshold)

        run_context.artifact("metrics", metrics.write(out / METRICS_FILE, header="MetricSet"))
        table = evaluation_service.compare_table({str(args.checkpoint): metrics}, reference)
        run_context.artifact("table", write_text(out / TABLE_FILE, table.text))
        predictions = (
            {"id": sample.id, "label": int(sample.label), "score": float(score)}
            for sample, score in zip(dataset.samples, scores)
        )
        run_context.artifact("predictions", write_jsonl(out / PREDICTIONS_FILE, predictions))
        run_context.records["degenerate"] = metrics.degenerate
        print(table.text, end="")
    return EXIT_OK
