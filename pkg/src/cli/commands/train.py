"""Подкоманда train: K-fold кросс-валидация и, по запросу, production-модель."""

import argparse
from datetime import datetime, timezone
from typing import List

from src.cli.dependencies import (
    get_dataset_service,
    get_evaluation_service,
    get_manifest_repository,
    get_training_service,
)
from src.cli.options import (
    RunContext,
    add_common_arguments,
    add_dataset_arguments,
    add_reference_arguments,
    hidden_sizes,
    load_config_file,
    load_dataset,
    output_dir,
    reference_table,
    training_configs,
    write_text,
)
from src.core.exceptions import EXIT_OK
from src.core.logging import log
from src.repositories.manifest import fold_dir_name
from src.schemas.manifest import RunManifest
from src.schemas.training import FoldResult
from src.services.training_service import CHECKPOINT_DIR

NAME = "train"
METRICS_FILE = "metrics.txt"
AGGREGATE_FILE = "aggregate.txt"
TABLE_FILE = "table.txt"
TEST_FILE = "test.tsv"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        NAME,
        help="Обучение с кросс-валидацией",
        description="K-fold обучение классификатора; чекпойнт, тест и манифест на каждый фолд.",
    )
    add_common_arguments(parser)
    add_dataset_arguments(parser)
    add_reference_arguments(parser)
    parser.add_argument("--backbone", default=None, help="Идентификатор энкодера (tiny-hash-2x32 для тестов)")
    parser.add_argument("--preset", default=None, help="Пресет заморозки: NONE, HEADLINE, ABLATION_BEST, ALL")
    parser.add_argument("--preprocess", default=None, help="Пресет предобработки")
    parser.add_argument("--head", type=hidden_sizes, default=None, help="Скрытые слои головы: 512,256,128")
    parser.add_argument("--max-seq-len", type=int, default=None)
    parser.add_argument("--folds", type=int, default=None, help="Число фолдов K")
    parser.add_argument("--epochs", type=int, default=None, help="Максимум эпох")
    parser.add_argument("--patience", type=int, default=None)
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None, help="Скорость обучения")
    parser.add_argument("--class-weighted", action="store_true", help="Взвешенная кросс-энтропия")
    parser.add_argument("--production", action="store_true", help="Дополнительно обучить модель на всех данных")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace, argv: List[str]) -> int:
    """
    Артефакты прогона:
        metrics.txt - метрики по объединенным out-of-fold предсказаниям;
        aggregate.txt - среднее и стандартное отклонение по фолдам;
        fold_k/ - manifest.txt, metrics.txt, test.tsv и checkpoint/;
        production/ - чекпойнт модели на всех данных (с --production).
    """
    out = output_dir(args)
    with RunContext(args, argv, out) as run_context:
        model_config, train_config, preprocess = training_configs(args, load_config_file(args.config))
        reference = reference_table(args)
        run_context.seed = train_config.seed
        run_context.config = {
            "model": model_config.model_dump(mode="json"),
            "train": train_config.model_dump(),
            "preprocess": preprocess.model_dump(),
        }
        dataset = run_context.use_dataset(load_dataset(args))

        dataset_service = get_dataset_service()
        training_service = get_training_service(out)
        plan = dataset_service.make_folds(dataset, train_config.k_folds, train_config.seed, train_config.stratified)
        for fold in range(plan.k):
            split = dataset_service.split_fold(dataset, plan, fold, train_config.val_fraction)
            dataset_service.write_dataset(split.test, out / fold_dir_name(fold) / TEST_FILE)

        result = training_service.cross_validate(dataset, model_config, train_config, preprocess, plan=plan)
        for fold_result in result.folds:
            _write_fold(run_context, fold_result)

        aggregate_path = result.aggregate.write(out / AGGREGATE_FILE, header="AggregateMetrics")
        run_context.artifact("aggregate", aggregate_path)
        if result.pooled is not None:
            run_context.artifact("metrics", result.pooled.write(out / METRICS_FILE, header="MetricSet"))
            table = get_evaluation_service().compare_table({out.name or NAME: result.pooled}, reference)
            run_context.artifact("table", write_text(out / TABLE_FILE, table.text))
            print(table.text, end="")

        run_context.records["best_epochs"] = {
            str(item.fold): item.best_epoch for item in result.folds if not item.failed
        }
        run_context.records["failed_folds"] = result.aggregate.failed_folds

        if args.production:
            production = training_service.train_production(dataset, model_config, train_config, preprocess)
            _write_fold(run_context, production)
            run_context.records["production_best_epoch"] = production.best_epoch

    log.success(f"Обучение завершено, артефакты в {out}")
    return EXIT_OK


def _write_fold(run_context: RunContext, result: FoldResult) -> None:
    """Метрики и манифест фолда (или production-модели) в его каталоге."""
    directory = fold_dir_name(result.fold)
    artifacts = {}
    if result.checkpoint_ref:
        artifacts["checkpoint"] = f"{directory}/{CHECKPOINT_DIR}"
    if result.fold >= 0:
        artifacts["test"] = f"{directory}/{TEST_FILE}"
    if result.test_metrics is not None:
        result.test_metrics.write(run_context.out / directory / METRICS_FILE, header="MetricSet")
        artifacts["metrics"] = f"{directory}/{METRICS_FILE}"

    manifest = RunManifest(
        command=run_context.command,
        argv=run_context.argv,
        config=run_context.config,
        dataset_checksum=run_context.dataset_checksum,
        seed=run_context.seed,
        started_at=run_context.started_at or datetime.now(timezone.utc),
        finished_at=datetime.now(timezone.utc),
        artifacts=artifacts,
        records={
            "fold": result.fold,
            "best_epoch": result.best_epoch,
            "epochs": [record.model_dump() for record in result.epochs],
        },
        status="failed" if result.failed else "ok",
        error=result.error,
    )
    get_manifest_repository(run_context.out).write(manifest, directory)
