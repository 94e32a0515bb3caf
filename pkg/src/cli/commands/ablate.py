"""Подкоманда ablate: сетка абляций с возобновлением."""

import argparse
from pathlib import Path
from typing import List

from src.cli.dependencies import get_ablation_service
from src.cli.options import (
    RunContext,
    add_common_arguments,
    add_dataset_arguments,
    load_config_file,
    load_dataset,
    output_dir,
    training_configs,
    write_jsonl,
    write_text,
)
from src.core.exceptions import EXIT_OK, ValidationError
from src.services.ablation_service import AblationService

NAME = "ablate"
REPORT_FILE = "report.txt"
RESULTS_FILE = "results.jsonl"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        NAME,
        help="Сетка абляций",
        description=(
            "Обучает и оценивает варианты заморозки, глубины головы и предобработки на общем разбиении. "
            "Повторный запуск в тот же каталог пропускает готовые варианты."
        ),
    )
    add_common_arguments(parser)
    add_dataset_arguments(parser)
    parser.add_argument("--grid", type=Path, default=None, help="YAML-спецификация сетки (по умолчанию 13 строк)")
    parser.add_argument("--full-factorial", action="store_true", help="Полный перебор вместо одной оси за раз")
    parser.add_argument("--folds-used", type=int, default=None, help="Сколько фолдов оценивает каждый вариант")
    parser.add_argument("--backbone", default=None, help="Идентификатор энкодера")
    parser.add_argument("--max-seq-len", type=int, default=None)
    parser.add_argument("--folds", type=int, default=None, help="Число фолдов общего разбиения")
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--patience", type=int, default=None)
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None)
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace, argv: List[str]) -> int:
    """Пишет report.txt (раскладка таблицы абляций) и results.jsonl."""
    out = output_dir(args)
    with RunContext(args, argv, out, resumable=True) as run_context:
        grid = AblationService.load_grid(args.grid)
        updates = {}
        if args.full_factorial:
            updates["full_factorial"] = True
        if args.folds_used is not None:
            if args.folds_used < 1:
                raise ValidationError("--folds-used: нужно не меньше 1", extra={"flag": "--folds-used"})
            updates["folds_used"] = args.folds_used
        if updates:
            grid = grid.model_copy(update=updates)

        # Заморозка, голова и предобработка задаются сеткой
        base_model, train_config, _ = training_configs(args, load_config_file(args.config))
        run_context.seed = train_config.seed
        run_context.config = {
            "grid": grid.model_dump(),
            "model": base_model.model_dump(mode="json"),
            "train": train_config.model_dump(),
        }
        dataset = run_context.use_dataset(load_dataset(args))

        service = get_ablation_service(out)
        results = service.run_ablation(dataset, base_model, train_config, grid, argv=argv)
        report = service.build_report(results)

        run_context.artifact("report", write_text(out / REPORT_FILE, report.text))
        run_context.artifact("results", write_jsonl(out / RESULTS_FILE, results))
        run_context.records["variants"] = len(results)
        run_context.records["failed_variants"] = [f"{r.axis}/{r.variant}" for r in results if r.failed]
        print(report.text, end="")
    return EXIT_OK
