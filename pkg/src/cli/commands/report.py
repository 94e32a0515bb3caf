"""Подкоманда report: сравнительная таблица нескольких прогонов."""

import argparse
from pathlib import Path
from typing import Dict, List

from src.cli.dependencies import get_evaluation_service
from src.cli.options import (
    RunContext,
    add_common_arguments,
    add_reference_arguments,
    reference_table,
    write_text,
)
from src.core.exceptions import EXIT_OK, ValidationError
from src.repositories.reference import ReferenceTable
from src.schemas.metrics import METRIC_NAMES, MetricSet

NAME = "report"
METRICS_FILE = "metrics.txt"
TABLE_FILE = "table.txt"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        NAME,
        help="Сравнение прогонов",
        description=(
            "Строит таблицу метрик по каталогам прогонов с metrics.txt. Разности считаются "
            "относительно опубликованных значений (--reference) или первого каталога."
        ),
    )
    add_common_arguments(parser)
    add_reference_arguments(parser)
    parser.add_argument(
        "--from", dest="runs", type=Path, nargs="+", required=True, help="Каталоги прогонов"
    )
    parser.set_defaults(handler=run)
    return parser


def load_runs(runs: List[Path]) -> Dict[str, MetricSet]:
    """
    Метрики каталогов прогонов; имя строки - путь каталога.

    Raises:
        ValidationError: В каталоге нет metrics.txt.
    """
    results: Dict[str, MetricSet] = {}
    for run_dir in runs:
        path = run_dir / METRICS_FILE
        if not path.is_file():
            raise ValidationError(f"--from: в {run_dir} нет {METRICS_FILE}", extra={"flag": "--from"})
        results[str(run_dir)] = MetricSet.read(path)
    return results


def baseline_reference(name: str, metrics: MetricSet) -> ReferenceTable:
    """Первый прогон как эталон (в процентах, как опубликованные значения)."""
    return {
        name: {
            metric: metrics.value(metric) * 100  # type: ignore[operator]
            for metric in METRIC_NAMES
            if metrics.value(metric) is not None
        }
    }


def run(args: argparse.Namespace, argv: List[str]) -> int:
    """Печатает таблицу; с --out дополнительно пишет table.txt и манифест."""
    results = load_runs(args.runs)
    reference = reference_table(args)
    if reference is None and len(results) > 1:
        first = str(args.runs[0])
        reference = baseline_reference(first, results[first])
    table = get_evaluation_service().compare_table(results, reference)
    print(table.text, end="")

    if args.out:
        with RunContext(args, argv, args.out) as run_context:
            run_context.config = {"runs": [str(path) for path in args.runs], "reference": args.reference}
            run_context.artifact("table", write_text(Path(args.out) / TABLE_FILE, table.text))
    return EXIT_OK
