"""Подкоманда preprocess: построчная предобработка текстового файла."""

import argparse
from pathlib import Path
from typing import List

from src.cli.dependencies import get_textprep_service
from src.cli.options import (
    DEFAULT_PREPROCESS,
    RunContext,
    add_common_arguments,
    output_dir,
    preprocess_config,
    write_jsonl,
    write_text,
)
from src.core.exceptions import EXIT_OK, ValidationError
from src.core.logging import log

NAME = "preprocess"
OUTPUT_FILE = "processed.txt"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        NAME,
        help="Предобработка текстов",
        description="Прогоняет каждую строку входного файла через конвейер предобработки.",
    )
    add_common_arguments(parser)
    parser.add_argument("--in", dest="input", type=Path, required=True, help="Входной файл, один текст на строку")
    parser.add_argument("--preset", default=None, help="Пресет предобработки (перекрывает --config)")
    parser.add_argument("--trace", type=Path, default=None, help="JSON-lines трасса стадий")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace, argv: List[str]) -> int:
    """
    Пишет `processed.txt` (строка на строку входа) и, по запросу, трассу.

    `--config` принимает имя пресета или файл с полями PreprocessConfig.
    """
    if not args.input.is_file():
        raise ValidationError(f"--in: файл не найден: {args.input}", extra={"flag": "--in"})

    out = output_dir(args)
    with RunContext(args, argv, out) as run_context:
        config = preprocess_config(args.preset or args.config or DEFAULT_PREPROCESS)
        run_context.config = {"preprocess": config.model_dump()}

        service = get_textprep_service()
        lines = args.input.read_text(encoding="utf-8").splitlines()
        traces = [service.preprocess(line, config) for line in lines]
        log.info(f"Предобработано строк: {len(traces)}, стадии {config.enabled_stages()}")

        processed = write_text(out / OUTPUT_FILE, "".join(trace.final + "\n" for trace in traces))
        run_context.artifact("processed", processed)
        if args.trace:
            run_context.artifact("trace", write_jsonl(args.trace, traces))
        run_context.records["lines"] = len(traces)
    return EXIT_OK
