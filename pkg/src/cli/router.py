"""Главный парсер CLI."""

import argparse
from typing import NoReturn

from src.cli.commands import COMMANDS
from src.core.config import settings
from src.core.exceptions import ValidationError

PROG = "hinglish-bully"


class ToolkitArgumentParser(argparse.ArgumentParser):
    """
    Парсер, который не завершает процесс сам.

    Ошибка разбора превращается в ValidationError (код 1); сообщение argparse
    называет проблемный флаг, к нему добавляется usage.
    """

    def error(self, message: str) -> NoReturn:
        raise ValidationError(
            f"{message}\n{self.format_usage().strip()}",
            extra={"usage": self.format_usage().strip()},
        )


def build_parser() -> ToolkitArgumentParser:
    """Парсер со всеми подкомандами."""
    parser = ToolkitArgumentParser(
        prog=PROG,
        description=f"{settings.PROJECT_NAME} {settings.VERSION}: обнаружение кибербуллинга в Hinglish-текстах.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    subparsers = parser.add_subparsers(
        dest="command", metavar="command", required=True, parser_class=ToolkitArgumentParser
    )
    for command in COMMANDS:
        command.register(subparsers)
    return parser


# Парсер собирается один раз при импорте
cli_router = build_parser()
