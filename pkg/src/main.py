"""Точка входа CLI инструментария обнаружения кибербуллинга."""

import sys
from typing import List, Optional

from src.cli.router import cli_router
from src.core.config import settings
from src.core.exceptions import EXIT_OK, handle_exception
from src.core.logging import log
from src.core.sentry import initialize_sentry, tag_run


def dispatch(argv: List[str]) -> int:
    """
    Разбирает аргументы, выполняет подкоманду и возвращает код завершения.

    0 - успех; 1 - ошибка валидации (сообщение называет флаг);
    2 - ошибка выполнения (с указателем на манифест, если он записан).

    Args:
        argv (List[str]): Аргументы без имени программы.

    Returns:
        int: Код завершения процесса.
    """
    try:
        args = cli_router.parse_args(argv)
        log.info(f"{settings.PROJECT_NAME} {settings.VERSION}: команда {args.command}")
        tag_run(args.command, backbone=getattr(args, "backbone", None))
        return args.handler(args, argv)
    except SystemExit as exc:
        # --help и --version
        return int(exc.code or EXIT_OK)
    except Exception as exc:
        return handle_exception(exc, manifest_path=getattr(exc, "manifest_path", None))


def main(argv: Optional[List[str]] = None) -> int:
    initialize_sentry()
    return dispatch(list(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
