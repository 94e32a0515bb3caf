"""Настройка логирования инструментария на Loguru."""

import logging
import sys

from loguru import logger
from tqdm import tqdm

from src.core.config import settings

# Библиотеки, чьи логи через стандартный logging перехватываются в Loguru
THIRD_PARTY_LOGGERS = ("transformers", "torch", "matplotlib", "urllib3", "filelock")
# Ключи контекста, которые сервисы привязывают через log.bind(...)
CONTEXT_KEYS = ("command", "fold", "axis", "variant", "source")


def development_formatter(record):  # pragma: no cover
    """
    Форматтер цветного консольного вывода для DEBUG-режима.

    Привязанный контекст (команда, фолд, вариант абляции) печатается
    в квадратных скобках перед сообщением.
    """
    context = " ".join(f"{key}={record['extra'][key]}" for key in CONTEXT_KEYS if key in record["extra"])
    log_format = (
        "<green>{time:HH:mm:ss.SSS}</green> | "
        "<level>{level: <7}</level> | "
        "<cyan>{name}</cyan>:<cyan>{line}</cyan> - "
    )
    if context:
        log_format += f"<magenta>[{context}]</magenta> "
    log_format += "<level>{message}</level>\n"
    if record["exception"]:
        log_format += "\n<red>{exception}</red>"

    return log_format


def tqdm_sink(message) -> None:  # pragma: no cover
    """Пишет через tqdm.write, чтобы строки лога не ломали прогресс-бары обучения."""
    tqdm.write(str(message), end="", file=sys.stderr)


class InterceptHandler(logging.Handler):
    """Перенаправляет записи стандартного logging в Loguru с исходным уровнем."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level: str | int = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        # Ищем кадр, вызвавший logging, чтобы Loguru показал исходное место
        frame, depth = logging.currentframe(), 2
        while frame is not None and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1
        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def intercept_third_party() -> None:
    """
    Подключает InterceptHandler к логгерам библиотек.

    Вне DEBUG-режима уровень библиотек поднимается до WARNING: предупреждения
    transformers о неинициализированных весах пула остаются, информационный
    шум загрузки весов - нет.
    """
    level = logging.DEBUG if settings.DEBUG else logging.WARNING
    for name in THIRD_PARTY_LOGGERS:
        library_logger = logging.getLogger(name)
        library_logger.handlers = [InterceptHandler()]
        library_logger.setLevel(level)
        library_logger.propagate = False


def configure_logging():
    """
    Настраивает Loguru.

    - DEBUG=True: цветной вывод через tqdm.write с контекстом прогона.
    - DEBUG=False: JSON-строки в stderr.
    - PRODUCTION=True: дополнительно JSON-файл с ротацией в LOG_ROOT_PATH.
    """
    logger.remove()

    if settings.DEBUG:  # pragma: no cover
        logger.add(
            tqdm_sink,
            level=settings.LOG_LEVEL,
            format=development_formatter,
            colorize=True,
            backtrace=True,
            diagnose=True,
        )
    else:
        logger.add(
            sys.stderr,
            level=settings.LOG_LEVEL,
            serialize=True,
            backtrace=False,
            diagnose=False,
        )

    log_file_path = settings.LOG_FILE_PATH
    if log_file_path:  # pragma: no cover
        try:
            log_file_path.parent.mkdir(parents=True, exist_ok=True)
            logger.add(
                log_file_path,
                rotation="100 MB",
                retention="30 days",
                compression="zip",
                level=settings.LOG_LEVEL,
                serialize=True,
                enqueue=True,  # Запись через очередь, безопасна для воркеров DataLoader
                backtrace=True,
                diagnose=False,
            )
        except OSError as exc:
            logger.error(f"Ошибка настройки логирования в файл '{log_file_path}': {exc}")

    intercept_third_party()
    logger.debug(
        f"Loguru сконфигурирован: уровень {settings.LOG_LEVEL}, DEBUG={settings.DEBUG}, "
        f"файл: {log_file_path or 'нет'}"
    )


# Инициализация логирования при импорте модуля
configure_logging()

# Экспортируем настроенный логгер для использования в других модулях
log = logger
