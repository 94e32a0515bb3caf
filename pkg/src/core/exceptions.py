"""Модуль кастомных исключений и их обработчиков для CLI."""

import sys
from typing import Any, Iterable, Optional, TextIO

from src.core.logging import log
from src.schemas.errors import ErrorReport

# Коды завершения CLI
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class ToolkitError(Exception):
    """Базовое исключение инструментария."""

    exit_code: int = EXIT_RUNTIME

    def __init__(
        self,
        detail: str,
        error_type: Optional[str] = None,
        extra: Optional[dict[str, Any]] = None,
    ):
        super().__init__(detail)
        self.detail = detail
        self.error_type = error_type or "toolkit_error"
        self.extra = extra or {}


class ValidationError(ToolkitError):
    """Ошибка при невалидных входных данных (флаги, конфигурации)."""

    exit_code = EXIT_VALIDATION

    def __init__(self, detail: str = "Некорректные входные данные", **kwargs):
        kwargs.setdefault("error_type", "validation_error")
        super().__init__(detail, **kwargs)


class ContractViolationError(ValidationError):
    """Нарушено предусловие операции."""

    def __init__(self, detail: str = "Нарушено предусловие операции", **kwargs):
        super().__init__(detail, error_type="contract_violation", **kwargs)


class ConfigError(ValidationError):
    """Конфигурация или пресет не могут быть разобраны."""

    def __init__(self, detail: str = "Ошибка конфигурации", **kwargs):
        super().__init__(detail, error_type="config_error", **kwargs)


class DatasetFormatError(ValidationError):
    """Строка датасета не соответствует схеме источника."""

    def __init__(self, row: int, reason: str, **kwargs):
        extra = {"row": row, "reason": reason, **kwargs.pop("extra", {})}
        super().__init__(
            f"Строка {row}: {reason}", error_type="dataset_format_error", extra=extra
        )
        self.row = row
        self.reason = reason


class UnknownLabelError(ValidationError):
    """Метка вне таблицы соответствия источника."""

    def __init__(self, label: str, permitted: Iterable[str], row: Optional[int] = None):
        self.label = label
        self.permitted = sorted(permitted)
        self.row = row
        where = f" (строка {row})" if row is not None else ""
        super().__init__(
            f"Неизвестная метка '{label}'{where}. Допустимые: {', '.join(self.permitted)}",
            error_type="unknown_label",
            extra={"label": label, "permitted": self.permitted, "row": row},
        )


class BackboneError(ToolkitError):
    """Энкодер не найден, не загружается или несовместим с FreezeSpec."""

    def __init__(self, detail: str = "Ошибка загрузки энкодера", **kwargs):
        super().__init__(detail, error_type="backbone_error", **kwargs)


class TrainingAbortedError(ToolkitError):
    """Обучение фолда прервано (нефинитная функция потерь)."""

    def __init__(
        self, detail: str, fold: Optional[int] = None, epoch: Optional[int] = None
    ):
        super().__init__(
            detail,
            error_type="training_aborted",
            extra={"fold": fold, "epoch": epoch},
        )
        self.fold = fold
        self.epoch = epoch


class CrossValidationError(ToolkitError):
    """Недостаточно успешных фолдов для агрегата."""

    def __init__(self, detail: str = "Кросс-валидация не удалась", **kwargs):
        super().__init__(detail, error_type="cross_validation_error", **kwargs)


class ArtifactError(ToolkitError):
    """Ошибка чтения/записи чекпойнта, отчета или манифеста."""

    def __init__(self, detail: str = "Ошибка работы с артефактом", **kwargs):
        super().__init__(detail, error_type="artifact_error", **kwargs)


# --- Обработчики исключений CLI ---


def toolkit_exception_handler(
    exc: ToolkitError,
    stream: TextIO | None = None,
    manifest_path: Optional[str] = None,
) -> int:
    """
    Обработчик для кастомных исключений ToolkitError.

    Печатает стандартный отчет об ошибке в stderr и возвращает код завершения.

    Args:
        exc: Экземпляр ToolkitError или его наследника.
        stream: Поток для вывода (по умолчанию stderr).
        manifest_path: Путь к манифесту прогона, если он успел появиться.

    Returns:
        int: Код завершения процесса.
    """
    extra = dict(exc.extra)
    if manifest_path:
        extra["manifest"] = manifest_path

    # Ошибки выполнения уходят в Sentry как события, ошибки ввода - нет
    level = "ERROR" if exc.exit_code == EXIT_RUNTIME else "WARNING"
    log.bind(extra_info=extra).log(
        level, f"Обработана ошибка ({exc.exit_code} {exc.error_type}): {exc.detail}"
    )
    report = ErrorReport(
        error_type=exc.error_type, error_message=exc.detail, extra_info=extra or None
    )
    print(report.model_dump_json(), file=stream or sys.stderr)
    return exc.exit_code


def generic_exception_handler(
    exc: Exception,
    stream: TextIO | None = None,
    manifest_path: Optional[str] = None,
) -> int:
    """
    Обработчик для всех остальных (непредвиденных) исключений.

    Логирует ошибку с трейсбэком и возвращает код ошибки выполнения.

    Args:
        exc: Экземпляр непредвиденного исключения.
        stream: Поток для вывода (по умолчанию stderr).
        manifest_path: Путь к манифесту прогона, если он успел появиться.

    Returns:
        int: Код завершения EXIT_RUNTIME.
    """
    log.exception(f"Необработанное исключение во время выполнения команды: {exc}")
    report = ErrorReport(
        error_type="internal_error",
        error_message="Произошла непредвиденная внутренняя ошибка.",
        extra_info={"manifest": manifest_path} if manifest_path else None,
    )
    print(report.model_dump_json(), file=stream or sys.stderr)
    return EXIT_RUNTIME


def handle_exception(
    exc: Exception,
    stream: TextIO | None = None,
    manifest_path: Optional[str] = None,
) -> int:
    """Выбирает обработчик по типу исключения."""
    if isinstance(exc, ToolkitError):
        return toolkit_exception_handler(exc, stream, manifest_path)
    return generic_exception_handler(exc, stream, manifest_path)
