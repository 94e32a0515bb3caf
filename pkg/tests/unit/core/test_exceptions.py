import io
import json
from unittest.mock import MagicMock, patch

import pytest

from src.core.exceptions import (
    EXIT_RUNTIME,
    EXIT_VALIDATION,
    ArtifactError,
    BackboneError,
    ConfigError,
    ContractViolationError,
    CrossValidationError,
    DatasetFormatError,
    ToolkitError,
    TrainingAbortedError,
    UnknownLabelError,
    ValidationError,
    handle_exception,
)

# --- Коды завершения ---


@pytest.mark.parametrize(
    "exc, exit_code, error_type",
    [
        (ValidationError("bad flag"), EXIT_VALIDATION, "validation_error"),
        (ContractViolationError(), EXIT_VALIDATION, "contract_violation"),
        (ConfigError(), EXIT_VALIDATION, "config_error"),
        (DatasetFormatError(3, "пустой текст"), EXIT_VALIDATION, "dataset_format_error"),
        (UnknownLabelError("HATE", ["NAG", "OAG"]), EXIT_VALIDATION, "unknown_label"),
        (BackboneError(), EXIT_RUNTIME, "backbone_error"),
        (TrainingAbortedError("nan", fold=1, epoch=2), EXIT_RUNTIME, "training_aborted"),
        (CrossValidationError(), EXIT_RUNTIME, "cross_validation_error"),
        (ArtifactError(), EXIT_RUNTIME, "artifact_error"),
    ],
)
def test_exit_codes_and_types(exc: ToolkitError, exit_code: int, error_type: str):
    """Ошибки валидации завершаются кодом 1, ошибки выполнения - кодом 2."""
    assert exc.exit_code == exit_code
    assert exc.error_type == error_type


def test_dataset_format_error_names_row():
    exc = DatasetFormatError(17, "ожидалось 3 колонки, получено 2")
    assert exc.row == 17
    assert "Строка 17" in exc.detail
    assert exc.extra["row"] == 17


def test_unknown_label_error_lists_permitted_labels():
    exc = UnknownLabelError("HATE", ["OAG", "NAG", "CAG"], row=5)
    assert exc.permitted == ["CAG", "NAG", "OAG"]
    assert "'HATE'" in exc.detail
    assert "строка 5" in exc.detail
    assert exc.extra == {"label": "HATE", "permitted": ["CAG", "NAG", "OAG"], "row": 5}


# --- Тесты для handle_exception ---


@patch("src.core.exceptions.log")
def test_toolkit_exception_handler_prints_report(mock_log: MagicMock):
    """Отчет об ошибке - одна JSON-строка с типом, сообщением и флагом."""
    stream = io.StringIO()
    exc = ValidationError("--folds: нужно минимум 2", extra={"flag": "--folds"})

    code = handle_exception(exc, stream=stream)

    assert code == EXIT_VALIDATION
    report = json.loads(stream.getvalue())
    assert report["result"] is False
    assert report["error_type"] == "validation_error"
    assert report["error_message"] == "--folds: нужно минимум 2"
    assert report["extra_info"] == {"flag": "--folds"}
    mock_log.bind.assert_called_once()


@patch("src.core.exceptions.log")
def test_toolkit_exception_handler_adds_manifest(mock_log: MagicMock):
    stream = io.StringIO()
    exc = TrainingAbortedError("Нефинитная функция потерь", fold=0, epoch=1)

    code = handle_exception(exc, stream=stream, manifest_path="/runs/x/manifest.txt")

    assert code == EXIT_RUNTIME
    report = json.loads(stream.getvalue())
    assert report["extra_info"]["manifest"] == "/runs/x/manifest.txt"
    assert report["extra_info"]["fold"] == 0


@patch("src.core.exceptions.log")
def test_generic_exception_handler(mock_log: MagicMock):
    """Непредвиденная ошибка: код 2, сообщение без деталей, трейсбэк в логе."""
    stream = io.StringIO()

    code = handle_exception(RuntimeError("Something went terribly wrong"), stream=stream)

    assert code == EXIT_RUNTIME
    report = json.loads(stream.getvalue())
    assert report["error_type"] == "internal_error"
    assert "terribly" not in report["error_message"]
    assert report["extra_info"] is None
    mock_log.exception.assert_called_once()


@pytest.mark.parametrize(
    "exc, level",
    [(ConfigError("Неизвестный пресет"), "WARNING"), (ArtifactError("Чекпойнт неполон"), "ERROR")],
)
@patch("src.core.exceptions.log")
def test_toolkit_exception_log_level(mock_log: MagicMock, exc: ToolkitError, level: str):
    handle_exception(exc, stream=io.StringIO())
    assert mock_log.bind.return_value.log.call_args.args[0] == level
