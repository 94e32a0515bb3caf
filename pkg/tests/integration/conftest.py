from pathlib import Path
from typing import Callable, List

import pytest

from src.main import dispatch
from src.repositories import DatasetRepository
from src.schemas.model import TINY_BACKBONE_ID
from src.services import DatasetService

# --- Запуск CLI ---


# Фикстура для вызова CLI в процессе теста
@pytest.fixture
def run_cli() -> Callable[..., int]:
    """Возвращает функцию, которая выполняет подкоманду и отдает код завершения."""

    def _run(*argv) -> int:
        return dispatch([str(arg) for arg in argv])

    return _run


# Флаги быстрого обучения на крошечном энкодере
@pytest.fixture
def train_flags() -> List[str]:
    return [
        "--backbone", TINY_BACKBONE_ID,
        "--head", "16",
        "--max-seq-len", "32",
        "--preprocess", "BASIC",
        "--folds", "3",
        "--epochs", "2",
        "--patience", "1",
        "--batch-size", "8",
        "--lr", "0.001",
        "--seed", "7",
    ]  # fmt: skip


# --- Данные и прогоны ---


# Гармонизированный TSV с синтетическим корпусом
@pytest.fixture
def dataset_file(tmp_path: Path, make_dataset) -> Path:
    service = DatasetService(DatasetRepository())
    return service.write_dataset(make_dataset(48, seed=1), tmp_path / "data.tsv")


# Фикстура готового прогона train
@pytest.fixture
def trained_run(tmp_path: Path, run_cli, dataset_file: Path, train_flags: List[str]) -> Path:
    """Обучает 3 фолда и возвращает каталог прогона."""
    out = tmp_path / "train"
    assert run_cli("train", "--dataset", dataset_file, *train_flags, "--out", out) == 0
    return out
