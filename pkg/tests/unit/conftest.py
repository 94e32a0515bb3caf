from pathlib import Path
from unittest.mock import MagicMock

import pytest

from src.repositories import (
    CheckpointRepository,
    DatasetRepository,
    LexiconRepository,
    ManifestRepository,
    ReferenceRepository,
)
from src.services import DatasetService, EvaluationService, TrainingService

# --- Фикстуры для моков репозиториев ---


# Фикстура для мока DatasetRepository
@pytest.fixture
def mock_dataset_repo() -> MagicMock:
    repo = MagicMock(spec=DatasetRepository)
    repo.checksum.return_value = "0" * 64
    return repo


# Фикстура для мока ReferenceRepository
@pytest.fixture
def mock_reference_repo() -> MagicMock:
    repo = MagicMock(spec=ReferenceRepository)
    repo.for_source.return_value = {}
    repo.ablation.return_value = {}
    return repo


# Фикстура для мока LexiconRepository
@pytest.fixture
def mock_lexicon_repo() -> MagicMock:
    return MagicMock(spec=LexiconRepository)


# Фикстура для мока CheckpointRepository
@pytest.fixture
def mock_checkpoint_repo(tmp_path: Path) -> MagicMock:
    repo = MagicMock(spec=CheckpointRepository)
    repo.root = tmp_path
    repo.save.side_effect = lambda model, preprocess, *subdirs: tmp_path.joinpath(*subdirs)
    return repo


# Настоящий репозиторий манифестов во временном каталоге
@pytest.fixture
def manifest_repo(tmp_path: Path) -> ManifestRepository:
    return ManifestRepository(tmp_path / "run")


# --- Фикстуры сервисов ---


@pytest.fixture
def training_service(mock_checkpoint_repo, mock_reference_repo, mock_dataset_repo, textprep_service) -> TrainingService:
    """Сервис обучения с настоящими метриками и разбиениями, чекпойнты - мок."""
    return TrainingService(
        mock_checkpoint_repo,
        EvaluationService(mock_reference_repo),
        DatasetService(mock_dataset_repo),
        textprep_service,
    )
