"""Фабрики репозиториев и сервисов для подкоманд CLI."""

from functools import lru_cache
from pathlib import Path

from src.repositories import (
    CheckpointRepository,
    DatasetRepository,
    ManifestRepository,
    ReferenceRepository,
)
from src.repositories.lexicon import get_lexicon_repository
from src.services import (
    AblationService,
    AttributionService,
    CalibrationService,
    DatasetService,
    EvaluationService,
    FailureService,
    TextprepService,
    TrainingService,
)

# --- Фабрики Репозиториев ---


def get_dataset_repository() -> DatasetRepository:
    return DatasetRepository()


def get_reference_repository() -> ReferenceRepository:
    return ReferenceRepository()


def get_checkpoint_repository(root: Path) -> CheckpointRepository:
    # Чекпойнты живут внутри каталога прогона
    return CheckpointRepository(root)


def get_manifest_repository(root: Path) -> ManifestRepository:
    return ManifestRepository(root)


# --- Фабрики Сервисов ---


# Словари загружаются один раз на процесс
@lru_cache
def get_textprep_service() -> TextprepService:
    return TextprepService(get_lexicon_repository())


def get_dataset_service() -> DatasetService:
    return DatasetService(get_dataset_repository())


def get_evaluation_service() -> EvaluationService:
    return EvaluationService(get_reference_repository())


def get_calibration_service() -> CalibrationService:
    return CalibrationService()


# TrainingService зависит от репозитория чекпойнтов и трех сервисов
def get_training_service(out: Path) -> TrainingService:
    return TrainingService(
        repo=get_checkpoint_repository(out),
        evaluation_service=get_evaluation_service(),
        dataset_service=get_dataset_service(),
        textprep_service=get_textprep_service(),
    )


def get_attribution_service() -> AttributionService:
    return AttributionService(repo=get_lexicon_repository(), textprep_service=get_textprep_service())


def get_failure_service() -> FailureService:
    return FailureService(repo=get_lexicon_repository(), textprep_service=get_textprep_service())


# AblationService пишет манифесты вариантов в каталог прогона
def get_ablation_service(out: Path) -> AblationService:
    return AblationService(
        repo=get_manifest_repository(out),
        training_service=get_training_service(out),
        dataset_service=get_dataset_service(),
        evaluation_service=get_evaluation_service(),
        reference_repo=get_reference_repository(),
    )
