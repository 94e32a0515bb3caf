"""
Пакет сервисов инструментария.

Содержит логику предобработки, разбиений, обучения, оценки, объяснений и
абляций, координирует работу репозиториев и готовит результаты для команд CLI.
"""

from .ablation_service import AblationService
from .attribution_service import AttributionService
from .calibration_service import CalibrationService
from .dataset_service import DatasetService
from .evaluation_service import EvaluationService
from .failure_service import FailureService
from .textprep_service import TextprepService
from .training_service import TrainingService

# Экспортируем сервисы
__all__ = [
    "AblationService",
    "AttributionService",
    "CalibrationService",
    "DatasetService",
    "EvaluationService",
    "FailureService",
    "TextprepService",
    "TrainingService",
]
