"""
Пакет файловых репозиториев.

Инкапсулирует чтение и запись датасетов, словарей, эталонных таблиц,
чекпойнтов и манифестов прогонов.
"""

from .checkpoint import CheckpointRepository
from .dataset import DatasetRepository
from .lexicon import LexiconRepository
from .manifest import ManifestRepository
from .reference import ReferenceRepository

# Экспортируем репозитории
__all__ = [
    "CheckpointRepository",
    "DatasetRepository",
    "LexiconRepository",
    "ManifestRepository",
    "ReferenceRepository",
]
