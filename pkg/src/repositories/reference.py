"""Репозиторий опубликованных эталонных результатов."""

from collections import defaultdict
from pathlib import Path
from typing import Dict, Tuple

from src.core.config import settings
from src.core.exceptions import ConfigError
from src.repositories.base import BaseRepository
from src.schemas.dataset import Source

REFERENCE_FILE = "reference_results.tsv"

# model -> metric -> value (в процентах)
ReferenceTable = Dict[str, Dict[str, float]]


class ReferenceRepository(BaseRepository):
    """Таблица `source, model, metric, value` с эталонными цифрами в процентах."""

    def __init__(self, root: Path | None = None):
        super().__init__(root or settings.RESOURCES_PATH)  # type: ignore[arg-type]

    def load(self) -> Dict[Tuple[str, str], Dict[str, float]]:
        """
        Все эталонные значения, сгруппированные по (источник, модель).

        Raises:
            ConfigError: Если строка таблицы некорректна.
        """
        table: Dict[Tuple[str, str], Dict[str, float]] = defaultdict(dict)
        for line_number, line in enumerate(self.iter_lines(self.path(REFERENCE_FILE)), start=1):
            columns = line.split("\t")
            if len(columns) != 4:
                raise ConfigError(f"{REFERENCE_FILE}: строка {line_number} должна содержать 4 колонки")
            source, model, metric, raw_value = (column.strip() for column in columns)
            try:
                table[(source, model)][metric] = float(raw_value)
            except ValueError as exc:
                raise ConfigError(
                    f"{REFERENCE_FILE}: строка {line_number}: '{raw_value}' не число"
                ) from exc
        return dict(table)

    def for_source(self, source: Source) -> ReferenceTable:
        """Строки сравнения моделей для источника (без строк абляции)."""
        return {
            model: metrics
            for (row_source, model), metrics in self.load().items()
            if row_source == source.value and "/" not in model
        }

    def ablation(self) -> Dict[Tuple[str, str], Dict[str, float]]:
        """Эталон абляции: (ось, вариант) -> метрики."""
        rows: Dict[Tuple[str, str], Dict[str, float]] = {}
        for (_, model), metrics in self.load().items():
            if "/" in model:
                axis, variant = model.split("/", 1)
                rows[(axis, variant)] = metrics
        return rows
