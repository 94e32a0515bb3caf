"""Схемы Pydantic для сетки абляций."""

from enum import Enum
from typing import List, Optional

from pydantic import Field, model_validator

from src.schemas.base import TunedModel
from src.schemas.metrics import MetricSet


class AxisName(str, Enum):
    """Ось абляции."""

    FREEZING = "FREEZING"
    HEAD_DEPTH = "HEAD_DEPTH"
    PREPROCESSING = "PREPROCESSING"


class AblationVariant(TunedModel):
    """
    Вариант оси: переопределяет ровно одно измерение базовой конфигурации.

    Fields:
        name (str): Имя строки отчета (например, EMB+1-2).
        title (str): Подпись в отчете.
        freeze (Optional[str]): Пресет FreezeSpec.
        hidden_sizes (Optional[List[int]]): Скрытые слои головы.
        preprocess (Optional[str]): Пресет PreprocessConfig.
    """

    name: str = Field(..., min_length=1)
    title: str = ""
    freeze: Optional[str] = None
    hidden_sizes: Optional[List[int]] = None
    preprocess: Optional[str] = None


class AblationAxis(TunedModel):
    """Ось с упорядоченным списком вариантов."""

    name: AxisName
    variants: List[AblationVariant] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _unique_variants(self) -> "AblationAxis":
        names = [variant.name for variant in self.variants]
        if len(set(names)) != len(names):
            raise ValueError(f"Повторяющиеся варианты на оси {self.name.value}: {names}")
        return self


class GridBase(TunedModel):
    """Базовая конфигурация, от которой отсчитываются варианты."""

    freeze: str = "ABLATION_BEST"
    hidden_sizes: List[int] = Field(default_factory=lambda: [512, 256, 128])
    preprocess: str = "ALL"


class GridSpec(TunedModel):
    """
    Декларативное описание сетки абляций (YAML).

    Fields:
        base (GridBase): Базовая конфигурация.
        axes (List[AblationAxis]): Оси в порядке отчета.
        full_factorial (bool): Полный перебор вместо one-factor-at-a-time.
        folds_used (int): Сколько фолдов общего разбиения оценивает каждый вариант.
    """

    base: GridBase = Field(default_factory=GridBase)
    axes: List[AblationAxis] = Field(..., min_length=1)
    full_factorial: bool = False
    folds_used: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _unique_axes(self) -> "GridSpec":
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("Каждая ось может встречаться в сетке только один раз")
        return self

    @property
    def row_count(self) -> int:
        if not self.full_factorial:
            return sum(len(axis.variants) for axis in self.axes)
        total = 1
        for axis in self.axes:
            total *= len(axis.variants)
        return total


class AblationResult(TunedModel):
    """
    Результат одного варианта.

    Fields:
        axis (str): Ось (или FACTORIAL в режиме полного перебора).
        variant (str): Имя варианта.
        metrics (Optional[MetricSet]): Метрики (None у упавшего варианта).
        runtime (float): Длительность в секундах.
        manifest_ref (Optional[str]): Путь к манифесту варианта.
        is_best (bool): Лучший на своей оси по accuracy, затем F1.
        failed (bool): Вариант упал.
        error (Optional[str]): Диагностика падения.
    """

    axis: str
    variant: str
    title: str = ""
    metrics: Optional[MetricSet] = None
    runtime: float = Field(default=0.0, ge=0.0)
    manifest_ref: Optional[str] = None
    is_best: bool = False
    failed: bool = False
    error: Optional[str] = None


class AblationReport(TunedModel):
    """Сводный отчет в раскладке таблицы абляций."""

    results: List[AblationResult]
    text: str
