"""Схемы Pydantic для метрик качества."""

from typing import Dict, List, Optional

from pydantic import Field, model_validator

from src.schemas.base import CanonicalModel, TunedModel

# Метрики, участвующие в сравнениях и агрегатах
METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "macro_f1", "roc_auc")


class MetricSet(CanonicalModel):
    """
    Набор метрик бинарной классификации (положительный класс BULLY).

    Fields:
        accuracy, precision, recall, f1 (float): Метрики в [0, 1].
        macro_f1 (float): Невзвешенное среднее F1 по двум классам.
        specificity (float): Доля верно распознанных NON_BULLY.
        roc_auc (Optional[float]): None, если AUC не определен.
        support (Dict[str, int]): Число образцов каждого класса.
        confusion (List[List[int]]): [[TN, FP], [FN, TP]].
        threshold (float): Порог для предсказаний.
        degenerate (bool): В разметке нет одного из классов.
    """

    accuracy: float = Field(..., ge=0.0, le=1.0)
    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    f1: float = Field(..., ge=0.0, le=1.0)
    macro_f1: float = Field(..., ge=0.0, le=1.0)
    specificity: float = Field(..., ge=0.0, le=1.0)
    roc_auc: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    support: Dict[str, int]
    confusion: List[List[int]]
    threshold: float = 0.5
    degenerate: bool = False

    @model_validator(mode="after")
    def _check_confusion(self) -> "MetricSet":
        if len(self.confusion) != 2 or any(len(row) != 2 for row in self.confusion):
            raise ValueError("confusion должна быть матрицей 2x2")
        total = sum(sum(row) for row in self.confusion)
        if total != sum(self.support.values()):
            raise ValueError("Сумма confusion не равна числу образцов")
        return self

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.confusion)

    def value(self, name: str) -> Optional[float]:
        return getattr(self, name)


class MetricSummary(TunedModel):
    """Среднее и выборочное стандартное отклонение метрики по фолдам."""

    mean: float
    std: float
    n: int


class AggregateMetrics(CanonicalModel):
    """Агрегат метрик по успешным фолдам."""

    metrics: Dict[str, MetricSummary]
    n_folds: int
    failed_folds: List[int] = Field(default_factory=list)


class ComparisonRow(TunedModel):
    """Строка сравнительной таблицы."""

    name: str
    metrics: MetricSet
    deltas: Dict[str, float] = Field(default_factory=dict)


class ComparisonTable(TunedModel):
    """Сравнительная таблица (строки отсортированы по F1 по убыванию)."""

    rows: List[ComparisonRow]
    text: str
