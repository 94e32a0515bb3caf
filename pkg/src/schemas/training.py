"""Схемы Pydantic для обучения и кросс-валидации."""

from typing import List, Optional

from pydantic import Field, model_validator

from src.schemas.base import CanonicalModel, TunedModel
from src.schemas.metrics import AggregateMetrics, MetricSet


class TrainConfig(CanonicalModel):
    """
    Гиперпараметры обучения.

    Fields:
        learning_rate (float): Скорость обучения AdamW.
        weight_decay (float): Развязанный weight decay.
        max_epochs (int): Максимум эпох.
        patience (int): Эпох без улучшения до остановки.
        batch_size (int): Размер батча.
        k_folds (int): Число фолдов.
        seed (int): Зерно.
        val_fraction (float): Доля валидации от не-тестовой части.
        stratified (bool): Стратификация фолдов.
        class_weighted (bool): Взвешивание кросс-энтропии по частотам классов.
    """

    learning_rate: float = Field(default=2e-5, gt=0.0)
    weight_decay: float = Field(default=0.01, ge=0.0)
    max_epochs: int = Field(default=10, gt=0)
    patience: int = Field(default=3, gt=0)
    batch_size: int = Field(default=16, gt=0)
    k_folds: int = Field(default=5, ge=2)
    seed: int = Field(default=42, ge=0)
    val_fraction: float = Field(default=0.125, gt=0.0, lt=1.0)
    stratified: bool = True
    class_weighted: bool = False

    @model_validator(mode="after")
    def _patience_within_epochs(self) -> "TrainConfig":
        if self.patience > self.max_epochs:
            raise ValueError("patience не может превышать max_epochs")
        return self


class EpochRecord(TunedModel):
    """
    Итог одной эпохи.

    Fields:
        epoch (int): Номер эпохи (с 1).
        train_loss (float): Средняя кросс-энтропия по батчам.
        val_f1 (float): F1 на валидации.
        is_best (bool): Строго лучше всех предыдущих эпох.
    """

    epoch: int = Field(..., ge=1)
    train_loss: float
    val_f1: float
    is_best: bool


class FoldResult(CanonicalModel):
    """
    Итог обучения одного фолда.

    Fields:
        fold (int): Номер фолда (-1 для production-модели).
        epochs (List[EpochRecord]): Записи эпох.
        best_epoch (int): Эпоха с максимальным val F1 (самая ранняя при равенстве).
        test_metrics (Optional[MetricSet]): Метрики на тесте для лучшего чекпойнта.
        checkpoint_ref (Optional[str]): Путь к чекпойнту.
        failed (bool): Фолд прерван.
        error (Optional[str]): Диагностика прерывания.
    """

    fold: int
    epochs: List[EpochRecord] = Field(default_factory=list)
    best_epoch: int = 0
    test_metrics: Optional[MetricSet] = None
    checkpoint_ref: Optional[str] = None
    failed: bool = False
    error: Optional[str] = None

    @model_validator(mode="after")
    def _check_best_epoch(self) -> "FoldResult":
        if self.failed or not self.epochs:
            return self
        best_f1 = max(record.val_f1 for record in self.epochs)
        earliest = next(r.epoch for r in self.epochs if r.val_f1 == best_f1)
        if self.best_epoch != earliest:
            raise ValueError(
                f"best_epoch={self.best_epoch}, а максимум val F1 впервые на эпохе {earliest}"
            )
        return self

    @property
    def best_val_f1(self) -> float:
        return max((record.val_f1 for record in self.epochs), default=0.0)


class CrossValidationResult(TunedModel):
    """
    Результаты всех фолдов, их агрегат и метрики по объединенным
    out-of-fold предсказаниям успешных фолдов.
    """

    folds: List[FoldResult]
    aggregate: AggregateMetrics
    pooled: Optional[MetricSet] = None
