"""Сервис метрик бинарной классификации и сравнительных таблиц."""

from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from src.core.exceptions import ContractViolationError
from src.core.logging import log
from src.repositories.reference import ReferenceRepository, ReferenceTable
from src.schemas.dataset import Source
from src.schemas.metrics import (
    METRIC_NAMES,
    AggregateMetrics,
    ComparisonRow,
    ComparisonTable,
    MetricSet,
    MetricSummary,
)
from src.services.base_service import BaseService

DEFAULT_THRESHOLD = 0.5

# Колонки сравнительной таблицы
TABLE_COLUMNS = {
    "accuracy": "Accuracy",
    "precision": "Precision",
    "recall": "Recall",
    "f1": "F1",
    "macro_f1": "Macro-F1",
    "roc_auc": "ROC-AUC",
}


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


def _harmonic(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


def roc_auc(labels: np.ndarray, scores: np.ndarray) -> Optional[float]:
    """
    ROC-AUC по ранговой формуле (ничьи получают средний ранг).

    Returns:
        Optional[float]: None, если в разметке нет одного из классов.
    """
    n_positive = int(labels.sum())
    n_negative = len(labels) - n_positive
    if n_positive == 0 or n_negative == 0:
        return None
    ranks = rankdata(scores, method="average")
    rank_sum = float(ranks[labels == 1].sum())
    return (rank_sum - n_positive * (n_positive + 1) / 2) / (n_positive * n_negative)


def _format_percent(value: Optional[float]) -> str:
    return "-" if value is None else f"{value * 100:.2f}"


class EvaluationService(BaseService[ReferenceRepository]):
    """Метрики, сравнение с эталоном и агрегирование по фолдам."""

    def compute_metrics(
        self,
        labels: Sequence[int],
        scores: Sequence[float],
        threshold: float = DEFAULT_THRESHOLD,
    ) -> MetricSet:
        """
        Считает метрики по вероятностям класса BULLY.

        Предсказание BULLY, если score >= threshold. Precision/recall/F1 -
        для положительного класса; macro-F1 - среднее F1 двух классов.

        Args:
            labels (Sequence[int]): Метки 0/1.
            scores (Sequence[float]): Вероятности BULLY в [0, 1].
            threshold (float): Порог.

        Returns:
            MetricSet: Метрики. Если в разметке один класс, degenerate=True.

        Raises:
            ContractViolationError: Разные длины, пустой вход или score вне [0, 1].
        """
        y = np.asarray(labels, dtype=np.int64)
        p = np.asarray(scores, dtype=np.float64)
        if len(y) == 0 or len(y) != len(p):
            raise ContractViolationError(
                f"compute_metrics: длины меток ({len(y)}) и оценок ({len(p)}) должны совпадать и быть >= 1"
            )
        if np.any((p < 0.0) | (p > 1.0)) or not np.all(np.isfinite(p)):
            raise ContractViolationError("compute_metrics: оценки должны лежать в [0, 1]")
        if np.any((y != 0) & (y != 1)):
            raise ContractViolationError("compute_metrics: метки должны быть 0 или 1")

        predicted = (p >= threshold).astype(np.int64)
        tp = int(np.sum((predicted == 1) & (y == 1)))
        fp = int(np.sum((predicted == 1) & (y == 0)))
        fn = int(np.sum((predicted == 0) & (y == 1)))
        tn = int(np.sum((predicted == 0) & (y == 0)))

        precision = _ratio(tp, tp + fp)
        recall = _ratio(tp, tp + fn)
        specificity = _ratio(tn, tn + fp)
        negative_f1 = _harmonic(_ratio(tn, tn + fn), specificity)
        f1 = _harmonic(precision, recall)

        degenerate = tp + fn == 0 or tn + fp == 0
        if degenerate:
            log.warning(
                f"Вырожденная разметка: BULLY={tp + fn}, NON_BULLY={tn + fp}; AUC не определен"
            )

        return MetricSet(
            accuracy=_ratio(tp + tn, len(y)),
            precision=precision,
            recall=recall,
            f1=f1,
            macro_f1=(f1 + negative_f1) / 2,
            specificity=specificity,
            roc_auc=roc_auc(y, p),
            support={"0": tn + fp, "1": tp + fn},
            confusion=[[tn, fp], [fn, tp]],
            threshold=threshold,
            degenerate=degenerate,
        )

    def threshold_sweep(
        self, labels: Sequence[int], scores: Sequence[float], thresholds: Sequence[float]
    ) -> List[MetricSet]:
        """Метрики для каждого порога (по возрастанию порогов)."""
        return [self.compute_metrics(labels, scores, threshold) for threshold in sorted(thresholds)]

    def aggregate(
        self, metric_sets: Sequence[MetricSet], failed_folds: Sequence[int] = ()
    ) -> AggregateMetrics:
        """
        Невзвешенное среднее и выборочное стандартное отклонение по фолдам.

        Фолды без AUC не участвуют в агрегате AUC.
        """
        summaries: Dict[str, MetricSummary] = {}
        for name in METRIC_NAMES:
            values = np.array(
                [metrics.value(name) for metrics in metric_sets if metrics.value(name) is not None],
                dtype=np.float64,
            )
            if len(values) == 0:
                continue
            std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
            summaries[name] = MetricSummary(mean=float(np.mean(values)), std=std, n=len(values))
        return AggregateMetrics(
            metrics=summaries, n_folds=len(metric_sets), failed_folds=list(failed_folds)
        )

    # --- Сравнительные таблицы ---

    def reference_for(self, source: Source) -> ReferenceTable:
        """Опубликованные значения для источника (в процентах)."""
        return self.repo.for_source(source)

    def compare_table(
        self,
        results: Mapping[str, MetricSet],
        reference: Optional[ReferenceTable] = None,
    ) -> ComparisonTable:
        """
        Сравнительная таблица: строки по F1 по убыванию, при равенстве - по имени.

        Если задан эталон, для каждой строки считаются разности в процентных
        пунктах: с одноименной строкой эталона, а если она не найдена и эталон
        состоит из одной строки - с ней.

        Args:
            results (Mapping[str, MetricSet]): Имя модели -> метрики.
            reference (Optional[ReferenceTable]): Модель -> метрика -> значение в процентах.

        Returns:
            ComparisonTable: Строки и отформатированный текст.

        Raises:
            ContractViolationError: Если results пуст.
        """
        self._require(bool(results), "compare_table: нет результатов для сравнения")
        reference = reference or {}

        rows: List[ComparisonRow] = []
        for name in sorted(results, key=lambda key: (-results[key].f1, key)):
            metrics = results[name]
            target = reference.get(name)
            if target is None and len(reference) == 1:
                target = next(iter(reference.values()))
            deltas: Dict[str, float] = {}
            for metric in METRIC_NAMES:
                value = metrics.value(metric)
                if target and metric in target and value is not None:
                    deltas[metric] = round(value * 100 - target[metric], 2)
            rows.append(ComparisonRow(name=name, metrics=metrics, deltas=deltas))

        text = self._render(rows, reference)
        log.debug(f"Сравнительная таблица: {len(rows)} строк, эталон: {len(reference)} строк")
        return ComparisonTable(rows=rows, text=text)

    @staticmethod
    def _render(rows: List[ComparisonRow], reference: ReferenceTable) -> str:
        delta_metrics = [name for name in METRIC_NAMES if any(name in row.deltas for row in rows)]
        name_width = max([len(row.name) for row in rows] + [len(name) + 6 for name in reference] + [5])

        header = ["Model".ljust(name_width)] + [f"{TABLE_COLUMNS[name]:>9}" for name in METRIC_NAMES]
        header += [f"{'d' + TABLE_COLUMNS[name]:>10}" for name in delta_metrics]
        lines = [" ".join(header), "-" * len(" ".join(header))]

        for row in rows:
            cells = [row.name.ljust(name_width)]
            cells += [f"{_format_percent(row.metrics.value(name)):>9}" for name in METRIC_NAMES]
            cells += [
                f"{row.deltas[name]:>+10.2f}" if name in row.deltas else f"{'':>10}"
                for name in delta_metrics
            ]
            lines.append(" ".join(cells))

        for name, values in sorted(reference.items()):
            cells = [f"[ref] {name}".ljust(name_width)]
            cells += [
                f"{values[metric]:>9.2f}" if metric in values else f"{'-':>9}" for metric in METRIC_NAMES
            ]
            lines.append(" ".join(cells))
        return "\n".join(lines) + "\n"
