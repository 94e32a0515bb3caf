"""Сервис загрузки, гармонизации и разбиения датасетов."""

import math
from pathlib import Path
from typing import List, Optional

import numpy as np

from src.core.exceptions import ContractViolationError
from src.core.logging import log
from src.repositories.dataset import DatasetRepository
from src.schemas.dataset import (
    DatasetSplit,
    FoldPlan,
    LabeledDataset,
    LoaderConfig,
    Source,
)
from src.services.base_service import BaseService

# Допуск сравнения доли BULLY с опубликованной (цифры в статьях округлены)
SHARE_TOLERANCE = 1e-3


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


class DatasetService(BaseService[DatasetRepository]):
    """Загрузка корпусов и воспроизводимые K-fold разбиения."""

    def load_dataset(
        self, source: Source, path: Path, config_path: Optional[Path] = None
    ) -> LabeledDataset:
        """
        Загружает корпус и гармонизирует метки в бинарные.

        Если число образцов или доля BULLY расходятся с опубликованными,
        расхождение логируется и записывается в датасет, загрузка продолжается.

        Args:
            source (Source): Источник.
            path (Path): Файл корпуса.
            config_path (Optional[Path]): Своя конфигурация загрузчика.

        Returns:
            LabeledDataset: Датасет.

        Raises:
            DatasetFormatError: Некорректная строка.
            UnknownLabelError: Метка вне таблицы соответствия.
            ConfigError: Нет или некорректна конфигурация загрузчика.
        """
        log.info(f"Загрузка датасета {source.value} из {path}")
        if source == Source.CUSTOM and config_path is None:
            return self.repo.read_harmonized(path)

        config = self.repo.loader_config(source, config_path)
        samples = self.repo.read_source(path, config)
        dataset = LabeledDataset(samples=samples, source=source)

        discrepancy = self._discrepancy(dataset, config)
        if discrepancy:
            log.bind(source=source.value).warning(f"Расхождение с опубликованными цифрами: {discrepancy}")
            dataset = dataset.model_copy(update={"discrepancy": discrepancy})

        log.success(
            f"Датасет {source.value}: {len(dataset)} образцов, доля BULLY {dataset.positive_share:.4f}"
        )
        return dataset

    @staticmethod
    def _discrepancy(dataset: LabeledDataset, config: LoaderConfig) -> Optional[str]:
        problems: List[str] = []
        if config.expected_total is not None and len(dataset) != config.expected_total:
            problems.append(f"образцов {len(dataset)}, ожидалось {config.expected_total}")
        if (
            config.expected_positive_share is not None
            and abs(dataset.positive_share - config.expected_positive_share) > SHARE_TOLERANCE
        ):
            problems.append(
                f"доля BULLY {dataset.positive_share:.4f}, ожидалось {config.expected_positive_share}"
            )
        return "; ".join(problems) or None

    def read_dataset(self, path: Path) -> LabeledDataset:
        """Читает гармонизированный TSV."""
        return self.repo.read_harmonized(path)

    def write_dataset(self, dataset: LabeledDataset, path: Path) -> Path:
        return self.repo.write_harmonized(dataset, path)

    def checksum(self, dataset: LabeledDataset) -> str:
        return self.repo.checksum(dataset)

    # --- Разбиения ---

    def make_folds(
        self, dataset: LabeledDataset, k: int, seed: int, stratified: bool = True
    ) -> FoldPlan:
        """
        Разбивает датасет на K фолдов.

        Индексы перемешиваются генератором с зерном seed; при стратификации
        перемешивание идет внутри каждого класса, классы выкладываются подряд
        (сначала BULLY) и раздаются по фолдам по кругу. Так размеры фолдов
        различаются не больше чем на 1, как и число BULLY в них.

        Args:
            dataset (LabeledDataset): Датасет.
            k (int): Число фолдов.
            seed (int): Зерно.
            stratified (bool): Стратификация по метке.

        Returns:
            FoldPlan: Назначение фолда каждому образцу.

        Raises:
            ContractViolationError: k < 2 или k больше числа образцов.
        """
        self._require(k >= 2, f"k={k}: нужно минимум 2 фолда")
        if k > len(dataset):
            raise ContractViolationError(
                f"k={k} больше числа образцов ({len(dataset)})",
                extra={"k": k, "n": len(dataset)},
            )

        rng = np.random.default_rng(seed)
        labels = np.asarray(dataset.labels)
        if stratified:
            order = np.concatenate(
                [rng.permutation(np.flatnonzero(labels == label)) for label in (1, 0)]
            )
        else:
            order = rng.permutation(len(dataset))

        assignments = [0] * len(dataset)
        for position, index in enumerate(order):
            assignments[int(index)] = position % k

        plan = FoldPlan(k=k, seed=seed, assignments=assignments, stratified=stratified)
        log.debug(f"Разбиение на {k} фолдов (seed={seed}): размеры {plan.fold_sizes()}")
        return plan

    def split_fold(
        self,
        dataset: LabeledDataset,
        plan: FoldPlan,
        fold: int,
        val_fraction: float,
    ) -> DatasetSplit:
        """
        Делит датасет на train/val/test для фолда.

        test - члены фолда; val - доля val_fraction остатка (стратифицированно,
        с зерном плана и номером фолда); train - все остальное. Порядок
        образцов внутри выборок совпадает с порядком датасета.

        Raises:
            ContractViolationError: Фолд вне [0, k), val_fraction вне (0, 1)
                или план не соответствует датасету.
        """
        self._require(0 <= fold < plan.k, f"fold={fold} вне диапазона [0, {plan.k})")
        self._require(0.0 < val_fraction < 1.0, f"val_fraction={val_fraction} вне (0, 1)")
        self._require(
            len(plan.assignments) == len(dataset), "План разбиения построен для другого датасета"
        )

        test_indices = plan.members(fold)
        rest = [index for index, assigned in enumerate(plan.assignments) if assigned != fold]
        val_indices = self._stratified_sample(
            dataset, rest, val_fraction, np.random.default_rng([plan.seed, fold])
        )
        val_set = set(val_indices)
        train_indices = [index for index in rest if index not in val_set]

        return DatasetSplit(
            fold=fold,
            train=dataset.subset(train_indices),
            val=dataset.subset(sorted(val_indices)),
            test=dataset.subset(test_indices),
        )

    def holdout_split(
        self, dataset: LabeledDataset, val_fraction: float, seed: int
    ) -> DatasetSplit:
        """Разбиение для production-модели: вся выборка, кроме val-среза, идет в train."""
        self._require(len(dataset) > 0, "Пустой датасет")
        self._require(0.0 < val_fraction < 1.0, f"val_fraction={val_fraction} вне (0, 1)")
        indices = list(range(len(dataset)))
        val_indices = set(
            self._stratified_sample(dataset, indices, val_fraction, np.random.default_rng(seed))
        )
        return DatasetSplit(
            fold=None,
            train=dataset.subset([i for i in indices if i not in val_indices]),
            val=dataset.subset(sorted(val_indices)),
            test=dataset.subset([]),
        )

    @staticmethod
    def _stratified_sample(
        dataset: LabeledDataset,
        indices: List[int],
        fraction: float,
        rng: np.random.Generator,
    ) -> List[int]:
        if len(indices) < 2:
            return []
        size = min(max(round_half_up(fraction * len(indices)), 1), len(indices) - 1)
        positives = [i for i in indices if dataset.samples[i].label == 1]
        negatives = [i for i in indices if dataset.samples[i].label == 0]
        n_positive = min(round_half_up(size * len(positives) / len(indices)), len(positives))
        n_negative = min(size - n_positive, len(negatives))

        chosen = [positives[int(i)] for i in rng.permutation(len(positives))[:n_positive]]
        chosen += [negatives[int(i)] for i in rng.permutation(len(negatives))[:n_negative]]
        return chosen

    @staticmethod
    def class_weights(dataset: LabeledDataset) -> List[float]:
        """
        Веса классов обратно пропорционально частоте: n / (2 * n_c).

        Отсутствующий класс получает вес 1.
        """
        total = len(dataset)
        return [
            total / (2 * dataset.class_counts.get(label, 0)) if dataset.class_counts.get(label, 0) else 1.0
            for label in (0, 1)
        ]
