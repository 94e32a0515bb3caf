"""Сервис обучения: фолды, кросс-валидация и production-модель."""

import copy
import math
from typing import Callable, Dict, List, NamedTuple, Optional

import numpy as np
import torch
from torch import nn
from tqdm import tqdm

from src.core.config import settings
from src.core.exceptions import (
    ContractViolationError,
    CrossValidationError,
    TrainingAbortedError,
)
from src.core.logging import log
from src.models.classifier import Classifier
from src.models.factory import build_model, resolve_device, trainable_parameter_report
from src.repositories.checkpoint import CheckpointRepository
from src.repositories.manifest import fold_dir_name
from src.schemas.dataset import DatasetSplit, FoldPlan, LabeledDataset
from src.schemas.model import ModelConfig
from src.schemas.textprep import PreprocessConfig
from src.schemas.training import (
    CrossValidationResult,
    EpochRecord,
    FoldResult,
    TrainConfig,
)
from src.services.base_service import BaseService
from src.services.dataset_service import DatasetService
from src.services.evaluation_service import EvaluationService
from src.services.textprep_service import TextprepService

# Размер батча инференса: одинаков при обучении и при оценке чекпойнта
EVAL_BATCH_SIZE = 32
CHECKPOINT_DIR = "checkpoint"

ModelFactory = Callable[[], Classifier]


class EarlyStopping:
    """
    Отслеживает лучший val F1 и число эпох без строгого улучшения.

    Args:
        patience (int): Сколько эпох подряд без улучшения допускается.
    """

    def __init__(self, patience: int):
        self.patience = patience
        self.best_score = -math.inf
        self.best_epoch = 0
        self.epoch = 0
        self.bad_epochs = 0

    def update(self, score: float) -> bool:
        """Регистрирует эпоху; возвращает True, если она строго лучше всех предыдущих."""
        self.epoch += 1
        if score > self.best_score:
            self.best_score = score
            self.best_epoch = self.epoch
            self.bad_epochs = 0
            return True
        self.bad_epochs += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.bad_epochs >= self.patience


class FoldOutcome(NamedTuple):
    """Итог фолда вместе с восстановленной лучшей моделью и ее оценками на тесте."""

    result: FoldResult
    model: Classifier
    test_scores: np.ndarray


def seed_everything(seed: int) -> torch.Generator:
    """Фиксирует зерна torch/numpy; возвращает генератор порядка батчей."""
    torch.manual_seed(seed)
    np.random.seed(seed % 2**32)
    generator = torch.Generator()
    generator.manual_seed(seed)
    return generator


class TrainingService(BaseService[CheckpointRepository]):
    """
    Обучение по K-fold протоколу с ранней остановкой по val F1.

    Args:
        repo (CheckpointRepository): Каталог прогона для чекпойнтов.
        evaluation_service (EvaluationService): Метрики.
        dataset_service (DatasetService): Разбиения.
        textprep_service (TextprepService): Предобработка текстов.
    """

    def __init__(
        self,
        repo: CheckpointRepository,
        evaluation_service: EvaluationService,
        dataset_service: DatasetService,
        textprep_service: TextprepService,
    ):
        super().__init__(repo)
        self.evaluation_service = evaluation_service
        self.dataset_service = dataset_service
        self.textprep_service = textprep_service

    def model_factory(self, config: ModelConfig, seed: int) -> ModelFactory:
        """Фабрика свежих классификаторов с одинаковой инициализацией."""

        def factory() -> Classifier:
            return build_model(config, seed=seed).to(resolve_device())

        return factory

    # --- Фолд ---

    def train_fold(
        self,
        model_factory: ModelFactory,
        split: DatasetSplit,
        config: TrainConfig,
        preprocess: PreprocessConfig,
        checkpoint: bool = True,
    ) -> FoldResult:
        """Обучает один фолд; см. run_fold."""
        return self.run_fold(model_factory, split, config, preprocess, checkpoint).result

    def run_fold(
        self,
        model_factory: ModelFactory,
        split: DatasetSplit,
        config: TrainConfig,
        preprocess: PreprocessConfig,
        checkpoint: bool = True,
    ) -> FoldOutcome:
        """
        Обучает модель на train, выбирает эпоху по val F1 и оценивает ее на test.

        После обучения восстанавливаются веса лучшей эпохи (самой ранней при
        равенстве), и только на них считаются метрики теста.

        Args:
            model_factory (ModelFactory): Фабрика свежего классификатора.
            split (DatasetSplit): Непересекающиеся train/val/test.
            config (TrainConfig): Гиперпараметры.
            preprocess (PreprocessConfig): Предобработка текстов.
            checkpoint (bool): Сохранять лучший чекпойнт в каталог фолда.

        Returns:
            FoldOutcome: Итог фолда, лучшая модель и ее оценки на test.

        Raises:
            ContractViolationError: Пустой train или val.
            TrainingAbortedError: Функция потерь стала нефинитной.
        """
        fold = split.fold if split.fold is not None else -1
        fold_log = log.bind(fold=fold)
        if len(split.train) == 0 or len(split.val) == 0:
            raise ContractViolationError(
                f"Фолд {fold}: пустая обучающая ({len(split.train)}) или валидационная ({len(split.val)}) выборка"
            )
        fold_log.info(
            f"Обучение фолда {fold}: train={len(split.train)}, val={len(split.val)}, test={len(split.test)}"
        )

        generator = seed_everything(config.seed + max(fold, 0))
        model = model_factory()
        device = model.device
        frozen_before = self._frozen_snapshot(model)

        train_texts = self.textprep_service.preprocess_many(split.train.texts, preprocess)
        val_texts = self.textprep_service.preprocess_many(split.val.texts, preprocess)
        train_labels = torch.tensor(split.train.labels, dtype=torch.long)

        weight = None
        if config.class_weighted:
            weight = torch.tensor(
                self.dataset_service.class_weights(split.train), dtype=torch.float32, device=device
            )
        criterion = nn.CrossEntropyLoss(weight=weight)
        optimizer = torch.optim.AdamW(
            [parameter for parameter in model.parameters() if parameter.requires_grad],
            lr=config.learning_rate,
            weight_decay=config.weight_decay,
        )

        stopper = EarlyStopping(config.patience)
        epochs: List[EpochRecord] = []
        best_state: Dict[str, torch.Tensor] = copy.deepcopy(model.state_dict())

        for epoch in range(1, config.max_epochs + 1):
            train_loss = self._train_epoch(
                model, optimizer, criterion, train_texts, train_labels, config, generator, fold, epoch
            )
            val_scores = model.predict_proba(val_texts, batch_size=EVAL_BATCH_SIZE)
            val_f1 = self.evaluation_service.compute_metrics(split.val.labels, val_scores).f1

            is_best = stopper.update(val_f1)
            if is_best:
                best_state = copy.deepcopy(model.state_dict())
            epochs.append(EpochRecord(epoch=epoch, train_loss=train_loss, val_f1=val_f1, is_best=is_best))
            fold_log.debug(
                f"Фолд {fold}, эпоха {epoch}: loss={train_loss:.4f}, val_f1={val_f1:.4f}"
                f"{' (лучшая)' if is_best else ''}"
            )
            if stopper.should_stop:
                fold_log.info(f"Ранняя остановка фолда {fold} после эпохи {epoch}")
                break

        model.load_state_dict(best_state)
        model.eval()
        self._check_frozen(model, frozen_before, fold)

        test_metrics = None
        test_scores = np.zeros(0, dtype=np.float64)
        if len(split.test):
            test_texts = self.textprep_service.preprocess_many(split.test.texts, preprocess)
            test_scores = model.predict_proba(test_texts, batch_size=EVAL_BATCH_SIZE)
            test_metrics = self.evaluation_service.compute_metrics(split.test.labels, test_scores)

        checkpoint_ref = None
        if checkpoint:
            checkpoint_ref = str(self.repo.save(model, preprocess, fold_dir_name(fold), CHECKPOINT_DIR))

        result = FoldResult(
            fold=fold,
            epochs=epochs,
            best_epoch=stopper.best_epoch,
            test_metrics=test_metrics,
            checkpoint_ref=checkpoint_ref,
        )
        fold_log.success(
            f"Фолд {fold} завершен: лучшая эпоха {result.best_epoch}, val F1 {result.best_val_f1:.4f}"
            + (f", test F1 {test_metrics.f1:.4f}" if test_metrics else "")
        )
        return FoldOutcome(result=result, model=model, test_scores=test_scores)

    def _train_epoch(
        self,
        model: Classifier,
        optimizer: torch.optim.Optimizer,
        criterion: nn.Module,
        texts: List[str],
        labels: torch.Tensor,
        config: TrainConfig,
        generator: torch.Generator,
        fold: int,
        epoch: int,
    ) -> float:
        model.train()
        order = torch.randperm(len(texts), generator=generator).tolist()
        batches = [order[start : start + config.batch_size] for start in range(0, len(order), config.batch_size)]
        losses: List[float] = []

        for batch in tqdm(batches, desc=f"fold {fold} epoch {epoch}", disable=not settings.DEBUG, leave=False):
            input_ids, attention_mask, _ = model.tokenize_batch([texts[index] for index in batch])
            logits = model(input_ids, attention_mask)
            loss = criterion(logits, labels[batch].to(model.device))
            if not torch.isfinite(loss):
                log.error(f"Фолд {fold}, эпоха {epoch}: нефинитная функция потерь ({loss.item()})")
                raise TrainingAbortedError(
                    f"Нефинитная функция потерь на эпохе {epoch}: проверьте learning_rate и входные данные",
                    fold=fold,
                    epoch=epoch,
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            losses.append(loss.item())

        return float(np.mean(losses))

    @staticmethod
    def _frozen_snapshot(model: Classifier) -> Dict[str, bool]:
        return {entry.name: entry.frozen for entry in trainable_parameter_report(model)}

    def _check_frozen(self, model: Classifier, before: Dict[str, bool], fold: int) -> None:
        after = self._frozen_snapshot(model)
        if after != before:
            changed = sorted(name for name in before if before[name] != after.get(name))
            raise ContractViolationError(
                f"Фолд {fold}: политика заморозки изменилась во время обучения: {changed}"
            )

    # --- Кросс-валидация ---

    def cross_validate(
        self,
        dataset: LabeledDataset,
        model_config: ModelConfig,
        train_config: TrainConfig,
        preprocess: PreprocessConfig,
        plan: Optional[FoldPlan] = None,
        checkpoint: bool = True,
    ) -> CrossValidationResult:
        """
        K-fold кросс-валидация.

        Прерванный фолд помечается failed; агрегат (среднее и выборочное
        стандартное отклонение метрик теста) требует не меньше K-1 успешных фолдов.

        Args:
            dataset (LabeledDataset): Датасет.
            model_config (ModelConfig): Конфигурация модели.
            train_config (TrainConfig): Гиперпараметры.
            preprocess (PreprocessConfig): Предобработка.
            plan (Optional[FoldPlan]): Готовое разбиение; иначе строится по train_config.
            checkpoint (bool): Сохранять чекпойнты фолдов.

        Returns:
            CrossValidationResult: K результатов фолдов, агрегат и объединенные метрики.

        Raises:
            CrossValidationError: Успешных фолдов меньше K-1.
        """
        plan = plan or self.dataset_service.make_folds(
            dataset, train_config.k_folds, train_config.seed, train_config.stratified
        )
        log.info(f"Кросс-валидация: {plan.k} фолдов, {len(dataset)} образцов, seed={plan.seed}")
        factory = self.model_factory(model_config, train_config.seed)

        folds: List[FoldResult] = []
        pooled_labels: List[int] = []
        pooled_scores: List[np.ndarray] = []
        for fold in range(plan.k):
            split = self.dataset_service.split_fold(dataset, plan, fold, train_config.val_fraction)
            try:
                outcome = self.run_fold(factory, split, train_config, preprocess, checkpoint)
            except TrainingAbortedError as exc:
                log.bind(fold=fold).error(f"Фолд {fold} прерван: {exc.detail}")
                folds.append(FoldResult(fold=fold, failed=True, error=exc.detail))
                continue
            folds.append(outcome.result)
            pooled_labels.extend(split.test.labels)
            pooled_scores.append(outcome.test_scores)

        failed = [result.fold for result in folds if result.failed]
        if len(folds) - len(failed) < plan.k - 1:
            raise CrossValidationError(
                f"Успешных фолдов {len(folds) - len(failed)} из {plan.k}; нужно минимум {plan.k - 1}",
                extra={"failed_folds": failed},
            )

        aggregate = self.evaluation_service.aggregate(
            [result.test_metrics for result in folds if result.test_metrics is not None], failed
        )
        # Метрики по объединенным out-of-fold предсказаниям успешных фолдов
        pooled = self.evaluation_service.compute_metrics(pooled_labels, np.concatenate(pooled_scores))
        log.success(
            "Кросс-валидация завершена: "
            + ", ".join(f"{name}={summary.mean:.4f}±{summary.std:.4f}" for name, summary in aggregate.metrics.items())
        )
        return CrossValidationResult(folds=folds, aggregate=aggregate, pooled=pooled)

    def train_production(
        self,
        dataset: LabeledDataset,
        model_config: ModelConfig,
        train_config: TrainConfig,
        preprocess: PreprocessConfig,
    ) -> FoldResult:
        """
        Обучает финальную модель на всем датасете с небольшим val-срезом для
        ранней остановки и сохраняет чекпойнт в каталог `production`.

        Raises:
            ContractViolationError: Пустой датасет.
            TrainingAbortedError: Нефинитная функция потерь.
        """
        self._require(len(dataset) > 0, "train_production: пустой датасет")
        log.info(f"Обучение production-модели на {len(dataset)} образцах")
        split = self.dataset_service.holdout_split(dataset, train_config.val_fraction, train_config.seed)
        factory = self.model_factory(model_config, train_config.seed)
        return self.train_fold(factory, split, train_config, preprocess, checkpoint=True)
