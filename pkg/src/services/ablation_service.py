"""Сервис сетки абляций: заморозка x глубина головы x предобработка."""

import hashlib
import itertools
import json
import re
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import yaml
from pydantic import ValidationError as PydanticValidationError

from src.core.config import settings
from src.core.exceptions import ConfigError, ToolkitError
from src.core.logging import log
from src.models.factory import backbone_depth
from src.repositories.manifest import ManifestRepository
from src.repositories.reference import ReferenceRepository
from src.schemas.ablation import (
    AblationReport,
    AblationResult,
    AblationVariant,
    AxisName,
    GridSpec,
)
from src.schemas.dataset import FoldPlan, LabeledDataset, Source
from src.schemas.manifest import RunManifest
from src.schemas.metrics import MetricSet
from src.schemas.model import FreezeSpec, ModelConfig
from src.schemas.textprep import PreprocessConfig
from src.schemas.training import TrainConfig
from src.services.base_service import BaseService
from src.services.dataset_service import DatasetService
from src.services.evaluation_service import EvaluationService
from src.services.training_service import TrainingService

DEFAULT_GRID = "ablation_grid.yaml"
METRICS_FILE = "metrics.txt"
FACTORIAL_AXIS = "FACTORIAL"

AXIS_TITLES = {
    AxisName.FREEZING.value: "Layer Freezing Strategy",
    AxisName.HEAD_DEPTH.value: "Classification Head Depth",
    AxisName.PREPROCESSING.value: "Preprocessing Components",
    FACTORIAL_AXIS: "Full Factorial Grid",
}
REPORT_METRICS = ("accuracy", "precision", "recall", "f1", "macro_f1")

# Строка сетки: ось и вариант
GridRow = Tuple[str, AblationVariant]


def variant_dir_name(axis: str, variant: str) -> str:
    return re.sub(r"[^A-Za-z0-9+.\-]", "_", f"{axis}__{variant}").lower()


def plan_digest(plan: FoldPlan) -> str:
    """sha256 назначений фолдов: одинаков у всех вариантов одной сетки."""
    return hashlib.sha256(json.dumps(plan.assignments).encode("utf-8")).hexdigest()


class AblationService(BaseService[ManifestRepository]):
    """
    Запуск сетки абляций с общим разбиением на фолды.

    Каждый вариант пишет `metrics.txt` и манифест в свой подкаталог; вариант
    с существующим манифестом повторно не запускается.

    Args:
        repo (ManifestRepository): Каталог прогона сетки.
        training_service (TrainingService): Обучение фолдов.
        dataset_service (DatasetService): Разбиения.
        evaluation_service (EvaluationService): Метрики.
        reference_repo (ReferenceRepository): Эталонные значения для отчета.
    """

    def __init__(
        self,
        repo: ManifestRepository,
        training_service: TrainingService,
        dataset_service: DatasetService,
        evaluation_service: EvaluationService,
        reference_repo: ReferenceRepository,
    ):
        super().__init__(repo)
        self.training_service = training_service
        self.dataset_service = dataset_service
        self.evaluation_service = evaluation_service
        self.reference_repo = reference_repo

    # --- Спецификация сетки ---

    @staticmethod
    def load_grid(path: Optional[Path] = None) -> GridSpec:
        """
        Читает YAML-спецификацию сетки; без пути - встроенную (13 строк).

        Raises:
            ConfigError: Файл не читается или не соответствует схеме.
        """
        path = Path(path) if path else settings.RESOURCES_PATH / DEFAULT_GRID  # type: ignore[operator]
        try:
            data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"Не удалось прочитать сетку абляций '{path}': {exc}") from exc
        try:
            return GridSpec.model_validate(data)
        except PydanticValidationError as exc:
            raise ConfigError(
                f"Некорректная сетка абляций '{path}': {exc.errors(include_url=False)}"
            ) from exc

    @staticmethod
    def grid_rows(grid: GridSpec) -> List[GridRow]:
        """Строки сетки в порядке отчета."""
        if not grid.full_factorial:
            return [(axis.name.value, variant) for axis in grid.axes for variant in axis.variants]

        rows: List[GridRow] = []
        for combination in itertools.product(*(axis.variants for axis in grid.axes)):
            merged: Dict[str, object] = {}
            for variant in combination:
                merged.update(
                    {
                        key: value
                        for key, value in variant.model_dump(include={"freeze", "hidden_sizes", "preprocess"}).items()
                        if value is not None
                    }
                )
            name = "|".join(variant.name for variant in combination)
            rows.append((FACTORIAL_AXIS, AblationVariant(name=name, title=name, **merged)))
        return rows

    @staticmethod
    def variant_configs(
        grid: GridSpec, variant: AblationVariant, base_model: ModelConfig
    ) -> Tuple[ModelConfig, PreprocessConfig]:
        """
        Конфигурации варианта: база сетки с переопределенными измерениями.

        Raises:
            ConfigError: Неизвестный пресет.
        """
        freeze_name = variant.freeze or grid.base.freeze
        hidden_sizes = variant.hidden_sizes if variant.hidden_sizes is not None else grid.base.hidden_sizes
        preprocess_name = variant.preprocess or grid.base.preprocess

        freeze = FreezeSpec.from_preset(freeze_name, backbone_depth(base_model.backbone_id))
        model_config = base_model.model_copy(
            update={
                "freeze": freeze,
                "head": base_model.head.model_copy(update={"hidden_sizes": list(hidden_sizes)}),
            }
        )
        return model_config, PreprocessConfig.from_preset(preprocess_name)

    # --- Запуск ---

    def run_ablation(
        self,
        dataset: LabeledDataset,
        base_model: ModelConfig,
        train_config: TrainConfig,
        grid: GridSpec,
        argv: Optional[List[str]] = None,
    ) -> List[AblationResult]:
        """
        Обучает и оценивает каждый вариант сетки на одном и том же разбиении.

        Метрики варианта считаются по объединенным предсказаниям на тестах
        первых `folds_used` фолдов. Упавший вариант записывается и сетка
        продолжается.

        Args:
            dataset (LabeledDataset): Датасет.
            base_model (ModelConfig): Энкодер, длина последовательности и dropout.
            train_config (TrainConfig): Гиперпараметры и разбиение.
            grid (GridSpec): Сетка.
            argv (Optional[List[str]]): Аргументы вызова для манифестов.

        Returns:
            List[AblationResult]: Результаты в порядке отчета, лучшие на оси помечены.

        Raises:
            ConfigError: folds_used больше числа фолдов.
        """
        if grid.folds_used > train_config.k_folds:
            raise ConfigError(
                f"folds_used={grid.folds_used} больше k_folds={train_config.k_folds}"
            )
        plan = self.dataset_service.make_folds(
            dataset, train_config.k_folds, train_config.seed, train_config.stratified
        )
        checksum = self.dataset_service.checksum(dataset)
        rows = self.grid_rows(grid)
        log.info(f"Сетка абляций: {len(rows)} вариантов, folds_used={grid.folds_used}")

        results = [
            self._run_variant(dataset, plan, checksum, base_model, train_config, grid, axis, variant, argv or [])
            for axis, variant in rows
        ]
        results = self._flag_best(results)
        log.success(
            f"Сетка абляций завершена: {sum(not r.failed for r in results)} из {len(results)} вариантов успешны"
        )
        return results

    def _run_variant(
        self,
        dataset: LabeledDataset,
        plan: FoldPlan,
        checksum: str,
        base_model: ModelConfig,
        train_config: TrainConfig,
        grid: GridSpec,
        axis: str,
        variant: AblationVariant,
        argv: List[str],
    ) -> AblationResult:
        directory = variant_dir_name(axis, variant.name)
        variant_log = log.bind(axis=axis, variant=variant.name)
        manifest_path = self.repo.manifest_path(directory)
        title = variant.title or variant.name

        if manifest_path.is_file():
            variant_log.info(f"Вариант {axis}/{variant.name} уже выполнен, результат читается из {manifest_path}")
            return self._resume(axis, variant, title, directory)

        started_at = datetime.now(timezone.utc)
        started = time.perf_counter()
        metrics: Optional[MetricSet] = None
        error: Optional[str] = None
        records: Dict[str, object] = {"axis": axis, "variant": variant.name, "fold_plan_sha256": plan_digest(plan)}
        config: Dict[str, object] = {"grid_base": grid.base.model_dump(), "train": train_config.model_dump()}

        try:
            model_config, preprocess = self.variant_configs(grid, variant, base_model)
            config.update(model=model_config.model_dump(mode="json"), preprocess=preprocess.model_dump())
            factory = self.training_service.model_factory(model_config, train_config.seed)

            labels: List[int] = []
            scores: List[np.ndarray] = []
            best_epochs: List[int] = []
            for fold in range(grid.folds_used):
                split = self.dataset_service.split_fold(dataset, plan, fold, train_config.val_fraction)
                outcome = self.training_service.run_fold(
                    factory, split, train_config, preprocess, checkpoint=False
                )
                labels.extend(split.test.labels)
                scores.append(outcome.test_scores)
                best_epochs.append(outcome.result.best_epoch)

            metrics = self.evaluation_service.compute_metrics(labels, np.concatenate(scores))
            records["best_epochs"] = best_epochs
            self.repo.write_text(
                self.repo.path(directory, METRICS_FILE), metrics.to_canonical_text(header="MetricSet")
            )
        except ToolkitError as exc:
            variant_log.error(f"Вариант {axis}/{variant.name} упал: {exc.detail}")
            error = exc.detail

        runtime = time.perf_counter() - started
        records["runtime"] = runtime
        manifest = RunManifest(
            command="ablate",
            argv=argv,
            config=config,
            dataset_checksum=checksum,
            seed=train_config.seed,
            started_at=started_at,
            finished_at=datetime.now(timezone.utc),
            artifacts={"metrics": METRICS_FILE} if metrics else {},
            records=records,
            status="failed" if error else "ok",
            error=error,
        )
        path = self.repo.write(manifest, directory)
        return AblationResult(
            axis=axis,
            variant=variant.name,
            title=title,
            metrics=metrics,
            runtime=runtime,
            manifest_ref=str(path),
            failed=error is not None,
            error=error,
        )

    def _resume(self, axis: str, variant: AblationVariant, title: str, directory: str) -> AblationResult:
        manifest = self.repo.read(directory)
        metrics_path = self.repo.path(directory, METRICS_FILE)
        metrics = MetricSet.read(metrics_path) if manifest.status == "ok" and metrics_path.is_file() else None
        return AblationResult(
            axis=axis,
            variant=variant.name,
            title=title,
            metrics=metrics,
            runtime=float(manifest.records.get("runtime", 0.0)),
            manifest_ref=str(self.repo.manifest_path(directory)),
            failed=metrics is None,
            error=manifest.error,
        )

    @staticmethod
    def _flag_best(results: List[AblationResult]) -> List[AblationResult]:
        """Лучший вариант на каждой оси: максимум accuracy, при равенстве - F1."""
        best: Dict[str, int] = {}
        for index, result in enumerate(results):
            if result.metrics is None:
                continue
            current = best.get(result.axis)
            key = (result.metrics.accuracy, result.metrics.f1)
            if current is None or key > (results[current].metrics.accuracy, results[current].metrics.f1):  # type: ignore[union-attr]
                best[result.axis] = index
        chosen = set(best.values())
        return [
            result.model_copy(update={"is_best": index in chosen}) for index, result in enumerate(results)
        ]

    # --- Отчет ---

    def build_report(self, results: List[AblationResult]) -> AblationReport:
        """Сводный отчет в раскладке таблицы абляций с эталонными значениями."""
        reference = self.reference_repo.ablation()
        headline = self.reference_repo.for_source(Source.BULLYEXPLAIN).get("MURIL", {})

        title_width = max([len(result.title or result.variant) for result in results] + [24]) + 4
        header = "Component Configuration".ljust(title_width) + "".join(
            f"{name:>10}" for name in ("Accuracy", "Precision", "Recall", "F1", "Macro-F1")
        ) + f"{'Ref.Acc':>10}{'Time,s':>9}"
        lines = [header, "-" * len(header)]

        current_axis = None
        for result in results:
            if result.axis != current_axis:
                current_axis = result.axis
                lines.append(AXIS_TITLES.get(result.axis, result.axis))
            label = f"  {result.title or result.variant}{' *' if result.is_best else ''}"
            if result.metrics is None:
                values = f"{'FAILED':>10}" + " " * 40
            else:
                values = "".join(f"{result.metrics.value(name):>10.4f}" for name in REPORT_METRICS)
            ref = reference.get((result.axis, result.variant), {}).get("accuracy")
            ref_cell = f"{ref / 100:>10.4f}" if ref is not None else f"{'-':>10}"
            lines.append(label.ljust(title_width) + values + ref_cell + f"{result.runtime:>9.1f}")

        lines.append("")
        lines.append("* best variant on its axis (accuracy, then F1)")
        if reference:
            note = "Ref.Acc: published component-wise study on BULLYEXPLAIN"
            if "accuracy" in headline:
                note += f"; headline BULLYEXPLAIN MURIL accuracy {headline['accuracy']:.2f}%"
            lines.append(note)
        return AblationReport(results=results, text="\n".join(lines) + "\n")
