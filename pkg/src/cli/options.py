"""Общие опции подкоманд, загрузка конфигураций и контекст прогона."""

import argparse
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import yaml
from pydantic import BaseModel

from src.cli.dependencies import (
    get_dataset_service,
    get_evaluation_service,
    get_manifest_repository,
)
from src.core import canonical
from src.core.config import settings
from src.core.exceptions import ConfigError, ValidationError
from src.core.logging import log
from src.models.factory import backbone_depth
from src.repositories.reference import ReferenceTable
from src.schemas.dataset import LabeledDataset, Source
from src.schemas.manifest import RunManifest
from src.schemas.model import FreezeSpec, ModelConfig
from src.schemas.textprep import PreprocessConfig
from src.schemas.training import TrainConfig

YAML_SUFFIXES = (".yaml", ".yml")
DEFAULT_FREEZE = "ABLATION_BEST"
DEFAULT_PREPROCESS = "ALL"
# Манифесты отдельных запусков возобновляемых команд
INVOCATIONS_DIR = "invocations"


# --- Аргументы ---


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """--seed, --out и --config есть у каждой подкоманды."""
    parser.add_argument("--seed", type=int, default=None, help="Зерно (перекрывает конфигурацию)")
    parser.add_argument(
        "--out", type=Path, default=None, help="Каталог артефактов (по умолчанию ARTIFACT_ROOT/<команда>)"
    )
    parser.add_argument("--config", default=None, help="Файл конфигурации: YAML или каноничный текст")


def add_dataset_arguments(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--dataset",
        required=required,
        help="Гармонизированный TSV или имя источника (BOHRA, BULLYEXPLAIN, ...) вместе с --data",
    )
    parser.add_argument("--data", type=Path, default=None, help="Файл корпуса для источника")
    parser.add_argument(
        "--loader-config", type=Path, default=None, help="Своя конфигурация загрузчика источника"
    )


def hidden_sizes(value: str) -> List[int]:
    """Размеры скрытых слоев головы: `512,256,128`; `linear` - без скрытых слоев."""
    if value.strip().lower() in ("", "linear"):
        return []
    try:
        sizes = [int(part) for part in value.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"ожидается список целых через запятую: '{value}'") from exc
    if any(size <= 0 for size in sizes):
        raise argparse.ArgumentTypeError(f"размеры должны быть положительными: '{value}'")
    return sizes


def output_dir(args: argparse.Namespace) -> Path:
    return Path(args.out) if args.out else Path(settings.ARTIFACT_ROOT) / args.command


# --- Конфигурации ---


def load_config_file(path: Optional[str | Path]) -> Dict[str, Any]:
    """
    Читает файл конфигурации во вложенный словарь.

    YAML распознается по расширению, остальное читается как каноничный текст.

    Raises:
        ConfigError: Файл не найден или не является словарем.
    """
    if not path:
        return {}
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"--config: файл не найден: {path}", extra={"flag": "--config"})
    if path.suffix.lower() not in YAML_SUFFIXES:
        return canonical.read(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"--config: некорректный YAML в {path}: {exc}", extra={"flag": "--config"}) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"--config: ожидается словарь в {path}", extra={"flag": "--config"})
    return data


def preprocess_config(value: Any) -> PreprocessConfig:
    """Пресет, файл или словарь полей PreprocessConfig."""
    if isinstance(value, PreprocessConfig):
        return value
    if isinstance(value, dict):
        return PreprocessConfig.from_canonical_dict(value)
    path = Path(str(value))
    if path.suffix and path.is_file():
        data = load_config_file(path)
        return preprocess_config(data.get("preprocess", data))
    return PreprocessConfig.from_preset(str(value))


def training_configs(
    args: argparse.Namespace, file_data: Dict[str, Any]
) -> Tuple[ModelConfig, TrainConfig, PreprocessConfig]:
    """
    Эффективные конфигурации обучения.

    Приоритет: флаги CLI, затем файл конфигурации (секции model, train,
    preprocess), затем пресеты по умолчанию.

    Raises:
        ConfigError: Некорректное значение в файле или неизвестный пресет.
    """
    model_data = dict(file_data.get("model") or {})
    train_data = dict(file_data.get("train") or {})
    file_freeze = model_data.pop("freeze", None)

    if getattr(args, "backbone", None):
        model_data["backbone_id"] = args.backbone
    if getattr(args, "max_seq_len", None):
        model_data["max_seq_len"] = args.max_seq_len
    if getattr(args, "head", None) is not None:
        model_data["head"] = {**dict(model_data.get("head") or {}), "hidden_sizes": args.head}

    flags = {
        "seed": "seed",
        "folds": "k_folds",
        "epochs": "max_epochs",
        "patience": "patience",
        "batch_size": "batch_size",
        "lr": "learning_rate",
    }
    for flag, field in flags.items():
        value = getattr(args, flag, None)
        if value is not None:
            train_data[field] = value
    if getattr(args, "class_weighted", False):
        train_data["class_weighted"] = True

    train_config = TrainConfig.from_canonical_dict(train_data)
    model_config = ModelConfig.from_canonical_dict(model_data)

    freeze_value = getattr(args, "preset", None) or file_freeze or DEFAULT_FREEZE
    if isinstance(freeze_value, dict):
        freeze = FreezeSpec.from_canonical_dict(freeze_value)
    else:
        freeze = FreezeSpec.from_preset(str(freeze_value), backbone_depth(model_config.backbone_id))
    model_config = model_config.model_copy(update={"freeze": freeze})

    preprocess = preprocess_config(
        getattr(args, "preprocess", None) or file_data.get("preprocess") or DEFAULT_PREPROCESS
    )
    return model_config, train_config, preprocess


# --- Датасеты ---


def load_dataset(args: argparse.Namespace, flag: str = "dataset") -> LabeledDataset:
    """
    Датасет из гармонизированного файла или из корпуса источника.

    Raises:
        ValidationError: Файл не найден или неизвестный источник.
    """
    value = getattr(args, flag)
    option = f"--{flag.replace('_', '-')}"
    service = get_dataset_service()
    if args.data is None:
        path = Path(value)
        if not path.is_file():
            raise ValidationError(
                f"{option}: файл '{value}' не найден; для корпуса источника укажите --data",
                extra={"flag": option},
            )
        return service.read_dataset(path)

    try:
        source = Source.parse(value)
    except ValueError as exc:
        permitted = ", ".join(item.value for item in Source)
        raise ValidationError(
            f"{option}: неизвестный источник '{value}'. Допустимые: {permitted}", extra={"flag": option}
        ) from exc
    return service.load_dataset(source, args.data, args.loader_config)


# --- Контекст прогона ---


class RunContext:
    """
    Манифест одной команды: открывается до работы и записывается по выходу.

    Запись выполняется и при ошибке (status=failed); путь к манифесту
    прикрепляется к исключению как `manifest_path`.

    Args:
        args (argparse.Namespace): Разобранные аргументы.
        argv (List[str]): Исходные аргументы вызова.
        out (Path): Каталог прогона.
    """

    def __init__(self, args: argparse.Namespace, argv: List[str], out: Path, resumable: bool = False):
        self.command = args.command
        self.argv = list(argv)
        self.out = Path(out)
        self.repo = get_manifest_repository(self.out)
        self.resumable = resumable
        self.subdirs: Tuple[str, ...] = ()
        self.seed: int = args.seed if args.seed is not None else 42
        self.config: Dict[str, Any] = {}
        self.artifacts: Dict[str, str] = {}
        self.records: Dict[str, Any] = {}
        self.dataset_checksum: Optional[str] = None
        self.started_at: Optional[datetime] = None

    def __enter__(self) -> "RunContext":
        if self.resumable:
            # Каждый запуск возобновляемой команды получает свой манифест
            number = 1
            while self.repo.manifest_path(INVOCATIONS_DIR, f"{number:03d}").exists():
                number += 1
            self.subdirs = (INVOCATIONS_DIR, f"{number:03d}")
        path = self.repo.manifest_path(*self.subdirs)
        if path.exists():
            raise ValidationError(
                f"--out: каталог {self.out} уже содержит манифест прогона",
                extra={"flag": "--out", "manifest": str(path)},
            )
        self.out.mkdir(parents=True, exist_ok=True)
        self.started_at = datetime.now(timezone.utc)
        log.bind(command=self.command).info(f"Команда {self.command}: артефакты в {self.out}")
        return self

    def artifact(self, name: str, path: Path) -> Path:
        """Регистрирует артефакт (путь хранится относительно каталога прогона)."""
        path = Path(path)
        try:
            self.artifacts[name] = str(path.relative_to(self.out))
        except ValueError:
            self.artifacts[name] = str(path)
        return path

    def use_dataset(self, dataset: LabeledDataset) -> LabeledDataset:
        self.dataset_checksum = get_dataset_service().checksum(dataset)
        self.records["dataset_size"] = len(dataset)
        if dataset.discrepancy:
            self.records["dataset_discrepancy"] = dataset.discrepancy
        return dataset

    def __exit__(self, exc_type, exc, traceback) -> bool:
        error = None
        if exc is not None:
            error = getattr(exc, "detail", None) or str(exc) or exc_type.__name__
        manifest = RunManifest(
            command=self.command,
            argv=self.argv,
            config=self.config,
            dataset_checksum=self.dataset_checksum,
            seed=self.seed,
            started_at=self.started_at or datetime.now(timezone.utc),
            finished_at=datetime.now(timezone.utc),
            artifacts=self.artifacts,
            records=self.records,
            status="failed" if exc is not None else "ok",
            error=error,
        )
        path = self.repo.write(manifest, *self.subdirs)
        if exc is not None:
            exc.manifest_path = str(path)
        return False


# --- Вывод ---


def write_jsonl(path: Path, records: Iterable[BaseModel | Dict[str, Any]]) -> Path:
    """JSON-lines: одна запись на строку."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            data = record.model_dump(mode="json") if isinstance(record, BaseModel) else record
            handle.write(json.dumps(data, ensure_ascii=False, sort_keys=True) + "\n")
    return path


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


# --- Эталонные значения ---


def add_reference_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--reference", default=None, help="Источник опубликованных значений (BOHRA, ...)")
    parser.add_argument(
        "--reference-model", default="MURIL", help="Строка эталона, с которой считаются разности"
    )


def reference_table(args: argparse.Namespace) -> Optional[ReferenceTable]:
    """
    Строка эталонной таблицы для `--reference`; None, если флаг не задан.

    Raises:
        ValidationError: Неизвестный источник или модель эталона.
    """
    if not getattr(args, "reference", None):
        return None
    try:
        source = Source.parse(args.reference)
    except ValueError as exc:
        raise ValidationError(
            f"--reference: неизвестный источник '{args.reference}'", extra={"flag": "--reference"}
        ) from exc
    table = get_evaluation_service().reference_for(source)
    if args.reference_model not in table:
        raise ValidationError(
            f"--reference-model: для {source.value} нет строки '{args.reference_model}'. "
            f"Допустимые: {', '.join(sorted(table))}",
            extra={"flag": "--reference-model"},
        )
    return {args.reference_model: table[args.reference_model]}
