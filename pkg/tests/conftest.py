from pathlib import Path
from shutil import rmtree
from tempfile import gettempdir
from typing import Callable, List

import numpy as np
import pytest

from src.core.config import settings
from src.repositories.lexicon import LexiconRepository
from src.schemas.dataset import Label, LabeledDataset, Sample, Source
from src.schemas.model import TINY_BACKBONE_ID, FreezeSpec, HeadConfig, ModelConfig
from src.schemas.training import TrainConfig
from src.services.textprep_service import TextprepService

# Убедимся, что настройки загружены с TESTING=True
assert settings.TESTING, "Тесты должны запускаться с TESTING=True"

# Словарь синтетических текстов: оскорбительные и нейтральные фразы
BULLY_WORDS = ("pagal", "stupid", "idiot", "bewakoof", "loser", "chutiya", "kutta", "bastard")
NEUTRAL_WORDS = ("accha", "khana", "movie", "cricket", "dost", "weekend", "chai", "music")
FILLERS = ("yaar", "bhai", "aaj", "kal", "abhi", "phir")


# --- Фикстура для автоматической очистки временных папок ---
# Используем scope="session", чтобы выполнилось один раз после всех тестов
@pytest.fixture(scope="session", autouse=True)
def cleanup_temp_dirs(request):
    """Очищает временную директорию логов после завершения сессии тестов."""
    yield
    print("\nОчистка временных директорий после тестов...")

    temp_log_path = Path(gettempdir()) / "temp_logs"
    if temp_log_path.exists() and temp_log_path.is_dir():
        try:
            rmtree(temp_log_path)
            print(f"Успешно удалена директория: {temp_log_path}")
        except OSError as exc:
            print(f"Ошибка при удалении директории {temp_log_path}: {exc}")
    else:
        print(f"Директория для очистки не найдена: {temp_log_path}")


# Артефакты по умолчанию (без --out) пишутся во временный каталог теста
@pytest.fixture(autouse=True)
def artifact_root(tmp_path: Path, monkeypatch) -> Path:
    root = tmp_path / "artifacts"
    monkeypatch.setattr(settings, "ARTIFACT_ROOT", root)
    return root


# --- Словари и предобработка ---


# Поставляемые словари читаются один раз на сессию
@pytest.fixture(scope="session")
def lexicon_repo() -> LexiconRepository:
    return LexiconRepository()


@pytest.fixture(scope="session")
def textprep_service(lexicon_repo: LexiconRepository) -> TextprepService:
    return TextprepService(lexicon_repo)


# --- Синтетические датасеты ---


def synthetic_text(label: int, index: int) -> str:
    """Текст, метка которого однозначно определяется лексикой."""
    filler = FILLERS[index % len(FILLERS)]
    if label == 1:
        return f"tu {BULLY_WORDS[index % len(BULLY_WORDS)]} hai {filler}"
    return f"{filler} {NEUTRAL_WORDS[index % len(NEUTRAL_WORDS)]} mast hai"


def build_dataset(labels: List[int], source: Source = Source.CUSTOM) -> LabeledDataset:
    samples = [
        Sample(id=f"s-{index:04d}", text=synthetic_text(label, index), label=Label(label), source=source)
        for index, label in enumerate(labels)
    ]
    return LabeledDataset(samples=samples, source=source)


# Фабрика сбалансированных датасетов
@pytest.fixture
def make_dataset() -> Callable[..., LabeledDataset]:
    def factory(n: int = 40, positive_share: float = 0.5, seed: int = 0) -> LabeledDataset:
        n_positive = int(round(n * positive_share))
        labels = np.array([1] * n_positive + [0] * (n - n_positive))
        np.random.default_rng(seed).shuffle(labels)
        return build_dataset([int(label) for label in labels])

    return factory


# Сборка датасета по явному списку меток
@pytest.fixture
def dataset_from_labels() -> Callable[..., LabeledDataset]:
    return build_dataset


@pytest.fixture
def small_dataset(make_dataset) -> LabeledDataset:
    return make_dataset(40)


# --- Конфигурации модели ---


@pytest.fixture
def tiny_model_config() -> ModelConfig:
    """Крошечный энкодер без заморозки и с небольшой головой."""
    return ModelConfig(
        backbone_id=TINY_BACKBONE_ID,
        freeze=FreezeSpec.none(),
        head=HeadConfig(hidden_sizes=[16], dropout=0.1),
        max_seq_len=32,
    )


@pytest.fixture
def fast_train_config() -> TrainConfig:
    return TrainConfig(
        learning_rate=1e-3,
        max_epochs=3,
        patience=2,
        batch_size=8,
        k_folds=3,
        seed=7,
        val_fraction=0.2,
    )
