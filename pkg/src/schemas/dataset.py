"""Схемы Pydantic для датасетов и разбиений."""

from collections import Counter
from enum import Enum, IntEnum
from typing import Dict, List, Literal, Optional

from pydantic import Field, field_validator, model_validator

from src.schemas.base import CanonicalModel, TunedModel


class Label(IntEnum):
    """Бинарная метка."""

    NON_BULLY = 0
    BULLY = 1


class Source(str, Enum):
    """Корпус-источник."""

    BOHRA = "BOHRA"
    BULLYEXPLAIN = "BULLYEXPLAIN"
    BULLYSENTEMO = "BULLYSENTEMO"
    KUMAR = "KUMAR"
    HASOC2021 = "HASOC2021"
    MENDELEY = "MENDELEY"
    # Синтетические и пользовательские наборы (тесты, демонстрации)
    CUSTOM = "CUSTOM"

    @classmethod
    def parse(cls, name: str) -> "Source":
        return cls(name.strip().upper().replace("-", "").replace("_", ""))


class Sample(TunedModel):
    """
    Один текст с бинарной меткой и происхождением.

    Fields:
        id (str): Идентификатор, стабильный в пределах датасета.
        text (str): Текст (непустой после обрезки пробелов).
        label (Label): BULLY=1 или NON_BULLY=0.
        source (Source): Корпус-источник.
    """

    id: str = Field(..., min_length=1)
    text: str
    label: Label
    source: Source

    @field_validator("text")
    @classmethod
    def _text_not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("text пуст после обрезки пробелов")
        return value


class LabeledDataset(TunedModel):
    """
    Коллекция образцов одного источника.

    Fields:
        samples (List[Sample]): Образцы в порядке файла.
        source (Source): Корпус-источник.
        class_counts (Dict[int, int]): Число образцов на метку.
        discrepancy (Optional[str]): Расхождение с опубликованными цифрами.
    """

    samples: List[Sample] = Field(default_factory=list)
    source: Source
    class_counts: Dict[int, int] = Field(default_factory=dict)
    discrepancy: Optional[str] = None

    @model_validator(mode="before")
    @classmethod
    def _fill_class_counts(cls, data):
        if isinstance(data, dict) and not data.get("class_counts"):
            samples = data.get("samples", [])
            counts = Counter(
                int(s.label if isinstance(s, Sample) else s["label"]) for s in samples
            )
            data = {**data, "class_counts": {0: counts.get(0, 0), 1: counts.get(1, 0)}}
        return data

    @model_validator(mode="after")
    def _check_counts(self) -> "LabeledDataset":
        recount = Counter(int(sample.label) for sample in self.samples)
        if sum(self.class_counts.values()) != len(self.samples) or any(
            self.class_counts.get(label, 0) != recount.get(label, 0) for label in (0, 1)
        ):
            raise ValueError("class_counts не совпадает с пересчетом образцов")

        ids = [sample.id for sample in self.samples]
        if len(set(ids)) != len(ids):
            raise ValueError("id образцов должны быть уникальны в пределах источника")
        return self

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def labels(self) -> List[int]:
        return [int(sample.label) for sample in self.samples]

    @property
    def texts(self) -> List[str]:
        return [sample.text for sample in self.samples]

    @property
    def positive_share(self) -> float:
        return self.class_counts.get(1, 0) / len(self.samples) if self.samples else 0.0

    def subset(self, indices: List[int]) -> "LabeledDataset":
        """Подмножество по индексам (порядок индексов сохраняется)."""
        return LabeledDataset(
            samples=[self.samples[i] for i in indices], source=self.source
        )


class FoldPlan(TunedModel):
    """
    Разбиение датасета на K фолдов.

    Fields:
        k (int): Число фолдов (>= 2).
        seed (int): Зерно перемешивания.
        assignments (List[int]): Индекс фолда для каждого образца.
        stratified (bool): Стратификация по метке.
    """

    k: int = Field(..., ge=2)
    seed: int
    assignments: List[int]
    stratified: bool = True

    @model_validator(mode="after")
    def _check_partition(self) -> "FoldPlan":
        if any(not 0 <= fold < self.k for fold in self.assignments):
            raise ValueError("Индекс фолда вне диапазона [0, k)")
        sizes = self.fold_sizes()
        if self.assignments and max(sizes) - min(sizes) > 1:
            raise ValueError(f"Размеры фолдов различаются больше чем на 1: {sizes}")
        return self

    def fold_sizes(self) -> List[int]:
        counts = Counter(self.assignments)
        return [counts.get(fold, 0) for fold in range(self.k)]

    def members(self, fold: int) -> List[int]:
        return [index for index, assigned in enumerate(self.assignments) if assigned == fold]


class DatasetSplit(TunedModel):
    """Тройка непересекающихся выборок одного фолда."""

    fold: Optional[int] = None
    train: LabeledDataset
    val: LabeledDataset
    test: LabeledDataset


class LoaderConfig(CanonicalModel):
    """
    Описание схемы файла конкретного источника.

    Fields:
        source (Source): Источник.
        format (str): tsv, csv или jsonl.
        text_field (str): Имя колонки/поля текста (или индекс при header=false).
        label_field (str): Имя колонки/поля метки (или индекс).
        id_field (Optional[str]): Колонка идентификатора; иначе номер строки.
        header (bool): Есть ли строка заголовка.
        labels (Dict[str, int]): Соответствие строк меток бинарной метке.
        expected_total (Optional[int]): Опубликованное число образцов.
        expected_positive_share (Optional[float]): Опубликованная доля BULLY.
    """

    source: Source
    format: Literal["tsv", "csv", "jsonl"] = "tsv"
    text_field: str
    label_field: str
    id_field: Optional[str] = None
    header: bool = True
    labels: Dict[str, Label]
    expected_total: Optional[int] = None
    expected_positive_share: Optional[float] = Field(default=None, ge=0.0, le=1.0)
