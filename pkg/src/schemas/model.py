"""Схемы Pydantic для конфигурации классификатора."""

from typing import ClassVar, Dict, List, Optional, Tuple

from pydantic import Field, field_validator

from src.core.exceptions import ConfigError
from src.schemas.base import CanonicalModel, TunedModel

# Детерминированный крошечный энкодер для тестов и CI
TINY_BACKBONE_ID = "tiny-hash-2x32"
# Энкодер по умолчанию для полноразмерных прогонов
DEFAULT_BACKBONE_ID = "google/muril-base-cased"


class FreezeSpec(CanonicalModel):
    """
    Политика заморозки энкодера.

    Fields:
        freeze_embeddings (bool): Заморозить таблицу эмбеддингов.
        frozen_encoder_layers (int): Сколько нижних блоков энкодера заморожено.
    """

    freeze_embeddings: bool = False
    frozen_encoder_layers: int = Field(default=0, ge=0)

    PRESET_NAMES: ClassVar[Tuple[str, ...]] = ("NONE", "HEADLINE", "ABLATION_BEST", "ALL")

    @classmethod
    def none(cls) -> "FreezeSpec":
        return cls(freeze_embeddings=False, frozen_encoder_layers=0)

    @classmethod
    def headline(cls) -> "FreezeSpec":
        """Эмбеддинги + слой 1."""
        return cls(freeze_embeddings=True, frozen_encoder_layers=1)

    @classmethod
    def ablation_best(cls) -> "FreezeSpec":
        """Эмбеддинги + слои 1-2."""
        return cls(freeze_embeddings=True, frozen_encoder_layers=2)

    @classmethod
    def all(cls, total_layers: int) -> "FreezeSpec":
        """Заморожен весь энкодер, обучается только голова."""
        return cls(freeze_embeddings=True, frozen_encoder_layers=total_layers)

    @classmethod
    def from_preset(cls, name: str, total_layers: int) -> "FreezeSpec":
        """
        Возвращает пресет по имени.

        Принимаются также обозначения строк абляции: EMB+1, EMB+1-2.

        Raises:
            ConfigError: Если пресет неизвестен.
        """
        aliases: Dict[str, str] = {
            "NONE": "NONE",
            "HEADLINE": "HEADLINE",
            "PAPER_MAIN": "HEADLINE",
            "EMB+1": "HEADLINE",
            "ABLATION_BEST": "ABLATION_BEST",
            "EMB+1-2": "ABLATION_BEST",
            "ALL": "ALL",
        }
        key = aliases.get(name.strip().upper())
        if key is None:
            raise ConfigError(
                f"Неизвестный пресет заморозки '{name}'. Допустимые: {', '.join(aliases)}"
            )
        if key == "NONE":
            return cls.none()
        if key == "HEADLINE":
            return cls.headline()
        if key == "ABLATION_BEST":
            return cls.ablation_best()
        return cls.all(total_layers)


class HeadConfig(CanonicalModel):
    """
    Конфигурация классификационной головы.

    Каждый скрытый слой: Linear -> LayerNorm -> ReLU -> Dropout.

    Fields:
        hidden_sizes (List[int]): Размеры скрытых слоев по порядку.
        dropout (float): Вероятность dropout.
        num_classes (int): Число классов (2).
    """

    hidden_sizes: List[int] = Field(default_factory=lambda: [512, 256, 128])
    dropout: float = Field(default=0.16, ge=0.0, lt=1.0)
    num_classes: int = Field(default=2, ge=2)

    @field_validator("hidden_sizes")
    @classmethod
    def _positive_sizes(cls, value: List[int]) -> List[int]:
        if any(size <= 0 for size in value):
            raise ValueError("Размеры скрытых слоев должны быть положительными")
        return value


class ModelConfig(CanonicalModel):
    """
    Полная конфигурация классификатора.

    Fields:
        backbone_id (str): Идентификатор энкодера.
        freeze (FreezeSpec): Политика заморозки.
        head (HeadConfig): Конфигурация головы.
        max_seq_len (int): Максимальная длина последовательности.
    """

    backbone_id: str = DEFAULT_BACKBONE_ID
    freeze: FreezeSpec = Field(default_factory=FreezeSpec.ablation_best)
    head: HeadConfig = Field(default_factory=HeadConfig)
    max_seq_len: int = Field(default=128, ge=2)


class TokenizedText(TunedModel):
    """
    Результат токенизации одного текста.

    Fields:
        input_ids (List[int]): Идентификаторы подслов, включая служебные.
        attention_mask (List[int]): 1 для реальных позиций, 0 для паддинга.
        word_ids (List[Optional[int]]): Номер слова (по пробелам) для каждой позиции;
            None для служебных и паддинга.
    """

    input_ids: List[int]
    attention_mask: List[int]
    word_ids: List[Optional[int]]

    @property
    def length(self) -> int:
        return len(self.input_ids)

    @property
    def real_length(self) -> int:
        return sum(self.attention_mask)


class ParameterEntry(TunedModel):
    """Строка отчета о параметрах: имя тензора, заморожен ли он и число элементов."""

    name: str
    frozen: bool
    count: int
