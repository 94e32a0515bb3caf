"""Схемы Pydantic для конвейера нормализации текста."""

from enum import Enum
from typing import ClassVar, Dict, List, Tuple

from pydantic import Field, model_validator

from src.core.exceptions import ConfigError
from src.schemas.base import CanonicalModel, TunedModel


class LangTag(str, Enum):
    """Языковой тег токена."""

    HINDI_ROMANIZED = "HINDI_ROMANIZED"
    ENGLISH = "ENGLISH"
    NEUTRAL = "NEUTRAL"
    UNKNOWN = "UNKNOWN"


# Фиксированный порядок стадий конвейера
STAGE_ORDER: Tuple[str, ...] = (
    "lowercase",
    "strip_urls",
    "strip_mentions",
    "strip_noise",
    "emoji_standardize",
    "translit_normalize",
    "stem_english",
    "language_id",
)


class PreprocessConfig(CanonicalModel):
    """
    Набор включенных стадий нормализации.

    Fields:
        lowercase (bool): Приведение к нижнему регистру.
        strip_urls (bool): Удаление URL (со схемой и www.).
        strip_mentions (bool): Удаление @-упоминаний.
        strip_noise (bool): Пробелы, управляющие символы, серии пунктуации.
        stem_english (bool): Стемминг только английских токенов.
        language_id (bool): Языковые теги токенов.
        translit_normalize (bool): Канонизация вариантов романизированного хинди.
        emoji_standardize (bool): Замена эмодзи на теги <emo:NAME>.
    """

    lowercase: bool = False
    strip_urls: bool = False
    strip_mentions: bool = False
    strip_noise: bool = False
    stem_english: bool = False
    language_id: bool = False
    translit_normalize: bool = False
    emoji_standardize: bool = False

    PRESET_NAMES: ClassVar[Tuple[str, ...]] = (
        "BASIC",
        "BASIC+LANGID",
        "BASIC+LANGID+TRANSLIT",
        "BASIC+LANGID+TRANSLIT+EMOJI",
        "ALL",
    )

    def enabled_stages(self) -> List[str]:
        """Включенные стадии в порядке выполнения."""
        return [stage for stage in STAGE_ORDER if getattr(self, stage)]

    # --- Именованные пресеты ---

    @classmethod
    def none(cls) -> "PreprocessConfig":
        return cls()

    @classmethod
    def basic(cls) -> "PreprocessConfig":
        return cls(lowercase=True, strip_urls=True, strip_mentions=True, strip_noise=True)

    @classmethod
    def basic_langid(cls) -> "PreprocessConfig":
        return cls.basic().model_copy(update={"language_id": True})

    @classmethod
    def basic_langid_translit(cls) -> "PreprocessConfig":
        return cls.basic_langid().model_copy(update={"translit_normalize": True})

    @classmethod
    def basic_langid_translit_emoji(cls) -> "PreprocessConfig":
        return cls.basic_langid_translit().model_copy(update={"emoji_standardize": True})

    @classmethod
    def all(cls) -> "PreprocessConfig":
        return cls(**{stage: True for stage in STAGE_ORDER})

    @classmethod
    def presets(cls) -> Dict[str, "PreprocessConfig"]:
        return {
            "BASIC": cls.basic(),
            "BASIC+LANGID": cls.basic_langid(),
            "BASIC+LANGID+TRANSLIT": cls.basic_langid_translit(),
            "BASIC+LANGID+TRANSLIT+EMOJI": cls.basic_langid_translit_emoji(),
            "ALL": cls.all(),
        }

    @classmethod
    def from_preset(cls, name: str) -> "PreprocessConfig":
        """
        Возвращает пресет по имени.

        Имя нечувствительно к регистру, `_` и `-` эквивалентны `+`.

        Raises:
            ConfigError: Если пресет неизвестен.
        """
        key = name.strip().upper().replace("_", "+").replace("-", "+")
        presets = cls.presets()
        if key not in presets:
            raise ConfigError(
                f"Неизвестный пресет предобработки '{name}'. "
                f"Допустимые: {', '.join(presets)}"
            )
        return presets[key]


class TokenSpan(TunedModel):
    """
    Токен обработанного текста с языковым тегом.

    Fields:
        surface (str): Текст токена.
        start (int): Начальное смещение (включительно).
        end (int): Конечное смещение (исключительно).
        lang_tag (LangTag): Языковой тег.
    """

    surface: str
    start: int = Field(..., ge=0)
    end: int
    lang_tag: LangTag = LangTag.UNKNOWN

    @model_validator(mode="after")
    def _check_offsets(self) -> "TokenSpan":
        if not self.start < self.end:
            raise ValueError(f"Пустой или перевернутый интервал [{self.start}, {self.end})")
        return self


class StageRecord(TunedModel):
    """Результат одной стадии конвейера."""

    name: str
    text: str


class PreprocessTrace(TunedModel):
    """
    Полная трасса предобработки одного текста.

    Fields:
        raw (str): Исходный текст.
        stages (List[StageRecord]): Стадии в порядке выполнения.
        final (str): Итоговый текст (равен выходу последней стадии).
        tokens (List[TokenSpan]): Токены итогового текста.
    """

    raw: str
    stages: List[StageRecord] = Field(default_factory=list)
    final: str
    tokens: List[TokenSpan] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_consistency(self) -> "PreprocessTrace":
        expected_final = self.stages[-1].text if self.stages else self.raw
        if self.final != expected_final:
            raise ValueError("final должен совпадать с выходом последней стадии")

        names = [stage.name for stage in self.stages]
        if names != [stage for stage in STAGE_ORDER if stage in names]:
            raise ValueError(f"Нарушен порядок стадий: {names}")

        previous_end = 0
        for token in self.tokens:
            if token.end > len(self.final) or token.start < previous_end:
                raise ValueError(f"Токен '{token.surface}' вне текста или пересекается")
            previous_end = token.end
        return self
