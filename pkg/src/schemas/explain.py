"""Схемы Pydantic для объяснимости: атрибуции, калибровка, отказы."""

from enum import Enum
from typing import List

from pydantic import Field, model_validator

from src.schemas.base import TunedModel
from src.schemas.dataset import Label
from src.schemas.textprep import LangTag


class Category(str, Enum):
    """Семантическая категория слова."""

    DIRECT_OFFENSIVE = "DIRECT_OFFENSIVE"
    INTENSIFIER = "INTENSIFIER"
    CULTURAL_REFERENCE = "CULTURAL_REFERENCE"
    TRANSLITERATED_EXPRESSION = "TRANSLITERATED_EXPRESSION"
    ENGLISH_IN_HINDI_CONTEXT = "ENGLISH_IN_HINDI_CONTEXT"
    OTHER = "OTHER"


class AttributionMethod(str, Enum):
    """Метод градиентной атрибуции."""

    GRADIENT_X_INPUT = "gradient_x_input"
    INTEGRATED_GRADIENTS = "integrated_gradients"


class AttributionRecord(TunedModel):
    """
    Атрибуция одного слова.

    Fields:
        word (str): Слово.
        lang_tag (LangTag): Язык слова.
        score (float): Сумма атрибуций подслов (>= 0).
        category (Category): Категория по словарям.
        subword_scores (List[float]): Атрибуции подслов.
    """

    word: str
    lang_tag: LangTag
    score: float = Field(..., ge=0.0)
    category: Category = Category.OTHER
    subword_scores: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _score_is_sum(self) -> "AttributionRecord":
        if abs(self.score - sum(self.subword_scores)) > 1e-6 * max(1.0, self.score):
            raise ValueError("score должен равняться сумме subword_scores")
        return self


class WordSummary(TunedModel):
    """Средняя атрибуция слова по корпусу."""

    word: str
    lang_tag: LangTag
    category: Category
    mean_score: float
    occurrences: int


class PatternType(str, Enum):
    """Типы смешения языков."""

    HINDI_ENGLISH_SWITCH = "Hindi-English Switch"
    ENGLISH_HINDI_SWITCH = "English-Hindi Switch"
    TRANSLITERATION_ENGLISH = "Transliteration + English"
    CULTURAL_CODE_MIXING = "Cultural-Code Mixing"
    ROMANIZED_HINDI_PHRASES = "Romanized Hindi Phrases"
    ENGLISH_DISCOURSE_MARKERS = "English-Discourse-Markers"


class PatternSentence(TunedModel):
    """Предложение с размеченным типом смешения."""

    pattern: PatternType
    text: str


class PatternScore(TunedModel):
    """Средняя (по предложениям) максимальная атрибуция слова для типа смешения."""

    pattern: PatternType
    mean_attribution: float
    n_sentences: int
    example: str
    top_words: List[str] = Field(default_factory=list)


class CalibrationBin(TunedModel):
    """
    Корзина уверенности.

    Fields:
        confidence_lo, confidence_hi (float): Границы корзины (lo, hi].
        n (int): Число предсказаний.
        n_correct (int): Число верных.
        accuracy (float): n_correct / n (0 для пустой корзины).
        mean_confidence (float): Средняя уверенность в корзине.
    """

    confidence_lo: float
    confidence_hi: float
    n: int = Field(..., ge=0)
    n_correct: int = Field(..., ge=0)
    accuracy: float
    mean_confidence: float

    @property
    def n_incorrect(self) -> int:
        return self.n - self.n_correct


class CalibrationReport(TunedModel):
    """
    Таблица калибровки.

    Fields:
        bins (List[CalibrationBin]): Корзины в порядке возрастания уверенности.
        ece (float): Expected calibration error.
        mce (float): Maximum calibration error (по непустым корзинам).
        brier (float): Brier score по вероятности предсказанного класса.
        n (int): Всего предсказаний.
        n_correct (int): Всего верных.
    """

    bins: List[CalibrationBin]
    ece: float = Field(..., ge=0.0, le=1.0)
    mce: float = Field(..., ge=0.0, le=1.0)
    brier: float = Field(..., ge=0.0)
    n: int
    n_correct: int


class SpanColor(str, Enum):
    """Цветовая разметка фрагментов в отчете об ошибках."""

    RED = "RED"  # оскорбительная или агрессивная лексика
    ORANGE = "ORANGE"  # скрытая предвзятость
    GREEN = "GREEN"  # позитивные слова в саркастическом употреблении


class AnnotatedSpan(TunedModel):
    """Размеченный фрагмент текста."""

    start: int = Field(..., ge=0)
    end: int
    surface: str
    color: SpanColor


class FailureCase(TunedModel):
    """
    Ошибочно классифицированный образец.

    Fields:
        id (str): Идентификатор образца.
        text (str): Исходный текст.
        truth (Label): Истинная метка.
        predicted (Label): Предсказанная метка.
        confidence (float): Большая из вероятностей двух классов.
        annotated_spans (List[AnnotatedSpan]): Автоматическая разметка.
        analyst_note (str): Заполняется аналитиком вручную.
    """

    id: str
    text: str
    truth: Label
    predicted: Label
    confidence: float = Field(..., ge=0.5, le=1.0)
    annotated_spans: List[AnnotatedSpan] = Field(default_factory=list)
    analyst_note: str = ""

    @model_validator(mode="after")
    def _is_failure(self) -> "FailureCase":
        if self.truth == self.predicted:
            raise ValueError("FailureCase требует truth != predicted")
        return self
