"""Сервис нормализации code-mixed текста."""

import re
import unicodedata
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional

import emoji
from nltk.stem.porter import PorterStemmer

from src.core.logging import log
from src.repositories.lexicon import (
    EMOJI_TABLE,
    ENGLISH_LEXICON,
    HINDI_LEXICON,
    LexiconRepository,
)
from src.schemas.textprep import (
    LangTag,
    PreprocessConfig,
    PreprocessTrace,
    StageRecord,
    TokenSpan,
)
from src.services.base_service import BaseService

# URL со схемой или с префиксом www.
URL_PATTERN = re.compile(r"(?:\b[a-z][a-z0-9+.\-]*://|\bwww\.)\S+", re.IGNORECASE)
# @-упоминание: @ и символы слова, не внутри e-mail
MENTION_PATTERN = re.compile(r"(?<!\w)@\w+")
# Тег стандартизированного эмодзи
EMOJI_TAG_PATTERN = re.compile(r"<emo:[a-z0-9_]+>")
# Маркер переключения языка и он же с последующими пробелами
LANG_MARKER_PATTERN = re.compile(r"<lang:(?:hi|en)>")
LANG_MARKER_RUN = re.compile(r"<lang:(?:hi|en)>\s*")
LANG_MARKERS = {LangTag.HINDI_ROMANIZED: "<lang:hi>", LangTag.ENGLISH: "<lang:en>"}
TOKEN_PATTERN = re.compile(r"\S+")

VOWEL_RUN = re.compile(r"([aeiou])\1{2,}")
ANY_RUN = re.compile(r"(.)\1+")

# Модификаторы, отбрасываемые перед поиском эмодзи в таблице
EMOJI_VARIATION_SELECTOR = 0xFE0F
SKIN_TONES = range(0x1F3FB, 0x1F400)
ZERO_WIDTH_JOINER = "\u200d"
OTHER_EMOJI = "other"


def is_punctuation(char: str) -> bool:
    return unicodedata.category(char).startswith("P")


def _is_control(char: str) -> bool:
    category = unicodedata.category(char)
    if char == ZERO_WIDTH_JOINER:
        return False
    return category == "Cc" or category == "Cf"


def strip_edge_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and is_punctuation(token[start]):
        start += 1
    while end > start and is_punctuation(token[end - 1]):
        end -= 1
    return token[start:end]


def collapse_punctuation_runs(token: str) -> str:
    """Серии пунктуации длиннее двух символов сводятся к первому символу серии."""
    result: List[str] = []
    index = 0
    while index < len(token):
        if not is_punctuation(token[index]):
            result.append(token[index])
            index += 1
            continue
        end = index
        while end < len(token) and is_punctuation(token[end]):
            end += 1
        run = token[index:end]
        result.append(run[0] if len(run) > 2 else run)
        index = end
    return "".join(result)


def is_emoji_tag(token: str) -> bool:
    return EMOJI_TAG_PATTERN.fullmatch(token) is not None


def is_lang_marker(token: str) -> bool:
    return LANG_MARKER_PATTERN.fullmatch(token) is not None


def is_tag(token: str) -> bool:
    """Служебный тег конвейера: эмодзи или маркер языка."""
    return is_emoji_tag(token) or is_lang_marker(token)


def emoji_key(sequence: str) -> str:
    """Ключ таблицы эмодзи: hex кодовых точек через '-' без fe0f и тонов кожи."""
    codepoints = [
        ord(char)
        for char in sequence
        if ord(char) != EMOJI_VARIATION_SELECTOR and ord(char) not in SKIN_TONES
    ]
    return "-".join(f"{codepoint:x}" for codepoint in codepoints)


class TextprepService(BaseService[LexiconRepository]):
    """
    Детерминированная поэтапная нормализация текста.

    Стадии выполняются в фиксированном порядке STAGE_ORDER; каждая включается
    флагом PreprocessConfig. Словари загружаются лениво один раз на экземпляр.
    """

    def __init__(self, repo: LexiconRepository):
        super().__init__(repo)
        self._stemmer = PorterStemmer()
        self._stages: Dict[str, Callable[[str], str]] = {
            "lowercase": str.lower,
            "strip_urls": self.strip_urls,
            "strip_mentions": self.strip_mentions,
            "strip_noise": self.strip_noise,
            "emoji_standardize": self.standardize_emoji,
            "translit_normalize": self.normalize_text_transliteration,
            "stem_english": self.stem_english,
            "language_id": self.mark_language_switches,
        }

    # --- Словари ---

    @cached_property
    def hindi_words(self) -> FrozenSet[str]:
        return self.repo.wordlist(HINDI_LEXICON)

    @cached_property
    def english_words(self) -> FrozenSet[str]:
        return self.repo.wordlist(ENGLISH_LEXICON)

    @cached_property
    def english_stems(self) -> FrozenSet[str]:
        # Стемминг идет до языковой разметки, поэтому основы английских слов тоже английские
        return frozenset(self._stemmer.stem(word) for word in self.english_words)

    @cached_property
    def translit_table(self) -> Dict[str, str]:
        return self.repo.translit_table()

    @cached_property
    def translit_canonical(self) -> FrozenSet[str]:
        return frozenset(self.translit_table.values())

    @cached_property
    def emoji_names(self) -> Dict[str, str]:
        return self.repo.table(EMOJI_TABLE)

    # --- Операции над токенами ---

    def identify_language(self, token: str) -> LangTag:
        """
        Языковой тег токена по поставляемым словарям.

        Порядок проверки: романизированный хинди, английский (слово или его
        основа), нейтральный (нет букв, тег эмодзи или маркер языка), иначе UNKNOWN.

        Args:
            token (str): Непустой токен.

        Returns:
            LangTag: Тег.

        Raises:
            ContractViolationError: Если токен пуст.
        """
        self._require(bool(token and token.strip()), "identify_language: пустой токен")
        if is_tag(token):
            return LangTag.NEUTRAL

        key = strip_edge_punctuation(token.strip().casefold())
        if key in self.hindi_words:
            return LangTag.HINDI_ROMANIZED
        if key in self.english_words or key in self.english_stems:
            return LangTag.ENGLISH
        if not any(char.isalpha() for char in key):
            return LangTag.NEUTRAL
        return LangTag.UNKNOWN

    def normalize_transliteration(self, token: str) -> str:
        """
        Приводит вариант написания романизированного хинди к канонической форме.

        Сначала ищется сам токен, затем он же со сжатыми сериями гласных (>=3 до 2)
        и со всеми сериями, сжатыми до одного символа. Английские слова вне
        таблицы и токены, которых нет в словарях, возвращаются без изменений.

        Args:
            token (str): Непустой токен.

        Returns:
            str: Каноническая форма или исходный токен.
        """
        if not token or is_tag(token):
            return token

        key = token.casefold()
        table = self.translit_table
        if key in table:
            return table[key]
        if key in self.translit_canonical or key in self.hindi_words or key in self.english_words:
            return token

        for candidate in (VOWEL_RUN.sub(r"\1\1", key), ANY_RUN.sub(r"\1", key)):
            if candidate in table:
                return table[candidate]
            if candidate in self.translit_canonical or candidate in self.hindi_words:
                return candidate
        return token

    def stem_token(self, token: str) -> str:
        """Основа Портера для английского токена; остальные токены не меняются."""
        if self.identify_language(token) != LangTag.ENGLISH:
            return token
        return self._stemmer.stem(token)

    # --- Стадии над текстом ---

    @staticmethod
    def strip_urls(text: str) -> str:
        # Замена пробелом не дает соседям склеиться в новый URL
        return URL_PATTERN.sub(" ", text)

    @staticmethod
    def strip_mentions(text: str) -> str:
        return MENTION_PATTERN.sub(" ", text)

    @staticmethod
    def strip_noise(text: str) -> str:
        """
        Очистка: управляющие символы удаляются, пробелы схлопываются, серии
        пунктуации длиннее двух сводятся к одному символу, пунктуация по краям
        токенов снимается. Теги эмодзи и маркеры языка не трогаются.
        """
        kept: List[str] = []
        for char in text:
            if char.isspace():
                kept.append(" ")
            elif not _is_control(char):
                kept.append(char)
        tokens: List[str] = []
        text = "".join(kept)
        for token in text.split():
            if is_tag(token):
                tokens.append(token)
                continue
            cleaned = strip_edge_punctuation(collapse_punctuation_runs(token))
            if cleaned:
                tokens.append(cleaned)
        return " ".join(tokens)

    def standardize_emoji(self, text: str) -> str:
        """
        Заменяет каждую эмодзи-последовательность тегом `<emo:NAME>`.

        Последовательность ищется в таблице целиком, затем по первой кодовой
        точке; не найденные становятся `<emo:other>`. Пробел добавляется только
        между тегом и вплотную прилегающим к нему текстом, остальной текст
        не меняется.
        """
        matches = emoji.emoji_list(text)
        if not matches:
            return text

        parts: List[str] = []

        def glue(piece: str) -> None:
            if not piece:
                return
            if parts and not parts[-1][-1].isspace() and not piece[0].isspace():
                parts.append(" ")
            parts.append(piece)

        cursor = 0
        for match in matches:
            glue(text[cursor : match["match_start"]])
            key = emoji_key(match["emoji"])
            name = self.emoji_names.get(key) or self.emoji_names.get(key.split("-")[0], OTHER_EMOJI)
            glue(f"<emo:{name}>")
            cursor = match["match_end"]
        glue(text[cursor:])
        return "".join(parts)

    def normalize_text_transliteration(self, text: str) -> str:
        return TOKEN_PATTERN.sub(lambda match: self.normalize_transliteration(match.group()), text)

    def stem_english(self, text: str) -> str:
        return TOKEN_PATTERN.sub(lambda match: self.stem_token(match.group()), text)

    def mark_language_switches(self, text: str) -> str:
        """
        Ставит маркер `<lang:hi>` или `<lang:en>` перед токеном, на котором
        язык переключается между романизированным хинди и английским.

        Нейтральные и неопознанные токены переключением не считаются.
        Прежние маркеры сначала снимаются, поэтому стадия идемпотентна.

        Пример: "tu bohot stupid hai" -> "tu bohot <lang:en> stupid <lang:hi> hai".
        """
        previous: Optional[LangTag] = None

        def mark(match: re.Match) -> str:
            nonlocal previous
            token = match.group()
            tag = self.identify_language(token)
            if tag not in LANG_MARKERS:
                return token
            switched = previous is not None and tag != previous
            previous = tag
            return f"{LANG_MARKERS[tag]} {token}" if switched else token

        return TOKEN_PATTERN.sub(mark, LANG_MARKER_RUN.sub("", text))

    # --- Конвейер ---

    def identify_tokens(self, text: str, tag: bool = True) -> List[TokenSpan]:
        """
        Токены текста (по пробелам) со смещениями и языковыми тегами.

        Маркеры переключения языка токенами не считаются.

        Args:
            text (str): Текст.
            tag (bool): Назначать теги; иначе все токены UNKNOWN.

        Returns:
            List[TokenSpan]: Токены по возрастанию смещения.
        """
        return [
            TokenSpan(
                surface=match.group(),
                start=match.start(),
                end=match.end(),
                lang_tag=self.identify_language(match.group()) if tag else LangTag.UNKNOWN,
            )
            for match in TOKEN_PATTERN.finditer(text)
            if not is_lang_marker(match.group())
        ]

    def _restrip(self, text: str, config: PreprocessConfig) -> str:
        """
        Очистка может открыть новый URL или упоминание (`_@user`, `@\\x00user`,
        `http:::://x`); снимаем их повторно вместе с очисткой, пока находятся.
        Каждый проход укорачивает текст, поэтому цикл конечен.
        """
        while (config.strip_urls and URL_PATTERN.search(text)) or (
            config.strip_mentions and MENTION_PATTERN.search(text)
        ):
            if config.strip_urls:
                text = self.strip_urls(text)
            if config.strip_mentions:
                text = self.strip_mentions(text)
            text = self.strip_noise(text)
        return text

    def preprocess(self, raw: str, config: PreprocessConfig) -> PreprocessTrace:
        """
        Прогоняет текст через включенные стадии.

        Args:
            raw (str): Исходный текст (может быть пустым).
            config (PreprocessConfig): Включенные стадии.

        Returns:
            PreprocessTrace: Трасса стадий, итоговый текст и токены.
        """
        stages: List[StageRecord] = []
        text = raw
        for stage in config.enabled_stages():
            text = self._stages[stage](text)
            if stage == "strip_noise":
                text = self._restrip(text, config)
            stages.append(StageRecord(name=stage, text=text))

        return PreprocessTrace(
            raw=raw,
            stages=stages,
            final=text,
            tokens=self.identify_tokens(text, tag=config.language_id),
        )

    def preprocess_many(self, texts: Iterable[str], config: PreprocessConfig) -> List[str]:
        """Итоговые тексты для набора строк."""
        texts = list(texts)
        log.debug(f"Предобработка {len(texts)} текстов: стадии {config.enabled_stages()}")
        return [self.preprocess(text, config).final for text in texts]
