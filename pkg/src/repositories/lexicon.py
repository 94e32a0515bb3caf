"""Репозиторий поставляемых словарей и таблиц."""

from functools import lru_cache
from pathlib import Path
from typing import Dict, FrozenSet, List, Tuple

from src.core.config import settings
from src.core.exceptions import ConfigError
from src.core.logging import log
from src.repositories.base import BaseRepository

# Словари, используемые конвейером предобработки
HINDI_LEXICON = "hindi_romanized.txt"
ENGLISH_LEXICON = "english_words.txt"
TRANSLIT_TABLE = "translit_variants.tsv"
EMOJI_TABLE = "emoji_names.tsv"
# Встроенный корпус предложений по типам смешения языков
PATTERN_CORPUS = "patterns.tsv"
CATEGORY_DIR = "categories"
SPAN_DIR = "spans"

Phrase = Tuple[str, ...]


class LexiconRepository(BaseRepository):
    """
    Чтение словарей: списков слов, списков фраз и двухколоночных таблиц.

    Все значения приводятся к нижнему регистру (casefold).
    """

    def __init__(self, root: Path | None = None):
        super().__init__(root or settings.RESOURCES_PATH / "lexicons")  # type: ignore[operator]

    def wordlist(self, name: str) -> FrozenSet[str]:
        """
        Загружает список слов (по одному на строку).

        Args:
            name (str): Относительный путь к файлу внутри репозитория.

        Returns:
            FrozenSet[str]: Множество слов.
        """
        words = frozenset(line.casefold() for line in self.iter_lines(self.path(name)))
        log.debug(f"Словарь '{name}': {len(words)} записей")
        return words

    def phrases(self, name: str) -> List[Phrase]:
        """Загружает список фраз; фраза из одного слова - кортеж длины 1."""
        return [tuple(line.casefold().split()) for line in self.iter_lines(self.path(name))]

    def rows(self, path: Path) -> List[Tuple[str, str]]:
        """
        Двухколоночные строки TSV в порядке файла, без изменения регистра.

        Args:
            path (Path): Путь к файлу (относительный - внутри репозитория).

        Raises:
            ConfigError: Если строка не содержит ровно двух колонок.
        """
        path = Path(path)
        if not path.is_absolute():
            path = self.path(str(path))
        pairs: List[Tuple[str, str]] = []
        for line_number, line in enumerate(self.iter_lines(path), start=1):
            columns = line.split("\t")
            if len(columns) != 2 or not all(column.strip() for column in columns):
                raise ConfigError(f"{path.name}: строка {line_number} должна содержать две колонки")
            pairs.append((columns[0].strip(), columns[1].strip()))
        return pairs

    def table(self, name: str) -> Dict[str, str]:
        """
        Загружает двухколоночную TSV-таблицу "ключ<TAB>значение".

        Raises:
            ConfigError: Если строка не содержит ровно двух колонок.
        """
        mapping = {key.casefold(): value.casefold() for key, value in self.rows(Path(name))}
        log.debug(f"Таблица '{name}': {len(mapping)} записей")
        return mapping

    def translit_table(self) -> Dict[str, str]:
        """
        Таблица вариантов транслитерации с разрешенными цепочками.

        Цепочка variant -> a -> b сворачивается в variant -> b, поэтому ни одно
        каноническое значение не является ключом.

        Raises:
            ConfigError: Если таблица содержит цикл.
        """
        raw = self.table(TRANSLIT_TABLE)
        resolved: Dict[str, str] = {}
        for variant in raw:
            seen = {variant}
            target = raw[variant]
            while target in raw and raw[target] != target:
                if target in seen:
                    raise ConfigError(f"Цикл в таблице транслитерации через '{target}'")
                seen.add(target)
                target = raw[target]
            if variant != target:
                resolved[variant] = target
        return resolved


@lru_cache
def get_lexicon_repository() -> LexiconRepository:
    return LexiconRepository()
