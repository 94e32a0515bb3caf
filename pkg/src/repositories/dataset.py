"""Репозиторий датасетов: исходные форматы корпусов и гармонизированный TSV."""

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Any, Dict, Iterator, List, Tuple

from src.core.config import settings
from src.core.exceptions import ConfigError, DatasetFormatError, UnknownLabelError
from src.core.logging import log
from src.repositories.base import BaseRepository
from src.schemas.dataset import Label, LabeledDataset, LoaderConfig, Sample, Source

# Колонки гармонизированного формата
HARMONIZED_COLUMNS = ("id", "label", "source", "text")

# Номер строки файла и ее поля
Row = Tuple[int, Dict[str, Any]]


class DatasetRepository(BaseRepository):
    """
    Чтение корпусов по декларативным конфигурациям загрузчиков и
    чтение/запись гармонизированного формата `id, label, source, text`.

    Args:
        root (Path | None): Каталог конфигураций загрузчиков.
    """

    def __init__(self, root: Path | None = None):
        super().__init__(root or settings.RESOURCES_PATH / "loaders")  # type: ignore[operator]

    # --- Конфигурации загрузчиков ---

    def loader_config(self, source: Source, config_path: Path | None = None) -> LoaderConfig:
        """
        Загружает конфигурацию загрузчика источника.

        Args:
            source (Source): Источник.
            config_path (Path | None): Явный путь; иначе поставляемый `<source>.conf`.

        Returns:
            LoaderConfig: Конфигурация.

        Raises:
            ConfigError: Если файл отсутствует или некорректен.
        """
        path = Path(config_path) if config_path else self.path(f"{source.value.lower()}.conf")
        if not path.exists():
            raise ConfigError(f"Нет конфигурации загрузчика для {source.value}: {path}")
        config = LoaderConfig.read(path)
        if config.source != source:
            raise ConfigError(
                f"Конфигурация {path} описывает {config.source.value}, а не {source.value}"
            )
        return config

    # --- Исходные форматы ---

    def _iter_delimited(self, path: Path, config: LoaderConfig) -> Iterator[Row]:
        delimiter = "\t" if config.format == "tsv" else ","
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle, delimiter=delimiter)
            header: List[str] | None = None
            for values in reader:
                line_number = reader.line_num
                if not any(value.strip() for value in values):
                    continue
                if config.header and header is None:
                    header = [value.strip() for value in values]
                    continue
                if header is not None:
                    if len(values) != len(header):
                        raise DatasetFormatError(
                            line_number,
                            f"ожидалось {len(header)} колонок, получено {len(values)}",
                        )
                    yield line_number, dict(zip(header, values))
                else:
                    yield line_number, {str(index): value for index, value in enumerate(values)}

    def _iter_jsonl(self, path: Path) -> Iterator[Row]:
        with open(path, encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DatasetFormatError(line_number, f"некорректный JSON: {exc.msg}") from exc
                if not isinstance(record, dict):
                    raise DatasetFormatError(line_number, "ожидается JSON-объект")
                yield line_number, record

    @staticmethod
    def _field(row: Dict[str, Any], name: str, line_number: int) -> str:
        if name not in row:
            raise DatasetFormatError(line_number, f"нет поля '{name}'")
        value = row[name]
        return "" if value is None else str(value)

    @staticmethod
    def _label(raw: str, config: LoaderConfig, line_number: int) -> Label:
        key = raw.strip()
        labels = {name.casefold(): label for name, label in config.labels.items()}
        if key.casefold() not in labels:
            raise UnknownLabelError(key, config.labels.keys(), row=line_number)
        return labels[key.casefold()]

    def read_source(self, path: Path, config: LoaderConfig) -> List[Sample]:
        """
        Читает файл корпуса и гармонизирует метки.

        Args:
            path (Path): Путь к файлу.
            config (LoaderConfig): Схема файла.

        Returns:
            List[Sample]: Образцы в порядке файла.

        Raises:
            DatasetFormatError: Некорректная строка (с номером строки).
            UnknownLabelError: Метка вне таблицы соответствия.
            ArtifactError: Файл не читается.
        """
        path = Path(path)
        if not path.is_file():
            raise DatasetFormatError(0, f"файл не найден: {path}")

        rows = self._iter_jsonl(path) if config.format == "jsonl" else self._iter_delimited(path, config)
        samples: List[Sample] = []
        seen_ids: Dict[str, int] = {}

        for index, (line_number, row) in enumerate(rows, start=1):
            text = self._field(row, config.text_field, line_number)
            if not text.strip():
                raise DatasetFormatError(line_number, "пустой текст")
            label = self._label(self._field(row, config.label_field, line_number), config, line_number)
            sample_id = (
                self._field(row, config.id_field, line_number).strip()
                if config.id_field
                else f"{config.source.value.lower()}-{index:06d}"
            )
            if not sample_id:
                raise DatasetFormatError(line_number, "пустой идентификатор")
            if sample_id in seen_ids:
                raise DatasetFormatError(
                    line_number, f"идентификатор '{sample_id}' уже встречался в строке {seen_ids[sample_id]}"
                )
            seen_ids[sample_id] = line_number
            samples.append(Sample(id=sample_id, text=text, label=label, source=config.source))

        log.debug(f"Прочитано {len(samples)} строк из {path}")
        return samples

    # --- Гармонизированный формат ---

    @staticmethod
    def to_harmonized_text(dataset: LabeledDataset) -> str:
        """Сериализует датасет в гармонизированный TSV (с заголовком)."""
        buffer = io.StringIO(newline="")
        writer = csv.writer(buffer, delimiter="\t", lineterminator="\n")
        writer.writerow(HARMONIZED_COLUMNS)
        for sample in dataset.samples:
            writer.writerow([sample.id, int(sample.label), sample.source.value, sample.text])
        return buffer.getvalue()

    def write_harmonized(self, dataset: LabeledDataset, path: Path) -> Path:
        """Записывает датасет в гармонизированном формате."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(self.to_harmonized_text(dataset))
        log.info(f"Гармонизированный датасет ({len(dataset)} образцов) записан в {path}")
        return path

    def read_harmonized(self, path: Path) -> LabeledDataset:
        """
        Читает датасет в гармонизированном формате.

        Raises:
            DatasetFormatError: Отсутствует заголовок, некорректная метка или источник.
        """
        path = Path(path)
        if not path.is_file():
            raise DatasetFormatError(0, f"файл не найден: {path}")

        samples: List[Sample] = []
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle, delimiter="\t")
            header = next(reader, None)
            if header is None or tuple(header) != HARMONIZED_COLUMNS:
                raise DatasetFormatError(1, f"ожидается заголовок {' '.join(HARMONIZED_COLUMNS)}")
            for values in reader:
                line_number = reader.line_num
                if len(values) != len(HARMONIZED_COLUMNS):
                    raise DatasetFormatError(line_number, f"ожидалось 4 колонки, получено {len(values)}")
                sample_id, raw_label, raw_source, text = values
                if raw_label not in ("0", "1"):
                    raise UnknownLabelError(raw_label, ["0", "1"], row=line_number)
                try:
                    source = Source(raw_source)
                except ValueError as exc:
                    raise DatasetFormatError(line_number, f"неизвестный источник '{raw_source}'") from exc
                if not text.strip():
                    raise DatasetFormatError(line_number, "пустой текст")
                samples.append(
                    Sample(id=sample_id, text=text, label=Label(int(raw_label)), source=source)
                )

        sources = {sample.source for sample in samples}
        if len(sources) > 1:
            raise DatasetFormatError(0, f"в файле смешаны источники: {sorted(s.value for s in sources)}")
        source = sources.pop() if sources else Source.CUSTOM
        try:
            return LabeledDataset(samples=samples, source=source)
        except ValueError as exc:
            raise DatasetFormatError(0, str(exc)) from exc

    def checksum(self, dataset: LabeledDataset) -> str:
        """sha256 гармонизированной сериализации."""
        return hashlib.sha256(self.to_harmonized_text(dataset).encode("utf-8")).hexdigest()
