import json
from pathlib import Path

import pytest

from src.core.exceptions import ConfigError, DatasetFormatError, UnknownLabelError
from src.repositories.dataset import DatasetRepository
from src.schemas.dataset import Label, LabeledDataset, LoaderConfig, Sample, Source


@pytest.fixture
def dataset_repo() -> DatasetRepository:
    return DatasetRepository()


def write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


# --- Конфигурации загрузчиков ---


@pytest.mark.parametrize("source", [source for source in Source if source != Source.CUSTOM])
def test_shipped_loader_configs(dataset_repo: DatasetRepository, source: Source):
    """Для каждого корпуса есть конфигурация, описывающая именно его."""
    config = dataset_repo.loader_config(source)
    assert config.source == source
    assert set(config.labels.values()) == {Label.NON_BULLY, Label.BULLY}


def test_loader_config_source_mismatch(dataset_repo: DatasetRepository, tmp_path: Path):
    other = write(tmp_path / "other.conf", 'source = "BOHRA"\ntext_field = "t"\nlabel_field = "l"\nlabels.x = 1\n')
    with pytest.raises(ConfigError, match="BOHRA"):
        dataset_repo.loader_config(Source.KUMAR, other)


# --- Исходные форматы ---


def test_read_kumar_csv_without_header(dataset_repo: DatasetRepository, tmp_path: Path):
    """Открытая и скрытая агрессия объединяются в BULLY."""
    path = write(
        tmp_path / "kumar.csv",
        'fb-1,"tu pagal hai, yaar",OAG\nfb-2,accha laga,NAG\nfb-3,kuch toh gadbad hai,CAG\n',
    )
    samples = dataset_repo.read_source(path, dataset_repo.loader_config(Source.KUMAR))

    assert [sample.id for sample in samples] == ["fb-1", "fb-2", "fb-3"]
    assert [int(sample.label) for sample in samples] == [1, 0, 1]
    assert samples[0].text == "tu pagal hai, yaar"
    assert all(sample.source == Source.KUMAR for sample in samples)


def test_read_tsv_with_header_generates_ids(dataset_repo: DatasetRepository, tmp_path: Path):
    path = write(tmp_path / "bohra.tsv", "text\tlabel\nye kya bakwas hai\tyes\nchal movie dekhte\tNo\n")
    samples = dataset_repo.read_source(path, dataset_repo.loader_config(Source.BOHRA))

    assert [sample.id for sample in samples] == ["bohra-000001", "bohra-000002"]
    # Метки сравниваются без учета регистра
    assert [int(sample.label) for sample in samples] == [1, 0]


def test_read_jsonl(dataset_repo: DatasetRepository, tmp_path: Path):
    config = LoaderConfig(
        source=Source.CUSTOM, format="jsonl", text_field="text", label_field="y", id_field="id", labels={"hof": 1, "not": 0}
    )
    lines = [{"id": "a", "text": "tu idiot hai", "y": "HOF"}, {"id": "b", "text": "good morning", "y": "NOT"}]
    path = write(tmp_path / "data.jsonl", "\n".join(json.dumps(line) for line in lines) + "\n")

    samples = dataset_repo.read_source(path, config)
    assert [(sample.id, int(sample.label)) for sample in samples] == [("a", 1), ("b", 0)]


def test_unknown_label_names_row(dataset_repo: DatasetRepository, tmp_path: Path):
    path = write(tmp_path / "kumar.csv", "fb-1,text one,OAG\nfb-2,text two,HATE\n")
    with pytest.raises(UnknownLabelError) as exc_info:
        dataset_repo.read_source(path, dataset_repo.loader_config(Source.KUMAR))

    assert exc_info.value.row == 2
    assert exc_info.value.label == "HATE"
    assert "OAG" in exc_info.value.permitted


def test_wrong_column_count(dataset_repo: DatasetRepository, tmp_path: Path):
    path = write(tmp_path / "bohra.tsv", "text\tlabel\nok text\tyes\nbroken row\n")
    with pytest.raises(DatasetFormatError) as exc_info:
        dataset_repo.read_source(path, dataset_repo.loader_config(Source.BOHRA))
    assert exc_info.value.row == 3


def test_empty_text_rejected(dataset_repo: DatasetRepository, tmp_path: Path):
    path = write(tmp_path / "bohra.tsv", "text\tlabel\n   \tyes\n")
    with pytest.raises(DatasetFormatError, match="пустой текст"):
        dataset_repo.read_source(path, dataset_repo.loader_config(Source.BOHRA))


def test_duplicate_id_rejected(dataset_repo: DatasetRepository, tmp_path: Path):
    path = write(tmp_path / "kumar.csv", "fb-1,one,OAG\nfb-1,two,NAG\n")
    with pytest.raises(DatasetFormatError, match="fb-1"):
        dataset_repo.read_source(path, dataset_repo.loader_config(Source.KUMAR))


def test_invalid_json_line(dataset_repo: DatasetRepository, tmp_path: Path):
    config = LoaderConfig(source=Source.CUSTOM, format="jsonl", text_field="text", label_field="y", labels={"1": 1})
    path = write(tmp_path / "data.jsonl", '{"text": "ok", "y": "1"}\n{broken\n')
    with pytest.raises(DatasetFormatError) as exc_info:
        dataset_repo.read_source(path, config)
    assert exc_info.value.row == 2


# --- Гармонизированный формат ---


def test_harmonized_write_then_read(dataset_repo: DatasetRepository, small_dataset: LabeledDataset, tmp_path: Path):
    path = dataset_repo.write_harmonized(small_dataset, tmp_path / "data.tsv")
    assert dataset_repo.read_harmonized(path) == small_dataset


def test_harmonized_text_with_tabs_and_quotes(dataset_repo: DatasetRepository, tmp_path: Path):
    dataset = LabeledDataset(
        samples=[Sample(id="q-1", text='he said "pagal"\tagain', label=Label.BULLY, source=Source.CUSTOM)],
        source=Source.CUSTOM,
    )
    path = dataset_repo.write_harmonized(dataset, tmp_path / "data.tsv")
    assert dataset_repo.read_harmonized(path).samples[0].text == 'he said "pagal"\tagain'


def test_harmonized_requires_header(dataset_repo: DatasetRepository, tmp_path: Path):
    path = write(tmp_path / "data.tsv", "x-1\t1\tCUSTOM\ttext\n")
    with pytest.raises(DatasetFormatError, match="заголовок"):
        dataset_repo.read_harmonized(path)


def test_harmonized_rejects_bad_label(dataset_repo: DatasetRepository, tmp_path: Path):
    path = write(tmp_path / "data.tsv", "id\tlabel\tsource\ttext\nx-1\t2\tCUSTOM\ttext\n")
    with pytest.raises(UnknownLabelError):
        dataset_repo.read_harmonized(path)


def test_checksum_is_stable(dataset_repo: DatasetRepository, make_dataset):
    first = dataset_repo.checksum(make_dataset(20, seed=1))
    assert first == dataset_repo.checksum(make_dataset(20, seed=1))
    assert first != dataset_repo.checksum(make_dataset(20, seed=2))
    assert len(first) == 64
