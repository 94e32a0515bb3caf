from pathlib import Path
from unittest.mock import MagicMock

import pytest

from src.core.exceptions import ConfigError
from src.repositories.manifest import ManifestRepository
from src.schemas.ablation import AblationAxis, AblationResult, AblationVariant, AxisName, GridBase, GridSpec
from src.schemas.metrics import MetricSet
from src.schemas.model import FreezeSpec
from src.schemas.textprep import PreprocessConfig
from src.schemas.training import TrainConfig
from src.services.ablation_service import METRICS_FILE, AblationService, variant_dir_name


def metric_set(accuracy: float, f1: float) -> MetricSet:
    return MetricSet(
        accuracy=accuracy,
        precision=f1,
        recall=f1,
        f1=f1,
        macro_f1=f1,
        specificity=0.5,
        support={"0": 2, "1": 2},
        confusion=[[1, 1], [1, 1]],
    )


def small_grid(*freeze_variants: str, folds_used: int = 1) -> GridSpec:
    """Две оси: заморозка (по списку) и линейная голова; база с маленькой головой."""
    return GridSpec(
        base=GridBase(hidden_sizes=[16]),
        folds_used=folds_used,
        axes=[
            AblationAxis(
                name=AxisName.FREEZING,
                variants=[AblationVariant(name=name, freeze=name) for name in freeze_variants],
            ),
            AblationAxis(name=AxisName.HEAD_DEPTH, variants=[AblationVariant(name="LINEAR", hidden_sizes=[])]),
        ],
    )


def make_service(root: Path, training_service, reference_repo) -> AblationService:
    return AblationService(
        ManifestRepository(root),
        training_service,
        training_service.dataset_service,
        training_service.evaluation_service,
        reference_repo,
    )


@pytest.fixture
def ablation_service(tmp_path, training_service, mock_reference_repo) -> AblationService:
    return make_service(tmp_path / "grid", training_service, mock_reference_repo)


# --- Сетка ---


def test_default_grid_rows():
    grid = AblationService.load_grid()
    rows = AblationService.grid_rows(grid)

    assert grid.row_count == len(rows) == 13
    assert [axis for axis, _ in rows] == ["FREEZING"] * 4 + ["HEAD_DEPTH"] * 4 + ["PREPROCESSING"] * 5
    assert [variant.name for _, variant in rows[:4]] == ["NONE", "EMB+1", "EMB+1-2", "ALL"]
    assert rows[4][1].hidden_sizes == []
    assert rows[-1][1].preprocess == "ALL"


def test_load_grid_missing_file(tmp_path: Path):
    with pytest.raises(ConfigError, match="Не удалось прочитать"):
        AblationService.load_grid(tmp_path / "absent.yaml")


def test_load_grid_invalid_schema(tmp_path: Path):
    path = tmp_path / "grid.yaml"
    path.write_text(
        "axes:\n"
        "  - {name: FREEZING, variants: [{name: NONE, freeze: NONE}]}\n"
        "  - {name: FREEZING, variants: [{name: ALL, freeze: ALL}]}\n",
        encoding="utf-8",
    )
    with pytest.raises(ConfigError, match="Некорректная сетка"):
        AblationService.load_grid(path)


def test_full_factorial_rows():
    grid = small_grid("NONE", "ALL").model_copy(update={"full_factorial": True})
    rows = AblationService.grid_rows(grid)

    assert grid.row_count == 2
    assert [variant.name for _, variant in rows] == ["NONE|LINEAR", "ALL|LINEAR"]
    assert all(axis == "FACTORIAL" for axis, _ in rows)
    assert rows[1][1].freeze == "ALL"
    assert rows[1][1].hidden_sizes == []


@pytest.mark.parametrize(
    "variant, freeze, hidden_sizes, preprocess",
    [
        (AblationVariant(name="ALL", freeze="ALL"), FreezeSpec.all(2), [512, 256, 128], PreprocessConfig.all()),
        (AblationVariant(name="LINEAR", hidden_sizes=[]), FreezeSpec.ablation_best(), [], PreprocessConfig.all()),
        (
            AblationVariant(name="BASIC", preprocess="BASIC"),
            FreezeSpec.ablation_best(),
            [512, 256, 128],
            PreprocessConfig.basic(),
        ),
    ],
    ids=["freeze", "head", "preprocess"],
)
def test_variant_overrides_one_dimension(tiny_model_config, variant, freeze, hidden_sizes, preprocess):
    grid = AblationService.load_grid()
    model_config, preprocess_config = AblationService.variant_configs(grid, variant, tiny_model_config)

    assert model_config.freeze == freeze
    assert model_config.head.hidden_sizes == hidden_sizes
    assert model_config.head.dropout == tiny_model_config.head.dropout
    assert model_config.max_seq_len == tiny_model_config.max_seq_len
    assert preprocess_config == preprocess


def test_variant_with_unknown_preset(tiny_model_config):
    with pytest.raises(ConfigError):
        AblationService.variant_configs(
            AblationService.load_grid(), AblationVariant(name="X", preprocess="EVERYTHING"), tiny_model_config
        )


# --- Запуск ---


def test_run_ablation_writes_variant_artifacts(
    ablation_service: AblationService, small_dataset, tiny_model_config, fast_train_config
):
    results = ablation_service.run_ablation(
        small_dataset, tiny_model_config, fast_train_config, small_grid("NONE", "ALL"), argv=["ablate"]
    )

    assert [(result.axis, result.variant) for result in results] == [
        ("FREEZING", "NONE"),
        ("FREEZING", "ALL"),
        ("HEAD_DEPTH", "LINEAR"),
    ]
    assert not any(result.failed for result in results)
    assert sum(result.is_best for result in results if result.axis == "FREEZING") == 1
    assert results[2].is_best

    digests = set()
    for result in results:
        directory = variant_dir_name(result.axis, result.variant)
        manifest = ablation_service.repo.read(directory)
        assert manifest.status == "ok"
        assert manifest.argv == ["ablate"]
        assert manifest.artifacts == {"metrics": METRICS_FILE}
        assert MetricSet.read(ablation_service.repo.path(directory, METRICS_FILE)) == result.metrics
        # Каждый вариант оценивается на тесте первого фолда
        assert result.metrics.total == ablation_service.dataset_service.make_folds(
            small_dataset, fast_train_config.k_folds, fast_train_config.seed
        ).fold_sizes()[0]
        digests.add(manifest.records["fold_plan_sha256"])
    assert len(digests) == 1


def test_run_ablation_resumes_finished_variants(
    ablation_service: AblationService, training_service, monkeypatch, small_dataset, tiny_model_config, fast_train_config
):
    grid = small_grid("NONE")
    first = ablation_service.run_ablation(small_dataset, tiny_model_config, fast_train_config, grid)

    monkeypatch.setattr(training_service, "run_fold", MagicMock(side_effect=AssertionError("не должен вызываться")))
    second = ablation_service.run_ablation(small_dataset, tiny_model_config, fast_train_config, grid)

    assert [result.metrics for result in second] == [result.metrics for result in first]
    assert [result.runtime for result in second] == pytest.approx([result.runtime for result in first])


def test_failed_variant_does_not_stop_grid(
    ablation_service: AblationService, small_dataset, tiny_model_config, fast_train_config
):
    results = ablation_service.run_ablation(
        small_dataset, tiny_model_config, fast_train_config, small_grid("BOGUS", "NONE")
    )

    bogus, none, linear = results
    assert bogus.failed and bogus.metrics is None
    assert "BOGUS" in bogus.error
    assert not bogus.is_best
    assert none.is_best and not none.failed
    assert not linear.failed

    manifest = ablation_service.repo.read(variant_dir_name("FREEZING", "BOGUS"))
    assert manifest.status == "failed"
    assert manifest.artifacts == {}


def test_pooled_metrics_over_several_folds(
    ablation_service: AblationService, small_dataset, tiny_model_config, fast_train_config
):
    results = ablation_service.run_ablation(
        small_dataset, tiny_model_config, fast_train_config, small_grid("NONE", folds_used=2)
    )
    sizes = ablation_service.dataset_service.make_folds(small_dataset, 3, fast_train_config.seed).fold_sizes()
    assert results[0].metrics.total == sizes[0] + sizes[1]


def test_folds_used_above_k(ablation_service: AblationService, small_dataset, tiny_model_config, fast_train_config):
    with pytest.raises(ConfigError, match="folds_used"):
        ablation_service.run_ablation(
            small_dataset, tiny_model_config, fast_train_config, small_grid("NONE", folds_used=4)
        )


# --- Отбор и отчет ---


def test_flag_best_breaks_accuracy_ties_by_f1():
    results = [
        AblationResult(axis="FREEZING", variant="A", metrics=metric_set(0.8, 0.7)),
        AblationResult(axis="FREEZING", variant="B", metrics=metric_set(0.8, 0.75)),
        AblationResult(axis="FREEZING", variant="C", metrics=metric_set(0.6, 0.9)),
        AblationResult(axis="HEAD_DEPTH", variant="LINEAR", failed=True),
    ]
    flagged = AblationService._flag_best(results)
    assert [result.is_best for result in flagged] == [False, True, False, False]


def test_build_report_layout(ablation_service: AblationService, mock_reference_repo):
    mock_reference_repo.ablation.return_value = {("FREEZING", "NONE"): {"accuracy": 80.0}}
    mock_reference_repo.for_source.return_value = {"MURIL": {"accuracy": 84.62}}
    results = [
        AblationResult(
            axis="FREEZING", variant="NONE", title="No Frozen Layers", metrics=metric_set(0.81, 0.8), runtime=1.5, is_best=True
        ),
        AblationResult(axis="FREEZING", variant="ALL", title="All Layers Frozen", failed=True),
        AblationResult(axis="HEAD_DEPTH", variant="LINEAR", metrics=metric_set(0.7, 0.7)),
    ]

    lines = ablation_service.build_report(results).text.splitlines()

    assert lines[0].startswith("Component Configuration")
    assert lines[2] == "Layer Freezing Strategy"
    assert lines[3].startswith("  No Frozen Layers *")
    assert lines[3].split()[-2:] == ["0.8000", "1.5"]
    assert "FAILED" in lines[4]
    assert lines[5] == "Classification Head Depth"
    assert lines[6].startswith("  LINEAR ")
    assert lines[-1].endswith("headline BULLYEXPLAIN MURIL accuracy 84.62%")


@pytest.mark.slow
def test_default_grid_on_tiny_backbone_is_deterministic(
    tmp_path, training_service, mock_reference_repo, make_dataset, tiny_model_config
):
    """Все 13 строк встроенной сетки проходят на крошечном энкодере и воспроизводимы."""
    dataset = make_dataset(200, seed=9)
    config = TrainConfig(learning_rate=1e-3, max_epochs=2, patience=1, batch_size=16, k_folds=5, seed=11)
    grid = AblationService.load_grid()

    runs = [
        make_service(tmp_path / name, training_service, mock_reference_repo).run_ablation(
            dataset, tiny_model_config, config, grid
        )
        for name in ("first", "second")
    ]

    assert len(runs[0]) == 13
    assert not any(result.failed for result in runs[0])
    assert [result.metrics for result in runs[0]] == [result.metrics for result in runs[1]]
    assert [result.is_best for result in runs[0]] == [result.is_best for result in runs[1]]
