import numpy as np
import pytest

from src.core.exceptions import ContractViolationError
from src.schemas.dataset import Source
from src.schemas.metrics import MetricSet
from src.services.evaluation_service import EvaluationService


@pytest.fixture
def evaluation_service(mock_reference_repo) -> EvaluationService:
    return EvaluationService(mock_reference_repo)


def metric_set(f1: float, roc_auc=0.9, accuracy: float = 0.8) -> MetricSet:
    """Набор метрик с произвольными значениями (для агрегатов и таблиц)."""
    return MetricSet(
        accuracy=accuracy,
        precision=f1,
        recall=f1,
        f1=f1,
        macro_f1=f1,
        specificity=0.5,
        roc_auc=roc_auc,
        support={"0": 2, "1": 2},
        confusion=[[1, 1], [1, 1]],
    )


def pairwise_auc(labels: np.ndarray, scores: np.ndarray) -> float:
    """Доля пар (BULLY, NON_BULLY), упорядоченных верно; ничья дает 1/2."""
    positives = scores[labels == 1]
    negatives = scores[labels == 0]
    wins = sum((p > n) + 0.5 * (p == n) for p in positives for n in negatives)
    return wins / (len(positives) * len(negatives))


# --- ROC-AUC ---


def test_roc_auc_matches_pairwise_counting(evaluation_service: EvaluationService):
    rng = np.random.default_rng(42)
    for _ in range(200):
        n = int(rng.integers(2, 40))
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        # Округление создает ничьи
        scores = np.round(rng.random(n), 1)

        metrics = evaluation_service.compute_metrics(labels, scores)
        assert metrics.roc_auc == pytest.approx(pairwise_auc(labels, scores))


@pytest.mark.parametrize(
    "labels, scores, expected",
    [
        ([1, 1, 0, 0], [0.9, 0.8, 0.3, 0.1], 1.0),
        ([1, 0, 1, 0], [0.9, 0.8, 0.7, 0.1], 0.75),
        ([0, 0, 1, 1], [0.9, 0.8, 0.3, 0.1], 0.0),
        ([1, 0], [0.5, 0.5], 0.5),
    ],
)
def test_roc_auc_examples(evaluation_service: EvaluationService, labels, scores, expected):
    assert evaluation_service.compute_metrics(labels, scores).roc_auc == pytest.approx(expected)


# --- Метрики по порогу ---


def test_confusion_arithmetic(evaluation_service: EvaluationService):
    labels = [1, 1, 1, 0, 0, 0, 0, 1]
    scores = [0.9, 0.6, 0.4, 0.2, 0.7, 0.1, 0.5, 0.8]

    metrics = evaluation_service.compute_metrics(labels, scores)

    # Оценка, равная порогу, считается BULLY
    assert metrics.confusion == [[2, 2], [1, 3]]
    assert metrics.support == {"0": 4, "1": 4}
    assert metrics.accuracy == pytest.approx(5 / 8)
    assert metrics.precision == pytest.approx(3 / 5)
    assert metrics.recall == pytest.approx(3 / 4)
    assert metrics.f1 == pytest.approx(2 / 3)
    assert metrics.specificity == pytest.approx(1 / 2)
    assert metrics.macro_f1 == pytest.approx((2 / 3 + 4 / 7) / 2)
    assert not metrics.degenerate


def test_threshold_changes_predictions(evaluation_service: EvaluationService):
    labels = [1, 1, 0, 0]
    scores = [0.9, 0.6, 0.7, 0.1]
    sweep = evaluation_service.threshold_sweep(labels, scores, [0.8, 0.5])

    assert [metrics.threshold for metrics in sweep] == [0.5, 0.8]
    assert sweep[0].confusion == [[1, 1], [0, 2]]
    assert sweep[1].confusion == [[2, 0], [1, 1]]
    # AUC от порога не зависит
    assert sweep[0].roc_auc == sweep[1].roc_auc


def test_degenerate_labels(evaluation_service: EvaluationService):
    metrics = evaluation_service.compute_metrics([1, 1, 1], [0.9, 0.2, 0.7])
    assert metrics.degenerate
    assert metrics.roc_auc is None
    assert metrics.recall == pytest.approx(2 / 3)
    assert metrics.specificity == 0.0


def test_no_positive_predictions(evaluation_service: EvaluationService):
    metrics = evaluation_service.compute_metrics([1, 0, 0], [0.1, 0.2, 0.3])
    assert metrics.precision == 0.0
    assert metrics.f1 == 0.0
    assert metrics.accuracy == pytest.approx(2 / 3)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_metrics_invariant_under_joint_permutation(evaluation_service: EvaluationService, seed: int):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=30)
    labels[:2] = [0, 1]
    scores = np.round(rng.random(30), 2)
    order = rng.permutation(30)

    original = evaluation_service.compute_metrics(labels, scores)
    shuffled = evaluation_service.compute_metrics(labels[order], scores[order])

    assert shuffled.confusion == original.confusion
    assert shuffled.support == original.support
    for name in ("accuracy", "precision", "recall", "f1", "macro_f1", "specificity", "roc_auc"):
        assert getattr(shuffled, name) == pytest.approx(getattr(original, name))


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_threshold_monotonicity(evaluation_service: EvaluationService, seed: int):
    """С ростом порога recall не растет, а specificity не падает."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=50)
    labels[:2] = [0, 1]
    scores = np.round(rng.random(50), 1)

    sweep = evaluation_service.threshold_sweep(labels, scores, np.linspace(0.0, 1.0, 21).tolist())
    recalls = [metrics.recall for metrics in sweep]
    specificities = [metrics.specificity for metrics in sweep]

    assert all(later <= earlier for earlier, later in zip(recalls, recalls[1:]))
    assert all(later >= earlier for earlier, later in zip(specificities, specificities[1:]))
    assert recalls[0] == 1.0 and specificities[-1] >= specificities[0]


@pytest.mark.parametrize(
    "labels, scores",
    [([], []), ([1, 0], [0.5]), ([1, 0], [0.5, 1.5]), ([1, 0], [0.5, float("nan")]), ([2, 0], [0.5, 0.5])],
    ids=["empty", "length", "range", "nan", "label"],
)
def test_compute_metrics_rejects_bad_input(evaluation_service: EvaluationService, labels, scores):
    with pytest.raises(ContractViolationError):
        evaluation_service.compute_metrics(labels, scores)


# --- Агрегаты ---


def test_aggregate_mean_and_sample_std(evaluation_service: EvaluationService):
    aggregate = evaluation_service.aggregate(
        [metric_set(0.6), metric_set(0.7, roc_auc=None), metric_set(0.8)], failed_folds=[3]
    )

    assert aggregate.n_folds == 3
    assert aggregate.failed_folds == [3]
    assert aggregate.metrics["f1"].mean == pytest.approx(0.7)
    assert aggregate.metrics["f1"].std == pytest.approx(0.1)
    # Фолд без AUC не участвует в агрегате AUC
    assert aggregate.metrics["roc_auc"].n == 2
    assert aggregate.metrics["roc_auc"].std == pytest.approx(0.0)


def test_aggregate_single_fold(evaluation_service: EvaluationService):
    aggregate = evaluation_service.aggregate([metric_set(0.6)])
    assert aggregate.metrics["f1"].std == 0.0
    assert aggregate.metrics["f1"].n == 1


# --- Сравнительные таблицы ---


def test_compare_table_sorted_by_f1_then_name(evaluation_service: EvaluationService):
    table = evaluation_service.compare_table(
        {"zeta": metric_set(0.7), "alpha": metric_set(0.7), "best": metric_set(0.9)}
    )
    assert [row.name for row in table.rows] == ["best", "alpha", "zeta"]
    assert all(row.deltas == {} for row in table.rows)
    assert "[ref]" not in table.text


def test_compare_table_deltas_against_matching_row(evaluation_service: EvaluationService):
    reference = {"MURIL": {"accuracy": 84.62, "f1": 84.83}, "BiLSTM": {"f1": 70.0}}
    table = evaluation_service.compare_table(
        {"MURIL": metric_set(0.85, accuracy=0.8), "ours": metric_set(0.5)}, reference
    )

    muril, ours = table.rows
    assert muril.deltas == pytest.approx({"accuracy": -4.62, "f1": 0.17})
    # Нет одноименной строки, а эталон из нескольких строк
    assert ours.deltas == {}
    assert "[ref] MURIL" in table.text
    assert "[ref] BiLSTM" in table.text


def test_compare_table_single_reference_row(evaluation_service: EvaluationService):
    table = evaluation_service.compare_table({"run-1": metric_set(0.8)}, {"MURIL": {"f1": 84.83}})
    assert table.rows[0].deltas == pytest.approx({"f1": -4.83})


def test_compare_table_requires_results(evaluation_service: EvaluationService):
    with pytest.raises(ContractViolationError):
        evaluation_service.compare_table({})


def test_reference_for_delegates_to_repo(evaluation_service: EvaluationService, mock_reference_repo):
    mock_reference_repo.for_source.return_value = {"MURIL": {"f1": 84.83}}
    assert evaluation_service.reference_for(Source.BULLYEXPLAIN) == {"MURIL": {"f1": 84.83}}
    mock_reference_repo.for_source.assert_called_once_with(Source.BULLYEXPLAIN)
