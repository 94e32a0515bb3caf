from pathlib import Path

import pytest

from src.core.exceptions import ContractViolationError
from src.services.calibration_service import DEFAULT_BIN_EDGES, CalibrationService

# 20 предсказаний в четырех корзинах по 5:
# уверенность 0.97 (4 верных), 0.88 (4 верных), 0.77 (3 верных), 0.62 (2 верных)
LABELS = [1, 1, 1, 1, 0] + [0, 0, 0, 0, 1] + [1, 1, 1, 0, 0] + [0, 0, 1, 1, 1]
SCORES = [0.97] * 5 + [0.12] * 5 + [0.77] * 5 + [0.38] * 5


@pytest.fixture
def calibration_service() -> CalibrationService:
    return CalibrationService()


def test_hand_computed_report(calibration_service: CalibrationService):
    report = calibration_service.calibration(LABELS, SCORES)

    assert report.n == 20
    assert report.n_correct == 13
    assert len(report.bins) == len(DEFAULT_BIN_EDGES) - 1
    filled = {index: item for index, item in enumerate(report.bins) if item.n}
    assert sorted(filled) == [2, 5, 7, 9]
    assert [filled[index].n_correct for index in (2, 5, 7, 9)] == [2, 3, 4, 4]
    assert filled[2].mean_confidence == pytest.approx(0.62)
    assert filled[9].accuracy == pytest.approx(0.8)

    assert report.ece == pytest.approx(0.16)
    assert report.mce == pytest.approx(0.22)
    assert report.brier == pytest.approx(4.563 / 20)


def test_empty_bins_have_zero_accuracy(calibration_service: CalibrationService):
    report = calibration_service.calibration(LABELS, SCORES)
    empty = [item for item in report.bins if item.n == 0]
    assert empty and all(item.accuracy == 0.0 and item.mean_confidence == 0.0 for item in empty)


def test_bins_are_half_open(calibration_service: CalibrationService):
    """Граница принадлежит нижней корзине, первая граница - первой корзине."""
    report = calibration_service.calibration_from_confidence(
        [0.5, 0.75, 0.76, 1.0], [True, False, True, True], bin_edges=[0.5, 0.75, 1.0]
    )
    assert [item.n for item in report.bins] == [2, 2]
    assert [item.n_correct for item in report.bins] == [1, 2]


def test_perfect_calibration(calibration_service: CalibrationService):
    report = calibration_service.calibration_from_confidence([1.0] * 4, [True] * 4)
    assert report.ece == 0.0
    assert report.mce == 0.0
    assert report.brier == 0.0


@pytest.mark.parametrize(
    "confidences, correct, edges",
    [
        ([], [], None),
        ([0.6, 0.7], [True], None),
        ([0.4], [True], None),
        ([0.6], [True], [0.5, 0.5, 1.0]),
        ([0.6], [True], [1.0]),
    ],
    ids=["empty", "length", "range", "edges-order", "edges-count"],
)
def test_rejects_bad_input(calibration_service: CalibrationService, confidences, correct, edges):
    with pytest.raises(ContractViolationError):
        calibration_service.calibration_from_confidence(confidences, correct, edges)


def test_confidence_ignores_threshold(calibration_service: CalibrationService):
    # Порог 0.7: оценка 0.62 - это NON_BULLY, но уверенность остается 0.62
    report = calibration_service.calibration([0, 1, 1], [0.62, 0.62, 0.92], threshold=0.7)

    filled = {index: item for index, item in enumerate(report.bins) if item.n}
    assert sorted(filled) == [2, 8]
    assert (filled[2].n, filled[2].n_correct) == (2, 1)
    assert (filled[8].n, filled[8].n_correct) == (1, 1)
    assert filled[2].mean_confidence == pytest.approx(0.62)
    assert report.n_correct == 2


@pytest.mark.parametrize("threshold", [0.3, 0.5, 0.7])
def test_bin_counts_do_not_depend_on_threshold(calibration_service: CalibrationService, threshold: float):
    report = calibration_service.calibration(LABELS, SCORES, threshold=threshold)
    assert [item.n for item in report.bins] == [item.n for item in calibration_service.calibration(LABELS, SCORES).bins]


def test_render(calibration_service: CalibrationService):
    text = CalibrationService.render(calibration_service.calibration(LABELS, SCORES))
    assert text.splitlines()[0].startswith("Confidence")
    assert "(0.95, 1.00]" in text
    assert "ECE=0.1600 MCE=0.2200" in text


def test_plots_are_written(calibration_service: CalibrationService, tmp_path: Path):
    report = calibration_service.calibration(LABELS, SCORES)

    reliability = CalibrationService.plot_reliability(report, tmp_path / "plots" / "reliability.png")
    histogram = CalibrationService.plot_correctness_histogram(report, tmp_path / "plots" / "histogram.png")

    for path in (reliability, histogram):
        assert path.is_file()
        assert path.stat().st_size > 0
