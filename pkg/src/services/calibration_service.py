"""Сервис анализа калибровки уверенности."""

from pathlib import Path
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.core.exceptions import ContractViolationError  # noqa: E402
from src.core.logging import log  # noqa: E402
from src.schemas.explain import CalibrationBin, CalibrationReport  # noqa: E402

# Уверенность бинарного классификатора лежит в [0.5, 1.0]
DEFAULT_BIN_EDGES = tuple(float(edge) for edge in np.linspace(0.5, 1.0, 11))


class CalibrationService:
    """Корзины уверенности, ECE/MCE/Brier и графики надежности."""

    def calibration(
        self,
        labels: Sequence[int],
        scores: Sequence[float],
        bin_edges: Optional[Sequence[float]] = None,
        threshold: float = 0.5,
    ) -> CalibrationReport:
        """
        Калибровка по вероятностям класса BULLY.

        Уверенность - большая из вероятностей двух классов, max(p, 1 - p),
        и от порога не зависит. Порог решает только, верно ли предсказание.

        Args:
            labels (Sequence[int]): Метки 0/1.
            scores (Sequence[float]): Вероятности BULLY.
            bin_edges (Optional[Sequence[float]]): Границы корзин по возрастанию.
            threshold (float): Порог предсказания BULLY.

        Returns:
            CalibrationReport: Таблица корзин и сводные ошибки.

        Raises:
            ContractViolationError: Пустой вход или разные длины.
        """
        y = np.asarray(labels, dtype=np.int64)
        p = np.asarray(scores, dtype=np.float64)
        if len(y) != len(p):
            raise ContractViolationError("calibration: длины меток и оценок различаются")
        predicted = (p >= threshold).astype(np.int64)
        confidence = np.maximum(p, 1.0 - p)
        return self.calibration_from_confidence(confidence, predicted == y, bin_edges)

    def calibration_from_confidence(
        self,
        confidences: Sequence[float],
        correct: Sequence[bool],
        bin_edges: Optional[Sequence[float]] = None,
    ) -> CalibrationReport:
        """
        Калибровка по готовым уверенностям и признакам верности.

        Корзины полуоткрыты (lo, hi]; значение, равное первой границе,
        попадает в первую корзину. Уверенности не округляются.

        Raises:
            ContractViolationError: Пустой вход, некорректные границы или
                уверенность вне диапазона корзин.
        """
        conf = np.asarray(confidences, dtype=np.float64)
        hits = np.asarray(correct, dtype=bool)
        edges = np.asarray(bin_edges if bin_edges is not None else DEFAULT_BIN_EDGES, dtype=np.float64)

        if len(conf) == 0:
            raise ContractViolationError("calibration: пустой вход")
        if len(conf) != len(hits):
            raise ContractViolationError("calibration: длины уверенностей и признаков верности различаются")
        if len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise ContractViolationError("calibration: границы корзин должны строго возрастать")
        if np.any(conf < edges[0]) or np.any(conf > edges[-1]):
            raise ContractViolationError(
                f"calibration: уверенность вне [{edges[0]}, {edges[-1]}]"
            )

        indices = np.clip(np.searchsorted(edges, conf, side="left") - 1, 0, len(edges) - 2)
        bins: List[CalibrationBin] = []
        ece = 0.0
        mce = 0.0
        for index in range(len(edges) - 1):
            members = indices == index
            n = int(members.sum())
            n_correct = int(hits[members].sum())
            accuracy = n_correct / n if n else 0.0
            mean_confidence = float(conf[members].mean()) if n else 0.0
            if n:
                gap = abs(accuracy - mean_confidence)
                ece += n / len(conf) * gap
                mce = max(mce, gap)
            bins.append(
                CalibrationBin(
                    confidence_lo=float(edges[index]),
                    confidence_hi=float(edges[index + 1]),
                    n=n,
                    n_correct=n_correct,
                    accuracy=accuracy,
                    mean_confidence=mean_confidence,
                )
            )

        brier = float(np.mean((conf - hits.astype(np.float64)) ** 2))
        report = CalibrationReport(
            bins=bins, ece=ece, mce=mce, brier=brier, n=len(conf), n_correct=int(hits.sum())
        )
        log.info(f"Калибровка: N={report.n}, ECE={ece:.4f}, MCE={mce:.4f}, Brier={brier:.4f}")
        return report

    @staticmethod
    def render(report: CalibrationReport) -> str:
        """Текстовая таблица корзин."""
        lines = [
            f"{'Confidence':<14}{'N':>7}{'Correct':>9}{'Wrong':>7}{'Accuracy':>10}{'MeanConf':>10}"
        ]
        for item in report.bins:
            lines.append(
                f"({item.confidence_lo:.2f}, {item.confidence_hi:.2f}]".ljust(14)
                + f"{item.n:>7}{item.n_correct:>9}{item.n_incorrect:>7}"
                + f"{item.accuracy:>10.4f}{item.mean_confidence:>10.4f}"
            )
        lines.append(f"ECE={report.ece:.4f} MCE={report.mce:.4f} Brier={report.brier:.4f} N={report.n}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def plot_reliability(report: CalibrationReport, path: Path) -> Path:
        """Диаграмма надежности: точность корзин против уверенности."""
        filled = [item for item in report.bins if item.n]
        figure, axis = plt.subplots(figsize=(6, 4))
        axis.plot(
            [item.mean_confidence for item in filled],
            [item.accuracy for item in filled],
            marker="o",
            label="accuracy",
        )
        low, high = report.bins[0].confidence_lo, report.bins[-1].confidence_hi
        axis.plot([low, high], [low, high], linestyle="--", color="grey", label="ideal")
        axis.set_xlabel("Confidence")
        axis.set_ylabel("Accuracy")
        axis.set_title(f"Confidence vs accuracy (ECE={report.ece:.3f})")
        axis.legend()
        return _save(figure, path)

    @staticmethod
    def plot_correctness_histogram(report: CalibrationReport, path: Path) -> Path:
        """Гистограмма уверенности с разделением на верные и ошибочные предсказания."""
        centers = [(item.confidence_lo + item.confidence_hi) / 2 for item in report.bins]
        width = (report.bins[0].confidence_hi - report.bins[0].confidence_lo) * 0.9
        correct = [item.n_correct for item in report.bins]
        wrong = [item.n_incorrect for item in report.bins]

        figure, axis = plt.subplots(figsize=(6, 4))
        axis.bar(centers, correct, width=width, color="tab:green", label="correct")
        axis.bar(centers, wrong, width=width, bottom=correct, color="tab:red", label="incorrect")
        axis.set_xlabel("Confidence")
        axis.set_ylabel("Predictions")
        axis.legend()
        return _save(figure, path)


def _save(figure, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    figure.tight_layout()
    figure.savefig(path, dpi=120)
    plt.close(figure)
    log.debug(f"График сохранен: {path}")
    return path
