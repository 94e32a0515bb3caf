"""Сервис отчета об ошибках классификации."""

import re
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from src.core.logging import log
from src.models.classifier import Classifier
from src.repositories.lexicon import SPAN_DIR, LexiconRepository
from src.schemas.dataset import Label, LabeledDataset
from src.schemas.explain import AnnotatedSpan, FailureCase, SpanColor
from src.schemas.textprep import PreprocessConfig
from src.services.base_service import BaseService
from src.services.textprep_service import TextprepService
from src.services.training_service import EVAL_BATCH_SIZE

# Словари разметки по цветам; порядок задает приоритет при пересечении
SPAN_FILES = (
    (SpanColor.RED, "offensive.txt"),
    (SpanColor.ORANGE, "subtle_bias.txt"),
    (SpanColor.GREEN, "sarcastic_positive.txt"),
)


class FailureService(BaseService[LexiconRepository]):
    """
    Сбор ошибочных предсказаний с автоматической цветовой разметкой.

    Args:
        repo (LexiconRepository): Словари разметки.
        textprep_service (TextprepService): Предобработка перед инференсом.
    """

    def __init__(self, repo: LexiconRepository, textprep_service: TextprepService):
        super().__init__(repo)
        self.textprep_service = textprep_service

    @cached_property
    def span_patterns(self) -> List[Tuple[SpanColor, re.Pattern]]:
        patterns = []
        for color, filename in SPAN_FILES:
            for phrase in self.repo.phrases(f"{SPAN_DIR}/{filename}"):
                body = r"\s+".join(re.escape(word) for word in phrase)
                patterns.append((color, re.compile(rf"(?<!\w){body}(?!\w)", re.IGNORECASE)))
        return patterns

    def annotate(self, text: str) -> List[AnnotatedSpan]:
        """
        Размечает фрагменты текста по словарям.

        При пересечении побеждает более ранний фрагмент, затем более длинный,
        затем цвет с большим приоритетом (RED, ORANGE, GREEN).
        """
        candidates = []
        for priority, (color, pattern) in enumerate(self.span_patterns):
            for match in pattern.finditer(text):
                candidates.append((match.start(), -(match.end() - match.start()), priority, match, color))

        spans: List[AnnotatedSpan] = []
        cursor = 0
        for start, _, _, match, color in sorted(candidates, key=lambda item: item[:3]):
            if start < cursor:
                continue
            spans.append(AnnotatedSpan(start=start, end=match.end(), surface=match.group(), color=color))
            cursor = match.end()
        return spans

    def failure_report(
        self,
        model: Classifier,
        dataset: LabeledDataset,
        preprocess: Optional[PreprocessConfig] = None,
        threshold: float = 0.5,
    ) -> List[FailureCase]:
        """
        Все ошибки модели на датасете, самые уверенные первыми.

        Args:
            model (Classifier): Обученная модель.
            dataset (LabeledDataset): Размеченные данные.
            preprocess (Optional[PreprocessConfig]): Предобработка перед инференсом.
            threshold (float): Порог предсказания BULLY.

        Returns:
            List[FailureCase]: Ошибки с разметкой; analyst_note пуст.
        """
        log.info(f"Поиск ошибок модели на {len(dataset)} образцах")
        texts = (
            self.textprep_service.preprocess_many(dataset.texts, preprocess) if preprocess else dataset.texts
        )
        scores = model.predict_proba(texts, batch_size=EVAL_BATCH_SIZE)
        predicted = (scores >= threshold).astype(np.int64)

        cases = [
            FailureCase(
                id=sample.id,
                text=sample.text,
                truth=sample.label,
                predicted=Label(int(predicted[index])),
                confidence=float(max(scores[index], 1.0 - scores[index])),
                annotated_spans=self.annotate(sample.text),
            )
            for index, sample in enumerate(dataset.samples)
            if predicted[index] != int(sample.label)
        ]
        cases.sort(key=lambda case: (-case.confidence, case.id))
        log.success(f"Найдено ошибок: {len(cases)} из {len(dataset)}")
        return cases

    @staticmethod
    def render(cases: List[FailureCase]) -> str:
        """Текстовый отчет: фрагменты выделены как [RED:слово]."""
        lines = [f"{'Id':<16}{'Truth':<10}{'Pred':<10}{'Conf':>6}  Text"]
        for case in cases:
            marked = case.text
            for span in sorted(case.annotated_spans, key=lambda item: -item.start):
                marked = f"{marked[: span.start]}[{span.color.value}:{span.surface}]{marked[span.end :]}"
            lines.append(
                f"{case.id:<16}{case.truth.name:<10}{case.predicted.name:<10}{case.confidence:>6.3f}  {marked}"
            )
        return "\n".join(lines) + "\n"
