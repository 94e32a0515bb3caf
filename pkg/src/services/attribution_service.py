"""Сервис градиентной атрибуции слов и анализа типов смешения языков."""

from collections import defaultdict
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import torch

from src.core.exceptions import ConfigError
from src.core.logging import log
from src.models.classifier import Classifier
from src.repositories.lexicon import CATEGORY_DIR, PATTERN_CORPUS, LexiconRepository, Phrase
from src.schemas.dataset import Label
from src.schemas.explain import (
    AttributionMethod,
    AttributionRecord,
    Category,
    PatternScore,
    PatternSentence,
    PatternType,
    WordSummary,
)
from src.schemas.textprep import PreprocessConfig
from src.services.base_service import BaseService
from src.services.textprep_service import TextprepService, is_lang_marker

# Число шагов пути интегрированных градиентов
IG_STEPS = 20
TOP_WORDS = 3

# Файлы словарей категорий (порядок проверки совпадает с порядком перечисления)
CATEGORY_FILES = {
    Category.DIRECT_OFFENSIVE: "direct_offensive.txt",
    Category.INTENSIFIER: "intensifier.txt",
    Category.CULTURAL_REFERENCE: "cultural_reference.txt",
    Category.TRANSLITERATED_EXPRESSION: "transliterated_expression.txt",
    Category.ENGLISH_IN_HINDI_CONTEXT: "english_in_hindi_context.txt",
}


class AttributionService(BaseService[LexiconRepository]):
    """
    Атрибуция градиент x вход (или интегрированные градиенты) по эмбеддингам
    подслов с агрегированием в слова суммой.

    Args:
        repo (LexiconRepository): Словари категорий и корпус типов смешения.
        textprep_service (TextprepService): Языковые теги и стемминг.
    """

    def __init__(self, repo: LexiconRepository, textprep_service: TextprepService):
        super().__init__(repo)
        self.textprep_service = textprep_service

    # --- Категории ---

    @cached_property
    def category_phrases(self) -> Dict[Category, List[Phrase]]:
        """Фразы категорий вместе с их основами (текст мог пройти стемминг)."""
        stem = self.textprep_service.stem_token
        phrases: Dict[Category, List[Phrase]] = {}
        for category, filename in CATEGORY_FILES.items():
            entries = self.repo.phrases(f"{CATEGORY_DIR}/{filename}")
            stemmed = [tuple(stem(word) for word in phrase) for phrase in entries]
            phrases[category] = list(dict.fromkeys(entries + stemmed))
        return phrases

    def categorize(self, words: Sequence[str]) -> List[Category]:
        """
        Категория каждого слова предложения.

        Слово получает первую (в порядке перечисления) категорию, фраза
        которой покрывает его как часть подряд идущих слов.
        """
        folded = [word.casefold() for word in words]
        categories = [Category.OTHER] * len(words)
        for category, phrases in self.category_phrases.items():
            for phrase in phrases:
                width = len(phrase)
                for start in range(len(folded) - width + 1):
                    if tuple(folded[start : start + width]) != phrase:
                        continue
                    for index in range(start, start + width):
                        if categories[index] == Category.OTHER:
                            categories[index] = category
        return categories

    # --- Атрибуция ---

    def subword_attributions(
        self,
        model: Classifier,
        inputs_embeds: torch.Tensor,
        attention_mask: torch.Tensor,
        target: Label = Label.BULLY,
        method: AttributionMethod = AttributionMethod.GRADIENT_X_INPUT,
        steps: int = IG_STEPS,
    ) -> torch.Tensor:
        """
        Атрибуция каждой позиции: сумма по измерению эмбеддинга модулей
        произведения градиента логита target на эмбеддинг.

        Args:
            model (Classifier): Модель (переводится в eval-режим на время вызова).
            inputs_embeds (torch.Tensor): Эмбеддинги подслов формы (1, L, H).
            attention_mask (torch.Tensor): Маска формы (1, L).
            target (Label): Класс, чей логит объясняется.
            method (AttributionMethod): Метод.
            steps (int): Шаги интегрированных градиентов (нулевая базовая линия).

        Returns:
            torch.Tensor: Оценки позиций формы (L,).
        """
        was_training = model.training
        model.eval()
        try:
            inputs_embeds = inputs_embeds.detach()
            if method == AttributionMethod.GRADIENT_X_INPUT:
                gradient = self._gradient(model, inputs_embeds, attention_mask, target)
            else:
                gradient = torch.zeros_like(inputs_embeds)
                for step in range(1, steps + 1):
                    gradient += self._gradient(model, inputs_embeds * (step / steps), attention_mask, target)
                gradient /= steps
        finally:
            model.train(was_training)
        return (gradient * inputs_embeds).abs().sum(dim=-1)[0]

    @staticmethod
    def _gradient(
        model: Classifier, inputs_embeds: torch.Tensor, attention_mask: torch.Tensor, target: Label
    ) -> torch.Tensor:
        leaf = inputs_embeds.clone().requires_grad_(True)
        logits = model.forward_embeddings(leaf, attention_mask)
        (gradient,) = torch.autograd.grad(logits[0, int(target)], leaf)
        return gradient

    def attribute(
        self,
        model: Classifier,
        text: str,
        target: Label = Label.BULLY,
        method: AttributionMethod = AttributionMethod.GRADIENT_X_INPUT,
    ) -> List[AttributionRecord]:
        """
        Атрибуции слов предобработанного текста.

        Служебные позиции и паддинг исключаются; оценки подслов одного слова
        суммируются. Записи отсортированы по убыванию оценки, при равенстве -
        по позиции слова.

        Args:
            model (Classifier): Обученная модель.
            text (str): Предобработанный текст.
            target (Label): Объясняемый класс.
            method (AttributionMethod): Метод атрибуции.

        Returns:
            List[AttributionRecord]: Записи слов (пусто, если у текста нет подслов).
        """
        item = model.tokenize(text)
        if all(word_id is None for word_id in item.word_ids):
            return []

        input_ids = torch.tensor([item.input_ids], device=model.device)
        attention_mask = torch.tensor([item.attention_mask], device=model.device)
        with torch.no_grad():
            inputs_embeds = model.adapter.input_embeddings(input_ids)
        scores = self.subword_attributions(model, inputs_embeds, attention_mask, target, method)
        return self.aggregate_words(text.split(), item.word_ids, scores.tolist())

    def aggregate_words(
        self, words: Sequence[str], word_ids: Sequence[Optional[int]], scores: Sequence[float]
    ) -> List[AttributionRecord]:
        """
        Суммирует оценки подслов по словам и назначает теги и категории.

        Маркеры переключения языка в отчет не попадают и не разрывают фразы
        категорий.
        """
        grouped: Dict[int, List[float]] = defaultdict(list)
        for word_id, score in zip(word_ids, scores):
            if word_id is not None and not is_lang_marker(words[word_id]):
                grouped[word_id].append(float(score))

        kept = [index for index, word in enumerate(words) if not is_lang_marker(word)]
        categories = dict(zip(kept, self.categorize([words[index] for index in kept])))
        records = [
            (
                word_id,
                AttributionRecord(
                    word=words[word_id],
                    lang_tag=self.textprep_service.identify_language(words[word_id]),
                    score=sum(subword_scores),
                    category=categories[word_id],
                    subword_scores=subword_scores,
                ),
            )
            for word_id, subword_scores in sorted(grouped.items())
        ]
        records.sort(key=lambda pair: (-pair[1].score, pair[0]))
        return [record for _, record in records]

    # --- Корпусные отчеты ---

    def corpus_summary(self, records: Sequence[Sequence[AttributionRecord]]) -> List[WordSummary]:
        """Средняя оценка каждого слова по корпусу, по убыванию."""
        totals: Dict[str, List[AttributionRecord]] = defaultdict(list)
        for sentence in records:
            for record in sentence:
                totals[record.word.casefold()].append(record)

        summary = [
            WordSummary(
                word=word,
                lang_tag=occurrences[0].lang_tag,
                category=occurrences[0].category,
                mean_score=sum(record.score for record in occurrences) / len(occurrences),
                occurrences=len(occurrences),
            )
            for word, occurrences in totals.items()
        ]
        return sorted(summary, key=lambda item: (-item.mean_score, item.word))

    def load_pattern_corpus(self, path: Optional[Path] = None) -> List[PatternSentence]:
        """
        Корпус предложений `тип<TAB>предложение`; без пути - встроенный.

        Raises:
            ConfigError: Неизвестный тип смешения.
        """
        corpus: List[PatternSentence] = []
        for pattern, text in self.repo.rows(Path(path) if path else Path(PATTERN_CORPUS)):
            try:
                corpus.append(PatternSentence(pattern=PatternType(pattern), text=text))
            except ValueError as exc:
                permitted = ", ".join(item.value for item in PatternType)
                raise ConfigError(f"Неизвестный тип смешения '{pattern}'. Допустимые: {permitted}") from exc
        return corpus

    def pattern_report(
        self,
        model: Classifier,
        corpus: Sequence[PatternSentence],
        preprocess: Optional[PreprocessConfig] = None,
        method: AttributionMethod = AttributionMethod.GRADIENT_X_INPUT,
    ) -> List[PatternScore]:
        """
        Для каждого типа смешения - среднее по предложениям максимальной
        атрибуции слова. Типы без предложений пропускаются с предупреждением.

        Returns:
            List[PatternScore]: Отчет по убыванию средней атрибуции.
        """
        groups: Dict[PatternType, List[Tuple[str, List[AttributionRecord]]]] = defaultdict(list)
        for sentence in corpus:
            text = (
                self.textprep_service.preprocess(sentence.text, preprocess).final
                if preprocess
                else sentence.text
            )
            groups[sentence.pattern].append((sentence.text, self.attribute(model, text, method=method)))

        report: List[PatternScore] = []
        for pattern in PatternType:
            sentences = groups.get(pattern)
            if not sentences:
                log.warning(f"Тип смешения '{pattern.value}' без предложений пропущен")
                continue
            maxima = [records[0].score if records else 0.0 for _, records in sentences]
            top_words = self.corpus_summary([records for _, records in sentences])[:TOP_WORDS]
            report.append(
                PatternScore(
                    pattern=pattern,
                    mean_attribution=sum(maxima) / len(maxima),
                    n_sentences=len(sentences),
                    example=sentences[0][0],
                    top_words=[item.word for item in top_words],
                )
            )
        return sorted(report, key=lambda item: -item.mean_attribution)
