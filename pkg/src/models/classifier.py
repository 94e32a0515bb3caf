"""Классификатор: адаптер энкодера + классификационная голова."""

from typing import List, Sequence, Tuple

import numpy as np
import torch
from torch import nn

from src.core.exceptions import ContractViolationError
from src.models.base import EncoderAdapter
from src.models.head import ClassificationHead
from src.schemas.model import ModelConfig, TokenizedText


class Classifier(nn.Module):
    """
    Бинарный классификатор над представлением [CLS] последнего слоя энкодера.

    Args:
        adapter (EncoderAdapter): Энкодер.
        config (ModelConfig): Конфигурация классификатора.
    """

    def __init__(self, adapter: EncoderAdapter, config: ModelConfig):
        super().__init__()
        self.adapter = adapter
        self.config = config
        self.head = ClassificationHead(adapter.hidden_width, config.head)

    @property
    def device(self) -> torch.device:
        return next(self.parameters()).device

    def tokenize(self, text: str, pad: bool = False) -> TokenizedText:
        return self.adapter.tokenize(text, self.config.max_seq_len, pad=pad)

    def tokenize_batch(
        self, texts: Sequence[str]
    ) -> Tuple[torch.Tensor, torch.Tensor, List[TokenizedText]]:
        """Токенизирует тексты и собирает батч на устройстве модели."""
        items = [self.tokenize(text) for text in texts]
        input_ids, attention_mask = self.adapter.pad_batch(items)
        return input_ids.to(self.device), attention_mask.to(self.device), items

    def forward(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        """
        Логиты (batch, num_classes).

        Raises:
            ContractViolationError: Если последовательность длиннее max_seq_len.
        """
        if input_ids.shape[1] > self.config.max_seq_len:
            raise ContractViolationError(
                f"Длина последовательности {input_ids.shape[1]} превышает "
                f"max_seq_len={self.config.max_seq_len}; усечение выполняется при токенизации"
            )
        inputs_embeds = self.adapter.input_embeddings(input_ids)
        return self.forward_embeddings(inputs_embeds, attention_mask)

    def forward_embeddings(
        self, inputs_embeds: torch.Tensor, attention_mask: torch.Tensor
    ) -> torch.Tensor:
        """Логиты по эмбеддингам подслов (путь для атрибуции)."""
        hidden = self.adapter.encode_embeddings(inputs_embeds, attention_mask)
        return self.head(hidden[:, 0])

    @torch.no_grad()
    def predict_proba(self, texts: Sequence[str], batch_size: int = 32) -> np.ndarray:
        """
        Вероятность класса BULLY для каждого текста (eval-режим).

        Args:
            texts (Sequence[str]): Предобработанные тексты.
            batch_size (int): Размер батча.

        Returns:
            np.ndarray: Вектор вероятностей формы (len(texts),).
        """
        was_training = self.training
        self.eval()
        scores: List[np.ndarray] = []
        try:
            for start in range(0, len(texts), batch_size):
                input_ids, attention_mask, _ = self.tokenize_batch(texts[start : start + batch_size])
                probabilities = torch.softmax(self(input_ids, attention_mask), dim=-1)
                scores.append(probabilities[:, 1].double().cpu().numpy())
        finally:
            self.train(was_training)
        return np.concatenate(scores) if scores else np.zeros(0, dtype=np.float64)
