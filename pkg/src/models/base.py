"""Базовый интерфейс адаптера энкодера."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import List

import torch
from torch import nn

from src.schemas.model import TokenizedText


class EncoderAdapter(nn.Module, ABC):
    """
    Адаптер предобученного энкодера.

    Скрывает различия токенизаторов и внутренней структуры энкодеров:
    классификатор работает только через этот интерфейс.

    Attributes:
        backbone_id (str): Идентификатор энкодера.
        hidden_width (int): Ширина скрытого представления.
        num_layers (int): Число блоков энкодера.
        max_positions (int): Максимальная поддерживаемая длина последовательности.
    """

    backbone_id: str
    hidden_width: int
    num_layers: int
    max_positions: int

    @property
    @abstractmethod
    def pad_id(self) -> int:
        """Идентификатор токена паддинга."""

    @abstractmethod
    def tokenize(self, text: str, max_seq_len: int, pad: bool = False) -> TokenizedText:
        """
        Токенизирует текст с сохранением служебных токенов.

        Args:
            text (str): Предобработанный текст.
            max_seq_len (int): Максимальная длина (с учетом служебных токенов).
            pad (bool): Дополнить паддингом до max_seq_len.

        Returns:
            TokenizedText: Идентификаторы, маска и соответствие позиций словам.
        """

    @abstractmethod
    def input_embeddings(self, input_ids: torch.Tensor) -> torch.Tensor:
        """Эмбеддинги подслов (без позиционных), форма (batch, seq, hidden)."""

    @abstractmethod
    def encode_embeddings(
        self, inputs_embeds: torch.Tensor, attention_mask: torch.Tensor
    ) -> torch.Tensor:
        """Последний скрытый слой энкодера по эмбеддингам подслов."""

    @abstractmethod
    def embedding_module(self) -> nn.Module:
        """Модуль таблицы эмбеддингов (замораживается целиком)."""

    @abstractmethod
    def layer_modules(self) -> List[nn.Module]:
        """Блоки энкодера снизу вверх."""

    @abstractmethod
    def save_assets(self, directory: Path) -> None:
        """Сохраняет конфигурацию энкодера и ассеты токенизатора (без весов)."""

    def encode(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        """
        Представление [CLS]: первая позиция последнего слоя, без пулера.

        Returns:
            torch.Tensor: Форма (batch, hidden_width).
        """
        hidden = self.encode_embeddings(self.input_embeddings(input_ids), attention_mask)
        return hidden[:, 0]

    def pad_batch(self, items: List[TokenizedText]) -> tuple[torch.Tensor, torch.Tensor]:
        """Собирает батч, дополняя последовательности до самой длинной."""
        width = max(item.length for item in items)
        ids = torch.full((len(items), width), self.pad_id, dtype=torch.long)
        mask = torch.zeros((len(items), width), dtype=torch.long)
        for row, item in enumerate(items):
            ids[row, : item.length] = torch.tensor(item.input_ids, dtype=torch.long)
            mask[row, : item.length] = torch.tensor(item.attention_mask, dtype=torch.long)
        return ids, mask
