"""Детерминированный крошечный энкодер с хеширующим токенизатором."""

import json
import zlib
from pathlib import Path
from typing import Any, Dict, List, Optional

import torch
from torch import nn

from src.core.exceptions import ContractViolationError
from src.models.base import EncoderAdapter
from src.schemas.model import TINY_BACKBONE_ID, TokenizedText

# Служебные идентификаторы
PAD_ID, CLS_ID, SEP_ID, UNK_ID = 0, 1, 2, 3
SPECIAL_COUNT = 4


class WordHashTokenizer:
    """
    Токенизатор без словаря: слово режется на куски фиксированной длины,
    каждый кусок хешируется (crc32) в идентификатор.

    Args:
        vocab_size (int): Размер пространства идентификаторов.
        piece_len (int): Длина куска слова в символах.
    """

    def __init__(self, vocab_size: int = 4096, piece_len: int = 5):
        self.vocab_size = vocab_size
        self.piece_len = piece_len

    def piece_id(self, piece: str) -> int:
        return SPECIAL_COUNT + zlib.crc32(piece.encode("utf-8")) % (self.vocab_size - SPECIAL_COUNT)

    def word_pieces(self, word: str) -> List[str]:
        chunks = [word[i : i + self.piece_len] for i in range(0, len(word), self.piece_len)]
        return [chunk if index == 0 else f"##{chunk}" for index, chunk in enumerate(chunks)]

    def __call__(self, text: str, max_seq_len: int, pad: bool = False) -> TokenizedText:
        if max_seq_len < 2:
            raise ContractViolationError(f"max_seq_len={max_seq_len} меньше двух служебных токенов")

        ids: List[int] = [CLS_ID]
        word_ids: List[Optional[int]] = [None]
        budget = max_seq_len - 2
        for word_index, word in enumerate(text.split()):
            for piece in self.word_pieces(word):
                if len(ids) - 1 >= budget:
                    break
                ids.append(self.piece_id(piece))
                word_ids.append(word_index)
        ids.append(SEP_ID)
        word_ids.append(None)

        mask = [1] * len(ids)
        if pad:
            padding = max_seq_len - len(ids)
            ids += [PAD_ID] * padding
            mask += [0] * padding
            word_ids += [None] * padding
        return TokenizedText(input_ids=ids, attention_mask=mask, word_ids=word_ids)

    def to_dict(self) -> Dict[str, Any]:
        return {"vocab_size": self.vocab_size, "piece_len": self.piece_len}


class TinyEmbeddings(nn.Module):
    """Позиционные эмбеддинги + LayerNorm + Dropout поверх эмбеддингов подслов."""

    def __init__(self, vocab_size: int, width: int, max_positions: int, dropout: float):
        super().__init__()
        self.word_embeddings = nn.Embedding(vocab_size, width, padding_idx=PAD_ID)
        self.position_embeddings = nn.Embedding(max_positions, width)
        self.norm = nn.LayerNorm(width)
        self.dropout = nn.Dropout(dropout)

    def forward(self, inputs_embeds: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(inputs_embeds.shape[1], device=inputs_embeds.device)
        return self.dropout(self.norm(inputs_embeds + self.position_embeddings(positions)))


class TinyEncoderAdapter(EncoderAdapter):
    """
    Энкодер `tiny-hash-2x32`: 2 блока трансформера ширины 32.

    Используется в тестах и CI вместо загружаемых чекпойнтов.
    """

    def __init__(
        self,
        vocab_size: int = 4096,
        width: int = 32,
        layers: int = 2,
        heads: int = 2,
        feedforward: int = 64,
        max_positions: int = 512,
        piece_len: int = 5,
        dropout: float = 0.1,
    ):
        super().__init__()
        self.backbone_id = TINY_BACKBONE_ID
        self.hidden_width = width
        self.num_layers = layers
        self.max_positions = max_positions
        self._params = {
            "vocab_size": vocab_size,
            "width": width,
            "layers": layers,
            "heads": heads,
            "feedforward": feedforward,
            "max_positions": max_positions,
            "piece_len": piece_len,
            "dropout": dropout,
        }

        self.tokenizer = WordHashTokenizer(vocab_size=vocab_size, piece_len=piece_len)
        self.embeddings = TinyEmbeddings(vocab_size, width, max_positions, dropout)
        self.layers = nn.ModuleList(
            nn.TransformerEncoderLayer(
                d_model=width,
                nhead=heads,
                dim_feedforward=feedforward,
                dropout=dropout,
                activation="gelu",
                batch_first=True,
            )
            for _ in range(layers)
        )

    @property
    def pad_id(self) -> int:
        return PAD_ID

    def tokenize(self, text: str, max_seq_len: int, pad: bool = False) -> TokenizedText:
        return self.tokenizer(text, max_seq_len, pad=pad)

    def input_embeddings(self, input_ids: torch.Tensor) -> torch.Tensor:
        return self.embeddings.word_embeddings(input_ids)

    def encode_embeddings(
        self, inputs_embeds: torch.Tensor, attention_mask: torch.Tensor
    ) -> torch.Tensor:
        hidden = self.embeddings(inputs_embeds)
        padding_mask = attention_mask == 0
        for layer in self.layers:
            hidden = layer(hidden, src_key_padding_mask=padding_mask)
        return hidden

    def embedding_module(self) -> nn.Module:
        return self.embeddings

    def layer_modules(self) -> List[nn.Module]:
        return list(self.layers)

    def save_assets(self, directory: Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "backbone.json").write_text(json.dumps(self._params, sort_keys=True), encoding="utf-8")
        (directory / "tokenizer.json").write_text(
            json.dumps(self.tokenizer.to_dict(), sort_keys=True), encoding="utf-8"
        )

    @classmethod
    def from_assets(cls, directory: Path) -> "TinyEncoderAdapter":
        params = json.loads((Path(directory) / "backbone.json").read_text(encoding="utf-8"))
        return cls(**params)
