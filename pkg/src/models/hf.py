"""Адаптер предобученных энкодеров Hugging Face Transformers."""

from pathlib import Path
from typing import List, Optional

import torch
from torch import nn
from transformers import AutoConfig, AutoModel, AutoTokenizer, PreTrainedModel

from src.core.config import settings
from src.core.exceptions import BackboneError
from src.core.logging import log
from src.models.base import EncoderAdapter
from src.schemas.model import TokenizedText

# Пути к списку блоков энкодера у распространенных архитектур
LAYER_PATHS = ("encoder.layer", "transformer.layer", "encoder.layers", "layers", "h")


def _resolve(module: nn.Module, dotted: str) -> Optional[nn.Module]:
    node: Optional[nn.Module] = module
    for part in dotted.split("."):
        node = getattr(node, part, None)
        if node is None:
            return None
    return node


def backbone_config(backbone_id: str):
    """
    Загружает конфигурацию энкодера.

    Raises:
        BackboneError: Если конфигурация не найдена.
    """
    try:
        return AutoConfig.from_pretrained(backbone_id, cache_dir=settings.CHECKPOINT_CACHE_DIR)
    except (OSError, ValueError) as exc:
        raise BackboneError(
            f"Не удалось загрузить энкодер '{backbone_id}': {exc}",
            extra={"backbone_id": backbone_id},
        ) from exc


def config_depth(config) -> int:
    for attribute in ("num_hidden_layers", "n_layers", "n_layer", "num_layers"):
        depth = getattr(config, attribute, None)
        if isinstance(depth, int):
            return depth
    raise BackboneError(f"Не удалось определить глубину энкодера {config.__class__.__name__}")


class HFEncoderAdapter(EncoderAdapter):
    """
    Энкодер из `transformers` (MuRIL, XLM-R, IndicBERT и т.п.).

    Встроенный пулер отключается: классификатор берет первую позицию
    последнего скрытого слоя.

    Args:
        backbone_id (str): Имя модели в хабе или локальный путь.
        model (PreTrainedModel | None): Готовая модель (при загрузке из чекпойнта).
        tokenizer: Готовый токенизатор (при загрузке из чекпойнта).
    """

    def __init__(self, backbone_id: str, model: PreTrainedModel | None = None, tokenizer=None):
        super().__init__()
        self.backbone_id = backbone_id
        try:
            self.tokenizer = tokenizer or AutoTokenizer.from_pretrained(
                backbone_id, cache_dir=settings.CHECKPOINT_CACHE_DIR
            )
            self.model = model or AutoModel.from_pretrained(
                backbone_id, cache_dir=settings.CHECKPOINT_CACHE_DIR
            )
        except (OSError, ValueError) as exc:
            raise BackboneError(
                f"Не удалось загрузить энкодер '{backbone_id}': {exc}",
                extra={"backbone_id": backbone_id},
            ) from exc

        if getattr(self.model, "pooler", None) is not None:
            log.debug(f"Пулер энкодера {backbone_id} отключен")
            self.model.pooler = None

        self._layers = self._find_layers()
        self.hidden_width = int(self.model.config.hidden_size)
        self.num_layers = len(self._layers)
        self.max_positions = int(getattr(self.model.config, "max_position_embeddings", 512))
        log.info(
            f"Энкодер {backbone_id}: {self.num_layers} слоев, ширина {self.hidden_width}"
        )

    def _find_layers(self) -> List[nn.Module]:
        for dotted in LAYER_PATHS:
            layers = _resolve(self.model, dotted)
            if isinstance(layers, nn.ModuleList) and len(layers) > 0:
                return list(layers)
        raise BackboneError(
            f"Не найден список блоков энкодера '{self.backbone_id}' (пути: {', '.join(LAYER_PATHS)})"
        )

    @property
    def pad_id(self) -> int:
        return int(self.tokenizer.pad_token_id or 0)

    def tokenize(self, text: str, max_seq_len: int, pad: bool = False) -> TokenizedText:
        words = text.split()
        options = {
            "truncation": True,
            "max_length": max_seq_len,
            "padding": "max_length" if pad else False,
        }
        if words:
            encoding = self.tokenizer(words, is_split_into_words=True, **options)
        else:
            encoding = self.tokenizer("", **options)

        word_ids: List[Optional[int]]
        if getattr(encoding, "is_fast", False) and words:
            word_ids = list(encoding.word_ids())
        else:
            # Медленные токенизаторы не дают соответствия позиций словам
            word_ids = [None] * len(encoding["input_ids"])
        return TokenizedText(
            input_ids=list(encoding["input_ids"]),
            attention_mask=list(encoding["attention_mask"]),
            word_ids=word_ids,
        )

    def input_embeddings(self, input_ids: torch.Tensor) -> torch.Tensor:
        return self.model.get_input_embeddings()(input_ids)

    def encode_embeddings(
        self, inputs_embeds: torch.Tensor, attention_mask: torch.Tensor
    ) -> torch.Tensor:
        output = self.model(inputs_embeds=inputs_embeds, attention_mask=attention_mask)
        return output.last_hidden_state

    def embedding_module(self) -> nn.Module:
        embeddings = getattr(self.model, "embeddings", None)
        return embeddings if isinstance(embeddings, nn.Module) else self.model.get_input_embeddings()

    def layer_modules(self) -> List[nn.Module]:
        return self._layers

    def save_assets(self, directory: Path) -> None:
        directory = Path(directory)
        self.tokenizer.save_pretrained(directory / "tokenizer")
        self.model.config.save_pretrained(directory / "backbone")

    @classmethod
    def from_assets(cls, directory: Path, backbone_id: str) -> "HFEncoderAdapter":
        """Восстанавливает архитектуру офлайн; веса загружаются из чекпойнта классификатора."""
        directory = Path(directory)
        try:
            config = AutoConfig.from_pretrained(directory / "backbone")
            tokenizer = AutoTokenizer.from_pretrained(directory / "tokenizer")
        except (OSError, ValueError) as exc:
            raise BackboneError(f"Ассеты энкодера в {directory} повреждены: {exc}") from exc
        return cls(backbone_id, model=AutoModel.from_config(config), tokenizer=tokenizer)
