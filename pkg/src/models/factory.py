"""Сборка классификатора и отчет о замороженных параметрах."""

from typing import List, Optional

import torch

from src.core.config import settings
from src.core.exceptions import BackboneError, ConfigError
from src.core.logging import log
from src.models.base import EncoderAdapter
from src.models.classifier import Classifier
from src.models.hf import HFEncoderAdapter, backbone_config, config_depth
from src.models.tiny import TinyEncoderAdapter
from src.schemas.model import TINY_BACKBONE_ID, FreezeSpec, ModelConfig, ParameterEntry


def is_tiny(backbone_id: str) -> bool:
    return backbone_id == TINY_BACKBONE_ID


def resolve_device() -> torch.device:
    """Устройство из настроек; `auto` выбирает CUDA при наличии."""
    if settings.DEVICE == "auto":
        return torch.device("cuda" if torch.cuda.is_available() else "cpu")
    return torch.device(settings.DEVICE)


def backbone_depth(backbone_id: str) -> int:
    """
    Число блоков энкодера без загрузки весов.

    Raises:
        BackboneError: Если энкодер неизвестен.
    """
    if is_tiny(backbone_id):
        return TinyEncoderAdapter().num_layers
    return config_depth(backbone_config(backbone_id))


def build_adapter(backbone_id: str) -> EncoderAdapter:
    if is_tiny(backbone_id):
        return TinyEncoderAdapter()
    return HFEncoderAdapter(backbone_id)


def apply_freeze(model: Classifier, spec: FreezeSpec) -> None:
    """
    Замораживает таблицу эмбеддингов и нижние блоки энкодера.

    Raises:
        BackboneError: Если заморожено больше блоков, чем есть в энкодере.
    """
    adapter = model.adapter
    if spec.frozen_encoder_layers > adapter.num_layers:
        raise BackboneError(
            f"frozen_encoder_layers={spec.frozen_encoder_layers} превышает глубину "
            f"энкодера {adapter.backbone_id} ({adapter.num_layers})",
            extra={"backbone_id": adapter.backbone_id, "depth": adapter.num_layers},
        )

    for parameter in model.parameters():
        parameter.requires_grad_(True)
    if spec.freeze_embeddings:
        for parameter in adapter.embedding_module().parameters():
            parameter.requires_grad_(False)
    for layer in adapter.layer_modules()[: spec.frozen_encoder_layers]:
        for parameter in layer.parameters():
            parameter.requires_grad_(False)


def build_model(
    config: ModelConfig,
    seed: Optional[int] = None,
    adapter: Optional[EncoderAdapter] = None,
) -> Classifier:
    """
    Собирает классификатор по конфигурации.

    Args:
        config (ModelConfig): Конфигурация.
        seed (Optional[int]): Зерно инициализации (энкодера tiny и головы).
        adapter (Optional[EncoderAdapter]): Готовый адаптер (при загрузке чекпойнта).

    Returns:
        Classifier: Классификатор с примененной заморозкой.

    Raises:
        BackboneError: Неизвестный энкодер или заморозка глубже энкодера.
        ConfigError: max_seq_len превышает возможности энкодера.
    """
    log.info(f"Сборка классификатора: backbone={config.backbone_id}, freeze={config.freeze}")
    if seed is not None:
        torch.manual_seed(seed)

    adapter = adapter or build_adapter(config.backbone_id)
    if config.max_seq_len > adapter.max_positions:
        raise ConfigError(
            f"max_seq_len={config.max_seq_len} превышает предел энкодера ({adapter.max_positions})"
        )

    model = Classifier(adapter, config)
    apply_freeze(model, config.freeze)

    frozen = sum(entry.count for entry in trainable_parameter_report(model) if entry.frozen)
    total = sum(parameter.numel() for parameter in model.parameters())
    log.debug(f"Параметров: {total}, заморожено: {frozen}")
    return model


def trainable_parameter_report(model: torch.nn.Module) -> List[ParameterEntry]:
    """Каждый тензор параметров ровно один раз: имя, заморожен ли, число элементов."""
    return [
        ParameterEntry(name=name, frozen=not parameter.requires_grad, count=parameter.numel())
        for name, parameter in model.named_parameters()
    ]
