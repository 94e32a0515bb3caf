"""Классификационная голова поверх представления [CLS]."""

import math
from typing import List, Tuple

import torch
from torch import nn

from src.schemas.model import HeadConfig


class ClassificationHead(nn.Module):
    """
    Dropout на входе, затем скрытые слои Linear -> LayerNorm -> ReLU -> Dropout
    и финальный Linear на num_classes логитов.

    Args:
        in_width (int): Ширина входного представления.
        config (HeadConfig): Размеры слоев и dropout.
    """

    def __init__(self, in_width: int, config: HeadConfig):
        super().__init__()
        self.config = config
        self.input_dropout = nn.Dropout(config.dropout)

        blocks = []
        width = in_width
        for size in config.hidden_sizes:
            blocks.append(
                nn.Sequential(
                    nn.Linear(width, size),
                    nn.LayerNorm(size),
                    nn.ReLU(),
                    nn.Dropout(config.dropout),
                )
            )
            width = size
        self.hidden = nn.ModuleList(blocks)
        self.output = nn.Linear(width, config.num_classes)
        self.reset_parameters()

    def reset_parameters(self) -> None:
        """Равномерная инициализация по fan-in; LayerNorm: единицы и нули."""
        for module in self.modules():
            if isinstance(module, nn.Linear):
                bound = 1.0 / math.sqrt(module.in_features)
                nn.init.uniform_(module.weight, -bound, bound)
                nn.init.uniform_(module.bias, -bound, bound)
            elif isinstance(module, nn.LayerNorm):
                nn.init.ones_(module.weight)
                nn.init.zeros_(module.bias)

    def linear_shapes(self) -> List[Tuple[int, int]]:
        """Пары (in, out) всех линейных слоев по порядку."""
        linears = [block[0] for block in self.hidden] + [self.output]
        return [(layer.in_features, layer.out_features) for layer in linears]

    def forward(self, cls_vector: torch.Tensor) -> torch.Tensor:
        hidden = self.input_dropout(cls_vector)
        for block in self.hidden:
            hidden = block(hidden)
        return self.output(hidden)
