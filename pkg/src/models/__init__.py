"""
Пакет моделей PyTorch.

Экспортирует адаптеры энкодеров, классификационную голову, полный
классификатор и фабрику моделей.
"""

from .base import EncoderAdapter
from .classifier import Classifier
from .factory import apply_freeze, build_model, trainable_parameter_report
from .head import ClassificationHead
from .hf import HFEncoderAdapter
from .tiny import TinyEncoderAdapter

# Экспортируем модели и фабрику
__all__ = [
    "ClassificationHead",
    "Classifier",
    "EncoderAdapter",
    "HFEncoderAdapter",
    "TinyEncoderAdapter",
    "apply_freeze",
    "build_model",
    "trainable_parameter_report",
]
