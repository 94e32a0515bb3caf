"""Репозиторий чекпойнтов классификатора."""

from pathlib import Path
from typing import Tuple

import torch

from src.core.exceptions import ArtifactError
from src.core.logging import log
from src.models.classifier import Classifier
from src.models.factory import build_model, is_tiny, resolve_device
from src.models.hf import HFEncoderAdapter
from src.models.tiny import TinyEncoderAdapter
from src.repositories.base import BaseRepository
from src.schemas.model import ModelConfig
from src.schemas.textprep import PreprocessConfig

# Раскладка каталога чекпойнта
CONFIG_FILE = "config.txt"
PREPROCESS_FILE = "preprocess.txt"
WEIGHTS_FILE = "weights.pt"
ASSETS_DIR = "assets"


class CheckpointRepository(BaseRepository):
    """
    Чекпойнты внутри каталога прогона.

    Каталог чекпойнта содержит конфигурацию модели и предобработки в
    каноничном тексте, веса и ассеты энкодера (токенизатор, конфигурация).

    Args:
        root (Path): Каталог прогона (или сам чекпойнт, если subdirs не заданы).
    """

    def save(self, model: Classifier, preprocess: PreprocessConfig, *subdirs: str) -> Path:
        """
        Сохраняет классификатор.

        Args:
            model (Classifier): Модель.
            preprocess (PreprocessConfig): Конфигурация предобработки, с которой модель обучена.
            *subdirs (str): Путь каталога чекпойнта внутри корня.

        Returns:
            Path: Каталог чекпойнта.

        Raises:
            ArtifactError: Если запись не удалась.
        """
        directory = self.path(*subdirs)
        log.info(f"Сохранение чекпойнта в {directory}")
        self.write_text(directory / CONFIG_FILE, model.config.to_canonical_text(header="ModelConfig"))
        self.write_text(
            directory / PREPROCESS_FILE, preprocess.to_canonical_text(header="PreprocessConfig")
        )
        try:
            model.adapter.save_assets(directory / ASSETS_DIR)
            state = {name: tensor.detach().cpu() for name, tensor in model.state_dict().items()}
            torch.save(state, directory / WEIGHTS_FILE)
        except OSError as exc:
            raise ArtifactError(f"Не удалось записать чекпойнт в '{directory}': {exc}") from exc
        return directory

    def load(self, *subdirs: str) -> Tuple[Classifier, PreprocessConfig]:
        """
        Загружает классификатор в eval-режиме на устройство из настроек.

        Returns:
            Tuple[Classifier, PreprocessConfig]: Модель и ее конфигурация предобработки.

        Raises:
            ArtifactError: Если каталог неполон или веса не подходят к архитектуре.
        """
        directory = self.path(*subdirs)
        for name in (CONFIG_FILE, PREPROCESS_FILE, WEIGHTS_FILE):
            if not (directory / name).is_file():
                raise ArtifactError(
                    f"Чекпойнт '{directory}' неполон: нет {name}", extra={"path": str(directory)}
                )

        config = ModelConfig.read(directory / CONFIG_FILE)
        preprocess = PreprocessConfig.read(directory / PREPROCESS_FILE)
        log.info(f"Загрузка чекпойнта {directory} (backbone={config.backbone_id})")

        assets = directory / ASSETS_DIR
        adapter = (
            TinyEncoderAdapter.from_assets(assets)
            if is_tiny(config.backbone_id)
            else HFEncoderAdapter.from_assets(assets, config.backbone_id)
        )
        model = build_model(config, adapter=adapter)
        try:
            state = torch.load(directory / WEIGHTS_FILE, map_location="cpu", weights_only=True)
            model.load_state_dict(state)
        except (OSError, RuntimeError) as exc:
            raise ArtifactError(f"Веса чекпойнта '{directory}' не загружаются: {exc}") from exc

        model.to(resolve_device())
        model.eval()
        return model, preprocess
