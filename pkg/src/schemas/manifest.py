"""Схема манифеста прогона."""

from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import Field

from src.schemas.base import CanonicalModel


class RunManifest(CanonicalModel):
    """
    Манифест одной команды, записывающей артефакты.

    Манифесты только дополняются: существующий файл никогда не перезаписывается.

    Fields:
        command (str): Подкоманда CLI (train, evaluate, ...).
        argv (List[str]): Аргументы вызова.
        config (Dict[str, Any]): Эффективная конфигурация.
        dataset_checksum (Optional[str]): sha256 гармонизированного датасета.
        seed (int): Зерно.
        started_at, finished_at (datetime): Временные метки (UTC).
        artifacts (Dict[str, str]): Имя артефакта -> путь.
        records (Dict[str, Any]): Итоговые записи (эпохи, метрики фолдов).
        status (str): ok или failed.
        error (Optional[str]): Диагностика при status=failed.
    """

    command: str
    argv: List[str] = Field(default_factory=list)
    config: Dict[str, Any] = Field(default_factory=dict)
    dataset_checksum: Optional[str] = None
    seed: int = 42
    started_at: datetime
    finished_at: Optional[datetime] = None
    artifacts: Dict[str, str] = Field(default_factory=dict)
    records: Dict[str, Any] = Field(default_factory=dict)
    status: str = "ok"
    error: Optional[str] = None
