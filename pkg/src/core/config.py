"""Конфигурация приложения."""

from pathlib import Path
from tempfile import gettempdir
from typing import Optional

from pydantic import Field, computed_field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Основные настройки приложения."""

    # --- Статические настройки ---
    # Название приложения
    PROJECT_NAME: str = "Hinglish Cyberbullying Toolkit"
    # Версия инструментария
    VERSION: str = "1.0.0"

    # --- Настройки, читаемые из .env ---
    # Настройки режимов приложения
    DEBUG: bool = Field(default=False, description="Режим отладки")
    TESTING: bool = Field(default=False, description="Режим тестирования")
    LOG_LEVEL: str = Field(default="INFO", description="Уровень логирования")

    # Настройки артефактов и вычислений
    ARTIFACT_ROOT: Path = Field(
        default=Path("./artifacts"),
        description="Корень для артефактов, если --out не указан",
    )
    CHECKPOINT_CACHE_DIR: Optional[Path] = Field(
        default=None,
        description="Каталог кэша загружаемых чекпойнтов энкодера",
    )
    DEVICE: str = Field(default="cpu", description="cpu, cuda или auto")

    # --- Настройки Sentry ---
    SENTRY_DSN: Optional[str] = Field(
        default=None,
        description="Sentry DSN для включения интеграции. Если None, Sentry отключен.",
    )

    @field_validator("DEVICE")
    @classmethod
    def _check_device(cls, value: str) -> str:
        value = value.strip().lower()
        if value not in ("cpu", "cuda", "auto") and not value.startswith("cuda:"):
            raise ValueError(f"DEVICE: ожидается cpu, cuda, cuda:N или auto, получено '{value}'")
        return value

    # --- Вычисляемые поля ---

    # Продакшен режим
    @computed_field
    def PRODUCTION(self) -> bool:
        # Считаем продакшеном, если не DEBUG и не TESTING
        return not self.DEBUG and not self.TESTING

    # Путь к папке с поставляемыми словарями и таблицами
    @computed_field
    def RESOURCES_PATH(self) -> Path:
        return Path(__file__).resolve().parent.parent / "resources"

    # Путь к папке для хранения лог-файлов
    @computed_field
    def LOG_ROOT_PATH(self) -> Path:
        # Используем временную директорию системы, если TESTING=True
        if self.TESTING:
            temp_log_path = Path(gettempdir()) / "temp_logs"
            temp_log_path.mkdir(parents=True, exist_ok=True)
            return temp_log_path
        else:
            return self.ARTIFACT_ROOT / "logs"

    # Путь к файлу лога
    @computed_field
    def LOG_FILE_PATH(self) -> Path | None:
        # Пишем в файл только в production режиме
        return self.LOG_ROOT_PATH / "app.log" if self.PRODUCTION else None  # type: ignore[operator, truthy-function]

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,  # Имена переменных окружения чувствительны к регистру
        extra="ignore",  # Игнорировать лишние переменные окружения
    )


# Кэшированный экземпляр настроек
settings = Settings()
