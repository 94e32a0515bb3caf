"""Базовые схемы Pydantic, используемые в приложении."""

from pathlib import Path
from typing import Any, Dict, Type, TypeVar

from pydantic import BaseModel, ConfigDict
from pydantic import ValidationError as PydanticValidationError

from src.core import canonical
from src.core.exceptions import ConfigError

CanonicalType = TypeVar("CanonicalType", bound="CanonicalModel")


class TunedModel(BaseModel):
    """
    Базовая неизменяемая модель Pydantic.

    Экземпляры можно безопасно передавать между воркерами.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")


class CanonicalModel(TunedModel):
    """
    Модель с сериализацией в каноничный текст "ключ = значение".

    Запись и повторное чтение дают равный объект.
    """

    def to_canonical_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def to_canonical_text(self, header: str | None = None) -> str:
        """Сериализует модель в каноничный текст."""
        return canonical.dumps(self.to_canonical_dict(), header=header)

    @classmethod
    def from_canonical_dict(
        cls: Type[CanonicalType], data: Dict[str, Any]
    ) -> CanonicalType:
        try:
            return cls.model_validate(data)
        except PydanticValidationError as exc:
            raise ConfigError(
                f"Некорректная конфигурация {cls.__name__}: {exc.errors(include_url=False)}"
            ) from exc

    @classmethod
    def from_canonical_text(cls: Type[CanonicalType], text: str) -> CanonicalType:
        """Восстанавливает модель из каноничного текста."""
        return cls.from_canonical_dict(canonical.loads(text))

    def write(self, path: Path, header: str | None = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_canonical_text(header=header), encoding="utf-8")
        return path

    @classmethod
    def read(cls: Type[CanonicalType], path: Path) -> CanonicalType:
        return cls.from_canonical_dict(canonical.read(path))
