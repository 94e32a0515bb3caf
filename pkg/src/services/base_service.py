"""Базовый класс для сервисов."""

from typing import Generic, TypeVar

from src.core.exceptions import ContractViolationError
from src.repositories.base import BaseRepository

# Определяем Generic тип репозитория
RepoType = TypeVar("RepoType", bound=BaseRepository)


class BaseService(Generic[RepoType]):
    """
    Базовый сервис.

    Предоставляет доступ к ассоциированному репозиторию.
    Может содержать общую логику для всех сервисов, если такая появится.

    Args:
        repo (RepoType): Экземпляр репозитория, с которым работает сервис.
    """

    def __init__(self, repo: RepoType):
        self.repo = repo

    @staticmethod
    def _require(condition: bool, detail: str) -> None:
        """
        Вспомогательный метод для проверки предусловия операции.

        Args:
            condition (bool): Проверяемое условие.
            detail (str): Сообщение об ошибке.

        Raises:
            ContractViolationError: Если условие ложно.
        """
        if not condition:
            raise ContractViolationError(detail)
