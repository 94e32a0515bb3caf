"""Базовый класс файлового репозитория с общими операциями чтения и записи."""

from pathlib import Path
from typing import Iterator, List

from src.core.exceptions import ArtifactError
from src.core.logging import log


class BaseRepository:
    """
    Базовый репозиторий поверх каталога на диске.

    Args:
        root (Path): Корневой каталог репозитория.
    """

    def __init__(self, root: Path):
        self.root = Path(root)

    def path(self, *parts: str) -> Path:
        """Путь внутри корня репозитория."""
        return self.root.joinpath(*parts)

    def exists(self, *parts: str) -> bool:
        return self.path(*parts).exists()

    def read_text(self, path: Path) -> str:
        """
        Читает текстовый файл в UTF-8.

        Args:
            path (Path): Путь к файлу.

        Returns:
            str: Содержимое файла.

        Raises:
            ArtifactError: Если файл не найден или не читается.
        """
        log.debug(f"{self.__class__.__name__}: чтение {path}")
        try:
            return Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ArtifactError(f"Не удалось прочитать '{path}': {exc}") from exc

    def write_text(self, path: Path, text: str, *, overwrite: bool = True) -> Path:
        """
        Записывает текстовый файл, создавая родительские каталоги.

        Args:
            path (Path): Путь к файлу.
            text (str): Содержимое.
            overwrite (bool): Разрешить перезапись существующего файла.

        Returns:
            Path: Путь к записанному файлу.

        Raises:
            ArtifactError: Если файл существует и overwrite=False, или запись не удалась.
        """
        path = Path(path)
        if path.exists() and not overwrite:
            log.warning(f"Попытка перезаписать существующий файл {path}")
            raise ArtifactError(
                f"Файл '{path}' уже существует и не может быть перезаписан",
                extra={"path": str(path)},
            )
        log.debug(f"{self.__class__.__name__}: запись {path}")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ArtifactError(f"Не удалось записать '{path}': {exc}") from exc
        return path

    def iter_lines(self, path: Path) -> Iterator[str]:
        """Непустые строки файла без комментариев `#`, с обрезанными пробелами."""
        for raw_line in self.read_text(path).splitlines():
            line = raw_line.strip()
            if line and not line.startswith("#"):
                yield line

    def list_files(self, pattern: str = "*") -> List[Path]:
        return sorted(self.root.glob(pattern))
