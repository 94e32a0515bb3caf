"""Репозиторий манифестов прогонов (только дополнение)."""

from pathlib import Path
from typing import List

from src.core.exceptions import ArtifactError
from src.core.logging import log
from src.repositories.base import BaseRepository
from src.schemas.manifest import RunManifest

MANIFEST_FILE = "manifest.txt"


def fold_dir_name(fold: int) -> str:
    """Каталог артефактов фолда; production-модель (fold=-1) живет в `production`."""
    return "production" if fold < 0 else f"fold_{fold}"


class ManifestRepository(BaseRepository):
    """
    Манифесты внутри каталога прогона.

    Агрегатный манифест лежит в корне (`manifest.txt`), манифесты фолдов и
    вариантов абляции - в подкаталогах.
    """

    def manifest_path(self, *subdirs: str) -> Path:
        return self.path(*subdirs, MANIFEST_FILE)

    def write(self, manifest: RunManifest, *subdirs: str) -> Path:
        """
        Записывает манифест, не перезаписывая существующий.

        Args:
            manifest (RunManifest): Манифест.
            *subdirs (str): Подкаталоги внутри каталога прогона.

        Returns:
            Path: Путь к манифесту.

        Raises:
            ArtifactError: Если манифест по этому пути уже существует.
        """
        path = self.manifest_path(*subdirs)
        self.write_text(
            path, manifest.to_canonical_text(header=f"RunManifest: {manifest.command}"), overwrite=False
        )
        log.info(f"Манифест {manifest.command} записан: {path}")
        return path

    def read(self, *subdirs: str) -> RunManifest:
        path = self.manifest_path(*subdirs)
        if not path.is_file():
            raise ArtifactError(f"Манифест не найден: {path}", extra={"path": str(path)})
        return RunManifest.read(path)

    def all_manifests(self) -> List[Path]:
        """Все манифесты прогона, корневой первым."""
        return sorted(self.root.rglob(MANIFEST_FILE), key=lambda path: (len(path.parts), str(path)))
