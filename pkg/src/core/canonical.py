"""
Каноничный текстовый формат "ключ = значение".

Одна строка на лист дерева: `dotted.key = <json>`, ключи отсортированы,
строки с `#` считаются комментариями. Используется для конфигураций,
наборов метрик и манифестов.
"""

import json
from pathlib import Path
from typing import Any, Dict, Mapping

from src.core.exceptions import ConfigError

SEPARATOR = " = "


def flatten(data: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    """
    Разворачивает вложенные словари в плоский словарь с ключами через точку.

    Списки и скаляры остаются листьями.

    Args:
        data (Mapping[str, Any]): Вложенный словарь.
        prefix (str): Префикс ключа для рекурсии.

    Returns:
        Dict[str, Any]: Плоский словарь.
    """
    flat: Dict[str, Any] = {}

    for key, value in data.items():
        full_key = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, Mapping) and value:
            flat.update(flatten(value, full_key))
        else:
            flat[full_key] = value

    return flat


def unflatten(flat: Mapping[str, Any]) -> Dict[str, Any]:
    """Обратная операция к flatten."""
    tree: Dict[str, Any] = {}

    for dotted_key, value in flat.items():
        node = tree
        *parents, leaf = dotted_key.split(".")
        for part in parents:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"Конфликт ключей в каноничном тексте: '{dotted_key}'")
            node = child
        node[leaf] = value

    return tree


def dumps(data: Mapping[str, Any], header: str | None = None) -> str:
    """
    Сериализует словарь в каноничный текст.

    Args:
        data (Mapping[str, Any]): Данные (JSON-совместимые значения).
        header (str | None): Необязательный комментарий в первой строке.

    Returns:
        str: Каноничный текст с завершающим переводом строки.
    """
    flat = flatten(data)
    lines = [f"# {header}"] if header else []
    lines.extend(
        f"{key}{SEPARATOR}{json.dumps(flat[key], ensure_ascii=False, sort_keys=True)}"
        for key in sorted(flat)
    )
    return "\n".join(lines) + "\n"


def loads(text: str) -> Dict[str, Any]:
    """
    Разбирает каноничный текст во вложенный словарь.

    Raises:
        ConfigError: Если строка не содержит разделителя или значение не JSON.
    """
    flat: Dict[str, Any] = {}

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if SEPARATOR.strip() not in line:
            raise ConfigError(
                f"Строка {line_number}: ожидается 'ключ = значение', получено '{line}'"
            )
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        try:
            flat[key] = json.loads(raw_value)
        except json.JSONDecodeError:
            # Голые строки без кавычек допустимы в рукописных файлах
            flat[key] = raw_value

    return unflatten(flat)


def read(path: Path) -> Dict[str, Any]:
    """Читает каноничный текст из файла."""
    try:
        return loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"Не удалось прочитать файл '{path}': {exc}") from exc
