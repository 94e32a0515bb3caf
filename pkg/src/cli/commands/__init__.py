"""Подкоманды CLI: каждая регистрирует свой парсер и обработчик."""

from . import ablate, evaluate, explain, preprocess, report, train

# Порядок совпадает с порядком подкоманд в справке
COMMANDS = (preprocess, train, evaluate, explain, ablate, report)

__all__ = ["COMMANDS"]
