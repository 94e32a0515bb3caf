"""
Пакет схем Pydantic.

Определяет структуры данных конфигураций, датасетов, метрик и отчетов,
а также их каноничную текстовую сериализацию.
"""
