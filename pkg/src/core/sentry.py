"""Настройка Sentry SDK для CLI."""

from typing import Any, Dict, Optional

import sentry_sdk
from sentry_sdk.integrations.loguru import LoggingLevels, LoguruIntegration

from src.core.config import settings
from src.core.exceptions import EXIT_VALIDATION, ToolkitError
from src.core.logging import log

# Частота семплирования трейсов по окружению
TRACES_SAMPLE_RATES = {"production": 0.1, "development": 1.0, "testing": 0.0}


def sentry_environment() -> str:
    if settings.PRODUCTION:
        return "production"
    if settings.TESTING:
        return "testing"
    return "development"


def drop_user_errors(event: Dict[str, Any], hint: Dict[str, Any]) -> Optional[Dict[str, Any]]:
    """before_send: ошибки входных данных (код 1) не отправляются, только ошибки выполнения."""
    exc_info = hint.get("exc_info")
    if exc_info and isinstance(exc_info[1], ToolkitError) and exc_info[1].exit_code == EXIT_VALIDATION:
        return None
    return event


def initialize_sentry():
    """
    Инициализирует Sentry SDK, если задан DSN.

    События берутся из Loguru: INFO и выше попадают в breadcrumbs,
    ERROR и выше становятся событиями.
    """
    sentry_dsn = settings.SENTRY_DSN

    if not sentry_dsn:
        log.debug("SENTRY_DSN не установлен. Sentry SDK не инициализирован.")
        return

    environment = sentry_environment()
    traces_sample_rate = TRACES_SAMPLE_RATES[environment]
    log.info(
        f"Инициализация Sentry SDK. DSN: {'***' + sentry_dsn[-6:]}, "
        f"Environment: {environment}, "
        f"Traces Rate: {traces_sample_rate}"
    )

    try:
        sentry_sdk.init(
            dsn=sentry_dsn,
            integrations=[
                LoguruIntegration(level=LoggingLevels.INFO.value, event_level=LoggingLevels.ERROR.value)
            ],
            environment=environment,
            traces_sample_rate=traces_sample_rate,
            release=f"hinglish-bully@{settings.VERSION}",
            before_send=drop_user_errors,
        )
        log.success("Sentry SDK успешно инициализирован.")
    except Exception as exc:
        log.exception(f"Ошибка инициализации Sentry SDK: {exc}")


def tag_run(command: str, **tags: Any) -> None:
    """Метки текущего прогона (подкоманда, энкодер, устройство) для событий Sentry."""
    sentry_sdk.set_tag("command", command)
    sentry_sdk.set_tag("device", settings.DEVICE)
    for key, value in tags.items():
        if value is not None:
            sentry_sdk.set_tag(key, str(value))
