from unittest.mock import MagicMock, patch

from sentry_sdk.integrations.loguru import LoguruIntegration

from src.core import sentry
from src.core.exceptions import ArtifactError, ConfigError

# --- Тесты для initialize_sentry ---


def _mock_settings(dsn, production: bool, testing: bool) -> MagicMock:
    mock_settings = MagicMock()
    mock_settings.SENTRY_DSN = dsn
    mock_settings.PRODUCTION = production
    mock_settings.TESTING = testing
    mock_settings.VERSION = "1.0.0"
    return mock_settings


# Используем patch для мокирования sentry_sdk.init и объекта log
@patch("src.core.sentry.sentry_sdk.init", return_value=None)
@patch("src.core.sentry.log")
def test_initialize_sentry_dsn_provided_production(
    mock_log: MagicMock,
    mock_sentry_init: MagicMock,
    monkeypatch,
):
    """Тест инициализации Sentry в Production режиме при наличии DSN."""
    test_dsn = "https://testkey@test.sentry.io/123"
    monkeypatch.setattr(sentry, "settings", _mock_settings(test_dsn, production=True, testing=False))

    sentry.initialize_sentry()

    mock_log.info.assert_called()
    mock_log.success.assert_called_with("Sentry SDK успешно инициализирован.")
    mock_log.exception.assert_not_called()
    mock_sentry_init.assert_called_once()

    # Проверяем аргументы вызова sentry_sdk.init
    _, call_kwargs = mock_sentry_init.call_args
    assert call_kwargs.get("dsn") == test_dsn
    assert call_kwargs.get("environment") == "production"
    assert call_kwargs.get("traces_sample_rate") == 0.1
    assert call_kwargs.get("release") == "hinglish-bully@1.0.0"
    assert call_kwargs.get("before_send") is sentry.drop_user_errors

    # Для CLI остается только интеграция Loguru
    integrations = call_kwargs.get("integrations", [])
    assert len(integrations) == 1
    assert isinstance(integrations[0], LoguruIntegration)


@patch("src.core.sentry.sentry_sdk.init", return_value=None)
@patch("src.core.sentry.log")
def test_initialize_sentry_dsn_provided_development(
    mock_log: MagicMock, mock_sentry_init: MagicMock, monkeypatch
):
    """Тест инициализации Sentry в Development режиме (не Production, не Testing)."""
    monkeypatch.setattr(
        sentry, "settings", _mock_settings("https://dev@test.sentry.io/1", production=False, testing=False)
    )

    sentry.initialize_sentry()

    _, call_kwargs = mock_sentry_init.call_args
    assert call_kwargs.get("environment") == "development"
    assert call_kwargs.get("traces_sample_rate") == 1.0  # 100% для development


@patch("src.core.sentry.sentry_sdk.init", return_value=None)
@patch("src.core.sentry.log")
def test_initialize_sentry_dsn_provided_testing(
    mock_log: MagicMock, mock_sentry_init: MagicMock, monkeypatch
):
    """Тест инициализации Sentry в Testing режиме."""
    monkeypatch.setattr(
        sentry, "settings", _mock_settings("https://test@test.sentry.io/1", production=False, testing=True)
    )

    sentry.initialize_sentry()

    _, call_kwargs = mock_sentry_init.call_args
    assert call_kwargs.get("environment") == "testing"
    assert call_kwargs.get("traces_sample_rate") == 0.0  # 0% для testing


@patch("src.core.sentry.sentry_sdk.init", return_value=None)
@patch("src.core.sentry.log")
def test_initialize_sentry_no_dsn(mock_log: MagicMock, mock_sentry_init: MagicMock, monkeypatch):
    """Тест случая, когда SENTRY_DSN не установлен."""
    monkeypatch.setattr(sentry, "settings", _mock_settings(None, production=True, testing=False))

    sentry.initialize_sentry()

    # Проверяем, что sentry_sdk.init НЕ вызывался
    mock_sentry_init.assert_not_called()
    mock_log.debug.assert_called_once_with("SENTRY_DSN не установлен. Sentry SDK не инициализирован.")
    mock_log.info.assert_not_called()
    mock_log.success.assert_not_called()


@patch("src.core.sentry.sentry_sdk.init")  # Имитируем ошибку
@patch("src.core.sentry.log")
def test_initialize_sentry_init_error(mock_log: MagicMock, mock_sentry_init: MagicMock, monkeypatch):
    """Тест обработки ошибки при вызове sentry_sdk.init."""
    init_error = ValueError("Sentry init failed")
    monkeypatch.setattr(sentry, "settings", _mock_settings("invalid_dsn_format", production=False, testing=False))
    mock_sentry_init.side_effect = init_error

    sentry.initialize_sentry()

    mock_sentry_init.assert_called_once()
    mock_log.exception.assert_called_once_with(f"Ошибка инициализации Sentry SDK: {init_error}")
    mock_log.success.assert_not_called()


# --- Фильтр событий и метки прогона ---


def test_drop_user_errors():
    event = {"level": "error"}
    assert sentry.drop_user_errors(event, {"exc_info": (ConfigError, ConfigError("bad"), None)}) is None
    assert sentry.drop_user_errors(event, {"exc_info": (ArtifactError, ArtifactError("io"), None)}) is event
    assert sentry.drop_user_errors(event, {}) is event


@patch("src.core.sentry.sentry_sdk.set_tag")
def test_tag_run(mock_set_tag: MagicMock):
    sentry.tag_run("train", backbone="tiny-hash-2x32", reference=None)
    tags = {call.args[0]: call.args[1] for call in mock_set_tag.call_args_list}
    assert tags["command"] == "train"
    assert tags["backbone"] == "tiny-hash-2x32"
    assert "reference" not in tags
