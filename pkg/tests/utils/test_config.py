import logging

from sktpol.utils.config import Settings, configure_logging, load_settings


def test_defaults(monkeypatch):
    for name in ("SKTPOL_LOG_LEVEL", "SKTPOL_LOG_FILE", "SKTPOL_REPORT_INDENT"):
        monkeypatch.delenv(name, raising=False)
    assert load_settings(dotenv=False) == Settings()


def test_environment_overrides(monkeypatch, tmp_path):
    log_file = tmp_path / "sktpol.log"
    monkeypatch.setenv("SKTPOL_LOG_LEVEL", "debug")
    monkeypatch.setenv("SKTPOL_LOG_FILE", str(log_file))
    monkeypatch.setenv("SKTPOL_REPORT_INDENT", "4")
    settings = load_settings(dotenv=False)
    assert settings == Settings("DEBUG", str(log_file), 4)

    configure_logging(settings)
    logging.getLogger("sktpol.tests").debug("written to the log file")
    for handler in logging.getLogger().handlers:
        handler.flush()
    configure_logging(Settings())
    assert "written to the log file" in log_file.read_text(encoding="utf-8")


def test_bad_values_fall_back(monkeypatch):
    monkeypatch.setenv("SKTPOL_LOG_LEVEL", "chatty")
    monkeypatch.setenv("SKTPOL_REPORT_INDENT", "wide")
    monkeypatch.delenv("SKTPOL_LOG_FILE", raising=False)
    settings = load_settings(dotenv=False)
    assert settings.log_level == "INFO"
    assert settings.report_indent == 2
