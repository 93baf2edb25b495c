"""
sktpol - Configuration
Environment-driven settings and logging setup
"""

import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass(frozen=True)
class Settings:
    """
    RUNTIME SETTINGS
    - log_level: name of the root logging level
    - log_file: optional path of an extra log file
    - report_indent: JSON indentation of emitted reports
    """

    log_level: str = "INFO"
    log_file: Optional[str] = None
    report_indent: int = 2


def load_settings(dotenv: bool = True) -> Settings:
    """Read settings from the environment, loading .env first when present"""
    if dotenv:
        load_dotenv()

    level = os.getenv("SKTPOL_LOG_LEVEL", "INFO").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "INFO"

    try:
        indent = int(os.getenv("SKTPOL_REPORT_INDENT", "2"))
    except ValueError:
        indent = 2

    return Settings(
        log_level=level,
        log_file=os.getenv("SKTPOL_LOG_FILE") or None,
        report_indent=max(indent, 0),
    )


def configure_logging(settings: Settings) -> None:
    """Log to stderr, plus a file when configured; stdout carries the reports"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file))

    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
