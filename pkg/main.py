"""
sktpol - Entry Point
Run the command line from a source checkout: python main.py <command> ...
"""

import logging

from dotenv import load_dotenv

from sktpol.commands import cli
from sktpol.utils.config import configure_logging, load_settings

load_dotenv()

logger = logging.getLogger(__name__)


if __name__ == "__main__":
    settings = load_settings(dotenv=False)
    configure_logging(settings)
    logger.debug(f"Starting sktpol with log level {settings.log_level}")
    cli(obj={"settings": settings})
