"""
sktpol - Command Line
The sktpol click group and the loader that registers every command module
"""

import importlib
import logging
from typing import List

import click

from sktpol import __version__
from sktpol.utils.config import configure_logging, load_settings

logger = logging.getLogger(__name__)

# Loaded in order; each module exposes setup(cli)
COMMAND_MODULES = [
    'sktpol.commands.core',
    'sktpol.commands.polarisation',
    'sktpol.commands.periods',
    'sktpol.commands.deformation',
]


@click.group()
@click.version_option(version=__version__, prog_name="sktpol")
@click.pass_context
def cli(ctx: click.Context):
    """Exact invariant cohomology and SKT-polarised deformations of nilmanifolds and Lie groups"""
    ctx.ensure_object(dict)


def load_commands(group: click.Group) -> List[str]:
    """Import every command module and let it register its commands"""
    loaded = []
    failed = []
    for module_name in COMMAND_MODULES:
        try:
            module = importlib.import_module(module_name)
            module.setup(group)
            loaded.append(module_name)
            logger.debug(f"✅ Successfully loaded commands: {module_name}")
        except Exception as e:
            failed.append(module_name)
            logger.error(f"❌ Failed to load commands {module_name}: {e}")

    if failed:
        logger.error(f"❌ Failed command modules: {failed}")
    logger.debug(f"📊 Loaded {len(loaded)}/{len(COMMAND_MODULES)} command modules, {len(group.commands)} commands")
    return loaded


load_commands(cli)


def main() -> None:
    settings = load_settings()
    configure_logging(settings)
    cli(obj={"settings": settings})
