"""
sktpol - Command Helpers
Manifold loading, option parsing and report emission shared by every command group
"""

import logging
from typing import Any, Callable, Dict, Optional, Tuple

import click

from sktpol.models.checks import CheckLog
from sktpol.models.coframe import Form, VectorForm
from sktpol.models.exact import Scalar, parse_scalar
from sktpol.parsers.builtin_manifolds import resolve_manifold
from sktpol.parsers.manifold_parser import ParsedManifold, parse_form, parse_vector_form
from sktpol.utils.config import Settings, load_settings
from sktpol.utils.errors import SktpolError
from sktpol.utils.report_factory import ReportFactory

logger = logging.getLogger(__name__)

INPUT_ERROR_EXIT = 2

Body = Callable[[], Tuple[Dict[str, Any], Optional[CheckLog]]]


def manifold_argument(function):
    return click.argument("manifold", metavar="MANIFOLD")(function)


def settings_of(ctx: click.Context) -> Settings:
    ctx.ensure_object(dict)
    if "settings" not in ctx.obj:
        ctx.obj["settings"] = load_settings()
    return ctx.obj["settings"]


def load_manifold(source: str, validate: bool = True) -> ParsedManifold:
    """Builtin name, file path, or '-' for stdin"""
    stdin_text = click.get_text_stream("stdin").read() if source == "-" else ""
    return resolve_manifold(source, stdin_text, validate)


def parse_bidegree(text: str) -> Tuple[int, int]:
    try:
        p, q = (int(part) for part in text.replace("(", "").replace(")", "").split(","))
    except ValueError as e:
        raise SktpolError(f"Bidegree must look like 'p,q', got {text!r}") from e
    return p, q


def parse_class(text: str, n: int) -> Form:
    return parse_form(text, n)


def parse_direction(text: str, n: int) -> VectorForm:
    theta = parse_vector_form(text, n)
    if theta and theta.q != 1:
        raise SktpolError(f"Deformation directions are (0,1)-forms, got degree {theta.q}")
    return theta


def parse_parameter(text: str) -> Scalar:
    return parse_scalar(text)


def run_report(ctx: click.Context, command: str, inputs: Dict[str, Any], body: Body) -> None:
    """
    Run a command body and emit its report

    The JSON report goes to stdout and the summary to stderr. Every
    SktpolError becomes an error report with exit code 2; computed verdicts,
    true or false, exit with 0.
    """
    settings = settings_of(ctx)
    logger.info(f"Running {command} on {inputs.get('manifold', '')}")
    try:
        results, checks = body()
        report = ReportFactory.create_report(command, inputs, results, checks)
        code = 0
    except SktpolError as e:
        logger.error(f"❌ {command} failed: {e}")
        report = ReportFactory.create_error_report(command, inputs, e)
        code = INPUT_ERROR_EXIT

    click.echo(ReportFactory.render(report, settings.report_indent))
    click.echo(ReportFactory.summary(report), err=True)
    if code:
        ctx.exit(code)
