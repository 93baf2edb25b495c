"""
sktpol - Deformation Commands
Deformed structure equations along t theta and the polarisation verdicts on them
"""

import logging

import click

from sktpol.commands.base import load_manifold, manifold_argument, parse_direction, parse_parameter, run_report
from sktpol.models.checks import CheckLog
from sktpol.models.coframe import Form
from sktpol.models.deformation import (
    DeformedStructure,
    deform,
    deformed_skt_metric,
    polarisation_check,
    polarised_tangent_consistency,
)
from sktpol.models.exact import ZERO, is_real
from sktpol.models.polarisation import SktContext
from sktpol.utils.report_factory import ReportFactory

logger = logging.getLogger(__name__)


def _theta_option(function):
    return click.option("--theta", required=True, help="Direction, e.g. '(|1)Z1' or '1/2*(|2)Z1 - (|3)Z2'")(function)


def _t_option(function):
    return click.option("--t", "t_text", default="1/2", show_default=True, help="Exact parameter a/b+c/di")(function)


def _record_volume(checks: CheckLog, deformed: DeformedStructure) -> None:
    if deformed.volume is not None:
        checks.record("holomorphic_volume", True, deformed.volume.form.to_string())
    else:
        P = deformed.presentation
        residual = P.dbar(Form.monomial(P.n, range(1, P.n + 1)))
        checks.record("holomorphic_volume", False, f"no invariant volume, dbar u = {residual.to_string()}")


@click.command("deform")
@manifold_argument
@_theta_option
@_t_option
@click.pass_context
def deform_command(ctx: click.Context, manifold: str, theta: str, t_text: str):
    """Structure equations of the deformed complex structure"""
    inputs = {"manifold": manifold, "theta": theta, "t": t_text}

    def body():
        parsed = load_manifold(manifold)
        P = parsed.presentation
        direction = parse_direction(theta, P.n)
        t = parse_parameter(t_text)
        deformed = deform(P, direction, t)
        checks = CheckLog()
        checks.extend(deformed.presentation.validate().log)
        _record_volume(checks, deformed)
        results = {
            "name": deformed.presentation.name,
            "structure_equations": {
                name: form for name, form in zip(deformed.presentation.names, deformed.presentation.dtable)
            },
            "coframe_change": None if deformed.change is None else ReportFactory.matrix(
                [[deformed.change.matrix.get(a, {}).get(b, ZERO) for b in range(2 * P.n)] for a in range(2 * P.n)]
            ),
            "volume": deformed.volume.form if deformed.volume else None,
        }
        return results, checks

    run_report(ctx, "deform", inputs, body)


@click.command("polarised")
@manifold_argument
@_theta_option
@_t_option
@click.option("--consistency/--no-consistency", default=False,
              help="Also compare the first-order (0,2) class with [theta -| zeta]_A")
@click.pass_context
def polarised(ctx: click.Context, manifold: str, theta: str, t_text: str, consistency: bool):
    """Is the deformed fibre polarised by the Aeppli class of omega?"""
    inputs = {"manifold": manifold, "theta": theta, "t": t_text, "consistency": consistency}

    def body():
        parsed = load_manifold(manifold)
        P = parsed.presentation
        direction = parse_direction(theta, P.n)
        t = parse_parameter(t_text)
        context = SktContext.build(parsed.metric)
        context.require_alpha()
        deformed = deform(P, direction, t)

        verdict = polarisation_check(deformed, context)
        metric = deformed_skt_metric(deformed, context)
        checks = CheckLog()
        checks.extend(context.checks)
        checks.extend(verdict.checks)
        checks.extend(metric.checks)
        _record_volume(checks, deformed)
        results = {
            "applicable": verdict.applicable,
            "polarised": verdict.polarised,
            "reason": verdict.reason,
            "class_02": ReportFactory.sparse(verdict.class_02),
            "class_20": ReportFactory.sparse(verdict.class_20),
            "volume": deformed.volume.form if deformed.volume else None,
            "deformed_metric": {
                "form": metric.form,
                "minors": metric.minors,
                "real": metric.real,
                "pluriclosed": metric.pluriclosed,
                "positive": metric.positive,
            },
        }
        if consistency and t and is_real(t):
            first_order = polarised_tangent_consistency(context, direction, t)
            results["first_order"] = {
                "applicable": first_order.applicable,
                "linear": ReportFactory.sparse(first_order.linear),
                "quadratic": ReportFactory.sparse(first_order.quadratic),
                "expected": ReportFactory.sparse(first_order.expected),
                "agrees": first_order.agrees,
                "reason": first_order.reason,
            }
        return results, checks

    run_report(ctx, "polarised", inputs, body)


def setup(cli: click.Group) -> None:
    for command in (deform_command, polarised):
        cli.add_command(command)
