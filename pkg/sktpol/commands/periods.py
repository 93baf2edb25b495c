"""
sktpol - Period Commands
Hodge-Riemann pairings, period points and the tangent metrics
"""

import logging
from typing import Optional

import click

from sktpol.commands.base import load_manifold, manifold_argument, parse_class, run_report
from sktpol.models.checks import CheckLog
from sktpol.models.cohomology import cohomology
from sktpol.models.hodge_riemann import (
    h_form,
    hn_split,
    metrics_report,
    pairing,
    period_domain_membership,
    period_point,
    q_form,
)
from sktpol.models.polarisation import SktContext, require_volume
from sktpol.utils.report_factory import ReportFactory

logger = logging.getLogger(__name__)


@click.command("pairings")
@manifold_argument
@click.option("--first", "first_text", help="Degree-n form a; with --second evaluates Q(a,b) and H(a,b)")
@click.option("--second", "second_text", help="Degree-n form b")
@click.pass_context
def pairings(ctx: click.Context, manifold: str, first_text: Optional[str], second_text: Optional[str]):
    """Q and H on harmonic degree-n classes and the star eigenspace split"""
    inputs = {"manifold": manifold, "first": first_text, "second": second_text}

    def body():
        parsed = load_manifold(manifold)
        metric = parsed.metric
        n = metric.n
        checks = CheckLog()

        if first_text is not None or second_text is not None:
            a = parse_class(first_text or second_text, n)
            b = parse_class(second_text or first_text, n)
            results = {
                "Q": pairing("Q", a, b, metric).value,
                "H": pairing("H", a, b, metric).value,
            }
            return results, checks

        group = cohomology(metric.presentation, "derham", n, metric)
        basis = group.basis
        split = hn_split(metric)
        checks.extend(split.checks)
        results = {
            "degree": n,
            "basis": ReportFactory.basis(basis),
            "Q": ReportFactory.matrix([[q_form(metric, a, b) for b in basis] for a in basis]),
            "H": ReportFactory.matrix([[h_form(metric, a, b) for b in basis] for a in basis]),
            "eigenvalue": split.eigenvalue,
            "plus": ReportFactory.basis(split.plus),
            "minus": ReportFactory.basis(split.minus),
        }
        return results, checks

    run_report(ctx, "pairings", inputs, body)


@click.command("period")
@manifold_argument
@click.option("--form", "form_text", help="Degree-n class to test instead of the holomorphic volume")
@click.pass_context
def period(ctx: click.Context, manifold: str, form_text: Optional[str]):
    """Period point of [u], or period-domain membership of a degree-n class"""
    inputs = {"manifold": manifold, "form": form_text}

    def body():
        parsed = load_manifold(manifold)
        metric = parsed.metric
        if form_text is not None:
            phi = parse_class(form_text, metric.n)
            verdict = period_domain_membership(metric, phi)
        else:
            phi = require_volume(parsed.presentation, parsed.volume).form
            verdict = period_point(metric, phi)
        checks = CheckLog()
        checks.record("in_period_domain", verdict.in_domain, "; ".join(verdict.reasons))
        results = {
            "form": phi,
            "Q": verdict.q_value,
            "H": verdict.h_value,
            "in_domain": verdict.in_domain,
            "reasons": verdict.reasons,
            "coordinates": ReportFactory.sparse(verdict.coordinates),
        }
        return results, checks

    run_report(ctx, "period", inputs, body)


@click.command("metrics")
@manifold_argument
@click.pass_context
def metrics(ctx: click.Context, manifold: str):
    """G^(1), G^(2) and gamma on the polarised tangent space"""

    def body():
        parsed = load_manifold(manifold)
        volume = require_volume(parsed.presentation, parsed.volume)
        context = SktContext.build(parsed.metric)
        report = metrics_report(context, volume)
        checks = CheckLog()
        checks.extend(context.checks)
        checks.extend(report.checks)
        results = {
            "dimension": len(report.basis),
            "basis": ReportFactory.basis(report.basis),
            "denominator": report.denominator,
            "g1": ReportFactory.matrix(report.g1),
            "g2": ReportFactory.matrix(report.g2),
            "gamma": ReportFactory.matrix(report.gamma),
            "g2_equals_gamma": report.g2 == report.gamma,
            "directions": [
                {
                    "theta": d.theta,
                    "representative": d.representative,
                    "g1": d.g1,
                    "g2": d.g2,
                    "gamma": d.gamma,
                    "zeta_norm2": d.zeta_norm2,
                }
                for d in report.diagnostics
            ],
        }
        return results, checks

    run_report(ctx, "metrics", {"manifold": manifold}, body)


def setup(cli: click.Group) -> None:
    for command in (pairings, period, metrics):
        cli.add_command(command)
