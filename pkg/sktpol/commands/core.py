"""
sktpol - Core Commands
Presentation checks, canonical text and the cohomology tables
"""

import logging
from typing import Optional

import click

from sktpol.commands.base import load_manifold, manifold_argument, parse_bidegree, run_report
from sktpol.models.checks import CheckLog
from sktpol.models.cohomology import (
    MODEL_NAMES,
    cohomology,
    conjugation_symmetry_check,
    ddbar_test,
    normalise_model,
    schweitzer_duality_check,
)
from sktpol.parsers.manifold_parser import print_manifold
from sktpol.utils.errors import SktpolError
from sktpol.utils.report_factory import ReportFactory

logger = logging.getLogger(__name__)


@click.command("validate")
@manifold_argument
@click.pass_context
def validate(ctx: click.Context, manifold: str):
    """Check integrability, d^2 = 0 and unimodularity of a presentation"""

    def body():
        parsed = load_manifold(manifold, validate=False)
        report = parsed.presentation.validate()
        failure = report.failure
        results = {
            "name": parsed.name,
            "n": parsed.presentation.n,
            "valid": report.passed,
            "failure": None if failure is None else {
                "check": failure.check,
                "generator": failure.generator,
                "residual": failure.residual,
            },
        }
        return results, report.log

    run_report(ctx, "validate", {"manifold": manifold}, body)


@click.command("show")
@manifold_argument
@click.pass_context
def show(ctx: click.Context, manifold: str):
    """Print the canonical complex-block text of a manifold"""

    def body():
        parsed = load_manifold(manifold)
        P = parsed.presentation
        results = {
            "name": parsed.name,
            "n": P.n,
            "text": print_manifold(parsed),
            "structure_equations": {name: form for name, form in zip(P.names, P.dtable)},
            "metric": ReportFactory.matrix(
                [[parsed.metric.entry(j, k) for k in range(P.n)] for j in range(P.n)]
            ),
            "metric_declared": parsed.metric_declared,
            "kahler_form": parsed.metric.form,
            "volume": parsed.volume.form if parsed.volume else None,
            "real_basis": parsed.real_names,
        }
        return results, None

    run_report(ctx, "show", {"manifold": manifold}, body)


@click.command("cohomology")
@manifold_argument
@click.option("--model", "-m", default="bc", show_default=True,
              help="bc | dolbeault | aeppli | derham")
@click.option("--bidegree", "-b", help="Single bidegree 'p,q'")
@click.option("--degree", "-k", type=int, help="Single total degree (de Rham)")
@click.option("--all", "all_gradings", is_flag=True, help="Every bidegree (or degree for de Rham)")
@click.option("--harmonic/--no-harmonic", default=True, show_default=True,
              help="Report harmonic representatives for the declared metric")
@click.pass_context
def cohomology_command(ctx: click.Context, manifold: str, model: str, bidegree: Optional[str],
                       degree: Optional[int], all_gradings: bool, harmonic: bool):
    """Dimensions and bases of Bott-Chern, Dolbeault, Aeppli or de Rham cohomology"""
    inputs = {"manifold": manifold, "model": model, "bidegree": bidegree, "degree": degree,
              "all": all_gradings, "harmonic": harmonic}

    def body():
        key = normalise_model(model)
        parsed = load_manifold(manifold)
        P = parsed.presentation
        metric = parsed.metric if harmonic else None

        if key == "derham":
            if bidegree is not None:
                raise SktpolError("de Rham cohomology is graded by --degree, not --bidegree")
            gradings = [degree] if degree is not None and not all_gradings else list(range(2 * P.n + 1))
        else:
            if degree is not None:
                raise SktpolError("Bigraded models take --bidegree, not --degree")
            gradings = [parse_bidegree(bidegree)] if bidegree and not all_gradings else P.bidegrees()

        checks = CheckLog()
        groups = []
        dimensions = {}
        for grading in gradings:
            group = cohomology(P, key, grading, metric)
            label = ReportFactory.bidegree(grading)
            dimensions[label] = group.dimension
            groups.append({"grading": label, "dimension": group.dimension, "basis": ReportFactory.basis(group.basis)})
            for check in group.checks.checks:
                checks.record(f"{label} {check.name}", check.passed, check.detail)

        if key in ("bc", "aeppli") and len(gradings) > 1:
            checks.extend(conjugation_symmetry_check(P))
            checks.extend(schweitzer_duality_check(P))

        results = {
            "model": key,
            "model_name": MODEL_NAMES[key],
            "n": P.n,
            "dimensions": dimensions,
            "groups": groups,
            "total": sum(dimensions.values()),
        }
        return results, checks

    run_report(ctx, "cohomology", inputs, body)


@click.command("ddbar-test")
@manifold_argument
@click.pass_context
def ddbar_test_command(ctx: click.Context, manifold: str):
    """Are Bott-Chern -> Dolbeault -> Aeppli isomorphisms in every bidegree?"""

    def body():
        parsed = load_manifold(manifold)
        verdict = ddbar_test(parsed.presentation)
        results = {"holds": verdict.holds, "failures": verdict.failures}
        return results, verdict.checks

    run_report(ctx, "ddbar-test", {"manifold": manifold}, body)


def setup(cli: click.Group) -> None:
    for command in (validate, show, cohomology_command, ddbar_test_command):
        cli.add_command(command)
