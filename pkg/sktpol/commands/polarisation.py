"""
sktpol - Polarisation Commands
SKT verdicts, the alpha equation, primitive classes and the polarised tangent space
"""

import logging
from typing import Optional

import click

from sktpol.commands.base import load_manifold, manifold_argument, parse_bidegree, parse_class, run_report
from sktpol.models.checks import CheckLog
from sktpol.models.polarisation import (
    SEARCHES,
    L_omega,
    SktContext,
    holomorphic_volume,
    kahler_case_check,
    polarised_tangent_space,
    primitive_class_space,
    primitive_representative,
    skt_check,
)
from sktpol.utils.report_factory import ReportFactory

logger = logging.getLogger(__name__)


@click.command("skt")
@manifold_argument
@click.pass_context
def skt(ctx: click.Context, manifold: str):
    """Is the declared metric pluriclosed?"""

    def body():
        parsed = load_manifold(manifold)
        metric = parsed.metric
        P = parsed.presentation
        verdict = skt_check(metric)
        dbar_omega = P.dbar(metric.form)
        results = {
            "skt": verdict,
            "kahler": not dbar_omega,
            "omega": metric.form,
            "dbar_omega": dbar_omega,
            "ddbar_omega": P.ddbar(metric.form),
        }
        checks = CheckLog()
        checks.record("skt", verdict, "partial dbar omega = 0")
        return results, checks

    run_report(ctx, "skt", {"manifold": manifold}, body)


@click.command("alpha")
@manifold_argument
@click.pass_context
def alpha(ctx: click.Context, manifold: str):
    """Solve dbar omega = partial dbar alpha and build omega_tilde, omega_hat and zeta"""

    def body():
        parsed = load_manifold(manifold)
        context = SktContext.build(parsed.metric)
        solution = context.alpha_solution
        results = {
            "feasible": solution.feasible,
            "unknowns": solution.unknowns,
            "alpha": context.alpha,
            "omega_tilde": context.omega_tilde,
            "omega_hat": context.omega_hat,
            "zeta": context.zeta,
            "certificate": ReportFactory.sparse(solution.certificate),
        }
        checks = CheckLog()
        checks.extend(context.checks)
        if solution.feasible and not parsed.presentation.dbar(parsed.metric.form):
            checks.extend(kahler_case_check(context))
        return results, checks

    run_report(ctx, "alpha", {"manifold": manifold}, body)


@click.command("primitive")
@manifold_argument
@click.option("--class", "class_text", help="Bott-Chern representative, e.g. '(23|2)+i(13|1)'")
@click.option("--bidegree", "-b", help="Bidegree 'p,q' with p+q = n; default (n-1,1)")
@click.pass_context
def primitive(ctx: click.Context, manifold: str, class_text: Optional[str], bidegree: Optional[str]):
    """L_omega of one class, or the space of primitive Bott-Chern classes"""
    inputs = {"manifold": manifold, "class": class_text, "bidegree": bidegree}

    def body():
        parsed = load_manifold(manifold)
        P = parsed.presentation
        context = SktContext.build(parsed.metric)
        checks = CheckLog()
        checks.extend(context.checks)

        if class_text is not None:
            gamma = parse_class(class_text, P.n)
            image = L_omega(context, gamma)
            results = {
                "class": gamma,
                "wedge": image.image,
                "aeppli_coordinates": ReportFactory.sparse(image.coordinates),
                "primitive": image.is_zero,
            }
            return results, checks

        grading = parse_bidegree(bidegree) if bidegree else (P.n - 1, 1)
        space = primitive_class_space(context, grading)
        checks.extend(space.checks)
        results = {
            "bidegree": ReportFactory.bidegree(grading),
            "dimension": space.dimension,
            "source_dimension": space.source_dimension,
            "image_rank": space.image_rank,
            "basis": ReportFactory.basis(space.basis),
        }
        return results, checks

    run_report(ctx, "primitive", inputs, body)


@click.command("primitive-rep")
@manifold_argument
@click.option("--class", "class_text", required=True, help="Representative of a primitive Bott-Chern class")
@click.option("--search", type=click.Choice(SEARCHES), default="bott-chern", show_default=True,
              help="Search gamma + partial dbar beta, or d-closed gamma + dbar beta")
@click.pass_context
def primitive_rep(ctx: click.Context, manifold: str, class_text: str, search: str):
    """Search a primitive class for a primitive representative"""
    inputs = {"manifold": manifold, "class": class_text, "search": search}

    def body():
        parsed = load_manifold(manifold)
        context = SktContext.build(parsed.metric)
        gamma = parse_class(class_text, parsed.presentation.n)
        found = primitive_representative(context, gamma, search)
        results = {
            "search": found.search,
            "feasible": found.feasible,
            "unknowns": found.unknowns,
            "witness": found.witness,
            "beta": found.beta,
            "certificate": ReportFactory.sparse(found.certificate),
            "certificate_verified": found.certificate_verified,
        }
        checks = CheckLog()
        checks.extend(context.checks)
        if not found.feasible:
            checks.record("certificate_verified", found.certificate_verified, "y.A = 0 and y.b != 0")
        return results, checks

    run_report(ctx, "primitive-rep", inputs, body)


@click.command("tangent")
@manifold_argument
@click.pass_context
def tangent(ctx: click.Context, manifold: str):
    """The polarised tangent space H^{0,1}(X, T^{1,0}X)_[omega]"""

    def body():
        parsed = load_manifold(manifold)
        P = parsed.presentation
        context = SktContext.build(parsed.metric)
        volume = parsed.volume or holomorphic_volume(P)
        space = polarised_tangent_space(context, volume)
        primitive_space = primitive_class_space(context, (P.n - 1, 1))
        checks = CheckLog()
        checks.extend(context.checks)
        checks.extend(space.checks)
        checks.extend(primitive_space.checks)
        results = {
            "dimension": space.dimension,
            "ambient_dimension": space.ambient_dimension,
            "aeppli_dimension": space.aeppli_dimension,
            "basis": ReportFactory.basis(space.basis),
            "primitive_dimension": primitive_space.dimension,
            "lefschetz_rank": primitive_space.image_rank,
            "volume": volume.form if volume else None,
        }
        return results, checks

    run_report(ctx, "tangent", {"manifold": manifold}, body)


def setup(cli: click.Group) -> None:
    for command in (skt, alpha, primitive, primitive_rep, tangent):
        cli.add_command(command)
