"""
sktpol - Deformation
Finite deformations of the bigrading along a direction theta and the polarisation checks on them
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from sympy.polys.domains import QQ_I

from sktpol.models.checks import CheckLog
from sktpol.models.coframe import CoframeChange, CoframePresentation, Form, VectorForm, contract
from sktpol.models.cohomology import cohomology, hodge_decompose_2form
from sktpol.models.exact import (
    IMAG,
    ZERO,
    GramForm,
    Scalar,
    Vector,
    conj,
    format_scalar,
    is_real,
    scalar,
    sparse_matrix,
)
from sktpol.models.metric import HermitianMetric
from sktpol.models.polarisation import HolomorphicVolume, SktContext, holomorphic_volume
from sktpol.utils.errors import IntegrabilityError, NotClosedError, NotPositiveError, SktpolError

logger = logging.getLogger(__name__)


def _as_scalar(t) -> Scalar:
    return t if isinstance(t, type(ZERO)) else QQ_I.convert(t)


def deformation_change(base: CoframePresentation, theta: VectorForm, t) -> CoframeChange:
    """
    eta^i = phi^i - t sum_j theta^i_j conj(phi)^j and its conjugate, as a change of coframe

    Raises DegenerateCoframeError when eta and conj(eta) are linearly dependent.
    """
    n = base.n
    t = _as_scalar(t)
    if theta.n != n or (theta and theta.q != 1):
        raise SktpolError("Deformation directions are T^{1,0}-valued (0,1)-forms of the same presentation")
    rows: Dict[int, Dict[int, Scalar]] = {}
    for i in range(n):
        rows[i] = {i: QQ_I.one}
        rows[n + i] = {n + i: QQ_I.one}
        for (g,), c in theta.components[i].terms.items():
            j = g - n
            rows[i][g] = rows[i].get(g, ZERO) - t * c
            rows[n + i][j] = rows[n + i].get(j, ZERO) - conj(t) * conj(c)
    return CoframeChange(n, sparse_matrix(rows, 2 * n, 2 * n))


@dataclass
class DeformedStructure:
    """
    DEFORMED STRUCTURE
    - base: the undeformed presentation
    - theta, t: direction and exact parameter
    - change: coframe change from phi to eta
    - presentation: structure equations in the eta coframe
    - volume: dbar_t-closed eta^{1..n}, None when the fibre has no invariant one
    """

    base: CoframePresentation
    theta: VectorForm
    t: Scalar
    change: Optional[CoframeChange]
    presentation: CoframePresentation
    volume: Optional[HolomorphicVolume] = None

    def to_deformed(self, form: Form) -> Form:
        """Rewrite a base-coframe form in the eta coframe"""
        return form if self.change is None else self.change.express(form)

    def from_deformed(self, form: Form) -> Form:
        return form if self.change is None else self.change.restore(form)


def integrability_defect(base: CoframePresentation, theta: VectorForm, t) -> List[Form]:
    """(0,2) components of d eta^i in the eta coframe"""
    t = _as_scalar(t)
    if not t or not theta:
        return [Form.zero(base.n) for _ in range(base.n)]
    change = deformation_change(base, theta, t)
    differentials = change.transform_differentials(base.generator_differentials)
    return [differentials[i].component(0, 2) for i in range(base.n)]


def deform(base: CoframePresentation, theta: VectorForm, t) -> DeformedStructure:
    t = _as_scalar(t)
    residual = base.dbar_vector(theta)
    if residual:
        raise NotClosedError(f"dbar theta = {residual.to_string()} does not vanish")
    if not t or not theta:
        return DeformedStructure(base, theta, t, None, base, holomorphic_volume(base))

    change = deformation_change(base, theta, t)
    differentials = change.transform_differentials(base.generator_differentials)
    defect = [differentials[i].component(0, 2) for i in range(base.n)]
    if any(defect):
        raise IntegrabilityError(f"Deformation at t={format_scalar(t)} is not integrable", defect)

    name = f"{base.name or 'presentation'}@t={format_scalar(t)}"
    deformed = CoframePresentation(base.n, differentials[: base.n], base.names, name)
    deformed.require_valid()
    logger.info(f"✅ Deformed {base.name or 'presentation'} to {name}")
    volume = holomorphic_volume(deformed)
    if volume is None:
        logger.warning(f"⚠️ {name} has no invariant holomorphic volume")
    return DeformedStructure(base, theta, t, change, deformed, volume)


# ---------------------------------------------------------------------------
# Polarisation of deformed fibres
# ---------------------------------------------------------------------------


@dataclass
class PolarisationVerdict:
    """
    The (0,2) Aeppli part of the class of omega_tilde in the deformed bigrading;
    not applicable when the degree-2 decomposition fails or is not unique
    """

    applicable: bool
    polarised: Optional[bool]
    class_02: Vector = field(default_factory=dict)
    class_20: Vector = field(default_factory=dict)
    reason: str = ""
    checks: CheckLog = field(default_factory=CheckLog)


def polarisation_check(ds: DeformedStructure, ctx: SktContext) -> PolarisationVerdict:
    omega_tilde = ctx.omega_tilde
    if omega_tilde is None:
        ctx.require_alpha()
    if ds.change is None:
        verdict = PolarisationVerdict(True, True)
        verdict.checks.record("undeformed", True, "omega_tilde is of type (1,1)")
        return verdict

    rho = ds.to_deformed(omega_tilde)
    decomposition = hodge_decompose_2form(ds.presentation, rho)
    if not decomposition.feasible:
        return PolarisationVerdict(False, None, reason="no invariant degree-2 decomposition")
    if not decomposition.unique:
        return PolarisationVerdict(False, None, reason="degree-2 decomposition is not unique")

    class_02 = decomposition.classes[(0, 2)]
    class_20 = decomposition.classes[(2, 0)]
    verdict = PolarisationVerdict(True, not class_02, class_02, class_20)
    verdict.checks.record("conjugate_vanishing", (not class_02) == (not class_20),
                          "the (0,2) and (2,0) parts vanish together")
    return verdict


@dataclass
class TangentConsistency:
    """
    Linear-in-t coefficient of the (0,2) class along t theta, against the class of theta -| zeta;
    not applicable when the sampled classes are not a polynomial a t + b t^2
    """

    applicable: bool
    linear: Vector = field(default_factory=dict)
    quadratic: Vector = field(default_factory=dict)
    expected: Vector = field(default_factory=dict)
    agrees: Optional[bool] = None
    reason: str = ""


def _sample_class(ctx: SktContext, theta: VectorForm, s: Scalar, reference: List[Form]) -> Optional[Vector]:
    """(0,2) Aeppli coordinates at parameter s, in a basis labelled like the base one"""
    ds = deform(ctx.presentation, theta, s)
    group = cohomology(ds.presentation, "aeppli", (0, 2))
    if group.basis != reference:
        return None
    decomposition = hodge_decompose_2form(ds.presentation, ds.to_deformed(ctx.omega_tilde))
    if not decomposition.feasible or not decomposition.unique:
        return None
    return decomposition.classes[(0, 2)]


def polarised_tangent_consistency(ctx: SktContext, theta: VectorForm, t=None) -> TangentConsistency:
    ctx.require_alpha()
    t = _as_scalar(t if t is not None else QQ_I.convert(1) / QQ_I.convert(2))
    if not t or not is_real(t):
        raise SktpolError("The sampling parameter must be a nonzero real rational")

    base_group = cohomology(ctx.presentation, "aeppli", (0, 2))
    reference = base_group.basis
    expected = base_group.reduce(contract(theta, ctx.zeta))

    samples = [t, t / scalar(2), t / scalar(4)]
    values = []
    for s in samples:
        value = _sample_class(ctx, theta, s, reference)
        if value is None:
            return TangentConsistency(False, expected=expected, reason=f"no comparable decomposition at t={format_scalar(s)}")
        values.append(value)

    c1, c2, c3 = values
    keys = set(c1) | set(c2) | set(c3)
    linear: Vector = {}
    quadratic: Vector = {}
    for k in keys:
        v1, v2 = c1.get(k, ZERO), c2.get(k, ZERO)
        b = scalar(2) * (v1 - scalar(2) * v2) / (t * t)
        a = (scalar(4) * v2 - v1) / t
        if a:
            linear[k] = a
        if b:
            quadratic[k] = b
        predicted = a * samples[2] + b * samples[2] * samples[2]
        if predicted != c3.get(k, ZERO):
            return TangentConsistency(False, linear, quadratic, expected,
                                      reason="sampled classes are not quadratic in t")
    return TangentConsistency(True, linear, quadratic, expected, linear == expected)


# ---------------------------------------------------------------------------
# Deformed SKT metrics
# ---------------------------------------------------------------------------


@dataclass
class DeformedSktMetric:
    """(1,1) part of omega_hat in the deformed bigrading, with its exact positivity data"""

    form: Form
    matrix: Dict[int, Dict[int, Scalar]]
    minors: List[Scalar]
    real: bool
    pluriclosed: bool
    positive: bool
    checks: CheckLog = field(default_factory=CheckLog)


def deformed_skt_metric(ds: DeformedStructure, ctx: SktContext) -> DeformedSktMetric:
    ctx.require_alpha()
    n = ds.base.n
    omega_11 = ds.to_deformed(ctx.omega_hat).component(1, 1)

    rows: Dict[int, Dict[int, Scalar]] = {}
    for m, c in omega_11.terms.items():
        j, k = m[0], m[1] - n
        rows.setdefault(j, {})[k] = c / IMAG
    matrix = sparse_matrix(rows, n, n)
    gram = GramForm(matrix, check=False)
    minors = gram.leading_minors()

    real = omega_11.conjugate() == omega_11
    pluriclosed = not ds.presentation.ddbar(omega_11)
    positive = gram.is_hermitian() and gram.is_positive_definite()
    result = DeformedSktMetric(omega_11, {i: dict(r) for i, r in matrix.items()}, minors, real, pluriclosed, positive)
    result.checks.record("real", real)
    result.checks.record("pluriclosed", pluriclosed)
    result.checks.record("positive", positive, "leading minors " + ", ".join(format_scalar(m) for m in minors))
    if not positive:
        logger.warning(f"⚠️ Deformed (1,1) part is not positive at t={format_scalar(ds.t)}")
    return result


def deformed_metric(ds: DeformedStructure, ctx: SktContext) -> HermitianMetric:
    """The deformed (1,1) part as a HermitianMetric on the deformed presentation"""
    verdict = deformed_skt_metric(ds, ctx)
    if not verdict.positive:
        raise NotPositiveError(f"Deformed metric at t={format_scalar(ds.t)} is not positive definite")
    return HermitianMetric(ds.presentation, sparse_matrix(verdict.matrix, ds.base.n, ds.base.n))
