"""
sktpol - Hodge-Riemann
Pairings on degree-n classes, the star eigenspace split, period points and the tangent metrics
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Tuple

from sktpol.models.checks import CheckLog
from sktpol.models.cohomology import cohomology, minimal_d_closed_rep
from sktpol.models.coframe import Form, VectorForm, contract
from sktpol.models.exact import (
    ONE,
    ZERO,
    Scalar,
    conj,
    format_scalar,
    i_power,
    is_real,
    kernel,
    rank,
    scalar,
    sign_power,
    solve_affine,
    sparse_matrix,
)
from sktpol.models.metric import HermitianMetric
from sktpol.models.polarisation import (
    HolomorphicVolume,
    PolarisedTangentSpace,
    SktContext,
    lefschetz_split,
    polarised_tangent_space,
)
from sktpol.utils.errors import BidegreeError, MissingVolumeError, SktpolError

logger = logging.getLogger(__name__)

PAIRINGS = ("Q", "H")

Matrix = List[List[Scalar]]


@dataclass(frozen=True)
class PairingValue:
    kind: str
    value: Scalar


def q_form(metric: HermitianMetric, a: Form, b: Form) -> Scalar:
    """(-1)^(n(n-1)/2) integral of a wedge b"""
    n = metric.n
    return sign_power(n * (n - 1) // 2) * metric.integrate(a.wedge(b))


def h_form(metric: HermitianMetric, a: Form, b: Form) -> Scalar:
    """(-1)^(n(n+1)/2) i^n integral of a wedge conj(b)"""
    n = metric.n
    return sign_power(n * (n + 1) // 2) * i_power(n) * metric.integrate(a.wedge(b.conjugate()))


def _harmonic(metric: HermitianMetric, a: Form) -> Form:
    n = metric.n
    if a and a.degree != n:
        raise BidegreeError(f"Pairings are defined on degree {n}, got degrees {a.degrees()}")
    group = cohomology(metric.presentation, "derham", n, metric)
    return group.element(group.reduce(a))


def pairing(kind: str, a: Form, b: Form, metric: HermitianMetric) -> PairingValue:
    """Q or H evaluated on the harmonic representatives of two de Rham classes"""
    if kind not in PAIRINGS:
        raise SktpolError(f"Unknown pairing type: {kind}")
    ha, hb = _harmonic(metric, a), _harmonic(metric, b)
    value = q_form(metric, ha, hb) if kind == "Q" else h_form(metric, ha, hb)
    return PairingValue(kind, value)


def q_nondegeneracy_check(metric: HermitianMetric) -> CheckLog:
    """(-1)^(n(n-1)/2) Q(a, star conj a) = |a|^2 on a harmonic basis, and Q has full rank"""
    n = metric.n
    log = CheckLog()
    group = cohomology(metric.presentation, "derham", n, metric)
    for a in group.basis:
        partner = metric.hodge_star(a.conjugate())
        value = sign_power(n * (n - 1) // 2) * q_form(metric, a, partner)
        log.record("star_pairing", value == metric.norm2(a), a.to_string())
    entries = {i: {j: q_form(metric, a, b) for j, b in enumerate(group.basis)} for i, a in enumerate(group.basis)}
    size = group.dimension
    log.record("q_nondegenerate", rank(sparse_matrix(entries, size, size)) == size, f"dimension {size}")
    return log


# ---------------------------------------------------------------------------
# Star eigenspaces on degree n
# ---------------------------------------------------------------------------


@dataclass
class HnSplit:
    """Eigenspaces of star on harmonic degree-n forms, eigenvalue +lambda and -lambda"""

    eigenvalue: Scalar
    plus: List[Form]
    minus: List[Form]
    checks: CheckLog = field(default_factory=CheckLog)


def hn_split(metric: HermitianMetric) -> HnSplit:
    n = metric.n
    group = cohomology(metric.presentation, "derham", n, metric)
    size = group.dimension
    eigenvalue = ONE if n % 2 == 0 else i_power(1)

    star_columns = [group.reduce(metric.hodge_star(b)) for b in group.basis]

    def eigenspace(value: Scalar) -> List[Form]:
        entries = {}
        for j, column in enumerate(star_columns):
            for i, c in column.items():
                entries.setdefault(i, {})[j] = c
        for i in range(size):
            entries.setdefault(i, {})[i] = entries.get(i, {}).get(i, ZERO) - value
        matrix = sparse_matrix(entries, size, size)
        return [group.element(v) for v in kernel(matrix)]

    split = HnSplit(eigenvalue, eigenspace(eigenvalue), eigenspace(-eigenvalue))
    split.checks.record("complete", len(split.plus) + len(split.minus) == size,
                        f"{len(split.plus)} + {len(split.minus)} = {size}")
    for form in split.plus:
        value = h_form(metric, form, form)
        split.checks.record("h_positive_on_plus", is_real(value) and value.x > 0, form.to_string())
    for form in split.minus:
        value = h_form(metric, form, form)
        split.checks.record("h_negative_on_minus", is_real(value) and value.x < 0, form.to_string())
    return split


# ---------------------------------------------------------------------------
# Period points
# ---------------------------------------------------------------------------


@dataclass
class PeriodVerdict:
    """Q(phi, phi) = 0 and H(phi, phi) of the sign of H^{n,0} (negative for odd n)"""

    q_value: Scalar
    h_value: Scalar
    in_domain: bool
    reasons: List[str] = field(default_factory=list)
    coordinates: Optional[dict] = None


def period_domain_membership(metric: HermitianMetric, phi: Form) -> PeriodVerdict:
    n = metric.n
    if not phi:
        raise SktpolError("The zero class has no period point")
    group = cohomology(metric.presentation, "derham", n, metric)
    coords = group.reduce(phi)
    if not coords:
        raise SktpolError("The class of phi vanishes")
    q_value = pairing("Q", phi, phi, metric).value
    h_value = pairing("H", phi, phi, metric).value
    reasons = []
    if q_value:
        reasons.append("Q(phi, phi) != 0")
    wanted = -1 if n % 2 else 1
    if not is_real(h_value) or not h_value.x or (h_value.x > 0) != (wanted > 0):
        reasons.append(f"H(phi, phi) is not {'negative' if wanted < 0 else 'positive'}")
    return PeriodVerdict(q_value, h_value, not reasons, reasons, coords)


def period_point(metric: HermitianMetric, u: Form) -> PeriodVerdict:
    P = metric.presentation
    if not u:
        raise SktpolError("u = 0 has no period point")
    if not u.is_of_bidegree(P.n, 0):
        raise BidegreeError(f"A period point is taken of an ({P.n},0)-form")
    if P.dbar(u):
        raise MissingVolumeError("dbar u does not vanish")
    return period_domain_membership(metric, u)


# ---------------------------------------------------------------------------
# Tangent metrics
# ---------------------------------------------------------------------------


def volume_denominator(metric: HermitianMetric, volume: HolomorphicVolume) -> Scalar:
    """i^(n^2) integral of u wedge conj(u), a positive rational"""
    n = metric.n
    u = volume.form
    return i_power(n * n) * metric.integrate(u.wedge(u.conjugate()))


def gamma_sign(n: int) -> Scalar:
    return ONE if n % 2 else -ONE


@dataclass
class MetricDiagnostics:
    """
    PER-DIRECTION METRIC DATA
    - representative: theta with theta -| u the minimal d-closed form of its class
    - contraction = primitive + omega wedge zeta
    - g1, g2, gamma: the three metrics on (theta, theta)
    """

    theta: VectorForm
    representative: VectorForm
    contraction: Form
    primitive: Form
    zeta: Form
    g1: Scalar
    g2: Scalar
    gamma: Scalar
    zeta_norm2: Scalar
    checks: CheckLog = field(default_factory=CheckLog)


def representative_for(ctx: SktContext, volume: HolomorphicVolume, theta: VectorForm) -> Tuple[VectorForm, Form]:
    """Direction whose contraction with u is the minimal d-closed representative of the class of theta -| u"""
    P = ctx.presentation
    w = contract(theta, volume.form)
    minimal = minimal_d_closed_rep(P, ctx.metric, w)
    if not minimal.feasible:
        raise SktpolError(f"No minimal d-closed representative for {theta.to_string()}")
    source = P.vector_space(1)
    target = P.space(P.n - 1, 1)
    matrix = source.matrix_of(lambda t: contract(t, volume.form), target)
    solved = solve_affine(matrix, target.coordinates(minimal.form))
    if not solved.feasible:
        raise SktpolError("Contraction with u does not reach the minimal representative")
    return source.element(solved.particular), minimal.form


def metric_diagnostics(ctx: SktContext, volume: HolomorphicVolume, theta: VectorForm,
                       minimal: bool = True) -> MetricDiagnostics:
    metric = ctx.metric
    n = metric.n
    denominator = volume_denominator(metric, volume)
    if minimal:
        representative, w = representative_for(ctx, volume, theta)
    else:
        representative, w = theta, contract(theta, volume.form)

    split = lefschetz_split(metric, w)
    g1 = metric.bundle_inner(representative, representative)
    g2 = metric.norm2(w) / denominator if w else ZERO
    gamma = gamma_sign(n) * h_form(metric, w, w) / denominator
    zeta_norm2 = metric.norm2(split.zeta) if split.zeta else ZERO

    diagnostics = MetricDiagnostics(theta, representative, w, split.primitive, split.zeta, g1, g2, gamma, zeta_norm2)
    diagnostics.checks.extend(split.checks)
    four = scalar(4)
    diagnostics.checks.record("difference_identity", g2 - gamma == four * zeta_norm2 / denominator,
                              f"G2 - gamma = {format_scalar(g2 - gamma)}")
    primitive_norm = metric.norm2(split.primitive) if split.primitive else ZERO
    diagnostics.checks.record("g2_split_identity", g2 * denominator == primitive_norm + scalar(2) * zeta_norm2)
    return diagnostics


def rescaled_gamma_invariance(ctx: SktContext, volume: HolomorphicVolume, theta: VectorForm, c: Scalar) -> bool:
    """gamma does not change under u -> c u"""
    if not c:
        raise SktpolError("Rescaling by zero")
    base = metric_diagnostics(ctx, volume, theta, minimal=False).gamma
    scaled = metric_diagnostics(ctx, HolomorphicVolume(volume.form.scale(c)), theta, minimal=False).gamma
    return base == scaled


def _is_hermitian(matrix: Matrix) -> bool:
    size = len(matrix)
    return all(matrix[a][b] == conj(matrix[b][a]) for a in range(size) for b in range(size))


def _is_positive_semidefinite(matrix: Matrix) -> bool:
    """Every principal minor real and non-negative"""
    size = len(matrix)
    for k in range(1, size + 1):
        for index in combinations(range(size), k):
            entries = {a: {b: matrix[i][j] for b, j in enumerate(index) if matrix[i][j]} for a, i in enumerate(index)}
            minor = sparse_matrix(entries, k, k).det()
            if not is_real(minor) or minor.x < 0:
                return False
    return True


@dataclass
class MetricReport:
    """
    METRIC REPORT
    - basis: polarised tangent directions as minimal representatives
    - g1, g2, gamma: Gram matrices on the basis
    - diagnostics: per-vector split and identities
    """

    basis: List[VectorForm]
    denominator: Scalar
    g1: Matrix
    g2: Matrix
    gamma: Matrix
    diagnostics: List[MetricDiagnostics]
    checks: CheckLog = field(default_factory=CheckLog)


def metrics_report(ctx: SktContext, volume: Optional[HolomorphicVolume],
                   basis: Optional[List[VectorForm]] = None) -> MetricReport:
    if volume is None:
        raise MissingVolumeError("The tangent metrics need a holomorphic volume")
    ctx.require_alpha()
    metric = ctx.metric
    if basis is None:
        tangent: PolarisedTangentSpace = polarised_tangent_space(ctx)
        basis = tangent.basis

    denominator = volume_denominator(metric, volume)
    diagnostics = [metric_diagnostics(ctx, volume, theta) for theta in basis]
    reps = [d.representative for d in diagnostics]
    contractions = [d.contraction for d in diagnostics]
    zetas = [d.zeta for d in diagnostics]
    sign = gamma_sign(metric.n)

    def gram(fn) -> Matrix:
        return [[fn(a, b) for b in range(len(basis))] for a in range(len(basis))]

    def inner(x: Form, y: Form) -> Scalar:
        return metric.inner(x, y) if x and y else ZERO

    g1 = gram(lambda a, b: metric.bundle_inner(reps[a], reps[b]))
    g2 = gram(lambda a, b: inner(contractions[a], contractions[b]) / denominator)
    gamma = gram(lambda a, b: sign * h_form(metric, contractions[a], contractions[b]) / denominator)
    four = scalar(4)
    zeta_gram = gram(lambda a, b: four * inner(zetas[a], zetas[b]) / denominator)

    report = MetricReport(basis, denominator, g1, g2, gamma, diagnostics)
    for name, matrix in (("g1", g1), ("g2", g2), ("gamma", gamma)):
        report.checks.record(f"{name}_hermitian", _is_hermitian(matrix))
    difference = [[g2[a][b] - gamma[a][b] for b in range(len(basis))] for a in range(len(basis))]
    report.checks.record("difference_is_zeta_gram", difference == zeta_gram)
    report.checks.record("difference_semidefinite", _is_positive_semidefinite(difference))
    for d in diagnostics:
        report.checks.extend(d.checks)
    logger.info(f"Metric report over {len(basis)} directions")
    return report
