"""
sktpol - Polarisation
Pluriclosed metrics, the alpha equation, L_omega, primitive classes and Calabi-Yau maps
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from sympy.polys.matrices.sdm import SDM

from sktpol.models.checks import CheckLog
from sktpol.models.coframe import CoframePresentation, Form, VectorForm, VectorFormSpace, contract
from sktpol.models.cohomology import CanonicalMap, CohomologyGroup, canonical_map, cohomology
from sktpol.models.exact import (
    Vector,
    columns_of,
    combine,
    complement_basis,
    dot,
    echelon_basis,
    i_power,
    kernel,
    matrix_from_columns,
    min_norm_solution,
    rank,
    sign_power,
    solve_affine,
    vstack,
)
from sktpol.models.metric import HermitianMetric
from sktpol.utils.errors import (
    BidegreeError,
    MissingAlphaError,
    MissingVolumeError,
    NotClosedError,
    NotInNumeratorError,
    NotPrimitiveError,
    NotSktError,
    SktpolError,
)

logger = logging.getLogger(__name__)

SEARCHES = ("bott-chern", "dolbeault")


def skt_check(metric: HermitianMetric) -> bool:
    """partial dbar omega = 0"""
    return not metric.presentation.ddbar(metric.form)


@dataclass
class AlphaSolution:
    """Minimal-norm (0,1)-form alpha with dbar omega = partial dbar alpha, or a certificate"""

    feasible: bool
    alpha: Optional[Form] = None
    certificate: Optional[Vector] = None
    unknowns: int = 0


def solve_alpha(metric: HermitianMetric) -> AlphaSolution:
    presentation = metric.presentation
    if not skt_check(metric):
        raise NotSktError("partial dbar omega does not vanish")
    source = presentation.space(0, 1)
    target = presentation.space(1, 2)
    matrix = source.matrix_of(presentation.ddbar, target)
    rhs = target.coordinates(presentation.dbar(metric.form))
    solved = min_norm_solution(matrix, rhs, metric.gram(source))
    if not solved.feasible:
        logger.info(f"alpha equation on {presentation.name or 'presentation'} has no invariant solution")
        return AlphaSolution(False, certificate=solved.certificate, unknowns=source.dim)
    return AlphaSolution(True, source.element(solved.solution), unknowns=source.dim)


@dataclass
class SktContext:
    """
    SKT CONTEXT
    - alpha: solution of the alpha equation, when one exists
    - omega_tilde = omega + partial alpha + dbar conj(alpha), d-closed, in the Aeppli class of omega
    - omega_hat = -partial conj(alpha) + omega - dbar alpha, real with (1,1) part omega
    - zeta = omega + partial alpha, dbar-closed
    """

    presentation: CoframePresentation
    metric: HermitianMetric
    alpha_solution: AlphaSolution
    alpha: Optional[Form] = None
    omega_tilde: Optional[Form] = None
    omega_hat: Optional[Form] = None
    zeta: Optional[Form] = None
    checks: CheckLog = field(default_factory=CheckLog)

    @classmethod
    def build(cls, metric: HermitianMetric) -> "SktContext":
        presentation = metric.presentation
        if not skt_check(metric):
            raise NotSktError(f"omega is not pluriclosed on {presentation.name or 'presentation'}")
        solution = solve_alpha(metric)
        ctx = cls(presentation, metric, solution)
        ctx.checks.record("skt", True, "partial dbar omega = 0")
        ctx.checks.record("alpha", solution.feasible, f"{solution.unknowns} unknowns")
        if not solution.feasible:
            return ctx

        P = presentation
        omega = metric.form
        alpha = solution.alpha
        alpha_bar = alpha.conjugate()
        ctx.alpha = alpha
        ctx.omega_tilde = omega + P.partial(alpha) + P.dbar(alpha_bar)
        ctx.omega_hat = -P.partial(alpha_bar) + omega - P.dbar(alpha)
        ctx.zeta = omega + P.partial(alpha)

        ctx.checks.record("omega_tilde_closed", not P.d(ctx.omega_tilde))
        ctx.checks.record("omega_hat_real", ctx.omega_hat.conjugate() == ctx.omega_hat)
        ctx.checks.record("omega_hat_type", ctx.omega_hat.component(1, 1) == omega)
        ctx.checks.record("omega_hat_shift", ctx.omega_tilde - ctx.omega_hat == P.d(alpha + alpha_bar))
        ctx.checks.record("zeta_dbar_closed", not P.dbar(ctx.zeta))
        return ctx

    def require_alpha(self) -> Form:
        if self.alpha is None:
            raise MissingAlphaError("dbar omega = partial dbar alpha has no invariant solution")
        return self.alpha


def kahler_case_check(ctx: SktContext) -> CheckLog:
    """With dbar omega = 0 the solution alpha is 0 and zeta is omega"""
    log = CheckLog()
    P = ctx.presentation
    if P.dbar(ctx.metric.form):
        log.record("kahler", False, "dbar omega does not vanish")
        return log
    log.record("kahler", True)
    log.record("alpha_zero", ctx.alpha is not None and not ctx.alpha)
    log.record("zeta_is_omega", ctx.zeta == ctx.metric.form)
    return log


# ---------------------------------------------------------------------------
# L_omega and primitive classes
# ---------------------------------------------------------------------------


@dataclass
class LefschetzImage:
    source: Form
    image: Form
    coordinates: Vector

    @property
    def is_zero(self) -> bool:
        return not self.coordinates


def L_omega(ctx: SktContext, gamma: Form, omega: Optional[Form] = None) -> LefschetzImage:
    """[gamma]_BC -> [omega wedge gamma]_A"""
    P = ctx.presentation
    if len(gamma.bidegrees()) > 1:
        raise BidegreeError("L_omega acts on classes of one bidegree")
    if gamma:
        p, q = gamma.bidegrees()[0]
        source = cohomology(P, "bc", (p, q), ctx.metric)
        if not source.contains(gamma):
            raise NotInNumeratorError(f"{gamma.to_string()} is not partial- and dbar-closed")
    else:
        return LefschetzImage(gamma, gamma, {})
    image = (omega if omega is not None else ctx.metric.form).wedge(gamma)
    target = cohomology(P, "aeppli", (p + 1, q + 1), ctx.metric)
    return LefschetzImage(gamma, image, target.reduce(image))


def lefschetz_class_map(ctx: SktContext, bidegree: Tuple[int, int]) -> CanonicalMap:
    p, q = bidegree
    source = cohomology(ctx.presentation, "bc", (p, q), ctx.metric)
    target = cohomology(ctx.presentation, "aeppli", (p + 1, q + 1), ctx.metric)
    columns = [target.reduce(ctx.metric.form.wedge(b)) for b in source.basis]
    return CanonicalMap(source, target, matrix_from_columns(columns, target.dimension))


@dataclass
class PrimitiveClassSpace:
    """ker L_omega on an antidiagonal bidegree, with the rank of its image"""

    bidegree: Tuple[int, int]
    basis: List[Form]
    source_dimension: int
    image_rank: int
    checks: CheckLog = field(default_factory=CheckLog)

    @property
    def dimension(self) -> int:
        return len(self.basis)


def primitive_class_space(ctx: SktContext, bidegree: Tuple[int, int]) -> PrimitiveClassSpace:
    n = ctx.presentation.n
    p, q = bidegree
    if p + q != n:
        raise BidegreeError(f"Primitive classes are computed on bidegrees (p, {n}-p), got {bidegree}")
    mapping = lefschetz_class_map(ctx, bidegree)
    source = mapping.source
    basis = [combine(v, [source.space.coordinates(b) for b in source.basis]) for v in kernel(mapping.matrix)]
    forms = [source.space.element(v) for v in basis]
    result = PrimitiveClassSpace(bidegree, forms, source.dimension, mapping.rank)

    h02 = cohomology(ctx.presentation, "dolbeault", (0, 2)).dimension
    if bidegree == (n - 1, 1):
        result.checks.record("primitive_dimension", result.dimension == source.dimension - h02,
                             f"{result.dimension} = {source.dimension} - {h02}")
        result.checks.record("lefschetz_surjective", result.image_rank == h02,
                             f"rank {result.image_rank}, h(0,2) {h02}")
    return result


def l_omega_independence_check(ctx: SktContext, gamma: Form, beta: Form,
                               beta1: Form, beta2: Form) -> CheckLog:
    """L_omega ignores gamma -> gamma + ddbar beta and omega -> omega + partial beta1 + dbar beta2"""
    P = ctx.presentation
    log = CheckLog()
    base = L_omega(ctx, gamma)
    shifted = L_omega(ctx, gamma + P.ddbar(beta))
    log.record("bc_representative", shifted.coordinates == base.coordinates)
    moved = ctx.metric.form + P.partial(beta1) + P.dbar(beta2)
    log.record("aeppli_representative", L_omega(ctx, gamma, moved).coordinates == base.coordinates)
    return log


@dataclass
class PrimitiveRepresentative:
    """
    PRIMITIVE REPRESENTATIVE SEARCH
    - feasible: a representative v with omega wedge v = 0 exists
    - witness: such a v, with its potential beta
    - certificate: y with y.A = 0 and y.b != 0 when none exists, re-checked
    """

    search: str
    feasible: bool
    witness: Optional[Form] = None
    beta: Optional[Form] = None
    certificate: Optional[Vector] = None
    certificate_verified: bool = False
    unknowns: int = 0


def primitive_representative(ctx: SktContext, gamma: Form, search: str = "bott-chern") -> PrimitiveRepresentative:
    """
    Search the class of gamma for a primitive form

    "bott-chern" searches gamma + partial dbar beta; "dolbeault" searches
    gamma + dbar beta and also asks for d-closedness.
    """
    if search not in SEARCHES:
        raise SktpolError(f"Unknown search: {search}")
    P = ctx.presentation
    n = P.n
    if not gamma or len(gamma.bidegrees()) != 1:
        raise BidegreeError("Expected a nonzero form of one bidegree")
    p, q = gamma.bidegrees()[0]
    if p + q != n:
        raise BidegreeError(f"Primitive representatives are searched on bidegrees (p, {n}-p), got ({p},{q})")

    image = L_omega(ctx, gamma)
    if not image.is_zero:
        raise NotPrimitiveError(
            f"L_omega of the class is nonzero: {image.image.to_string()}", image=image.image
        )

    omega = ctx.metric.form
    if search == "bott-chern":
        source = P.space(p - 1, q - 1)
        step = P.ddbar
    else:
        source = P.space(p, q - 1)
        step = P.dbar

    # omega wedge (gamma + step beta) = 0, and partial dbar beta = 0 for the Dolbeault search
    wedge_target = P.space(p + 1, q + 1)
    blocks = [source.matrix_of(lambda b: omega.wedge(step(b)), wedge_target)]
    rhs: Vector = wedge_target.coordinates(-omega.wedge(gamma))
    if search == "dolbeault":
        closure_target = P.space(p + 1, q)
        blocks.append(source.matrix_of(P.ddbar, closure_target))
        for i, c in closure_target.coordinates(-P.partial(gamma)).items():
            rhs[wedge_target.dim + i] = c
    matrix = vstack(blocks, source.dim)
    solved = solve_affine(matrix, rhs)

    if not solved.feasible:
        y = solved.certificate
        verified = not any(
            dot(y, column) for column in columns_of(matrix)
        ) and bool(dot(y, rhs))
        logger.info(f"No primitive representative ({search} search), certificate verified: {verified}")
        return PrimitiveRepresentative(search, False, certificate=y, certificate_verified=verified,
                                       unknowns=source.dim)

    beta = source.element(solved.particular)
    witness = gamma + step(beta)
    if omega.wedge(witness):
        raise SktpolError("Primitive witness failed exact re-check")
    return PrimitiveRepresentative(search, True, witness, beta, unknowns=source.dim)


# ---------------------------------------------------------------------------
# Holomorphic volumes and Calabi-Yau maps
# ---------------------------------------------------------------------------


@dataclass
class HolomorphicVolume:
    form: Form

    @classmethod
    def check(cls, presentation: CoframePresentation, form: Form) -> "HolomorphicVolume":
        n = presentation.n
        if not form or not form.is_of_bidegree(n, 0):
            raise MissingVolumeError(f"A holomorphic volume must be a nonzero ({n},0)-form")
        residual = presentation.dbar(form)
        if residual:
            raise MissingVolumeError(f"dbar u = {residual.to_string()} does not vanish")
        return cls(form)


def holomorphic_volume(presentation: CoframePresentation) -> Optional[HolomorphicVolume]:
    """dbar-closed generator of the one-dimensional (n,0) space, when it exists"""
    n = presentation.n
    u = Form.monomial(n, range(1, n + 1))
    if presentation.dbar(u):
        return None
    return HolomorphicVolume(u)


def require_volume(presentation: CoframePresentation, volume: Optional[HolomorphicVolume]) -> HolomorphicVolume:
    if volume is not None:
        return HolomorphicVolume.check(presentation, volume.form)
    found = holomorphic_volume(presentation)
    if found is None:
        raise MissingVolumeError(f"{presentation.name or 'presentation'} carries no invariant holomorphic volume")
    return found


@dataclass
class CalabiYauImage:
    """theta -| u + dbar eta with eta of minimal norm, and its Bott-Chern coordinates"""

    feasible: bool
    contraction: Form
    eta: Optional[Form] = None
    form: Optional[Form] = None
    coordinates: Optional[Vector] = None
    certificate: Optional[Vector] = None


def calabi_yau_map(metric: HermitianMetric, theta: VectorForm, volume: HolomorphicVolume) -> CalabiYauImage:
    P = metric.presentation
    n = P.n
    if P.dbar_vector(theta):
        raise NotClosedError(f"dbar theta does not vanish for theta = {theta.to_string()}")
    HolomorphicVolume.check(P, volume.form)

    w = contract(theta, volume.form)
    source = P.space(n - 1, 0)
    target = P.space(n, 1)
    matrix = source.matrix_of(P.ddbar, target)
    solved = min_norm_solution(matrix, target.coordinates(-P.partial(w)), metric.gram(source))
    if not solved.feasible:
        return CalabiYauImage(False, w, certificate=solved.certificate)

    eta = source.element(solved.solution)
    form = w + P.dbar(eta)
    group = cohomology(P, "bc", (n - 1, 1), metric)
    return CalabiYauImage(True, w, eta, form, group.reduce(form))


def wedge_u_iso(presentation: CoframePresentation, volume: HolomorphicVolume, q: int,
                metric: Optional[HermitianMetric] = None) -> CanonicalMap:
    """[xi] -> [u wedge xi] from Dolbeault (0,q) to Dolbeault (n,q)"""
    n = presentation.n
    source = cohomology(presentation, "dolbeault", (0, q), metric)
    target = cohomology(presentation, "dolbeault", (n, q), metric)
    columns = [target.reduce(volume.form.wedge(b)) for b in source.basis]
    return CanonicalMap(source, target, matrix_from_columns(columns, target.dimension))


def wedge_u_rank(presentation: CoframePresentation, volume: HolomorphicVolume, q: int) -> int:
    return wedge_u_iso(presentation, volume, q).rank


# ---------------------------------------------------------------------------
# Vector-valued Dolbeault cohomology and the polarised tangent space
# ---------------------------------------------------------------------------


class VectorDolbeaultGroup:
    """H^{0,q}(X, T^{1,0}X) = ker dbar / im dbar on T^{1,0}-valued invariant forms"""

    def __init__(self, presentation: CoframePresentation, q: int = 1):
        self.presentation = presentation
        self.q = q
        self.space: VectorFormSpace = presentation.vector_space(q)
        dim = self.space.dim
        out = self.space.matrix_of(presentation.dbar_vector, presentation.vector_space(q + 1))
        self.numerator = kernel(out) if dim else []
        if q > 0:
            previous = presentation.vector_space(q - 1)
            into = previous.matrix_of(presentation.dbar_vector, self.space)
            self.denominator = echelon_basis(columns_of(into), dim)
        else:
            self.denominator = []
        vectors = complement_basis(self.numerator, self.denominator, dim)
        self.basis: List[VectorForm] = [self.space.element(v) for v in vectors]
        self.dimension = len(self.basis)
        self._spanning = matrix_from_columns(vectors + list(self.denominator), dim)

    def contains(self, theta: VectorForm) -> bool:
        coords = self.space.coordinates(theta)
        return not coords or len(echelon_basis(self.numerator + [coords], self.space.dim)) == len(self.numerator)

    def reduce(self, theta: VectorForm) -> Vector:
        if not self.contains(theta):
            raise NotInNumeratorError(f"dbar of {theta.to_string()} does not vanish")
        coords = self.space.coordinates(theta)
        if not coords:
            return {}
        solved = solve_affine(self._spanning, coords)
        return {i: c for i, c in solved.particular.items() if i < self.dimension}


def vector_dolbeault(presentation: CoframePresentation, q: int = 1) -> VectorDolbeaultGroup:
    return presentation.cached(("vector-dolbeault", q), lambda: VectorDolbeaultGroup(presentation, q))


@dataclass
class PolarisedTangentSpace:
    """
    H^{0,1}(X, T^{1,0}X)_[omega]: classes [theta] with [theta -| zeta] = 0;
    the basis is taken from the Dolbeault kernel, the Aeppli kernel is reported beside it
    """

    basis: List[VectorForm]
    ambient_dimension: int
    aeppli_dimension: int
    checks: CheckLog = field(default_factory=CheckLog)

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _contraction_map(ctx: SktContext, group: VectorDolbeaultGroup, model: str) -> Tuple[SDM, CohomologyGroup]:
    target = cohomology(ctx.presentation, model, (0, 2), ctx.metric)
    columns = [target.reduce(contract(theta, ctx.zeta)) for theta in group.basis]
    return matrix_from_columns(columns, target.dimension), target


def polarised_tangent_space(ctx: SktContext, volume: Optional[HolomorphicVolume] = None) -> PolarisedTangentSpace:
    ctx.require_alpha()
    group = vector_dolbeault(ctx.presentation, 1)
    dolbeault_matrix, _ = _contraction_map(ctx, group, "dolbeault")
    aeppli_matrix, _ = _contraction_map(ctx, group, "aeppli")

    basis = [combine_vectors(v, group.basis, ctx.presentation.n) for v in kernel(dolbeault_matrix)]
    aeppli_dimension = group.dimension - rank(aeppli_matrix)
    result = PolarisedTangentSpace(basis, group.dimension, aeppli_dimension)
    result.checks.record("dolbeault_aeppli_agree", result.dimension == aeppli_dimension,
                         f"{result.dimension} vs {aeppli_dimension}")
    logger.info(f"Polarised tangent space: dimension {result.dimension} of {group.dimension}")

    if volume is not None:
        result.checks.extend(tangent_isomorphism_check(ctx, volume, result))
    return result


def combine_vectors(coefficients: Vector, basis: List[VectorForm], n: int) -> VectorForm:
    total: Optional[VectorForm] = None
    for i, c in coefficients.items():
        term = basis[i].scale(c)
        total = term if total is None else total + term
    return total if total is not None else VectorForm.zero(n, 1)


def lefschetz_contraction_identity(ctx: SktContext, volume: HolomorphicVolume, theta: VectorForm) -> bool:
    """
    j[omega wedge T(theta)]_A = [-(theta -| zeta) wedge u]_dbar in bidegree (n, 2)

    j inverts the Dolbeault to Aeppli map, so the Dolbeault class on the
    right is pushed to Aeppli and compared there. False when that map is not
    an isomorphism in (n, 2).
    """
    image = calabi_yau_map(ctx.metric, theta, volume)
    if not image.feasible:
        return False
    P = ctx.presentation
    n = P.n
    right = -contract(theta, ctx.zeta).wedge(volume.form)
    if P.dbar(right):
        raise NotClosedError(f"-(theta -| zeta) wedge u is not dbar-closed for theta = {theta.to_string()}")
    mapping = canonical_map(P, "dolbeault", "aeppli", (n, 2), ctx.metric)
    if not mapping.is_isomorphism:
        logger.warning(f"⚠️ Dolbeault and Aeppli ({n},2) classes differ, no inverse map")
        return False
    left = ctx.metric.form.wedge(image.form)
    return mapping.apply(mapping.source.reduce(right)) == mapping.target.reduce(left)


def tangent_isomorphism_check(ctx: SktContext, volume: HolomorphicVolume,
                              tangent: Optional[PolarisedTangentSpace] = None) -> CheckLog:
    """The Calabi-Yau map sends the polarised tangent space bijectively onto primitive (n-1,1) classes"""
    P = ctx.presentation
    n = P.n
    log = CheckLog()
    if tangent is None:
        tangent = polarised_tangent_space(ctx)

    primitive = primitive_class_space(ctx, (n - 1, 1))
    group = cohomology(P, "bc", (n - 1, 1), ctx.metric)

    images: List[Vector] = []
    for theta in tangent.basis:
        image = calabi_yau_map(ctx.metric, theta, volume)
        if not log.record("calabi_yau_feasible", image.feasible, theta.to_string()):
            return log
        images.append(image.coordinates)
        log.record("image_primitive", L_omega(ctx, image.form).is_zero, theta.to_string())

    image_rank = rank(matrix_from_columns(images, group.dimension)) if images else 0
    log.record("injective", image_rank == tangent.dimension, f"rank {image_rank}")
    log.record("surjective", image_rank == primitive.dimension,
               f"rank {image_rank}, primitive classes {primitive.dimension}")

    for theta in vector_dolbeault(P, 1).basis:
        log.record("lefschetz_contraction_identity", lefschetz_contraction_identity(ctx, volume, theta),
                   theta.to_string())
    return log


# ---------------------------------------------------------------------------
# Lefschetz split of (n-1,1)-forms
# ---------------------------------------------------------------------------


@dataclass
class LefschetzSplit:
    """v = primitive + omega wedge zeta with zeta of bidegree (n-2,0)"""

    primitive: Form
    zeta: Form
    omega_part: Form
    checks: CheckLog = field(default_factory=CheckLog)


def lefschetz_split(metric: HermitianMetric, v: Form) -> LefschetzSplit:
    P = metric.presentation
    n = P.n
    omega = metric.form
    if v and not v.is_of_bidegree(n - 1, 1):
        raise BidegreeError(f"Lefschetz split takes ({n - 1},1)-forms")
    source = P.space(n - 2, 0)
    target = P.space(n, 2)
    matrix = source.matrix_of(lambda z: omega.wedge(omega.wedge(z)), target)
    solved = solve_affine(matrix, target.coordinates(omega.wedge(v)))
    if not solved.feasible or solved.kernel:
        raise SktpolError("Lefschetz decomposition is not unique")

    zeta = source.element(solved.particular)
    omega_part = omega.wedge(zeta)
    prim = v - omega_part
    split = LefschetzSplit(prim, zeta, omega_part)

    prim_factor = sign_power(n * (n + 1) // 2) * i_power(n - 2)
    split.checks.record("primitive", metric.is_primitive(prim))
    split.checks.record("star_primitive", metric.hodge_star(prim) == prim.scale(prim_factor))
    split.checks.record("star_omega_part", metric.hodge_star(omega_part) == omega_part.scale(i_power(n * (n - 2))))
    split.checks.record("orthogonal", not metric.inner(prim, omega_part) if prim and omega_part else True)
    return split
