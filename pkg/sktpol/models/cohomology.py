"""
sktpol - Cohomology
Bott-Chern, Aeppli, Dolbeault and de Rham groups of invariant forms as exact quotients
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from sympy.polys.matrices.sdm import SDM

from sktpol.models.checks import CheckLog
from sktpol.models.coframe import CoframePresentation, Form, FormSpace
from sktpol.models.exact import (
    Vector,
    apply_matrix,
    columns_of,
    complement_basis,
    echelon_basis,
    kernel,
    matrix_from_columns,
    min_norm_solution,
    rank,
    solve_affine,
    sparse_matrix,
    vstack,
)
from sktpol.models.metric import HermitianMetric
from sktpol.utils.errors import BidegreeError, NotClosedError, NotInNumeratorError, SktpolError

logger = logging.getLogger(__name__)

Grading = Union[int, Tuple[int, int]]

MODEL_ALIASES = {
    "bc": "bc",
    "bott-chern": "bc",
    "bottchern": "bc",
    "a": "aeppli",
    "aeppli": "aeppli",
    "dolbeault": "dolbeault",
    "dbar": "dolbeault",
    "dr": "derham",
    "derham": "derham",
    "de-rham": "derham",
}

MODEL_NAMES = {
    "bc": "Bott-Chern",
    "aeppli": "Aeppli",
    "dolbeault": "Dolbeault",
    "derham": "de Rham",
}

# Harmonic representatives of each model come from this Laplacian.
LAPLACIAN_OF = {"bc": "bc", "aeppli": "aeppli", "dolbeault": "dbar", "derham": "delta"}

# Canonical maps run Bott-Chern -> Dolbeault -> Aeppli.
MODEL_ORDER = ("bc", "dolbeault", "aeppli")


def normalise_model(model: str) -> str:
    key = MODEL_ALIASES.get(model.strip().lower())
    if key is None:
        raise SktpolError(f"Unknown cohomology model: {model}")
    return key


def grading_label(grading: Grading) -> str:
    return f"({grading[0]},{grading[1]})" if isinstance(grading, tuple) else f"degree {grading}"


def _operator(presentation: CoframePresentation, name: str, source: FormSpace, target: FormSpace, fn) -> SDM:
    return presentation.cached(("cohomology-operator", name, source.label), lambda: source.matrix_of(fn, target))


def quotient_data(presentation: CoframePresentation, model: str, grading: Grading) -> Tuple[FormSpace, List[Vector], List[Vector]]:
    """Space, numerator and denominator (echelon bases) of a model in one grading"""
    P = presentation
    if model == "derham":
        if not isinstance(grading, int):
            raise BidegreeError("de Rham cohomology is graded by total degree")
        k = grading
        space = P.degree_space(k)
        d_out = _operator(P, "d", space, P.degree_space(k + 1), P.d)
        source = P.degree_space(k - 1)
        d_in = _operator(P, "d", source, space, P.d)
        numerator = kernel(d_out) if space.dim else []
        denominator = echelon_basis(columns_of(d_in), space.dim)
        return space, numerator, denominator

    if not isinstance(grading, tuple):
        raise BidegreeError(f"{MODEL_NAMES[model]} cohomology is graded by bidegree")
    p, q = grading
    space = P.space(p, q)

    def ker(*blocks: SDM) -> List[Vector]:
        if not space.dim:
            return []
        return kernel(vstack(blocks, space.dim))

    def im(*blocks: SDM) -> List[Vector]:
        vectors: List[Vector] = []
        for block in blocks:
            vectors.extend(columns_of(block))
        return echelon_basis(vectors, space.dim)

    partial_out = _operator(P, "partial", space, P.space(p + 1, q), P.partial)
    dbar_out = _operator(P, "dbar", space, P.space(p, q + 1), P.dbar)
    if model == "bc":
        ddbar_in = _operator(P, "ddbar", P.space(p - 1, q - 1), space, P.ddbar)
        return space, ker(partial_out, dbar_out), im(ddbar_in)
    if model == "aeppli":
        ddbar_out = _operator(P, "ddbar", space, P.space(p + 1, q + 1), P.ddbar)
        partial_in = _operator(P, "partial", P.space(p - 1, q), space, P.partial)
        dbar_in = _operator(P, "dbar", P.space(p, q - 1), space, P.dbar)
        return space, ker(ddbar_out), im(partial_in, dbar_in)
    if model == "dolbeault":
        dbar_in = _operator(P, "dbar", P.space(p, q - 1), space, P.dbar)
        return space, ker(dbar_out), im(dbar_in)
    raise SktpolError(f"Unknown cohomology model: {model}")


class CohomologyGroup:
    """
    COHOMOLOGY GROUP
    - model: bc | aeppli | dolbeault | derham
    - grading: bidegree (p, q), or total degree k for de Rham
    - basis: harmonic representatives when a metric is given, otherwise an
      echelon complement of the denominator inside the numerator
    - checks: dimension count, denominator inclusion, harmonic agreement
    """

    def __init__(self, presentation: CoframePresentation, model: str, grading: Grading,
                 metric: Optional[HermitianMetric] = None):
        self.presentation = presentation
        self.model = normalise_model(model)
        self.grading = grading
        self.metric = metric
        self.checks = CheckLog()

        self.space, self.numerator, self.denominator = quotient_data(presentation, self.model, grading)
        dim = self.space.dim

        joint = len(echelon_basis(self.numerator + self.denominator, dim))
        overlap = len(self.numerator) + len(self.denominator) - joint
        self.dimension = len(self.numerator) - overlap
        self.checks.record("denominator_in_numerator", overlap == len(self.denominator),
                           f"dim numerator {len(self.numerator)}, dim denominator {len(self.denominator)}")

        if metric is not None:
            harmonic = metric.harmonic_basis(LAPLACIAN_OF[self.model], grading)
            agrees = len(harmonic) == self.dimension
            self.checks.record("harmonic_dimension", agrees,
                               f"harmonic {len(harmonic)}, quotient {self.dimension}")
            if not agrees:
                logger.warning(f"⚠️ Harmonic and quotient dimensions differ for {self.label}")
            vectors = [self.space.coordinates(f) for f in harmonic]
        else:
            vectors = complement_basis(self.numerator, self.denominator, dim)

        self.basis: List[Form] = [self.space.element(v) for v in vectors]
        self._basis_vectors = vectors
        self._spanning = matrix_from_columns(vectors + list(self.denominator), dim)
        logger.debug(f"{self.label}: dimension {self.dimension}")

    @property
    def label(self) -> str:
        return f"H{grading_label(self.grading)} {MODEL_NAMES[self.model]}"

    def contains(self, u: Form) -> bool:
        """u lies in the numerator subspace"""
        if not self.space.contains(u):
            return False
        coords = self.space.coordinates(u)
        return not coords or len(echelon_basis(self.numerator + [coords], self.space.dim)) == len(self.numerator)

    def reduce(self, u: Form) -> Vector:
        """Coordinates of the class of u in the group basis; empty when the class is zero"""
        if not self.contains(u):
            raise NotInNumeratorError(f"{u.to_string()} is not a cocycle of {self.label}")
        coords = self.space.coordinates(u)
        if not coords:
            return {}
        solved = solve_affine(self._spanning, coords)
        if not solved.feasible:
            raise SktpolError(f"Reduction failed in {self.label}")
        return {i: c for i, c in solved.particular.items() if i < self.dimension}

    def is_zero(self, u: Form) -> bool:
        return not self.reduce(u)

    def element(self, coordinates: Vector) -> Form:
        total = Form.zero(self.presentation.n)
        for i, c in coordinates.items():
            total = total + self.basis[i].scale(c)
        return total

    def cls(self, u: Form) -> "CohClass":
        self.reduce(u)
        return CohClass(self, u)

    def __repr__(self) -> str:
        return f"CohomologyGroup({self.label}, dim={self.dimension})"


@dataclass
class CohClass:
    """A cohomology class, held by one representative in the numerator"""

    group: CohomologyGroup
    representative: Form

    @property
    def model(self) -> str:
        return self.group.model

    @property
    def grading(self) -> Grading:
        return self.group.grading

    @property
    def coordinates(self) -> Vector:
        return self.group.reduce(self.representative)

    def is_zero(self) -> bool:
        return not self.coordinates

    def canonical_representative(self) -> Form:
        """Basis combination of the class, harmonic when the group carries a metric"""
        return self.group.element(self.coordinates)


def cohomology(presentation: CoframePresentation, model: str, grading: Grading,
               metric: Optional[HermitianMetric] = None) -> CohomologyGroup:
    model = normalise_model(model)
    key = ("cohomology", model, grading)
    owner = metric if metric is not None else presentation
    return owner.cached(key, lambda: CohomologyGroup(presentation, model, grading, metric))


def cohomology_table(presentation: CoframePresentation, model: str,
                     metric: Optional[HermitianMetric] = None) -> Dict[Grading, CohomologyGroup]:
    model = normalise_model(model)
    if model == "derham":
        gradings = list(range(2 * presentation.n + 1))
    else:
        gradings = presentation.bidegrees()
    logger.info(f"Computing {MODEL_NAMES[model]} cohomology of {presentation.name or 'presentation'}")
    return {g: cohomology(presentation, model, g, metric) for g in gradings}


# ---------------------------------------------------------------------------
# Canonical maps and the ddbar test
# ---------------------------------------------------------------------------


@dataclass
class CanonicalMap:
    source: CohomologyGroup
    target: CohomologyGroup
    matrix: SDM

    @property
    def rank(self) -> int:
        return rank(self.matrix)

    @property
    def is_isomorphism(self) -> bool:
        return self.source.dimension == self.target.dimension == self.rank

    def apply(self, coordinates: Vector) -> Vector:
        return apply_matrix(self.matrix, coordinates)


def canonical_map(presentation: CoframePresentation, source: str, target: str, bidegree: Tuple[int, int],
                  metric: Optional[HermitianMetric] = None) -> CanonicalMap:
    """Map induced by the identity on representatives, along Bott-Chern -> Dolbeault -> Aeppli"""
    source, target = normalise_model(source), normalise_model(target)
    if source not in MODEL_ORDER or target not in MODEL_ORDER or MODEL_ORDER.index(source) >= MODEL_ORDER.index(target):
        raise SktpolError(f"No canonical map from {source} to {target}")
    src = cohomology(presentation, source, bidegree, metric)
    dst = cohomology(presentation, target, bidegree, metric)
    columns = [dst.reduce(b) for b in src.basis]
    return CanonicalMap(src, dst, matrix_from_columns(columns, dst.dimension))


@dataclass
class DdbarVerdict:
    """Both canonical maps are isomorphisms in every bidegree"""

    holds: bool
    failures: List[dict] = field(default_factory=list)
    checks: CheckLog = field(default_factory=CheckLog)


def ddbar_test(presentation: CoframePresentation, metric: Optional[HermitianMetric] = None) -> DdbarVerdict:
    verdict = DdbarVerdict(True)
    for bidegree in presentation.bidegrees():
        for source, target in (("bc", "dolbeault"), ("dolbeault", "aeppli")):
            mapping = canonical_map(presentation, source, target, bidegree, metric)
            label = f"{source}->{target} {grading_label(bidegree)}"
            detail = f"dims {mapping.source.dimension}->{mapping.target.dimension}, rank {mapping.rank}"
            if not verdict.checks.record(label, mapping.is_isomorphism, detail):
                verdict.holds = False
                verdict.failures.append({
                    "source": source,
                    "target": target,
                    "bidegree": list(bidegree),
                    "source_dimension": mapping.source.dimension,
                    "target_dimension": mapping.target.dimension,
                    "rank": mapping.rank,
                })
    logger.info(f"ddbar test on {presentation.name or 'presentation'}: {verdict.holds}")
    return verdict


def conjugation_symmetry_check(presentation: CoframePresentation) -> CheckLog:
    """h^{p,q} = h^{q,p} for Bott-Chern and Aeppli"""
    log = CheckLog()
    for model in ("bc", "aeppli"):
        for p, q in presentation.bidegrees():
            if p > q:
                continue
            a = cohomology(presentation, model, (p, q)).dimension
            b = cohomology(presentation, model, (q, p)).dimension
            log.record(f"{model} h({p},{q}) = h({q},{p})", a == b, f"{a} vs {b}")
    return log


def schweitzer_duality_check(presentation: CoframePresentation) -> CheckLog:
    """h_BC^{p,q} = h_A^{n-q,n-p}"""
    n = presentation.n
    log = CheckLog()
    for p, q in presentation.bidegrees():
        a = cohomology(presentation, "bc", (p, q)).dimension
        b = cohomology(presentation, "aeppli", (n - q, n - p)).dimension
        log.record(f"h_BC({p},{q}) = h_A({n - q},{n - p})", a == b, f"{a} vs {b}")
    return log


# ---------------------------------------------------------------------------
# Degree-2 Hodge decomposition
# ---------------------------------------------------------------------------


@dataclass
class HodgeDecomposition:
    """
    rho = alpha^{2,0} + alpha^{1,1} + alpha^{0,2} + d beta with d-closed pure-type alphas;
    classes are Aeppli classes of the alphas, unique when every kernel direction
    of the feasibility system changes them by Aeppli-exact forms only
    """

    feasible: bool
    alphas: Dict[Tuple[int, int], Form] = field(default_factory=dict)
    beta: Optional[Form] = None
    classes: Dict[Tuple[int, int], Vector] = field(default_factory=dict)
    unique: bool = False
    certificate: Optional[Vector] = None

    def vanishes(self, bidegree: Tuple[int, int]) -> bool:
        return not self.classes.get(bidegree)


_PURE_TYPES = ((2, 0), (1, 1), (0, 2))


def hodge_decompose_2form(presentation: CoframePresentation, rho: Form,
                          metric: Optional[HermitianMetric] = None) -> HodgeDecomposition:
    P = presentation
    if rho and rho.degree != 2:
        raise BidegreeError(f"Expected a 2-form, got degrees {rho.degrees()}")
    if P.d(rho):
        raise NotClosedError(f"rho is not d-closed: d rho = {P.d(rho).to_string()}")

    two, three, one = P.degree_space(2), P.degree_space(3), P.degree_space(1)
    pieces = [P.space(*b) for b in _PURE_TYPES]

    # unknowns: beta, alpha20, alpha11, alpha02; rows: degree-2 balance then d alpha = 0 for each piece
    offsets = [0, one.dim]
    for piece in pieces:
        offsets.append(offsets[-1] + piece.dim)
    ncols = offsets[-1]

    rows: Dict[int, Dict[int, object]] = {}

    def place(block: SDM, row_offset: int, col_offset: int) -> None:
        for i, row in block.items():
            target = rows.setdefault(row_offset + i, {})
            for j, value in row.items():
                target[col_offset + j] = value

    place(one.matrix_of(P.d, two), 0, 0)
    for index, piece in enumerate(pieces):
        place(piece.matrix_of(lambda u: u, two), 0, offsets[index + 1])
        place(piece.matrix_of(P.d, three), two.dim + index * three.dim, offsets[index + 1])
    system = sparse_matrix(rows, two.dim + 3 * three.dim, ncols)
    solved = solve_affine(system, two.coordinates(rho))

    if not solved.feasible:
        logger.info("Degree-2 decomposition has no invariant solution")
        return HodgeDecomposition(False, certificate=solved.certificate)

    def split(vector: Vector) -> Tuple[Form, Dict[Tuple[int, int], Form]]:
        beta = one.element({i: c for i, c in vector.items() if i < one.dim})
        alphas = {}
        for index, bidegree in enumerate(_PURE_TYPES):
            lo, hi = offsets[index + 1], offsets[index + 2]
            alphas[bidegree] = pieces[index].element({i - lo: c for i, c in vector.items() if lo <= i < hi})
        return beta, alphas

    beta, alphas = split(solved.particular)
    groups = {b: cohomology(P, "aeppli", b, metric) for b in _PURE_TYPES}
    classes = {b: groups[b].reduce(alphas[b]) for b in _PURE_TYPES}

    unique = True
    for direction in solved.kernel:
        _, shifts = split(direction)
        if any(groups[b].reduce(shifts[b]) for b in _PURE_TYPES):
            unique = False
            break
    return HodgeDecomposition(True, alphas, beta, classes, unique)


# ---------------------------------------------------------------------------
# omega-minimal d-closed representatives
# ---------------------------------------------------------------------------


@dataclass
class MinimalRepresentative:
    """beta + dbar v with beta harmonic and v of minimal norm solving partial dbar v = -partial beta"""

    feasible: bool
    harmonic: Form
    correction: Optional[Form] = None
    form: Optional[Form] = None
    certificate: Optional[Vector] = None


def minimal_d_closed_rep(presentation: CoframePresentation, metric: HermitianMetric, u: Form) -> MinimalRepresentative:
    """d-closed representative of the Dolbeault class of a dbar-closed pure-type form"""
    n = presentation.n
    if not u:
        zero = Form.zero(n)
        return MinimalRepresentative(True, zero, zero, zero)
    bidegrees = u.bidegrees()
    if len(bidegrees) != 1:
        raise BidegreeError("Dolbeault classes live in a single bidegree")
    p, q = bidegrees[0]

    group = cohomology(presentation, "dolbeault", (p, q), metric)
    beta = group.element(group.reduce(u))

    source = presentation.space(p, q - 1)
    target = presentation.space(p + 1, q)
    matrix = source.matrix_of(presentation.ddbar, target)
    rhs = target.coordinates(-presentation.partial(beta))
    solved = min_norm_solution(matrix, rhs, metric.gram(source))
    if not solved.feasible:
        logger.info(f"No invariant d-closed representative in ({p},{q})")
        return MinimalRepresentative(False, beta, certificate=solved.certificate)

    v = source.element(solved.solution)
    result = beta + presentation.dbar(v)
    if presentation.d(result):
        raise SktpolError("Minimal representative is not d-closed")
    return MinimalRepresentative(True, beta, v, result)
