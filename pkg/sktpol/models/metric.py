"""
sktpol - Hermitian Metric
Inner products, Hodge star, adjoints and Laplacians on invariant forms
"""

import logging
from dataclasses import dataclass
from math import factorial
from typing import Callable, Dict, List, Tuple, Union

from sympy.polys.matrices.sdm import SDM

from sktpol.models.checks import CheckLog
from sktpol.models.coframe import (
    CoframePresentation,
    Form,
    FormSpace,
    Monomial,
    VectorForm,
    merge,
    permutation_sign,
)
from sktpol.models.exact import (
    IMAG,
    ONE,
    ZERO,
    GramForm,
    Scalar,
    conj,
    echelon_basis,
    i_power,
    kernel,
    rank,
    rational,
    scalar,
    sign_power,
    sparse_matrix,
)
from sktpol.utils.errors import BidegreeError, DimensionMismatchError, NotPositiveError, SktpolError

logger = logging.getLogger(__name__)

Grading = Union[int, Tuple[int, int]]

LAPLACIANS = ("delta", "partial", "dbar", "bc", "aeppli")

# Dual differential used inside -*D*: the adjoint of partial comes from dbar and vice versa.
_STAR_PARTNER = {"d": "d", "partial": "dbar", "dbar": "partial"}


@dataclass
class OperatorMatrix:
    """
    OPERATOR MATRIX
    - name: operator label, e.g. "adjoint(partial)" or "laplacian(bc)"
    - source, target: coordinate spaces of the monomial bases
    - matrix: columns indexed by source monomials
    """

    name: str
    source: FormSpace
    target: FormSpace
    matrix: SDM

    def apply(self, u: Form) -> Form:
        column = self.source.coordinates(u)
        result: Dict[int, Scalar] = {}
        for i, row in self.matrix.items():
            total = ZERO
            for j, value in row.items():
                if j in column:
                    total += value * column[j]
            if total:
                result[i] = total
        return self.target.element(result)

    @property
    def rank(self) -> int:
        return rank(self.matrix)

    def kernel(self) -> List[Form]:
        return [self.source.element(v) for v in kernel(self.matrix)]

    def is_zero(self) -> bool:
        return not any(self.matrix.values())


class HermitianMetric:
    """
    INVARIANT HERMITIAN METRIC
    - matrix H with omega = i sum_{j,k} H[j][k] (j|k)
    - <phi^j, phi^k> = (H^-1)[k][j], <conj phi^j, conj phi^k> = (H^-1)[j][k]
    - monomial products are determinants of these Gram blocks
    - dV = omega^n / n!, integration reads its top coefficient
    """

    def __init__(self, presentation: CoframePresentation, matrix: SDM):
        n = presentation.n
        if matrix.shape != (n, n):
            raise DimensionMismatchError(f"Metric must be {n}x{n}, got {matrix.shape}")
        try:
            GramForm(matrix)
        except NotPositiveError as e:
            raise NotPositiveError(f"Metric matrix rejected: {e}") from e

        self.presentation = presentation
        self.n = n
        self.matrix = matrix
        self.inverse = matrix.inv()
        self.form = self._kahler_form()
        self.volume_form = self._volume_form()
        self.volume_coefficient: Scalar = self.volume_form.terms[presentation.top]

        self._pair_cache: Dict[Tuple[Monomial, Monomial], Scalar] = {}
        self._star_cache: Dict[Monomial, Form] = {}
        self._cache: Dict[tuple, object] = {}

    @classmethod
    def standard(cls, presentation: CoframePresentation) -> "HermitianMetric":
        """omega = (i/2) sum_j (j|j)"""
        half = scalar(rational(1, 2))
        n = presentation.n
        return cls(presentation, sparse_matrix({j: {j: half} for j in range(n)}, n, n))

    def entry(self, j: int, k: int) -> Scalar:
        return self.matrix.get(j, {}).get(k, ZERO)

    def cached(self, key: tuple, factory: Callable[[], object]):
        if key not in self._cache:
            self._cache[key] = factory()
        return self._cache[key]

    def _kahler_form(self) -> Form:
        n = self.n
        total = Form.zero(n)
        for j, row in self.matrix.items():
            for k, value in row.items():
                total = total + Form.monomial(n, [j + 1], [k + 1], IMAG * value)
        return total

    def _volume_form(self) -> Form:
        power = Form.one(self.n)
        for _ in range(self.n):
            power = power.wedge(self.form)
        volume = power.scale(scalar(rational(1, factorial(self.n))))
        if not volume:
            raise NotPositiveError("omega^n vanishes")
        return volume

    # -- integration and inner products -----------------------------------

    def integrate(self, u: Form) -> Scalar:
        """Top coefficient of u measured against dV (total volume normalised to 1)"""
        return u.terms.get(self.presentation.top, ZERO) / self.volume_coefficient

    def _block_det(self, rows: Monomial, cols: Monomial, holomorphic: bool) -> Scalar:
        if not rows:
            return ONE
        n = self.n
        entries = {}
        for a, ga in enumerate(rows):
            for b, gb in enumerate(cols):
                if holomorphic:
                    value = self.inverse.get(gb, {}).get(ga, ZERO)
                else:
                    value = self.inverse.get(ga - n, {}).get(gb - n, ZERO)
                if value:
                    entries.setdefault(a, {})[b] = value
        return sparse_matrix(entries, len(rows), len(cols)).det()

    def monomial_inner(self, a: Monomial, b: Monomial) -> Scalar:
        key = (a, b)
        cached = self._pair_cache.get(key)
        if cached is not None:
            return cached
        n = self.n
        a_holo = tuple(g for g in a if g < n)
        b_holo = tuple(g for g in b if g < n)
        if len(a) != len(b) or len(a_holo) != len(b_holo):
            value = ZERO
        else:
            a_anti = a[len(a_holo):]
            b_anti = b[len(b_holo):]
            value = self._block_det(a_holo, b_holo, True) * self._block_det(a_anti, b_anti, False)
        self._pair_cache[key] = value
        return value

    def inner(self, u: Form, v: Form) -> Scalar:
        """<u, v>, linear in u and conjugate-linear in v; distinct bidegrees are orthogonal"""
        if u.n != self.n or v.n != self.n:
            raise DimensionMismatchError("Inner product across different presentations")
        ub, vb = u.bidegrees(), v.bidegrees()
        if len(ub) == 1 and len(vb) == 1 and ub != vb:
            raise BidegreeError(f"Inner product of a {ub[0]} form with a {vb[0]} form")
        total = ZERO
        for a, ca in u.terms.items():
            for b, cb in v.terms.items():
                pair = self.monomial_inner(a, b)
                if pair:
                    total += ca * conj(cb) * pair
        return total

    def norm2(self, u: Form) -> Scalar:
        return self.inner(u, u)

    def gram(self, space: FormSpace) -> GramForm:
        def build():
            rows: Dict[int, Dict[int, Scalar]] = {}
            for a, ma in enumerate(space.monomials):
                for b, mb in enumerate(space.monomials):
                    value = self.monomial_inner(ma, mb)
                    if value:
                        rows.setdefault(a, {})[b] = value
            return GramForm(sparse_matrix(rows, space.dim, space.dim), check=False)

        return self.cached(("gram", space.label), build)

    def bundle_inner(self, theta: VectorForm, eta: VectorForm) -> Scalar:
        """<theta, eta> for T^{1,0}-valued forms, with <Z_i, Z_k> = H[i][k]"""
        total = ZERO
        for i, theta_i in enumerate(theta.components):
            if not theta_i:
                continue
            for k, eta_k in enumerate(eta.components):
                h = self.entry(i, k)
                if h and eta_k:
                    total += self.inner(theta_i, eta_k) * h
        return total

    # -- Hodge star -------------------------------------------------------

    def _star_monomial(self, m: Monomial) -> Form:
        cached = self._star_cache.get(m)
        if cached is not None:
            return cached
        n = self.n
        swapped = [g + n if g < n else g - n for g in m]
        s = permutation_sign(swapped)
        conjugate = tuple(sorted(swapped))
        p = sum(1 for g in conjugate if g < n)
        q = len(conjugate) - p
        top = set(self.presentation.top)
        terms: Dict[Monomial, Scalar] = {}
        for a in self.presentation.space(p, q).monomials:
            pair = self.monomial_inner(a, conjugate)
            if not pair:
                continue
            complement = tuple(sorted(top - set(a)))
            epsilon, _ = merge(a, complement)
            value = pair * self.volume_coefficient
            terms[complement] = value if s * epsilon > 0 else -value
        result = Form(n, terms)
        self._star_cache[m] = result
        return result

    def hodge_star(self, u: Form) -> Form:
        """Complex-linear star with a wedge star(conj b) = <a, b> dV"""
        result: Dict[Monomial, Scalar] = {}
        for m, c in u.terms.items():
            for m2, c2 in self._star_monomial(m).terms.items():
                result[m2] = result.get(m2, ZERO) + c * c2
        return Form(self.n, result)

    def lefschetz(self, u: Form, power: int = 1) -> Form:
        for _ in range(power):
            u = self.form.wedge(u)
        return u

    def is_primitive(self, v: Form) -> bool:
        """omega^(n-k+1) wedge v = 0 for a k-form v"""
        if not v:
            return True
        k = v.degree
        if k is None:
            raise BidegreeError("Primitivity is tested on forms of one degree")
        if k > self.n:
            return False
        return not self.lefschetz(v, self.n - k + 1)

    def primitive_star(self, v: Form, p: int, q: int) -> Form:
        """(-1)^(k(k+1)/2) i^(p-q) omega^(n-k)/(n-k)! wedge v for primitive (p,q) v, k = p+q"""
        k = p + q
        factor = sign_power(k * (k + 1) // 2) * i_power(p - q)
        scaled = self.lefschetz(v, self.n - k).scale(scalar(rational(1, factorial(self.n - k))))
        return scaled.scale(factor)

    # -- adjoints and Laplacians ------------------------------------------

    def adjoint(self, u: Form, selector: str = "d") -> Form:
        """partial* = -*dbar*, dbar* = -*partial*, d* = -*d*"""
        if selector not in _STAR_PARTNER:
            raise SktpolError(f"Unknown differential: {selector}")
        inner = self.presentation.differential(self.hodge_star(u), _STAR_PARTNER[selector])
        return -self.hodge_star(inner)

    def _space(self, grading: Grading) -> FormSpace:
        if isinstance(grading, tuple):
            return self.presentation.space(*grading)
        return self.presentation.degree_space(grading)

    @staticmethod
    def _shift(selector: str, grading: Grading, step: int) -> Grading:
        if isinstance(grading, tuple):
            p, q = grading
            shift = {"partial": (step, 0), "dbar": (0, step)}.get(selector)
            if shift is None:
                raise BidegreeError("d does not act within one bidegree; pass a total degree")
            return p + shift[0], q + shift[1]
        return grading + step

    def adjoint_matrix(self, selector: str, grading: Grading) -> OperatorMatrix:
        """
        Matrix of the adjoint of a differential acting on the given grading

        Raises BidegreeError for selector "d" with a bidegree (p, q).
        """

        def build():
            source = self._space(grading)
            target = self._space(self._shift(selector, grading, -1))
            matrix = source.matrix_of(lambda u: self.adjoint(u, selector), target)
            return OperatorMatrix(f"adjoint({selector})", source, target, matrix)

        return self.cached(("adjoint", selector, grading), build)

    def differential_matrix(self, selector: str, grading: Grading) -> OperatorMatrix:
        def build():
            source = self._space(grading)
            target = self._space(self._shift(selector, grading, 1))
            matrix = source.matrix_of(lambda u: self.presentation.differential(u, selector), target)
            return OperatorMatrix(selector, source, target, matrix)

        return self.cached(("differential", selector, grading), build)

    def apply_laplacian(self, u: Form, kind: str) -> Form:
        P = self.presentation.partial
        Q = self.presentation.dbar
        D = self.presentation.d

        def Ps(x: Form) -> Form:
            return self.adjoint(x, "partial")

        def Qs(x: Form) -> Form:
            return self.adjoint(x, "dbar")

        def Ds(x: Form) -> Form:
            return self.adjoint(x, "d")

        if kind == "delta":
            return D(Ds(u)) + Ds(D(u))
        if kind == "partial":
            return P(Ps(u)) + Ps(P(u))
        if kind == "dbar":
            return Q(Qs(u)) + Qs(Q(u))
        if kind == "bc":
            return (
                Ps(P(u)) + Qs(Q(u))
                + P(Q(Qs(Ps(u)))) + Qs(Ps(P(Q(u))))
                + Ps(Q(Qs(P(u)))) + Qs(P(Ps(Q(u))))
            )
        if kind == "aeppli":
            return (
                P(Ps(u)) + Q(Qs(u))
                + Qs(Ps(P(Q(u)))) + P(Q(Qs(Ps(u))))
                + Q(Ps(P(Qs(u)))) + P(Qs(Q(Ps(u))))
            )
        raise SktpolError(f"Unknown Laplacian type: {kind}")

    def laplacian(self, kind: str, grading: Grading) -> OperatorMatrix:
        """Laplacian matrix on a bidegree (p, q) or, for any kind, a total degree k"""
        if kind not in LAPLACIANS:
            raise SktpolError(f"Unknown Laplacian type: {kind}")
        if kind == "delta" and isinstance(grading, tuple):
            raise BidegreeError("The d-Laplacian mixes bidegrees; pass a total degree")

        def build():
            space = self._space(grading)
            matrix = space.matrix_of(lambda u: self.apply_laplacian(u, kind), space)
            logger.debug(f"Built {kind} Laplacian on {space.label} ({space.dim}x{space.dim})")
            return OperatorMatrix(f"laplacian({kind})", space, space, matrix)

        return self.cached(("laplacian", kind, grading), build)

    def harmonic_basis(self, kind: str, grading: Grading) -> List[Form]:
        return self.laplacian(kind, grading).kernel()

    def harmonic_kernel_check(self, kind: str, p: int, q: int) -> bool:
        """
        ker of the Bott-Chern Laplacian is ker partial, ker dbar and ker (partial dbar)*;
        ker of the Aeppli Laplacian is ker partial dbar, ker partial* and ker dbar*
        """
        space = self.presentation.space(p, q)
        k = p + q
        if kind == "bc":
            conditions = [
                (self.presentation.partial, k + 1),
                (self.presentation.dbar, k + 1),
                (lambda u: self.adjoint(self.adjoint(u, "partial"), "dbar"), k - 2),
            ]
        elif kind == "aeppli":
            conditions = [
                (self.presentation.ddbar, k + 2),
                (lambda u: self.adjoint(u, "partial"), k - 1),
                (lambda u: self.adjoint(u, "dbar"), k - 1),
            ]
        else:
            raise SktpolError(f"No kernel characterisation for Laplacian type: {kind}")

        stacked: Dict[int, Dict[int, Scalar]] = {}
        offset = 0
        for condition, degree in conditions:
            block = space.matrix_of(condition, self.presentation.degree_space(degree))
            for i, row in block.items():
                stacked[offset + i] = dict(row)
            offset += block.rows
        joint = [space.element(v) for v in kernel(sparse_matrix(stacked, offset, space.dim))]
        harmonic = self.harmonic_basis(kind, (p, q))
        return _same_span(space, joint, harmonic)

    def check_adjunction(self, u: Form, v: Form, selector: str, grading: Grading) -> bool:
        """<D u, v> = <u, D* v> for u in the grading and v one step above it"""
        du = self.differential_matrix(selector, grading).apply(u)
        dsv = self.adjoint_matrix(selector, self._shift(selector, grading, 1)).apply(v)
        left = self.inner(du, v) if du and v else ZERO
        right = self.inner(u, dsv) if u and dsv else ZERO
        return left == right

    def operator_splitting_check(self, k: int) -> CheckLog:
        """d = partial + dbar and d* = partial* + dbar*, compared blockwise on every bidegree of degree k"""
        log = CheckLog()
        builders = {"differential": self.differential_matrix, "adjoint": self.adjoint_matrix}
        for p, q in self.presentation.bidegrees():
            if p + q != k:
                continue
            basis = self.presentation.space(p, q).basis()
            for kind, build in builders.items():
                whole, holo, anti = build("d", k), build("partial", (p, q)), build("dbar", (p, q))
                agrees = all(whole.apply(b) == holo.apply(b) + anti.apply(b) for b in basis)
                log.record(f"{kind}_splits", agrees, f"({p},{q})")
        return log


def _same_span(space: FormSpace, a: List[Form], b: List[Form]) -> bool:
    ea = echelon_basis([space.coordinates(f) for f in a], space.dim)
    eb = echelon_basis([space.coordinates(f) for f in b], space.dim)
    return ea == eb


def primitive_harmonicity_check(metric: HermitianMetric, v: Form) -> CheckLog:
    """
    For a primitive form v of degree n the conditions dv = 0, d*v = 0,
    Delta v = 0, Delta_A v = 0 and Delta_BC v = 0 hold together or not at all
    """
    n = metric.n
    log = CheckLog()
    if v and (v.degree != n or len(v.bidegrees()) != 1):
        raise BidegreeError(f"Expected a form of degree {n} and a single bidegree")
    if not log.record("primitive", metric.is_primitive(v), "omega wedge v = 0"):
        return log

    verdicts = {
        "closed": not metric.presentation.d(v),
        "coclosed": not metric.adjoint(v, "d"),
        "delta": not metric.apply_laplacian(v, "delta"),
        "aeppli": not metric.apply_laplacian(v, "aeppli"),
        "bc": not metric.apply_laplacian(v, "bc"),
    }
    log.record("equivalent", len(set(verdicts.values())) == 1, str(verdicts))
    return log
