"""
sktpol - Coframe Algebra
Bigraded invariant forms of a complex structure presented by structure equations
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ_I
from sympy.polys.matrices.sdm import SDM

from sktpol.models.checks import CheckLog
from sktpol.models.exact import (
    ONE,
    ZERO,
    Scalar,
    Vector,
    conj,
    format_scalar,
    sparse_matrix,
)
from sktpol.utils.errors import (
    BidegreeError,
    DegenerateCoframeError,
    DimensionMismatchError,
    SktpolError,
    ValidationError,
)

logger = logging.getLogger(__name__)

# Sorted tuple of generator indices: 0..n-1 are phi^1..phi^n, n..2n-1 their conjugates.
# Sorting puts the holomorphic block before the antiholomorphic one.
Monomial = Tuple[int, ...]

DIFFERENTIALS = ("d", "partial", "dbar")


def permutation_sign(sequence: Sequence[int]) -> int:
    """Sign of the permutation sorting a sequence, 0 on a repeated entry"""
    if len(set(sequence)) != len(sequence):
        return 0
    inversions = sum(1 for a in range(len(sequence)) for b in range(a + 1, len(sequence)) if sequence[a] > sequence[b])
    return -1 if inversions % 2 else 1


def merge(a: Monomial, b: Monomial) -> Tuple[int, Monomial]:
    if set(a) & set(b):
        return 0, ()
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


def _as_scalar(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    return QQ_I.convert(value)


class Form:
    """
    INVARIANT FORM
    - sparse mapping monomial -> nonzero Gaussian-rational coefficient
    - (I|J) stands for phi^I wedge conj(phi)^J with 1-based ascending I, J
    - immutable by convention: every operation returns a new Form
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[Monomial, Scalar]] = None):
        self.n = n
        self.terms: Dict[Monomial, Scalar] = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls, n: int) -> "Form":
        return cls(n)

    @classmethod
    def one(cls, n: int) -> "Form":
        return cls(n, {(): ONE})

    @classmethod
    def monomial(cls, n: int, holo: Iterable[int] = (), anti: Iterable[int] = (), coeff=ONE) -> "Form":
        """c*(I|J) from 1-based index lists; unsorted input is sorted with its sign"""
        sequence = [i - 1 for i in holo] + [n + j - 1 for j in anti]
        if any(g < 0 or g >= 2 * n for g in sequence):
            raise BidegreeError(f"Index out of range for n={n}: ({list(holo)}|{list(anti)})")
        sign = permutation_sign(sequence)
        if sign == 0:
            return cls.zero(n)
        value = _as_scalar(coeff)
        return cls(n, {tuple(sorted(sequence)): value if sign > 0 else -value})

    @classmethod
    def generator(cls, n: int, g: int, coeff=ONE) -> "Form":
        return cls(n, {(g,): _as_scalar(coeff)})

    # -- structure --------------------------------------------------------

    def bidegree_of(self, m: Monomial) -> Tuple[int, int]:
        p = sum(1 for g in m if g < self.n)
        return p, len(m) - p

    def bidegrees(self) -> List[Tuple[int, int]]:
        return sorted({self.bidegree_of(m) for m in self.terms})

    def degrees(self) -> List[int]:
        return sorted({len(m) for m in self.terms})

    @property
    def degree(self) -> Optional[int]:
        degrees = self.degrees()
        return degrees[0] if len(degrees) == 1 else None

    def component(self, p: int, q: int) -> "Form":
        return Form(self.n, {m: c for m, c in self.terms.items() if self.bidegree_of(m) == (p, q)})

    def degree_component(self, k: int) -> "Form":
        return Form(self.n, {m: c for m, c in self.terms.items() if len(m) == k})

    def is_of_bidegree(self, p: int, q: int) -> bool:
        return all(self.bidegree_of(m) == (p, q) for m in self.terms)

    def coefficient(self, holo: Iterable[int] = (), anti: Iterable[int] = ()) -> Scalar:
        unit = Form.monomial(self.n, holo, anti)
        for m, c in unit.terms.items():
            return self.terms.get(m, ZERO) * c
        return ZERO

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "Form") -> None:
        if not isinstance(other, Form):
            raise TypeError(f"Expected a Form, got {type(other).__name__}")
        if other.n != self.n:
            raise DimensionMismatchError(f"Forms over n={self.n} and n={other.n}")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, ZERO) + c
        return Form(self.n, terms)

    def __sub__(self, other: "Form") -> "Form":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, ZERO) - c
        return Form(self.n, terms)

    def __neg__(self) -> "Form":
        return Form(self.n, {m: -c for m, c in self.terms.items()})

    def __mul__(self, value) -> "Form":
        return self.scale(value)

    def scale(self, value) -> "Form":
        value = _as_scalar(value)
        if not value:
            return Form.zero(self.n)
        return Form(self.n, {m: c * value for m, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, Form) and other.n == self.n and other.terms == self.terms

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def wedge(self, other: "Form") -> "Form":
        self._check(other)
        terms: Dict[Monomial, Scalar] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                sign, m = merge(a, b)
                if sign == 0:
                    continue
                value = ca * cb
                terms[m] = terms.get(m, ZERO) + (value if sign > 0 else -value)
        return Form(self.n, terms)

    def conjugate(self) -> "Form":
        """Complex conjugation: c(I|J) -> conj(c) (-1)^{|I||J|} (J|I)"""
        n = self.n
        terms: Dict[Monomial, Scalar] = {}
        for m, c in self.terms.items():
            swapped = [g + n if g < n else g - n for g in m]
            sign = permutation_sign(swapped)
            value = conj(c)
            terms[tuple(sorted(swapped))] = value if sign > 0 else -value
        return Form(n, terms)

    # -- text -------------------------------------------------------------

    def label(self, m: Monomial) -> str:
        holo = "".join(str(g + 1) for g in m if g < self.n)
        anti = "".join(str(g - self.n + 1) for g in m if g >= self.n)
        return f"({holo}|{anti})"

    def items(self) -> List[Tuple[Monomial, Scalar]]:
        return sorted(self.terms.items())

    def to_string(self) -> str:
        return join_terms([(c, self.label(m)) for m, c in self.items()])

    def to_list(self) -> List[dict]:
        return [{"monomial": self.label(m), "coeff": format_scalar(c)} for m, c in self.items()]

    def __repr__(self) -> str:
        return f"Form({self.to_string()})"


def join_terms(terms: Sequence[Tuple[Scalar, str]]) -> str:
    """Render coefficient/label pairs in the structure-file term syntax"""
    if not terms:
        return "0"
    parts = []
    for index, (c, label) in enumerate(terms):
        if c.x and c.y:
            negative, body = False, f"({format_scalar(c)})*{label}"
        else:
            text = format_scalar(c)
            negative = text.startswith("-")
            magnitude = text.lstrip("-")
            body = label if magnitude == "1" else f"{magnitude}*{label}"
        if index == 0:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f" - {body}" if negative else f" + {body}")
    return "".join(parts)


class VectorForm:
    """
    T^{1,0}-VALUED (0,q)-FORM
    - theta = sum_i theta_i (x) Z_i with (0,q)-forms theta_i
    - Z_1..Z_n is the frame dual to phi^1..phi^n
    """

    __slots__ = ("n", "q", "components")

    def __init__(self, n: int, q: int, components: Sequence[Form]):
        components = tuple(components)
        if len(components) != n:
            raise DimensionMismatchError(f"Vector-valued form needs {n} components, got {len(components)}")
        for i, comp in enumerate(components):
            if comp.n != n or not comp.is_of_bidegree(0, q):
                raise BidegreeError(f"Component {i + 1} is not a (0,{q})-form: {comp.to_string()}")
        self.n = n
        self.q = q
        self.components = components

    @classmethod
    def zero(cls, n: int, q: int) -> "VectorForm":
        return cls(n, q, [Form.zero(n)] * n)

    @classmethod
    def monomial(cls, n: int, i: int, anti: Iterable[int] = (), coeff=ONE) -> "VectorForm":
        """coeff * conj(phi)^J (x) Z_i, 1-based"""
        anti = list(anti)
        components = [Form.zero(n)] * n
        components[i - 1] = Form.monomial(n, (), anti, coeff)
        return cls(n, len(anti), components)

    def _check(self, other: "VectorForm") -> None:
        if not isinstance(other, VectorForm) or other.n != self.n:
            raise DimensionMismatchError("Vector-valued forms over different presentations")
        if other.q != self.q and self and other:
            raise BidegreeError(f"Cannot add (0,{self.q}) and (0,{other.q}) vector-valued forms")

    def __add__(self, other: "VectorForm") -> "VectorForm":
        self._check(other)
        q = self.q if self else other.q
        return VectorForm(self.n, q, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorForm") -> "VectorForm":
        return self + (-other)

    def __neg__(self) -> "VectorForm":
        return VectorForm(self.n, self.q, [-c for c in self.components])

    def __mul__(self, value) -> "VectorForm":
        return self.scale(value)

    def scale(self, value) -> "VectorForm":
        return VectorForm(self.n, self.q, [c.scale(value) for c in self.components])

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorForm) or other.n != self.n:
            return False
        if not self and not other:
            return True
        return other.q == self.q and other.components == self.components

    __hash__ = None

    def __bool__(self) -> bool:
        return any(self.components)

    def items(self) -> Iterator[Tuple[Tuple[int, Monomial], Scalar]]:
        for i, comp in enumerate(self.components):
            for m, c in comp.items():
                yield (i, m), c

    def to_string(self) -> str:
        terms = []
        for (i, m), c in self.items():
            terms.append((c, f"{self.components[i].label(m)}Z{i + 1}"))
        return join_terms(terms)

    def to_list(self) -> List[dict]:
        return [
            {"monomial": f"{self.components[i].label(m)}Z{i + 1}", "coeff": format_scalar(c)}
            for (i, m), c in self.items()
        ]

    def __repr__(self) -> str:
        return f"VectorForm({self.to_string()})"


# ---------------------------------------------------------------------------
# Coordinate spaces
# ---------------------------------------------------------------------------


class _CoordinateSpace:
    """Ordered basis with conversions between objects and coordinate vectors"""

    dim: int

    def coordinates(self, obj) -> Vector:
        raise NotImplementedError

    def element(self, vector: Vector):
        raise NotImplementedError

    def basis_element(self, k: int):
        return self.element({k: ONE})

    def basis(self) -> list:
        return [self.basis_element(k) for k in range(self.dim)]

    def matrix_of(self, operator: Callable, target: "_CoordinateSpace") -> SDM:
        """Matrix of a linear operator, columns indexed by this basis"""
        rows: Dict[int, Dict[int, Scalar]] = {}
        for j in range(self.dim):
            for i, value in target.coordinates(operator(self.basis_element(j))).items():
                rows.setdefault(i, {})[j] = value
        return sparse_matrix(rows, target.dim, self.dim)


class FormSpace(_CoordinateSpace):
    """
    Span of a fixed list of monomials in lexicographic order, either one
    bidegree (p,q) or every monomial of one total degree
    """

    def __init__(self, n: int, monomials: Sequence[Monomial], label: str):
        self.n = n
        self.monomials: Tuple[Monomial, ...] = tuple(monomials)
        self.index: Dict[Monomial, int] = {m: k for k, m in enumerate(self.monomials)}
        self.dim = len(self.monomials)
        self.label = label

    def contains(self, form: Form) -> bool:
        return all(m in self.index for m in form.terms)

    def coordinates(self, form: Form) -> Vector:
        vector: Vector = {}
        for m, c in form.terms.items():
            k = self.index.get(m)
            if k is None:
                raise BidegreeError(f"{form.label(m)} does not lie in the space of {self.label} forms")
            vector[k] = c
        return vector

    def element(self, vector: Vector) -> Form:
        return Form(self.n, {self.monomials[k]: c for k, c in vector.items()})


class VectorFormSpace(_CoordinateSpace):
    """Coordinates (i, J) of T^{1,0}-valued (0,q)-forms, i major"""

    def __init__(self, n: int, q: int):
        self.n = n
        self.q = q
        anti = list(combinations(range(n, 2 * n), q))
        self.keys: Tuple[Tuple[int, Monomial], ...] = tuple((i, m) for i in range(n) for m in anti)
        self.index = {key: k for k, key in enumerate(self.keys)}
        self.dim = len(self.keys)
        self.label = f"T(0,{q})"

    def coordinates(self, theta: VectorForm) -> Vector:
        if theta and theta.q != self.q:
            raise BidegreeError(f"Expected a (0,{self.q}) vector-valued form, got (0,{theta.q})")
        return {self.index[key]: c for key, c in theta.items()}

    def element(self, vector: Vector) -> VectorForm:
        components: List[Dict[Monomial, Scalar]] = [dict() for _ in range(self.n)]
        for k, c in vector.items():
            i, m = self.keys[k]
            components[i][m] = c
        return VectorForm(self.n, self.q, [Form(self.n, terms) for terms in components])


# ---------------------------------------------------------------------------
# Interior products
# ---------------------------------------------------------------------------


def interior(i: int, m: Monomial) -> Optional[Tuple[int, Monomial]]:
    """Z_i inserted into the first slot of a monomial"""
    if i not in m:
        return None
    position = m.index(i)
    return (-1 if position % 2 else 1), m[:position] + m[position + 1:]


def contract(theta: VectorForm, u: Form, slot: str = "first") -> Form:
    """
    theta -| u = sum_i theta_i wedge (Z_i -| u)

    slot="first" inserts Z_i into the first slot of u; slot="last" inserts it
    into the last one, which differs by (-1)^(deg u - 1) on each degree.
    """
    if slot not in ("first", "last"):
        raise SktpolError(f"Unknown contraction slot: {slot}")
    if theta.n != u.n:
        raise DimensionMismatchError("Contraction across different presentations")
    n = u.n
    result = Form.zero(n)
    for i, comp in enumerate(theta.components):
        if not comp:
            continue
        inner: Dict[Monomial, Scalar] = {}
        for m, c in u.terms.items():
            hit = interior(i, m)
            if hit is None:
                continue
            sign, rest = hit
            if slot == "last" and (len(m) - 1) % 2:
                sign = -sign
            inner[rest] = inner.get(rest, ZERO) + (c if sign > 0 else -c)
        result = result + comp.wedge(Form(n, inner))
    return result


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    """Outcome of the presentation checks, one entry per check and generator"""

    name: str
    log: CheckLog = field(default_factory=CheckLog)
    failure: Optional[ValidationError] = None

    @property
    def passed(self) -> bool:
        return self.log.passed

    def require(self) -> None:
        if self.failure is not None:
            raise self.failure


class CoframePresentation:
    """
    STRUCTURE EQUATIONS
    - n: complex dimension
    - dtable[i] = d(phi^{i+1}), a 2-form with (2,0) and (1,1) parts only
    - d(conj phi^i) = conj(d phi^i); every other d follows by Leibniz
    - operator values and coordinate spaces are cached write-once
    """

    def __init__(self, n: int, dtable: Sequence[Form], names: Optional[Sequence[str]] = None, name: str = ""):
        if n < 1:
            raise DimensionMismatchError(f"Complex dimension must be positive, got {n}")
        dtable = tuple(dtable)
        if len(dtable) != n:
            raise DimensionMismatchError(f"Expected {n} structure equations, got {len(dtable)}")
        for i, form in enumerate(dtable):
            if form.n != n:
                raise DimensionMismatchError(f"d phi^{i + 1} is a form over n={form.n}")
            if form and form.degree != 2:
                raise BidegreeError(f"d phi^{i + 1} must be a 2-form, got degrees {form.degrees()}")
        self.n = n
        self.dtable = dtable
        self.names = tuple(names) if names else tuple(f"p{i + 1}" for i in range(n))
        if len(self.names) != n:
            raise DimensionMismatchError(f"Expected {n} coframe names, got {len(self.names)}")
        self.name = name
        self.generator_differentials: Tuple[Form, ...] = dtable + tuple(f.conjugate() for f in dtable)
        self.top: Monomial = tuple(range(2 * n))
        self._d_cache: Dict[Monomial, Form] = {}
        self._cache: Dict[tuple, object] = {}

    def __repr__(self) -> str:
        return f"CoframePresentation({self.name or 'unnamed'}, n={self.n})"

    def cached(self, key: tuple, factory: Callable[[], object]):
        if key not in self._cache:
            self._cache[key] = factory()
        return self._cache[key]

    def generator_name(self, g: int) -> str:
        return self.names[g] if g < self.n else f"conj({self.names[g - self.n]})"

    def same_table(self, other: "CoframePresentation") -> bool:
        return other.n == self.n and other.dtable == self.dtable

    # -- spaces -----------------------------------------------------------

    def space(self, p: int, q: int) -> FormSpace:
        def build():
            if not (0 <= p <= self.n and 0 <= q <= self.n):
                return FormSpace(self.n, [], f"({p},{q})")
            holo = list(combinations(range(self.n), p))
            anti = list(combinations(range(self.n, 2 * self.n), q))
            return FormSpace(self.n, [h + a for h in holo for a in anti], f"({p},{q})")

        return self.cached(("space", p, q), build)

    def degree_space(self, k: int) -> FormSpace:
        def build():
            if not 0 <= k <= 2 * self.n:
                return FormSpace(self.n, [], f"degree {k}")
            return FormSpace(self.n, list(combinations(range(2 * self.n), k)), f"degree {k}")

        return self.cached(("degree", k), build)

    def vector_space(self, q: int) -> VectorFormSpace:
        return self.cached(("vector", q), lambda: VectorFormSpace(self.n, q))

    def bidegrees(self) -> List[Tuple[int, int]]:
        return [(p, q) for p in range(self.n + 1) for q in range(self.n + 1)]

    # -- differentials ----------------------------------------------------

    def _d_monomial(self, m: Monomial) -> Form:
        cached = self._d_cache.get(m)
        if cached is not None:
            return cached
        n = self.n
        result = Form.zero(n)
        for r, g in enumerate(m):
            prefix = Form(n, {m[:r]: ONE})
            suffix = Form(n, {m[r + 1:]: ONE})
            term = prefix.wedge(self.generator_differentials[g]).wedge(suffix)
            result = result + term if r % 2 == 0 else result - term
        self._d_cache[m] = result
        return result

    def d(self, u: Form) -> Form:
        terms: Dict[Monomial, Scalar] = {}
        for m, c in u.terms.items():
            for m2, c2 in self._d_monomial(m).terms.items():
                terms[m2] = terms.get(m2, ZERO) + c * c2
        return Form(self.n, terms)

    def _split(self, u: Form, holomorphic: bool) -> Form:
        terms: Dict[Monomial, Scalar] = {}
        for m, c in u.terms.items():
            p, q = u.bidegree_of(m)
            target = (p + 1, q) if holomorphic else (p, q + 1)
            for m2, c2 in self._d_monomial(m).terms.items():
                if u.bidegree_of(m2) == target:
                    terms[m2] = terms.get(m2, ZERO) + c * c2
        return Form(self.n, terms)

    def partial(self, u: Form) -> Form:
        return self._split(u, True)

    def dbar(self, u: Form) -> Form:
        return self._split(u, False)

    def ddbar(self, u: Form) -> Form:
        return self.partial(self.dbar(u))

    def differential(self, u, selector: str = "d"):
        """d, partial or dbar of a Form; only dbar of a VectorForm"""
        if selector not in DIFFERENTIALS:
            raise SktpolError(f"Unknown differential: {selector}")
        if isinstance(u, VectorForm):
            if selector != "dbar":
                raise SktpolError(f"Only dbar is defined on vector-valued forms, not {selector}")
            return self.dbar_vector(u)
        return {"d": self.d, "partial": self.partial, "dbar": self.dbar}[selector](u)

    def dbar_frame(self, i: int) -> VectorForm:
        """dbar Z_i = sum_{j,k} c^k_{ij} conj(phi)^j (x) Z_k, c^k_{ij} the (i|j) coefficient of d phi^k"""

        def build():
            n = self.n
            components = []
            for k in range(n):
                terms = {}
                for j in range(n):
                    c = self.dtable[k].terms.get((i, n + j))
                    if c:
                        terms[(n + j,)] = c
                components.append(Form(n, terms))
            return VectorForm(n, 1, components)

        return self.cached(("dbar_frame", i), build)

    def dbar_vector(self, theta: VectorForm) -> VectorForm:
        n = self.n
        q = theta.q
        components = [self.dbar(c) for c in theta.components]
        for i, comp in enumerate(theta.components):
            if not comp:
                continue
            for k, fk in enumerate(self.dbar_frame(i).components):
                if not fk:
                    continue
                term = comp.wedge(fk)
                components[k] = components[k] + term if q % 2 == 0 else components[k] - term
        return VectorForm(n, q + 1, components)

    def operator_matrix(self, selector: str, p: int, q: int) -> SDM:
        """Matrix of d, partial or dbar on the (p,q) monomial basis"""
        target = {"partial": (p + 1, q), "dbar": (p, q + 1)}.get(selector)

        def build():
            source = self.space(p, q)
            if target is None:
                return source.matrix_of(self.d, self.degree_space(p + q + 1))
            return source.matrix_of(lambda u: self.differential(u, selector), self.space(*target))

        return self.cached(("operator", selector, p, q), build)

    # -- validation -------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Integrability, d^2 = 0 and unimodularity, each check naming its generator"""
        n = self.n
        report = ValidationReport(self.name or "unnamed")

        def fail(check: str, generator: str, residual: Form) -> None:
            report.log.record(check, False, f"{generator}: {residual.to_string()}")
            if report.failure is None:
                report.failure = ValidationError(check, generator, residual.to_string())

        for i, form in enumerate(self.dtable):
            residual = form.component(0, 2)
            if residual:
                fail("integrability", f"d {self.names[i]}", residual)
        if not report.log.failures():
            report.log.record("integrability", True, "no (0,2) component in any d phi^i")

        before = len(report.log.failures())
        for g in range(2 * n):
            residual = self.d(self.generator_differentials[g])
            if residual:
                fail("d_squared", f"d d {self.generator_name(g)}", residual)
        if len(report.log.failures()) == before:
            report.log.record("d_squared", True, f"d d vanishes on all {2 * n} generators")

        before = len(report.log.failures())
        for gamma in combinations(range(2 * n), 2 * n - 1):
            top_coeff = self._d_monomial(gamma).terms.get(self.top)
            if top_coeff:
                fail("unimodularity", f"d {Form(n, {gamma: ONE}).to_string()}", Form(n, {self.top: top_coeff}))
        if len(report.log.failures()) == before:
            report.log.record("unimodularity", True, "no exact top-degree form")

        if report.passed:
            logger.info(f"✅ Presentation {report.name} passed validation")
        else:
            logger.warning(f"⚠️ Presentation {report.name} failed {len(report.log.failures())} checks")
        return report

    def require_valid(self) -> "CoframePresentation":
        self.cached(("validation",), self.validate).require()
        return self


# ---------------------------------------------------------------------------
# Changes of coframe
# ---------------------------------------------------------------------------


class CoframeChange:
    """
    LINEAR CHANGE OF COFRAME
    - new_g = sum_h M[g][h] old_h over 2n generators
    - forms written in the old generators are re-expressed in the new ones
    """

    def __init__(self, n: int, matrix: SDM):
        if matrix.shape != (2 * n, 2 * n):
            raise DimensionMismatchError(f"Coframe change must be {2 * n}x{2 * n}, got {matrix.shape}")
        determinant = matrix.det()
        if not determinant:
            raise DegenerateCoframeError("The new generators are linearly dependent")
        self.n = n
        self.matrix = matrix
        self.inverse = matrix.inv()
        self.determinant = determinant
        self._old_cache: Dict[Monomial, Form] = {}
        self._new_cache: Dict[Monomial, Form] = {}

    def _linear(self, rows: SDM, g: int) -> Form:
        return Form(self.n, {(h,): c for h, c in rows.get(g, {}).items()})

    def _expand(self, form: Form, rows: SDM, cache: Dict[Monomial, Form]) -> Form:
        result = Form.zero(self.n)
        for m, c in form.terms.items():
            expanded = cache.get(m)
            if expanded is None:
                expanded = Form.one(self.n)
                for g in m:
                    expanded = expanded.wedge(self._linear(rows, g))
                cache[m] = expanded
            result = result + expanded.scale(c)
        return result

    def express(self, form: Form) -> Form:
        """Rewrite a form given in the old generators in terms of the new ones"""
        return self._expand(form, self.inverse, self._old_cache)

    def restore(self, form: Form) -> Form:
        """Rewrite a form given in the new generators in terms of the old ones"""
        return self._expand(form, self.matrix, self._new_cache)

    def transform_differentials(self, old_differentials: Sequence[Form]) -> List[Form]:
        """d of every new generator, written in the new generators"""
        new = []
        for g in range(2 * self.n):
            total = Form.zero(self.n)
            for h, c in self.matrix.get(g, {}).items():
                total = total + old_differentials[h].scale(c)
            new.append(self.express(total))
        return new
