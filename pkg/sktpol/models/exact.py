"""
sktpol - Exact Core
Gaussian-rational scalars and exact sparse linear algebra
"""

import logging
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices.sdm import SDM

from sktpol.utils.errors import DimensionMismatchError, NotPositiveError, SktpolError

logger = logging.getLogger(__name__)

# Elements of QQ_I: exact a + b*i with arbitrary-precision rationals a, b.
Scalar = type(QQ_I.one)
Vector = Dict[int, Scalar]

ZERO = QQ_I.zero
ONE = QQ_I.one
IMAG = QQ_I(0, 1)

_SCALAR_PATTERN = re.compile(
    r"(?:(?P<re>[+-]?\d+(?:/\d+)?)(?=[+-]|$))?"
    r"(?P<im>[+-]?(?:\d+(?:/\d+)?)?i)?"
)


def rational(numerator: int, denominator: int = 1):
    """Exact rational p/q in QQ"""
    return QQ(numerator, denominator)


def scalar(re=0, im=0) -> Scalar:
    """Gaussian rational re + im*i from ints or QQ elements"""
    return QQ_I(QQ.convert(re), QQ.convert(im))


def conj(z: Scalar) -> Scalar:
    return QQ_I(z.x, -z.y)


def is_real(z: Scalar) -> bool:
    return not z.y


def is_positive_real(z: Scalar) -> bool:
    return not z.y and z.x > 0


def i_power(k: int) -> Scalar:
    """i**k for any integer k"""
    return (ONE, IMAG, -ONE, -IMAG)[k % 4]


def sign_power(k: int) -> Scalar:
    """(-1)**k"""
    return ONE if k % 2 == 0 else -ONE


def _parse_rational(text: str):
    sign = -1 if text.startswith("-") else 1
    body = text.lstrip("+-")
    if "/" in body:
        num, den = body.split("/")
        if int(den) == 0:
            raise SktpolError(f"Zero denominator in scalar: {text}")
        return QQ(sign * int(num), int(den))
    return QQ(sign * int(body))


def parse_scalar(text: str) -> Scalar:
    """
    Parse the "a/b+c/di" notation

    Accepts "3", "-1/2", "1i", "-i", "1/2+1/2i", "2-3/4i"; the imaginary unit
    may carry an omitted coefficient of 1.
    """
    compact = text.strip().replace(" ", "")
    match = _SCALAR_PATTERN.fullmatch(compact)
    if not compact or match is None or not (match.group("re") or match.group("im")):
        raise SktpolError(f"Unparsable scalar: {text!r}")

    re_part = _parse_rational(match.group("re")) if match.group("re") else QQ(0)
    im_part = QQ(0)
    if match.group("im"):
        body = match.group("im")[:-1]
        if body in ("", "+", "-"):
            body += "1"
        im_part = _parse_rational(body)
    return QQ_I(re_part, im_part)


def _format_rational(q) -> str:
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def format_scalar(z: Scalar) -> str:
    """Canonical "a/b+c/di" text; parse_scalar(format_scalar(z)) == z"""
    if not z:
        return "0"
    text = _format_rational(z.x) if z.x else ""
    if z.y:
        imag = _format_rational(z.y) + "i"
        if text and z.y > 0:
            text += "+"
        text += imag
    return text


# ---------------------------------------------------------------------------
# Sparse matrices
# ---------------------------------------------------------------------------


def sparse_matrix(rows: Dict[int, Dict[int, Scalar]], nrows: int, ncols: int) -> SDM:
    """SDM over QQ_I with zero entries and empty rows dropped"""
    clean = {}
    for i, row in rows.items():
        kept = {j: v for j, v in row.items() if v}
        if kept:
            clean[i] = kept
    return SDM(clean, (nrows, ncols), QQ_I)


def matrix_from_columns(columns: Sequence[Vector], nrows: int) -> SDM:
    rows: Dict[int, Dict[int, Scalar]] = {}
    for j, column in enumerate(columns):
        for i, value in column.items():
            if i >= nrows:
                raise DimensionMismatchError(f"Column {j} has entry {i} beyond {nrows} rows")
            if value:
                rows.setdefault(i, {})[j] = value
    return sparse_matrix(rows, nrows, len(columns))


def matrix_from_rows(rows: Sequence[Vector], ncols: int) -> SDM:
    for i, row in enumerate(rows):
        if any(j >= ncols for j in row):
            raise DimensionMismatchError(f"Row {i} has an entry beyond {ncols} columns")
    return sparse_matrix(dict(enumerate(rows)), len(rows), ncols)


def columns_of(matrix: SDM) -> List[Vector]:
    columns: List[Vector] = [dict() for _ in range(matrix.cols)]
    for i, row in matrix.items():
        for j, value in row.items():
            columns[j][i] = value
    return columns


def apply_matrix(matrix: SDM, x: Vector) -> Vector:
    result: Vector = {}
    for i, row in matrix.items():
        total = ZERO
        for j, value in row.items():
            xj = x.get(j)
            if xj:
                total += value * xj
        if total:
            result[i] = total
    return result


def vstack(blocks: Sequence[SDM], ncols: int) -> SDM:
    rows: Dict[int, Dict[int, Scalar]] = {}
    offset = 0
    for block in blocks:
        if block.cols != ncols:
            raise DimensionMismatchError(f"Cannot stack a {block.shape} block onto {ncols} columns")
        for i, row in block.items():
            rows[offset + i] = dict(row)
        offset += block.rows
    return sparse_matrix(rows, offset, ncols)


def rref(matrix: SDM) -> Tuple[List[Dict[int, Scalar]], List[int]]:
    """
    Reduced row echelon form as (rows, pivot columns), rows ordered by pivot

    The reduced echelon form is unique, so the pivoting strategy of the
    underlying elimination does not affect any result.
    """
    if matrix.rows == 0 or matrix.cols == 0 or not any(matrix.values()):
        return [], []
    reduced, _ = matrix.rref()
    rows = sorted((dict(row) for row in reduced.values() if row), key=min)
    return rows, [min(row) for row in rows]


def rank(matrix: SDM) -> int:
    return len(rref(matrix)[1])


def echelon_basis(vectors: Iterable[Vector], dimension: int) -> List[Vector]:
    """Reduced echelon basis of the span of the given vectors"""
    vectors = [v for v in vectors if v]
    if not vectors:
        return []
    rows, _ = rref(matrix_from_rows(vectors, dimension))
    return rows


def kernel(matrix: SDM) -> List[Vector]:
    """Basis of ker(matrix) in reduced echelon form"""
    rows, pivots = rref(matrix)
    pivot_set = set(pivots)
    basis = []
    for free in range(matrix.cols):
        if free in pivot_set:
            continue
        vector: Vector = {free: ONE}
        for row in rows:
            value = row.get(free)
            if value:
                vector[min(row)] = -value
        basis.append(vector)
    return echelon_basis(basis, matrix.cols)


def image(matrix: SDM) -> List[Vector]:
    """Basis of the column space in reduced echelon form"""
    return echelon_basis(columns_of(matrix), matrix.rows)


def left_kernel(matrix: SDM) -> List[Vector]:
    """Vectors y with y . matrix = 0"""
    return kernel(matrix.transpose())


def dot(y: Vector, x: Vector) -> Scalar:
    total = ZERO
    for i, value in y.items():
        xi = x.get(i)
        if xi:
            total += value * xi
    return total


def combine(coefficients: Vector, vectors: Sequence[Vector]) -> Vector:
    result: Vector = {}
    for a, c in coefficients.items():
        if not c:
            continue
        for i, value in vectors[a].items():
            result[i] = result.get(i, ZERO) + c * value
    return {i: v for i, v in result.items() if v}


def add_vectors(x: Vector, y: Vector, scale: Scalar = ONE) -> Vector:
    result = dict(x)
    for i, value in y.items():
        result[i] = result.get(i, ZERO) + scale * value
    return {i: v for i, v in result.items() if v}


def in_span(x: Vector, basis: Sequence[Vector], dimension: int) -> bool:
    if not x:
        return True
    before = len(echelon_basis(basis, dimension))
    return len(echelon_basis(list(basis) + [x], dimension)) == before


def reduce_modulo(x: Vector, echelon_rows: Sequence[Dict[int, Scalar]]) -> Vector:
    """Eliminate the pivot columns of a reduced echelon basis from x"""
    result = dict(x)
    for row in echelon_rows:
        pivot = min(row)
        value = result.get(pivot)
        if value:
            result = add_vectors(result, row, -value)
    return result


def complement_basis(numerator: Sequence[Vector], denominator: Sequence[Vector], dimension: int) -> List[Vector]:
    """Echelon basis of a complement of span(denominator) inside span(numerator)"""
    den_rows = echelon_basis(denominator, dimension)
    reduced = [reduce_modulo(v, den_rows) for v in numerator]
    return echelon_basis(reduced, dimension)


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineSolution:
    """
    AFFINE SYSTEM RESULT
    - feasible: whether b lies in the image of A
    - particular: a solution when feasible
    - kernel: echelon basis of ker A
    - certificate: y with y.A = 0 and y.b != 0 when infeasible
    """

    feasible: bool
    particular: Optional[Vector]
    kernel: Tuple[Vector, ...]
    certificate: Optional[Vector] = None


def _check_rhs(matrix: SDM, b: Vector) -> None:
    if any(i < 0 or i >= matrix.rows for i in b):
        raise DimensionMismatchError(f"Right-hand side does not fit a {matrix.rows}x{matrix.cols} system")


def solve_affine(matrix: SDM, b: Vector) -> AffineSolution:
    """Particular solution plus kernel basis of A.x = b, or an infeasibility certificate"""
    _check_rhs(matrix, b)
    b = {i: v for i, v in b.items() if v}
    ncols = matrix.cols
    null_basis = tuple(kernel(matrix))

    augmented = {i: dict(row) for i, row in matrix.items()}
    for i, value in b.items():
        augmented.setdefault(i, {})[ncols] = value
    rows, pivots = rref(sparse_matrix(augmented, matrix.rows, ncols + 1))

    if ncols in pivots:
        certificate = None
        for y in left_kernel(matrix):
            if dot(y, b):
                certificate = y
                break
        if certificate is None:
            raise SktpolError("Inconsistent system without a certificate")
        logger.debug(f"Infeasible {matrix.rows}x{ncols} system certified")
        return AffineSolution(False, None, null_basis, certificate)

    particular: Vector = {}
    for row in rows:
        value = row.get(ncols)
        if value:
            particular[min(row)] = value

    if apply_matrix(matrix, particular) != b:
        raise SktpolError("Particular solution failed exact re-multiplication")
    return AffineSolution(True, particular, null_basis)


class GramForm:
    """
    HERMITIAN GRAM FORM
    - matrix entry G[a][b] is the inner product of basis vectors a and b
    - inner(u, v) is linear in u and conjugate-linear in v
    - positivity is checked with exact leading principal minors
    """

    def __init__(self, matrix: SDM, check: bool = True):
        if matrix.rows != matrix.cols:
            raise DimensionMismatchError(f"Gram matrix must be square, got {matrix.shape}")
        self.matrix = matrix
        self.size = matrix.rows
        if check:
            if not self.is_hermitian():
                raise NotPositiveError("Gram matrix is not Hermitian")
            if not self.is_positive_definite():
                raise NotPositiveError("Gram matrix is not positive definite")

    @classmethod
    def identity(cls, size: int) -> "GramForm":
        return cls(sparse_matrix({i: {i: ONE} for i in range(size)}, size, size), check=False)

    def entry(self, a: int, b: int) -> Scalar:
        return self.matrix.get(a, {}).get(b, ZERO)

    def inner(self, u: Vector, v: Vector) -> Scalar:
        total = ZERO
        for a, ua in u.items():
            row = self.matrix.get(a)
            if not row:
                continue
            for b, gab in row.items():
                vb = v.get(b)
                if vb:
                    total += ua * gab * conj(vb)
        return total

    def norm2(self, u: Vector) -> Scalar:
        return self.inner(u, u)

    def is_hermitian(self) -> bool:
        for a, row in self.matrix.items():
            for b, value in row.items():
                if self.entry(b, a) != conj(value):
                    return False
        return True

    def leading_minors(self) -> List[Scalar]:
        minors = []
        for k in range(1, self.size + 1):
            block = self.matrix.extract(list(range(k)), list(range(k)))
            minors.append(block.det())
        return minors

    def is_positive_definite(self) -> bool:
        return all(is_positive_real(m) for m in self.leading_minors())


@dataclass(frozen=True)
class MinNormSolution:
    """Minimal-norm solution of A.x = b with respect to a Gram form"""

    feasible: bool
    solution: Optional[Vector]
    kernel: Tuple[Vector, ...] = ()
    certificate: Optional[Vector] = None


def min_norm_solution(matrix: SDM, b: Vector, gram: GramForm) -> MinNormSolution:
    """
    Unique solution of A.x = b that is G-orthogonal to ker A

    Infeasibility is returned as a flag with its certificate, never raised.
    """
    if gram.size != matrix.cols:
        raise DimensionMismatchError(f"Gram form of size {gram.size} on {matrix.cols} unknowns")

    solved = solve_affine(matrix, b)
    if not solved.feasible:
        return MinNormSolution(False, None, solved.kernel, solved.certificate)

    particular = solved.particular
    null_basis = solved.kernel
    if not null_basis:
        return MinNormSolution(True, particular, null_basis)

    # x = p + sum c_l k_l with <x, k_j> = 0 for every kernel vector k_j
    r = len(null_basis)
    system = sparse_matrix(
        {j: {l: gram.inner(null_basis[l], null_basis[j]) for l in range(r)} for j in range(r)}, r, r
    )
    rhs = {j: -gram.inner(particular, null_basis[j]) for j in range(r)}
    shift = solve_affine(system, rhs)
    if not shift.feasible or shift.kernel:
        raise SktpolError("Gram form is degenerate on the kernel")

    solution = add_vectors(particular, combine(shift.particular, null_basis))
    for k in null_basis:
        if gram.inner(solution, k):
            raise SktpolError("Minimal-norm solution is not orthogonal to the kernel")
    return MinNormSolution(True, solution, null_basis)
