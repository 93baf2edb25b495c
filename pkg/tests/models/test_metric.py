import pytest

from sktpol.models.coframe import Form
from sktpol.models.exact import IMAG, ONE, combine, conj, kernel, rational, scalar, sign_power, sparse_matrix
from sktpol.models.metric import HermitianMetric, primitive_harmonicity_check
from sktpol.parsers.manifold_parser import parse_form, parse_manifold
from sktpol.utils.errors import BidegreeError, NotPositiveError

CASES = 100

WEIGHTED_TORUS = """\
name weighted-torus
n 3
d p1 = 0
d p2 = 0
d p3 = 0
metric 1 1 = 1
metric 2 2 = 1/2
metric 3 3 = 3/2
"""


@pytest.fixture(scope="module")
def weighted_torus():
    return parse_manifold(WEIGHTED_TORUS).metric


def random_primitive(metric, p, q, rng):
    """Random element of the kernel of omega^(n-k+1) on (p,q)-forms, k = p + q <= n"""
    P = metric.presentation
    n = P.n
    s = n - (p + q) + 1
    space = P.space(p, q)
    if p + s > n or q + s > n:
        basis = [{k: ONE} for k in range(space.dim)]
    else:
        matrix = space.matrix_of(lambda v: metric.lefschetz(v, s), P.space(p + s, q + s))
        basis = kernel(matrix)
    if not basis:
        return space.element({})
    coefficients = {a: scalar(rng.randint(-3, 3), rng.randint(-3, 3)) for a in range(len(basis))}
    return space.element(combine(coefficients, basis))


def _bidegree_up_to(rng, n, top):
    while True:
        p, q = rng.randint(0, n), rng.randint(0, n)
        if p + q <= top:
            return p, q


def test_standard_kahler_form_and_volume(torus):
    metric = torus.metric
    assert metric.form == parse_form("1/2i*(1|1) + 1/2i*(2|2) + 1/2i*(3|3)", 3)
    assert metric.volume_coefficient == scalar(0, rational(1, 8))
    assert metric.integrate(metric.volume_form) == ONE
    assert metric.norm2(parse_form("(1|)", 3)) == scalar(2)
    assert metric.hodge_star(Form.one(3)) == metric.volume_form
    assert metric.hodge_star(parse_form("(123|)", 3)) == parse_form("-i(123|)", 3)


def test_metric_rejects_non_positive_matrices(torus):
    P = torus.presentation
    with pytest.raises(NotPositiveError):
        HermitianMetric(P, sparse_matrix({0: {0: ONE}, 1: {1: -ONE}, 2: {2: ONE}}, 3, 3))
    with pytest.raises(NotPositiveError):
        HermitianMetric(P, sparse_matrix({0: {0: ONE, 1: IMAG}, 1: {0: IMAG, 1: ONE}, 2: {2: ONE}}, 3, 3))


@pytest.mark.parametrize("builtin", ["s3xs3", "weighted_torus"])
def test_star_is_an_isometry_with_the_pairing(builtin, request, random_form, rng):
    fixture = request.getfixturevalue(builtin)
    metric = fixture if isinstance(fixture, HermitianMetric) else fixture.metric
    P = metric.presentation
    for _ in range(CASES):
        p, q = rng.randint(0, 3), rng.randint(0, 3)
        a = random_form(P, p, q)
        b = random_form(P, p, q)
        assert metric.integrate(a.wedge(metric.hodge_star(b.conjugate()))) == metric.inner(a, b)
        assert metric.inner(b, a) == conj(metric.inner(a, b))
        assert metric.hodge_star(metric.hodge_star(a)) == a.scale(sign_power(p + q))


@pytest.mark.parametrize("builtin", ["s3xs3", "weighted_torus"])
def test_star_formula_on_primitive_forms(builtin, request, rng):
    fixture = request.getfixturevalue(builtin)
    metric = fixture if isinstance(fixture, HermitianMetric) else fixture.metric
    checked = 0
    while checked < CASES:
        p, q = _bidegree_up_to(rng, 3, 3)
        v = random_primitive(metric, p, q, rng)
        assert metric.is_primitive(v)
        assert metric.hodge_star(v) == metric.primitive_star(v, p, q)
        checked += 1


def test_adjoints_satisfy_adjunction_on_s3xs3(s3xs3, random_form, rng):
    metric = s3xs3.metric
    P = s3xs3.presentation
    steps = {"partial": (1, 0), "dbar": (0, 1)}
    for _ in range(CASES):
        selector = rng.choice(sorted(steps))
        p, q = rng.randint(0, 2), rng.randint(0, 2)
        u = random_form(P, p, q)
        step = steps[selector]
        v = random_form(P, p + step[0], q + step[1])
        assert metric.check_adjunction(u, v, selector, (p, q))


def test_d_adjunction_on_total_degrees(s3xs3, rng):
    metric = s3xs3.metric
    P = s3xs3.presentation
    for _ in range(CASES // 4):
        k = rng.randint(0, 5)
        u = P.degree_space(k).element({rng.randrange(P.degree_space(k).dim): ONE})
        v = P.degree_space(k + 1).element({rng.randrange(P.degree_space(k + 1).dim): IMAG})
        assert metric.check_adjunction(u, v, "d", k)


@pytest.mark.parametrize("k", range(7))
def test_d_and_its_adjoint_split_into_bidegree_blocks(s3xs3, k):
    log = s3xs3.metric.operator_splitting_check(k)
    assert log.checks
    assert log.passed, [c.detail for c in log.checks if not c.passed]


def test_operator_matrices_follow_the_grading(s3xs3):
    metric = s3xs3.metric
    adjoint = metric.adjoint_matrix("dbar", (1, 1))
    assert (adjoint.source.dim, adjoint.target.dim) == (9, 3)
    assert metric.adjoint_matrix("dbar", (1, 1)) is adjoint
    u = parse_form("(1|)", 3)
    assert metric.differential_matrix("d", 1).apply(u) == s3xs3.presentation.d(u)
    with pytest.raises(BidegreeError):
        metric.adjoint_matrix("d", (1, 1))
    with pytest.raises(BidegreeError):
        metric.differential_matrix("d", (0, 1))


def test_primitive_degree_three_forms_are_harmonic_all_ways_or_none(s3xs3, rng):
    metric = s3xs3.metric
    for _ in range(CASES):
        p = rng.randint(0, 3)
        v = random_primitive(metric, p, 3 - p, rng)
        log = primitive_harmonicity_check(metric, v)
        assert log.passed, log.to_list()


@pytest.mark.parametrize("kind", ["bc", "aeppli"])
def test_laplacian_kernels_match_their_characterisation(s3xs3, kind):
    metric = s3xs3.metric
    for p, q in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)]:
        assert metric.harmonic_kernel_check(kind, p, q)
