import pytest

from sktpol.models.coframe import CoframeChange, CoframePresentation, Form, VectorForm, contract
from sktpol.models.exact import IMAG, ONE, rational, scalar, sparse_matrix
from sktpol.parsers.manifold_parser import parse_form, parse_manifold, parse_vector_form
from sktpol.utils.errors import BidegreeError, DegenerateCoframeError, DimensionMismatchError, SktpolError

CASES = 100


def _random_bidegree(rng, n):
    return rng.randint(0, n), rng.randint(0, n)


def test_monomial_normal_form_and_labels():
    u = Form.monomial(3, [3, 1], [2])
    assert u.to_string() == "-(13|2)"
    assert Form.monomial(3, [1, 1]) == Form.zero(3)
    assert Form.monomial(3, [1], [1]).bidegrees() == [(1, 1)]
    with pytest.raises(BidegreeError):
        Form.monomial(3, [7])


def test_wedge_orders_holomorphic_before_antiholomorphic():
    a = Form.monomial(3, [], [1])
    b = Form.monomial(3, [2])
    assert a.wedge(b) == Form.monomial(3, [2], [1]).scale(-ONE)
    assert b.wedge(a) == Form.monomial(3, [2], [1])


def test_s3xs3_structure_equations(s3xs3):
    P = s3xs3.presentation
    assert P.n == 3
    assert P.dtable[0] == parse_form("i(13|) + i(1|3)", 3)
    assert P.dtable[1] == parse_form("(23|) - (2|3)", 3)
    assert P.dtable[2] == parse_form("-i(1|1) + (2|2)", 3)


def test_iwasawa_structure_equations(iwasawa):
    P = iwasawa.presentation
    assert not P.dtable[0] and not P.dtable[1]
    assert P.dtable[2] == parse_form("-(12|)", 3)


def test_dbar_omega_on_s3xs3(s3xs3):
    P = s3xs3.presentation
    dbar_omega = P.dbar(s3xs3.metric.form)
    assert dbar_omega == parse_form("1/2*(1|13) + 1/2i*(2|23)", 3)
    assert not P.partial(dbar_omega)


def test_partial_of_a_mixed_monomial_on_s3xs3(s3xs3):
    P = s3xs3.presentation
    assert P.partial(parse_form("(13|13)", 3)) == parse_form("(123|12)", 3)


def test_torus_differentials_vanish(torus, random_form, rng):
    P = torus.presentation
    for _ in range(20):
        u = random_form(P, *_random_bidegree(rng, 3))
        assert not P.d(u)


@pytest.mark.parametrize("builtin", ["s3xs3", "iwasawa"])
def test_differential_laws_on_random_forms(builtin, request, random_form, rng):
    P = request.getfixturevalue(builtin).presentation
    for _ in range(CASES):
        u = random_form(P, *_random_bidegree(rng, P.n))
        assert not P.d(P.d(u))
        assert not P.partial(P.partial(u))
        assert not P.dbar(P.dbar(u))
        assert P.partial(P.dbar(u)) == -P.dbar(P.partial(u))
        assert P.d(u) == P.partial(u) + P.dbar(u)


def test_wedge_is_graded_commutative_and_associative(s3xs3, random_form, rng):
    P = s3xs3.presentation
    for _ in range(CASES):
        a, b, c = (random_form(P, *_random_bidegree(rng, 2)) for _ in range(3))
        if a and b:
            sign = ONE if (a.degree * b.degree) % 2 == 0 else -ONE
            assert a.wedge(b) == b.wedge(a).scale(sign)
        assert a.wedge(b).wedge(c) == a.wedge(b.wedge(c))


def test_leibniz_rule(s3xs3, random_form, rng):
    P = s3xs3.presentation
    for _ in range(CASES):
        a = random_form(P, *_random_bidegree(rng, 2))
        b = random_form(P, *_random_bidegree(rng, 2))
        sign = ONE if not a or a.degree % 2 == 0 else -ONE
        assert P.d(a.wedge(b)) == P.d(a).wedge(b) + a.wedge(P.d(b)).scale(sign)


def test_conjugation_intertwines_partial_and_dbar(s3xs3, random_form, rng):
    P = s3xs3.presentation
    for _ in range(CASES):
        u = random_form(P, *_random_bidegree(rng, 3))
        assert u.conjugate().conjugate() == u
        assert P.partial(u).conjugate() == P.dbar(u.conjugate())


def test_contraction_examples(torus):
    n = 3
    omega = torus.metric.form
    theta_11 = parse_vector_form("(|1)Z1", n)
    theta_21 = parse_vector_form("(|2)Z1", n)
    assert contract(theta_11, parse_form("(123|)", n)) == parse_form("(23|1)", n)
    assert not contract(theta_11, omega)
    assert contract(theta_21, omega) == parse_form("-1/2i*(|12)", n)


@pytest.mark.parametrize("builtin", ["s3xs3", "iwasawa"])
def test_contraction_leibniz_rule(builtin, request, random_form, random_vector_form, rng):
    """dbar(theta -| b) = dbar theta -| b - (-1)^q theta -| dbar b in the first slot, + in the last"""
    P = request.getfixturevalue(builtin).presentation
    for _ in range(CASES):
        q = rng.randint(0, 1)
        theta = random_vector_form(P, q)
        beta = random_form(P, rng.randint(1, 3), rng.randint(0, 1))
        sign = ONE if q % 2 == 0 else -ONE
        dbar_theta = P.dbar_vector(theta)

        first = P.dbar(contract(theta, beta))
        assert first == contract(dbar_theta, beta) - contract(theta, P.dbar(beta)).scale(sign)

        last = P.dbar(contract(theta, beta, slot="last"))
        assert last == contract(dbar_theta, beta, slot="last") + contract(theta, P.dbar(beta), slot="last").scale(sign)


def test_vector_dbar_squares_to_zero(s3xs3, random_vector_form, rng):
    P = s3xs3.presentation
    for _ in range(CASES):
        theta = random_vector_form(P, rng.randint(0, 1))
        assert not P.dbar_vector(P.dbar_vector(theta))


def test_vector_dbar_rejects_other_differentials(s3xs3):
    with pytest.raises(SktpolError):
        s3xs3.presentation.differential(parse_vector_form("(|1)Z1", 3), "d")


def test_builtins_validate(torus, iwasawa, s3xs3):
    for parsed in (torus, iwasawa, s3xs3):
        report = parsed.presentation.validate()
        assert report.passed
        assert report.failure is None


@pytest.mark.parametrize("text, check, generator", [
    ("n 2\nd p1 = (|12)\nd p2 = 0\n", "integrability", "d p1"),
    ("n 2\nd p1 = (1|2)\nd p2 = (1|1)\n", "d_squared", "d d p2"),
    ("n 1\nd p1 = (1|1)\n", "unimodularity", "d (1|)"),
])
def test_validation_names_the_failing_generator(text, check, generator):
    parsed = parse_manifold(text, validate=False)
    report = parsed.presentation.validate()
    assert not report.passed
    assert report.failure.check == check
    assert report.failure.generator == generator
    assert report.failure.residual != "0"


def test_presentation_shape_errors():
    with pytest.raises(DimensionMismatchError):
        CoframePresentation(2, [Form.zero(2)])
    with pytest.raises(BidegreeError):
        CoframePresentation(1, [Form.monomial(1, [1])])


def test_coframe_change_inverts_exactly(s3xs3, random_form, rng):
    n = 3
    half = scalar(rational(1, 2))
    rows = {g: {g: ONE} for g in range(2 * n)}
    rows[0][n + 1] = -half
    rows[n][1] = -half
    change = CoframeChange(n, sparse_matrix(rows, 2 * n, 2 * n))
    for _ in range(CASES):
        u = random_form(s3xs3.presentation, *_random_bidegree(rng, 2))
        assert change.restore(change.express(u)) == u


def test_degenerate_coframe_change_is_rejected():
    rows = {0: {0: ONE, 1: IMAG}, 1: {0: ONE, 1: IMAG}}
    with pytest.raises(DegenerateCoframeError):
        CoframeChange(1, sparse_matrix(rows, 2, 2))


def test_vector_form_components_must_be_antiholomorphic():
    with pytest.raises(BidegreeError):
        VectorForm(2, 1, [Form.monomial(2, [1]), Form.zero(2)])
