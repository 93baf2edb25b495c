import pytest

from sktpol.models.exact import (
    IMAG,
    ONE,
    ZERO,
    GramForm,
    apply_matrix,
    conj,
    dot,
    format_scalar,
    kernel,
    min_norm_solution,
    parse_scalar,
    rank,
    rational,
    scalar,
    solve_affine,
    sparse_matrix,
)
from sktpol.utils.errors import NotPositiveError, SktpolError


@pytest.mark.parametrize("text, expected", [
    ("3", scalar(3)),
    ("-1/2", scalar(rational(-1, 2))),
    ("i", IMAG),
    ("-i", -IMAG),
    ("1/2+1/2i", scalar(rational(1, 2), rational(1, 2))),
    ("2-3/4i", scalar(2, rational(-3, 4))),
    (" -1 + i ", scalar(-1, 1)),
])
def test_parse_scalar_accepts_gaussian_rationals(text, expected):
    assert parse_scalar(text) == expected


@pytest.mark.parametrize("text", ["", "abc", "1/0", "1//2", "i2", "1+"])
def test_parse_scalar_rejects_garbage(text):
    with pytest.raises(SktpolError):
        parse_scalar(text)


def test_format_scalar_is_canonical_and_parses_back(rng):
    assert format_scalar(ZERO) == "0"
    assert format_scalar(scalar(rational(-1, 2), rational(1, 2))) == "-1/2+1/2i"
    assert format_scalar(-IMAG) == "-1i"
    for _ in range(100):
        z = scalar(rational(rng.randint(-20, 20), rng.randint(1, 9)), rational(rng.randint(-20, 20), rng.randint(1, 9)))
        assert parse_scalar(format_scalar(z)) == z


def test_conjugation():
    z = scalar(rational(2, 3), -5)
    assert conj(z) == scalar(rational(2, 3), 5)
    assert conj(conj(z)) == z
    assert z * conj(z) == scalar(rational(4, 9) + 25)


def test_rank_and_kernel_of_a_gaussian_matrix():
    # columns 0 and 2 are proportional over QQ(i)
    matrix = sparse_matrix({0: {0: ONE, 1: ONE, 2: IMAG}, 1: {0: IMAG, 2: -ONE}}, 2, 3)
    assert rank(matrix) == 2
    basis = kernel(matrix)
    assert len(basis) == 1
    assert apply_matrix(matrix, basis[0]) == {}


def test_solve_affine_returns_a_checked_particular_solution():
    matrix = sparse_matrix({0: {0: ONE, 1: ONE}, 1: {1: scalar(2)}}, 2, 2)
    solved = solve_affine(matrix, {0: scalar(3), 1: scalar(4)})
    assert solved.feasible
    assert solved.particular == {0: scalar(1), 1: scalar(2)}
    assert solved.kernel == ()


def test_solve_affine_certifies_infeasibility():
    matrix = sparse_matrix({0: {0: ONE}, 1: {0: ONE}}, 2, 1)
    b = {0: ONE, 1: scalar(2)}
    solved = solve_affine(matrix, b)
    assert not solved.feasible
    y = solved.certificate
    assert apply_matrix(matrix.transpose(), y) == {}
    assert dot(y, b)


def test_gram_form_rejects_indefinite_matrices():
    with pytest.raises(NotPositiveError):
        GramForm(sparse_matrix({0: {0: ONE}, 1: {1: -ONE}}, 2, 2))
    with pytest.raises(NotPositiveError):
        GramForm(sparse_matrix({0: {0: ONE, 1: IMAG}, 1: {0: IMAG, 1: ONE}}, 2, 2))


def test_gram_form_inner_is_sesquilinear():
    gram = GramForm(sparse_matrix({0: {0: scalar(2), 1: IMAG}, 1: {0: -IMAG, 1: scalar(3)}}, 2, 2))
    u, v = {0: ONE, 1: IMAG}, {1: scalar(1, 1)}
    c = scalar(2, -1)
    assert gram.inner({k: c * x for k, x in u.items()}, v) == c * gram.inner(u, v)
    assert gram.inner(u, {k: c * x for k, x in v.items()}) == conj(c) * gram.inner(u, v)
    assert gram.inner(v, u) == conj(gram.inner(u, v))
    assert gram.leading_minors() == [scalar(2), scalar(5)]


def test_min_norm_solution_is_orthogonal_to_the_kernel():
    # x0 + x1 = 2 has minimal Euclidean solution (1, 1)
    matrix = sparse_matrix({0: {0: ONE, 1: ONE}}, 1, 2)
    solved = min_norm_solution(matrix, {0: scalar(2)}, GramForm.identity(2))
    assert solved.feasible
    assert solved.solution == {0: ONE, 1: ONE}

    weighted = GramForm(sparse_matrix({0: {0: scalar(3)}, 1: {1: ONE}}, 2, 2))
    solved = min_norm_solution(matrix, {0: scalar(4)}, weighted)
    assert solved.solution == {0: ONE, 1: scalar(3)}
    assert all(not weighted.inner(solved.solution, k) for k in solved.kernel)


def test_min_norm_solution_reports_infeasibility_without_raising():
    matrix = sparse_matrix({}, 1, 2)
    solved = min_norm_solution(matrix, {0: ONE}, GramForm.identity(2))
    assert not solved.feasible
    assert solved.certificate == {0: ONE}
