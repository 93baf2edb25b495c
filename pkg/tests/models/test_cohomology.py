from math import comb

import pytest

from sktpol.models.cohomology import (
    canonical_map,
    cohomology,
    cohomology_table,
    conjugation_symmetry_check,
    ddbar_test,
    hodge_decompose_2form,
    minimal_d_closed_rep,
    normalise_model,
    schweitzer_duality_check,
)
from sktpol.models.exact import ONE, echelon_basis
from sktpol.parsers.manifold_parser import parse_form
from sktpol.utils.errors import BidegreeError, NotClosedError, NotInNumeratorError, SktpolError

S3XS3_BOTT_CHERN = {
    (0, 0): 1,
    (1, 1): 2,
    (2, 1): 1,
    (1, 2): 1,
    (2, 2): 1,
    (3, 2): 1,
    (2, 3): 1,
    (3, 3): 1,
}

S3XS3_HARMONIC_BOTT_CHERN = {
    (0, 0): ["(|)"],
    (1, 1): ["(1|1)", "(2|2)"],
    (2, 1): ["(23|2) + i(13|1)"],
    (2, 3): ["(12|123)"],
    (3, 3): ["(123|123)"],
}


def same_span(space, a, b):
    return echelon_basis([space.coordinates(f) for f in a], space.dim) == echelon_basis(
        [space.coordinates(f) for f in b], space.dim
    )


def test_model_aliases():
    assert normalise_model("Bott-Chern") == "bc"
    assert normalise_model(" dbar ") == "dolbeault"
    assert normalise_model("dR") == "derham"
    with pytest.raises(SktpolError):
        normalise_model("hodge")


def test_s3xs3_bott_chern_table(s3xs3):
    table = cohomology_table(s3xs3.presentation, "bc")
    dims = {bidegree: group.dimension for bidegree, group in table.items() if group.dimension}
    assert dims == S3XS3_BOTT_CHERN
    assert all(group.checks.passed for group in table.values())


def test_s3xs3_bott_chern_table_with_harmonic_representatives(s3xs3):
    P = s3xs3.presentation
    table = cohomology_table(P, "bc", s3xs3.metric)
    for bidegree, group in table.items():
        assert group.dimension == S3XS3_BOTT_CHERN.get(bidegree, 0)
        assert group.checks.passed
        for form in group.basis:
            assert not P.partial(form)
            assert not P.dbar(form)
        if group.dimension:
            assert s3xs3.metric.harmonic_kernel_check("bc", *bidegree), bidegree

    for bidegree, texts in S3XS3_HARMONIC_BOTT_CHERN.items():
        expected = [parse_form(text, 3) for text in texts]
        assert same_span(P.space(*bidegree), table[bidegree].basis, expected), bidegree
    for p, q in ((2, 1), (2, 3)):
        conjugates = [form.conjugate() for form in table[(p, q)].basis]
        assert same_span(P.space(q, p), table[(q, p)].basis, conjugates)


def test_s3xs3_top_generators(s3xs3):
    group = cohomology(s3xs3.presentation, "bc", (2, 3))
    assert not group.is_zero(parse_form("(12|123)", 3))


def test_s3xs3_betti_numbers(s3xs3):
    table = cohomology_table(s3xs3.presentation, "derham")
    assert [table[k].dimension for k in range(7)] == [1, 0, 0, 2, 0, 0, 1]


def test_torus_groups_are_exterior_powers(torus):
    P = torus.presentation
    for p, q in P.bidegrees():
        expected = comb(3, p) * comb(3, q)
        for model in ("bc", "aeppli", "dolbeault"):
            assert cohomology(P, model, (p, q)).dimension == expected
    for k in range(7):
        assert cohomology(P, "derham", k).dimension == comb(6, k)


def test_iwasawa_has_more_holomorphic_dolbeault_classes(iwasawa):
    P = iwasawa.presentation
    assert cohomology(P, "bc", (1, 0)).dimension == 2
    assert cohomology(P, "dolbeault", (1, 0)).dimension == 3
    mapping = canonical_map(P, "bc", "dolbeault", (1, 0))
    assert mapping.rank == 2
    assert not mapping.is_isomorphism


def test_ddbar_test_verdicts(torus, iwasawa):
    assert ddbar_test(torus.presentation).holds

    verdict = ddbar_test(iwasawa.presentation)
    assert not verdict.holds
    failure = next(f for f in verdict.failures if f["bidegree"] == [1, 0] and f["source"] == "bc")
    assert failure["source_dimension"] == 2
    assert failure["target_dimension"] == 3


@pytest.mark.parametrize("builtin", ["torus", "iwasawa", "s3xs3"])
def test_dimension_symmetries(builtin, request):
    P = request.getfixturevalue(builtin).presentation
    assert conjugation_symmetry_check(P).passed
    assert schweitzer_duality_check(P).passed


def test_canonical_maps_only_run_forward(torus):
    with pytest.raises(SktpolError):
        canonical_map(torus.presentation, "aeppli", "bc", (1, 1))
    with pytest.raises(SktpolError):
        canonical_map(torus.presentation, "bc", "derham", (1, 1))


def test_grading_must_match_the_model(torus):
    with pytest.raises(BidegreeError):
        cohomology(torus.presentation, "derham", (1, 1))
    with pytest.raises(BidegreeError):
        cohomology(torus.presentation, "bc", 2)


def test_reduce_rejects_non_cocycles(s3xs3):
    group = cohomology(s3xs3.presentation, "bc", (1, 0))
    with pytest.raises(NotInNumeratorError):
        group.reduce(parse_form("(1|)", 3))


def test_exact_forms_reduce_to_zero(s3xs3, random_form, rng):
    P = s3xs3.presentation
    for _ in range(20):
        p, q = rng.randint(0, 2), rng.randint(0, 2)
        u = random_form(P, p, q)
        assert cohomology(P, "bc", (p + 1, q + 1)).is_zero(P.ddbar(u))
        assert cohomology(P, "dolbeault", (p, q + 1)).is_zero(P.dbar(u))


def test_class_representatives(torus):
    group = cohomology(torus.presentation, "bc", (1, 1), torus.metric)
    u = parse_form("(1|2) + 3i(2|2)", 3)
    cls = group.cls(u)
    assert not cls.is_zero()
    assert cls.canonical_representative() == u


def test_hodge_decomposition_on_the_torus(torus):
    rho = parse_form("(1|1) + 2(12|)", 3)
    decomposition = hodge_decompose_2form(torus.presentation, rho)
    assert decomposition.feasible
    assert decomposition.unique
    assert decomposition.alphas[(1, 1)] == parse_form("(1|1)", 3)
    assert decomposition.alphas[(2, 0)] == parse_form("2(12|)", 3)
    assert decomposition.vanishes((0, 2))
    assert not decomposition.vanishes((1, 1))


def test_hodge_decomposition_of_an_exact_form(s3xs3):
    P = s3xs3.presentation
    rho = P.d(parse_form("(1|) + (|2)", 3))
    decomposition = hodge_decompose_2form(P, rho)
    assert decomposition.feasible
    assert decomposition.unique
    assert all(decomposition.vanishes(b) for b in ((2, 0), (1, 1), (0, 2)))


def test_hodge_decomposition_of_a_real_holomorphic_pair(torus):
    rho = parse_form("(12|) + (|12)", 3)
    decomposition = hodge_decompose_2form(torus.presentation, rho)
    assert decomposition.feasible
    assert decomposition.unique
    assert decomposition.alphas[(2, 0)] == parse_form("(12|)", 3)
    assert decomposition.alphas[(0, 2)] == parse_form("(|12)", 3)
    assert not decomposition.vanishes((2, 0))
    assert not decomposition.vanishes((0, 2))
    assert decomposition.vanishes((1, 1))


def test_hodge_decomposition_requires_a_closed_2_form(s3xs3):
    with pytest.raises(NotClosedError):
        hodge_decompose_2form(s3xs3.presentation, parse_form("(12|)", 3))
    with pytest.raises(BidegreeError):
        hodge_decompose_2form(s3xs3.presentation, parse_form("(123|)", 3))


def test_minimal_d_closed_representatives_keep_the_dolbeault_class(s3xs3):
    P = s3xs3.presentation
    for p, q in P.bidegrees():
        group = cohomology(P, "dolbeault", (p, q), s3xs3.metric)
        for form in group.basis:
            rep = minimal_d_closed_rep(P, s3xs3.metric, form)
            if rep.feasible:
                assert not P.d(rep.form)
                assert group.reduce(rep.form) == group.reduce(form)
            else:
                assert rep.certificate


def test_minimal_d_closed_representative_examples(torus, iwasawa):
    beta = parse_form("(1|2)", 3)
    rep = minimal_d_closed_rep(torus.presentation, torus.metric, beta)
    assert rep.feasible
    assert rep.form == beta

    zero = parse_form("0", 3)
    rep = minimal_d_closed_rep(torus.presentation, torus.metric, zero)
    assert rep.feasible
    assert rep.form == zero

    # partial phi^3 = -(12|) cannot be absorbed by a dbar-exact correction
    rep = minimal_d_closed_rep(iwasawa.presentation, iwasawa.metric, parse_form("(3|)", 3))
    assert not rep.feasible
    assert rep.form is None
    assert rep.certificate


def test_canonical_map_acts_on_class_coordinates(iwasawa):
    mapping = canonical_map(iwasawa.presentation, "bc", "dolbeault", (1, 0))
    for k, form in enumerate(mapping.source.basis):
        assert mapping.apply({k: ONE}) == mapping.target.reduce(form)
