import pytest

from sktpol.models.coframe import contract
from sktpol.models.exact import rational, scalar
from sktpol.models.polarisation import (
    HolomorphicVolume,
    SktContext,
    calabi_yau_map,
    holomorphic_volume,
    kahler_case_check,
    l_omega_independence_check,
    L_omega,
    lefschetz_class_map,
    lefschetz_contraction_identity,
    lefschetz_split,
    polarised_tangent_space,
    primitive_class_space,
    primitive_representative,
    require_volume,
    skt_check,
    solve_alpha,
    tangent_isomorphism_check,
    vector_dolbeault,
    wedge_u_rank,
)
from sktpol.parsers.manifold_parser import parse_form, parse_vector_form
from sktpol.utils.errors import (
    BidegreeError,
    MissingAlphaError,
    MissingVolumeError,
    NotClosedError,
    NotInNumeratorError,
    NotPrimitiveError,
    NotSktError,
)

CASES = 100

# Bott-Chern (2,1) class on S3 x S3 whose L_omega image is Aeppli-exact
S3XS3_GAMMA = "(23|2) + i(13|1)"


def test_skt_verdicts(torus, iwasawa, s3xs3):
    assert skt_check(torus.metric)
    assert skt_check(s3xs3.metric)
    assert not skt_check(iwasawa.metric)
    assert iwasawa.presentation.ddbar(iwasawa.metric.form) == parse_form("-1/2i*(12|12)", 3)


def test_context_requires_a_pluriclosed_metric(iwasawa):
    with pytest.raises(NotSktError):
        SktContext.build(iwasawa.metric)
    with pytest.raises(NotSktError):
        solve_alpha(iwasawa.metric)


def test_alpha_equation_has_no_invariant_solution_on_s3xs3(s3xs3, s3xs3_ctx):
    solution = solve_alpha(s3xs3.metric)
    assert not solution.feasible
    assert solution.unknowns == 3
    assert solution.certificate

    assert s3xs3_ctx.alpha is None
    assert not s3xs3_ctx.checks.passed
    with pytest.raises(MissingAlphaError):
        s3xs3_ctx.require_alpha()
    with pytest.raises(MissingAlphaError):
        polarised_tangent_space(s3xs3_ctx)


def test_kahler_torus_context(torus, torus_ctx):
    assert torus_ctx.checks.passed
    assert not torus_ctx.alpha
    assert torus_ctx.zeta == torus.metric.form
    assert torus_ctx.omega_tilde == torus.metric.form
    assert kahler_case_check(torus_ctx).passed


def test_kahler_case_check_does_not_apply_to_s3xs3(s3xs3_ctx):
    log = kahler_case_check(s3xs3_ctx)
    assert not log.passed
    assert [check.name for check in log.checks] == ["kahler"]


def test_l_omega_of_the_s3xs3_class_is_aeppli_exact(s3xs3, s3xs3_ctx):
    gamma = parse_form(S3XS3_GAMMA, 3)
    image = L_omega(s3xs3_ctx, gamma)
    assert image.image == parse_form("(123|12)", 3).scale(scalar(rational(-1, 2), rational(1, 2)))
    assert image.is_zero


def test_l_omega_rejects_non_cocycles(s3xs3_ctx):
    with pytest.raises(NotInNumeratorError):
        L_omega(s3xs3_ctx, parse_form("(12|1)", 3))
    with pytest.raises(BidegreeError):
        L_omega(s3xs3_ctx, parse_form("(12|1) + (1|12)", 3))


def test_primitive_representative_is_certified_infeasible_on_s3xs3(s3xs3_ctx):
    result = primitive_representative(s3xs3_ctx, parse_form(S3XS3_GAMMA, 3))
    assert not result.feasible
    assert result.certificate
    assert result.certificate_verified
    assert result.witness is None


def test_primitive_representative_is_found_on_the_torus(torus_ctx):
    result = primitive_representative(torus_ctx, parse_form("(12|3)", 3))
    assert result.feasible
    assert result.witness == parse_form("(12|3)", 3)
    assert not torus_ctx.metric.form.wedge(result.witness)

    for search in ("bott-chern", "dolbeault"):
        with pytest.raises(NotPrimitiveError) as raised:
            primitive_representative(torus_ctx, parse_form("(12|1)", 3), search)
        assert raised.value.image


def test_primitive_representative_rejects_off_diagonal_bidegrees(torus_ctx):
    with pytest.raises(BidegreeError):
        primitive_representative(torus_ctx, parse_form("(1|1)", 3))


def test_l_omega_ignores_the_choice_of_representatives(s3xs3, s3xs3_ctx, random_form, rng):
    P = s3xs3.presentation
    gamma = parse_form(S3XS3_GAMMA, 3)
    for _ in range(20):
        beta = random_form(P, 1, 0)
        beta1 = random_form(P, 0, 1)
        beta2 = random_form(P, 1, 0)
        assert l_omega_independence_check(s3xs3_ctx, gamma, beta, beta1, beta2).passed


def test_torus_primitive_classes(torus_ctx):
    primitive = primitive_class_space(torus_ctx, (2, 1))
    assert primitive.source_dimension == 9
    assert primitive.image_rank == 3
    assert primitive.dimension == 6
    assert primitive.checks.passed
    assert lefschetz_class_map(torus_ctx, (2, 1)).rank == 3
    with pytest.raises(BidegreeError):
        primitive_class_space(torus_ctx, (1, 1))


def test_holomorphic_volumes(torus, s3xs3):
    volume = holomorphic_volume(torus.presentation)
    assert volume.form == parse_form("(123|)", 3)
    assert holomorphic_volume(s3xs3.presentation) is None
    assert s3xs3.presentation.dbar(parse_form("(123|)", 3)) == parse_form("(123|3)", 3).scale(scalar(-1, 1))
    with pytest.raises(MissingVolumeError):
        require_volume(s3xs3.presentation, None)
    with pytest.raises(MissingVolumeError):
        HolomorphicVolume.check(torus.presentation, parse_form("(12|3)", 3))


def test_wedge_with_the_volume_is_an_isomorphism_on_the_torus(torus):
    volume = holomorphic_volume(torus.presentation)
    assert [wedge_u_rank(torus.presentation, volume, q) for q in range(4)] == [1, 3, 3, 1]


def test_calabi_yau_map(torus):
    volume = holomorphic_volume(torus.presentation)
    image = calabi_yau_map(torus.metric, parse_vector_form("(|1)Z1", 3), volume)
    assert image.feasible
    assert image.contraction == parse_form("(23|1)", 3)
    assert image.form == image.contraction
    assert image.coordinates


def test_calabi_yau_map_requires_dbar_closed_vectors(s3xs3):
    with pytest.raises(NotClosedError):
        calabi_yau_map(s3xs3.metric, parse_vector_form("(|3)Z1", 3), HolomorphicVolume(parse_form("(123|)", 3)))


def test_torus_polarised_tangent_space(torus, torus_ctx):
    group = vector_dolbeault(torus.presentation, 1)
    assert group.dimension == 9

    tangent = polarised_tangent_space(torus_ctx)
    assert tangent.ambient_dimension == 9
    assert tangent.dimension == 6
    assert tangent.aeppli_dimension == 6
    assert tangent.checks.passed

    assert tangent_isomorphism_check(torus_ctx, holomorphic_volume(torus.presentation), tangent).passed


def test_wedge_with_the_calabi_yau_image_matches_the_contracted_class(torus, torus_ctx, random_vector_form):
    P = torus.presentation
    volume = holomorphic_volume(P)
    nonzero = 0
    for _ in range(CASES // 4):
        theta = random_vector_form(P, 1)
        assert not P.dbar_vector(theta)
        assert lefschetz_contraction_identity(torus_ctx, volume, theta)
        nonzero += bool(contract(theta, torus_ctx.zeta))
    assert nonzero


def test_torus_tangent_directions_polarise_the_kahler_class(torus, torus_ctx):
    tangent = polarised_tangent_space(torus_ctx)
    for theta in tangent.basis:
        assert not contract(theta, torus_ctx.zeta)


def test_lefschetz_split_of_random_forms(torus, s3xs3, random_form, rng):
    for parsed in (torus, s3xs3):
        metric = parsed.metric
        for _ in range(CASES // 2):
            v = random_form(parsed.presentation, 2, 1)
            split = lefschetz_split(metric, v)
            assert split.checks.passed, split.checks.to_list()
            assert split.primitive + split.omega_part == v
            assert split.zeta.is_of_bidegree(1, 0) or not split.zeta


def test_lefschetz_split_rejects_other_bidegrees(torus):
    with pytest.raises(BidegreeError):
        lefschetz_split(torus.metric, parse_form("(1|12)", 3))


def test_vector_dolbeault_reduction(torus):
    group = vector_dolbeault(torus.presentation, 1)
    theta = parse_vector_form("(|1)Z1 + 2(|3)Z2", 3)
    coordinates = group.reduce(theta)
    assert coordinates
    assert group.contains(theta)
    assert not group.reduce(theta.scale(scalar(0)))
