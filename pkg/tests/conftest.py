import random
from typing import Callable

import pytest

from sktpol.models.coframe import Form, VectorForm
from sktpol.models.exact import Scalar, scalar
from sktpol.models.polarisation import SktContext
from sktpol.parsers.builtin_manifolds import load_builtin
from sktpol.parsers.manifold_parser import ParsedManifold

SEED = 20240517


@pytest.fixture(scope="session")
def torus() -> ParsedManifold:
    return load_builtin("torus3")


@pytest.fixture(scope="session")
def iwasawa() -> ParsedManifold:
    return load_builtin("iwasawa")


@pytest.fixture(scope="session")
def s3xs3() -> ParsedManifold:
    return load_builtin("s3xs3-calabi-eckmann")


@pytest.fixture(scope="session")
def torus_ctx(torus) -> SktContext:
    return SktContext.build(torus.metric)


@pytest.fixture(scope="session")
def s3xs3_ctx(s3xs3) -> SktContext:
    return SktContext.build(s3xs3.metric)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(SEED)


def random_scalar(rng: random.Random, bound: int = 3) -> Scalar:
    return scalar(rng.randint(-bound, bound), rng.randint(-bound, bound))


@pytest.fixture
def random_form(rng) -> Callable[..., Form]:
    """Random Gaussian-integer combination of the monomials of one bidegree"""

    def build(presentation, p: int, q: int, density: float = 0.5) -> Form:
        terms = {}
        for m in presentation.space(p, q).monomials:
            if rng.random() < density:
                terms[m] = random_scalar(rng)
        return Form(presentation.n, terms)

    return build


@pytest.fixture
def random_vector_form(rng) -> Callable[..., VectorForm]:
    def build(presentation, q: int = 1, density: float = 0.4) -> VectorForm:
        n = presentation.n
        components = []
        for _ in range(n):
            terms = {}
            for m in presentation.space(0, q).monomials:
                if rng.random() < density:
                    terms[m] = random_scalar(rng)
            components.append(Form(n, terms))
        return VectorForm(n, q, components)

    return build
