import pytest

from app import create_app
from services.dealer import setup_scheme
from services.presentation import (
    COXETER_INVOLUTIONS,
    Family,
    GroupPresentation,
    Relator,
    make_generators,
    word_from_codes,
)


@pytest.fixture
def app():
    return create_app({"TESTING": True, "WPSS_PARALLEL_TASKS": 1})


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def scheme_4_3():
    """Esquema Coxeter (4, 3): m = 6, k = 4"""
    return setup_scheme(4, 3, "coxeter", 7)


@pytest.fixture
def scheme_3_2():
    return setup_scheme(3, 2, "coxeter", 1)


@pytest.fixture
def type_a_presentation():
    """Fábrica de apresentações do tipo A_k (grupo simétrico S_{k+1}) com todos os pares"""
    def build(k: int) -> GroupPresentation:
        gens = make_generators([f"s{i + 1}" for i in range(k)])
        relators = []
        index = 1
        for i in range(k):
            for j in range(i + 1, k):
                order = 3 if j == i + 1 else 2
                relators.append(Relator(index, word_from_codes((i + 1, j + 1) * order, gens)))
                index += 1
        return GroupPresentation(gens, tuple(relators), Family.COXETER, (COXETER_INVOLUTIONS,))
    return build
