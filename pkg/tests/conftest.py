import pytest

from starpir.gf import Field

# moduli for fields without a packaged default
EXTRA_MODULI = {
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 0, 1),
    (7, 2): (1, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
}


def make_field(q: int, m: int) -> Field:
    if m > 1 and (q, m) in EXTRA_MODULI:
        return Field(q, m, EXTRA_MODULI[(q, m)])
    return Field(q, m)


@pytest.fixture(scope="session")
def gf4():
    return Field(2, 2)


@pytest.fixture(scope="session")
def gf8():
    return Field(2, 3)


@pytest.fixture(scope="session")
def gf9():
    return Field(3, 2)


@pytest.fixture(scope="session")
def gf16():
    return Field(2, 4)


# every field with at most 81 elements used by the exhaustive axiom tests
SMALL_FIELD_PARAMS = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (5, 2), (7, 2)]


@pytest.fixture(scope="session", params=SMALL_FIELD_PARAMS, ids=lambda p: f"GF({p[0]}^{p[1]})")
def small_field(request):
    return make_field(*request.param)
