from fractions import Fraction

import pytest

from app.core.config import get_settings
from app.services.exactnum_service import LaurentPoly
from app.services.fspec_service import FSpec, parse_fspec, parse_t, table_fspec

TABLE_VALUES = ["3/2", "-2", "5", "7/3", "1/4", "-3", "9/5", "2", "11/7", "-1/2", "4", "13/6"]

T_VALUES = ["1", "3/2", "symbolic"]


def random_table() -> FSpec:
    return table_fspec([Fraction(v) for v in TABLE_VALUES], source="fixed-random")


def spec_matrix() -> list[tuple[FSpec, LaurentPoly]]:
    matrix = []
    for text in ("linear:1,0", "linear:2,1"):
        for t in T_VALUES:
            matrix.append((parse_fspec(text), parse_t(t)))
    matrix.append((parse_fspec("qpow:1"), parse_t("1")))
    matrix.append((random_table(), parse_t("1")))
    return matrix


MATRIX_IDS = [
    "n-t1",
    "n-t3/2",
    "n-tsym",
    "2n+1-t1",
    "2n+1-t3/2",
    "2n+1-tsym",
    "qpow-t1",
    "table-t1",
]


@pytest.fixture(params=spec_matrix(), ids=MATRIX_IDS)
def configuration(request: pytest.FixtureRequest) -> tuple[FSpec, LaurentPoly]:
    return request.param


@pytest.fixture
def classical() -> FSpec:
    return parse_fspec("linear:1,0")


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch: pytest.MonkeyPatch):
    for name in ("FSTIRLING_MAX_N", "FSTIRLING_ORACLE_CAP", "FSTIRLING_LOG_LEVEL", "FSTIRLING_EULER_TERMS"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def table_spec() -> FSpec:
    return random_table()


def verify_matrix() -> list[tuple[FSpec, LaurentPoly]]:
    extra = [
        (parse_fspec("qpow:1"), parse_t("-2")),
        (parse_fspec("qpow:1"), parse_t("3/2")),
        (parse_fspec("qpow:1"), parse_t("4")),
        (parse_fspec("linear:1,0"), parse_t("-2")),
    ]
    return spec_matrix() + extra


VERIFY_IDS = MATRIX_IDS + ["qpow-t-2", "qpow-t3/2", "qpow-t4", "n-t-2"]


@pytest.fixture(params=verify_matrix(), ids=VERIFY_IDS)
def verify_configuration(request: pytest.FixtureRequest) -> tuple[FSpec, LaurentPoly]:
    return request.param
