import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from app.core.errors import ConfigError, DomainError
from app.services.exactnum_service import LaurentPoly
from app.services.fspec_service import (
    FKind,
    eval_f,
    parse_fspec,
    parse_t,
    render_fspec,
    render_t,
    t_roots,
    table_fspec,
    validate_configuration,
    value_at_zero,
)


def test_parse_linear_and_poly() -> None:
    spec = parse_fspec("linear:2,1")
    assert spec.kind is FKind.LINEAR
    assert eval_f(spec, 3) == 7
    assert render_fspec(spec) == "linear:2,1"
    poly = parse_fspec("poly:1,0,1")
    assert eval_f(poly, 2) == 5
    assert poly.degree == 2


def test_linear_evaluation_on_random_parameters() -> None:
    rng = random.Random(2024)
    for _ in range(10_000):
        alpha = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
        beta = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
        n = rng.randint(1, 60)
        if alpha * n + beta == 0:
            continue
        spec = parse_fspec(f"linear:{alpha},{beta}")
        assert eval_f(spec, n) == alpha * n + beta
    info = eval_f.cache_info()
    assert info.maxsize == 4096
    assert info.currsize <= 4096


def test_qpow_is_symbolic_in_q() -> None:
    spec = parse_fspec("qpow:1")
    assert spec.is_symbolic
    assert eval_f(spec, 2) == LaurentPoly.monomial(3, 1, "q")
    assert value_at_zero(spec) == LaurentPoly.monomial(1, 1, "q")
    numeric = parse_fspec("qpow:2,0")
    assert eval_f(numeric, 3) == 8


@pytest.mark.parametrize("text", ["linear:3/2,-1", "poly:1,0,-2/3", "qpow:1", "qpow:-2", "qpow:2,0", "qpow:1/3,-1"])
def test_render_parses_back_to_the_same_spec(text: str) -> None:
    spec = parse_fspec(text)
    assert render_fspec(spec) == text
    assert parse_fspec(render_fspec(spec)) == spec


def test_table_render_parses_back(tmp_path: Path) -> None:
    rng = random.Random(5)
    values = [str(Fraction(rng.randint(1, 30), rng.randint(1, 7)) * rng.choice([1, -1])) for _ in range(12)]
    path = tmp_path / "values.json"
    path.write_text(json.dumps(values), encoding="utf-8")
    spec = parse_fspec(f"table:{path}")
    again = parse_fspec(render_fspec(spec))
    assert again == spec
    assert [eval_f(again, n) for n in range(1, 13)] == [Fraction(v) for v in values]


@pytest.mark.parametrize(
    "text",
    ["linear:1", "linear:a,b", "cubic:1,2", "qpow:1/2", "qpow:0,1", "linear:", "poly:1,,2"],
)
def test_malformed_specifications_raise_config_error(text: str) -> None:
    with pytest.raises(ConfigError):
        parse_fspec(text)


def test_table_from_file(tmp_path: Path) -> None:
    path = tmp_path / "f.json"
    path.write_text(json.dumps(["1/2", 3, "-4"]), encoding="utf-8")
    spec = parse_fspec(f"table:{path}")
    assert eval_f(spec, 1) == Fraction(1, 2)
    assert eval_f(spec, 3) == -4
    with pytest.raises(DomainError):
        eval_f(spec, 4)
    assert value_at_zero(spec) is None


def test_table_file_errors(tmp_path: Path) -> None:
    zero = tmp_path / "zero.json"
    zero.write_text("[1, 0, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        parse_fspec(f"table:{zero}")
    with pytest.raises(ConfigError):
        parse_fspec(f"table:{tmp_path / 'missing.json'}")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        parse_fspec(f"table:{broken}")
    with pytest.raises(ConfigError):
        table_fspec([1, 0])


def test_zero_value_raises_on_first_use() -> None:
    spec = parse_fspec("linear:1,-2")
    assert eval_f(spec, 1) == -1
    with pytest.raises(DomainError):
        eval_f(spec, 2)
    with pytest.raises(DomainError):
        eval_f(spec, 0)


def test_parse_t_and_configuration_checks() -> None:
    assert parse_t("3/2") == Fraction(3, 2)
    symbolic = parse_t("symbolic")
    assert symbolic == LaurentPoly.monomial(1)
    assert render_t(symbolic) == "symbolic"
    with pytest.raises(ConfigError):
        parse_t("0")
    with pytest.raises(ConfigError):
        validate_configuration(parse_fspec("qpow:1"), symbolic)
    validate_configuration(parse_fspec("qpow:1"), parse_t("1"))


def test_t_roots_exact_and_substituted() -> None:
    exact = t_roots(parse_t("4"), [1, 2])
    assert exact.exact
    assert exact.root(2) == 2
    substituted = t_roots(parse_t("3/2"), [2, 3])
    assert not substituted.exact
    assert substituted.t == LaurentPoly.monomial(6, 1, "u")
    assert substituted.root(3) == LaurentPoly.monomial(2, 1, "u")
    symbolic = t_roots(parse_t("symbolic"), [2])
    assert symbolic.root(2) == LaurentPoly.monomial(1, 1, "u")
    assert symbolic.t == LaurentPoly.monomial(2, 1, "u")
    with pytest.raises(DomainError):
        exact.root(5)
    with pytest.raises(DomainError):
        t_roots(parse_t("4"), [0, 2])


def test_t_roots_negative_t() -> None:
    odd = t_roots(parse_t("-8"), [1, 3])
    assert odd.exact
    assert odd.root(3) == -2
    even = t_roots(parse_t("-2"), [1, 2])
    assert not even.exact
    assert even.t == LaurentPoly.monomial(2, 1, "u")
    assert even.root(2) == LaurentPoly.monomial(1, 1, "u")
