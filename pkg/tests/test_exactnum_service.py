import random
from fractions import Fraction

import pytest

from app.core.errors import ConfigError, CyclotomicError, DomainError, TruncationError, VariableMismatchError
from app.services.exactnum_service import (
    CyclotomicElem,
    LaurentPoly,
    TruncSeries,
    compose,
    cyclo_mul,
    exact_sum,
    exp_series,
    format_rational,
    parse_rational,
    poly_product_expand,
    series_div,
    series_mul,
)

t = LaurentPoly.monomial(1)


def test_parse_and_format_rational() -> None:
    assert parse_rational(" 3/6 ") == Fraction(1, 2)
    assert format_rational(Fraction(-4, 2)) == "-2"
    assert format_rational(Fraction(7, 3)) == "7/3"
    with pytest.raises(ConfigError):
        parse_rational("abc")
    with pytest.raises(ConfigError):
        parse_rational("1/0")


def test_exact_sum_matches_pairwise_sum() -> None:
    rng = random.Random(7)
    terms = [Fraction(rng.randint(-50, 50), rng.randint(1, 40)) for _ in range(200)]
    assert exact_sum(terms) == sum(terms, Fraction(0))
    assert exact_sum([]) == 0
    odd_length = [Fraction(1, n * n) for n in range(1, 34)]
    assert exact_sum(odd_length) == sum(odd_length, Fraction(0))
    assert exact_sum([Fraction(2, 3)]) == Fraction(2, 3)


def test_laurent_arithmetic_and_rendering() -> None:
    poly = 6 * t**-6
    assert str(poly) == "6*t^-6"
    assert str(t + Fraction(1, 2) * t**2) == "t + 1/2*t^2"
    assert str(1 - t) == "1 - t"
    assert (t + 1) * (t - 1) == t**2 - 1
    assert (t**3 / t) == t**2
    assert (2 / t).coefficient(-1) == 2


def test_laurent_constants_behave_like_rationals() -> None:
    half = LaurentPoly.constant(Fraction(1, 2))
    assert half == Fraction(1, 2)
    assert hash(half) == hash(Fraction(1, 2))
    assert LaurentPoly.constant(3, "q") == LaurentPoly.constant(3, "t")
    assert (half * LaurentPoly.monomial(2, 1, "q")).var == "q"


def test_laurent_rejects_mixed_variables_and_bad_inverse() -> None:
    q = LaurentPoly.monomial(1, 1, "q")
    with pytest.raises(VariableMismatchError):
        _ = t + q
    with pytest.raises(DomainError):
        (t + 1).inverse()
    with pytest.raises(DomainError):
        (t**-1).evaluate(0)


def test_laurent_evaluate_and_json() -> None:
    poly = 3 * t**2 - t**-1
    assert poly.evaluate(2) == Fraction(23, 2)
    assert LaurentPoly.from_json(poly.to_json()) == poly
    with pytest.raises(ConfigError):
        LaurentPoly.from_json({"terms": {}})


def test_poly_product_expand_gives_classical_row() -> None:
    assert poly_product_expand([1, 2, 3]) == [6, 11, 6, 1]


def test_cyclotomic_roots_of_unity_sum_to_zero() -> None:
    total = CyclotomicElem.scalar(3, 0)
    for m in range(3):
        total = total + CyclotomicElem.zeta_power(3, m)
    assert total.is_zero()
    zeta = CyclotomicElem.zeta_power(5, 1)
    power = CyclotomicElem.scalar(5, 1)
    for _ in range(5):
        power = power * zeta
    assert power == CyclotomicElem.scalar(5, 1)
    assert power.to_scalar() == 1


def test_cyclo_mul_conjugate_pair_is_rational() -> None:
    left = CyclotomicElem.scalar(3, 2) - CyclotomicElem.zeta_power(3, 1)
    right = CyclotomicElem.scalar(3, 2) - CyclotomicElem.zeta_power(3, 2)
    product = cyclo_mul(left, right)
    assert product.is_scalar()
    assert product.to_scalar() == 7
    with pytest.raises(CyclotomicError):
        cyclo_mul(left, CyclotomicElem.scalar(5, 1))


def test_cyclotomic_rejects_composite_order_and_non_scalar() -> None:
    with pytest.raises(CyclotomicError):
        CyclotomicElem.scalar(4, 1)
    with pytest.raises(CyclotomicError):
        CyclotomicElem.zeta_power(3, 1).to_scalar()
    with pytest.raises(CyclotomicError):
        _ = CyclotomicElem.scalar(3, 1) + CyclotomicElem.scalar(5, 1)


def test_series_division_cancels_shared_valuation() -> None:
    order = 4
    grown = exp_series(order + 1)
    numerator = grown.shift(1).truncate(order + 1)
    kernel = series_div(numerator, grown - 1)
    assert kernel.order == order
    assert list(kernel.coeffs[:3]) == [1, Fraction(1, 2), Fraction(1, 12)]


def test_bernoulli_series_without_exponential_factor() -> None:
    order = 3
    z = TruncSeries.variable(order + 1)
    kernel = series_div(z, exp_series(order + 1) - 1)
    assert list(kernel.coeffs[:3]) == [1, Fraction(-1, 2), Fraction(1, 12)]


def test_series_reads_past_order_raise() -> None:
    series = TruncSeries.one(2)
    assert series[-1] == 0
    with pytest.raises(TruncationError):
        _ = series[3]
    with pytest.raises(TruncationError):
        series.truncate(5)
    with pytest.raises(TruncationError):
        series_div(TruncSeries.one(2), TruncSeries.from_polynomial([0], 2))


def test_series_power_and_derivative() -> None:
    square = TruncSeries.from_polynomial([1, 1], 4) ** 2
    assert list(square.coeffs) == [1, 2, 1, 0, 0]
    assert list(exp_series(4).derivative().coeffs) == list(exp_series(3).coeffs)
    with pytest.raises(DomainError):
        _ = square**-1


def test_compose_with_geometric_inner() -> None:
    outer = TruncSeries.from_polynomial([1, 1], 3)
    inner = TruncSeries.from_polynomial([0, 1, 1], 3)
    assert list(compose(outer, inner).coeffs) == [1, 1, 1, 0]
    with pytest.raises(TruncationError):
        compose(outer, TruncSeries.one(3))


def test_series_with_laurent_coefficients() -> None:
    series = TruncSeries([1, t])
    squared = series * series
    assert squared[1] == 2 * t
    assert series.to_json()["coeffs"][1] == {"var": "t", "terms": {"1": "1"}}


def _random_laurent(rng: random.Random) -> LaurentPoly:
    terms = {rng.randint(-3, 3): Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(rng.randint(0, 4))}
    return LaurentPoly(terms)


def test_laurent_ring_axioms_on_random_triples() -> None:
    rng = random.Random(11)
    zero, one = LaurentPoly(), LaurentPoly.constant(1)
    for _ in range(1000):
        a, b, c = (_random_laurent(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a + zero == a
        assert a * one == a
        assert (a - a).is_zero()
        point = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))
        assert (a * b + c).evaluate(point) == a.evaluate(point) * b.evaluate(point) + c.evaluate(point)


def test_poly_product_expand_vanishes_at_negated_roots() -> None:
    rng = random.Random(13)
    for _ in range(200):
        roots = [Fraction(rng.randint(-12, 12), rng.randint(1, 5)) for _ in range(rng.randint(1, 6))]
        coeffs = poly_product_expand(roots)
        assert coeffs[-1] == 1
        poly = LaurentPoly(dict(enumerate(coeffs)), "x")
        for root in roots:
            assert poly.evaluate(-root) == 0


def test_series_division_undoes_multiplication() -> None:
    rng = random.Random(17)
    for _ in range(200):
        order = rng.randint(0, 6)
        a = TruncSeries([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(order + 1)])
        head = Fraction(rng.choice([-4, -3, -2, -1, 1, 2, 3, 4]), rng.randint(1, 5))
        b = TruncSeries([head] + [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(order)])
        assert series_div(series_mul(a, b), b) == a


def _conjugate(element: CyclotomicElem, power: int) -> CyclotomicElem:
    result = CyclotomicElem.scalar(element.order, 0)
    for index, coeff in enumerate(element.coords):
        result = result + CyclotomicElem.zeta_power(element.order, index * power, coeff)
    return result


@pytest.mark.parametrize("order", [2, 3, 5])
def test_cyclotomic_norm_is_rational(order: int) -> None:
    rng = random.Random(order)
    for _ in range(50):
        element = CyclotomicElem(order, [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(order - 1)])
        norm = CyclotomicElem.scalar(order, 1)
        for power in range(1, order):
            norm = cyclo_mul(norm, _conjugate(element, power))
        assert norm.is_scalar()
    a = Fraction(rng.randint(2, 9), rng.randint(1, 4))
    shifted = CyclotomicElem.scalar(order, a) - CyclotomicElem.zeta_power(order, 1)
    norm = CyclotomicElem.scalar(order, 1)
    for power in range(1, order):
        norm = cyclo_mul(norm, _conjugate(shifted, power))
    assert norm.to_scalar() == sum(a**i for i in range(order))
