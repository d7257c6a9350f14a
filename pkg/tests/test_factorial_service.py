import random
from fractions import Fraction

import pytest

from app.core.errors import DomainError
from app.services.exactnum_service import LaurentPoly
from app.services.factorial_service import bang_f, bang_ft, pochhammer_poly, pochhammer_roots
from app.services.fspec_service import parse_fspec, parse_t


def test_classical_pochhammer_expansion() -> None:
    expansion = pochhammer_poly(parse_fspec("linear:1,0"), 4)
    assert list(expansion.coeffs) == [6, 11, 6, 1]
    assert expansion.coefficient(7) == 0
    assert expansion.evaluate(LaurentPoly.constant(1)) == 24


def test_factorials_for_odd_linear_f() -> None:
    spec = parse_fspec("linear:2,1")
    assert bang_f(spec, 0) == 1
    assert bang_f(spec, 3) == 3 * 5 * 7
    assert bang_ft(spec, 3, parse_t("2")) == Fraction(105, 64)


def test_symbolic_t_scales_each_factor() -> None:
    t = parse_t("symbolic")
    spec = parse_fspec("linear:1,0")
    assert bang_ft(spec, 3, t) == 6 * t**-6
    expansion = pochhammer_poly(spec, 3, t)
    assert expansion.coefficient(0) == 2 * t**-3
    assert expansion.coefficient(1) == t**-1 + 2 * t**-2


def test_negative_n_is_rejected() -> None:
    with pytest.raises(DomainError):
        bang_f(parse_fspec("linear:1,0"), -1)
    with pytest.raises(DomainError):
        pochhammer_poly(parse_fspec("linear:1,0"), -1)


def test_pochhammer_vanishes_at_each_root_and_has_factorial_constant(configuration) -> None:
    spec, t = configuration
    for n in range(1, 7):
        expansion = pochhammer_poly(spec, n, t)
        assert expansion.coefficient(n - 1) == 1
        assert expansion.coefficient(0) == bang_ft(spec, n - 1, t)
        for root in pochhammer_roots(spec, n, t):
            assert expansion.evaluate(-root).is_zero()


def test_pochhammer_on_random_linear_f() -> None:
    rng = random.Random(31)
    for _ in range(200):
        alpha = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        beta = Fraction(rng.randint(0, 9), rng.randint(1, 4))
        spec = parse_fspec(f"linear:{alpha},{beta}")
        t = LaurentPoly.constant(Fraction(rng.randint(1, 5), rng.randint(1, 5)))
        n = rng.randint(1, 6)
        expansion = pochhammer_poly(spec, n, t)
        assert expansion.coefficient(0) == bang_ft(spec, n - 1, t)
        x = LaurentPoly.constant(Fraction(rng.randint(-6, 6), rng.randint(1, 3)))
        product = LaurentPoly.constant(1)
        for k in range(1, n):
            product = product * (x + (alpha * k + beta) * t ** (-k))
        assert expansion.evaluate(x) == product
