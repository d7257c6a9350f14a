from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence, Union

from sympy import isprime

from app.core.errors import (
    ConfigError,
    CyclotomicError,
    DomainError,
    TruncationError,
    VariableMismatchError,
)

Scalar = Union[int, Fraction]


def parse_rational(text: str) -> Fraction:
    cleaned = text.strip()
    if not cleaned:
        raise ConfigError("Empty rational value.")
    try:
        return Fraction(cleaned)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"Invalid rational value: {text!r}") from exc


def format_rational(value: Scalar) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def exact_sum(terms: Iterable[Scalar]) -> Fraction:
    """Sum rationals by balanced pairwise reduction.

    Neighbouring terms are added level by level, so the large denominators only
    meet in the last few additions.
    """
    items = [Fraction(term) for term in terms]
    if not items:
        return Fraction(0)
    while len(items) > 1:
        paired = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


class LaurentPoly:
    """Finite Laurent polynomial in one formal variable with rational coefficients.

    Constants carry a variable name but adopt the other operand's variable in
    arithmetic, so ``LaurentPoly.constant(2) * t`` is a polynomial in ``t``.
    """

    __slots__ = ("var", "_terms", "_hash")

    def __init__(self, terms: Mapping[int, Scalar] | None = None, var: str = "t") -> None:
        cleaned: dict[int, Fraction] = {}
        for exponent, coeff in (terms or {}).items():
            value = Fraction(coeff)
            if value != 0:
                cleaned[int(exponent)] = value
        self.var = var
        self._terms = dict(sorted(cleaned.items()))
        self._hash: int | None = None

    @classmethod
    def constant(cls, value: Scalar, var: str = "t") -> LaurentPoly:
        return cls({0: value}, var)

    @classmethod
    def monomial(cls, exponent: int, coeff: Scalar = 1, var: str = "t") -> LaurentPoly:
        return cls({exponent: coeff}, var)

    @classmethod
    def coerce(cls, value: LaurentPoly | Scalar, var: str = "t") -> LaurentPoly:
        if isinstance(value, LaurentPoly):
            return value
        return cls.constant(value, var)

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def coefficient(self, exponent: int) -> Fraction:
        return self._terms.get(exponent, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {0}

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise DomainError(f"{self} is not a constant.")
        return self.coefficient(0)

    def rename(self, var: str) -> LaurentPoly:
        return LaurentPoly(self._terms, var)

    def evaluate(self, value: Scalar) -> Fraction:
        value = Fraction(value)
        if value == 0 and any(exponent < 0 for exponent in self._terms):
            raise DomainError("Cannot evaluate negative powers at zero.")
        return sum((coeff * value**exponent for exponent, coeff in self._terms.items()), Fraction(0))

    def _unify(self, other: LaurentPoly) -> str:
        if self.is_constant():
            return other.var
        if other.is_constant() or other.var == self.var:
            return self.var
        raise VariableMismatchError(f"Cannot combine polynomials in {self.var!r} and {other.var!r}.")

    def __add__(self, other: LaurentPoly | Scalar) -> LaurentPoly:
        if not isinstance(other, (LaurentPoly, int, Fraction)):
            return NotImplemented
        other = LaurentPoly.coerce(other, self.var)
        var = self._unify(other)
        merged = dict(self._terms)
        for exponent, coeff in other._terms.items():
            merged[exponent] = merged.get(exponent, Fraction(0)) + coeff
        return LaurentPoly(merged, var)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({e: -c for e, c in self._terms.items()}, self.var)

    def __sub__(self, other: LaurentPoly | Scalar) -> LaurentPoly:
        if not isinstance(other, (LaurentPoly, int, Fraction)):
            return NotImplemented
        return self + (-LaurentPoly.coerce(other, self.var))

    def __rsub__(self, other: Scalar) -> LaurentPoly:
        return LaurentPoly.coerce(other, self.var) - self

    def __mul__(self, other: LaurentPoly | Scalar) -> LaurentPoly:
        if isinstance(other, (int, Fraction)):
            scale = Fraction(other)
            return LaurentPoly({e: c * scale for e, c in self._terms.items()}, self.var)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        var = self._unify(other)
        product: dict[int, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                product[e1 + e2] = product.get(e1 + e2, Fraction(0)) + c1 * c2
        return LaurentPoly(product, var)

    __rmul__ = __mul__

    def inverse(self) -> LaurentPoly:
        if not self.is_monomial():
            raise DomainError(f"Only nonzero monomials are invertible, got {self}.")
        ((exponent, coeff),) = self._terms.items()
        return LaurentPoly({-exponent: 1 / coeff}, self.var)

    def __truediv__(self, other: LaurentPoly | Scalar) -> LaurentPoly:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DomainError("Division by zero.")
            return self * (1 / Fraction(other))
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Scalar) -> LaurentPoly:
        return LaurentPoly.coerce(other, self.var) * self.inverse()

    def __pow__(self, exponent: int) -> LaurentPoly:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        if self.is_monomial():
            ((e, c),) = self._terms.items()
            return LaurentPoly({e * exponent: c**exponent}, self.var)
        result = LaurentPoly.constant(1, self.var)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.coefficient(0) == other
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self._terms != other._terms:
            return False
        return self.is_constant() or self.var == other.var

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.coefficient(0))
            else:
                self._hash = hash((self.var, tuple(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for exponent, coeff in self._terms.items():
            magnitude = abs(coeff)
            if exponent == 0:
                body = format_rational(magnitude)
            else:
                power = self.var if exponent == 1 else f"{self.var}^{exponent}"
                body = power if magnitude == 1 else f"{format_rational(magnitude)}*{power}"
            if not pieces:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f"- {body}" if coeff < 0 else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def to_json(self) -> dict[str, Any]:
        return {
            "var": self.var,
            "terms": {str(e): format_rational(c) for e, c in self._terms.items()},
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> LaurentPoly:
        try:
            terms = {int(e): parse_rational(str(c)) for e, c in payload["terms"].items()}
            return cls(terms, str(payload["var"]))
        except (KeyError, AttributeError, ValueError) as exc:
            raise ConfigError(f"Invalid Laurent polynomial payload: {payload!r}") from exc


Coefficient = Union[LaurentPoly, Fraction]


def _normalize(value: LaurentPoly | Scalar) -> Coefficient:
    if isinstance(value, LaurentPoly):
        return value
    return Fraction(value)


def _is_zero(value: Coefficient) -> bool:
    return value == 0


def _invert(value: Coefficient) -> Coefficient:
    if isinstance(value, LaurentPoly):
        if not value.is_monomial():
            raise TruncationError(f"Leading coefficient {value} is not invertible.")
        return value.inverse()
    if value == 0:
        raise TruncationError("Divisor has a zero leading coefficient.")
    return 1 / value


def poly_product_expand(roots: Sequence[LaurentPoly | Scalar]) -> list[Coefficient]:
    """Coefficients c_0..c_m of prod_i (x + r_i), lowest power first."""
    coeffs: list[Coefficient] = [Fraction(1)]
    for root in roots:
        root = _normalize(root)
        shifted: list[Coefficient] = [Fraction(0)] + coeffs
        for index, coeff in enumerate(coeffs):
            shifted[index] = shifted[index] + root * coeff
        coeffs = shifted
    return coeffs


class CyclotomicElem:
    """Element of Q[t^{+-1}][zeta_p] for prime p, stored in the basis 1..zeta^(p-2)."""

    __slots__ = ("order", "coords")

    def __init__(self, order: int, coords: Sequence[LaurentPoly | Scalar]) -> None:
        if len(coords) != order - 1:
            raise CyclotomicError(f"Expected {order - 1} coordinates, got {len(coords)}.")
        self.order = order
        self.coords: tuple[Coefficient, ...] = tuple(_normalize(c) for c in coords)

    @classmethod
    def scalar(cls, order: int, value: LaurentPoly | Scalar) -> CyclotomicElem:
        _check_prime(order)
        return cls(order, [value] + [Fraction(0)] * (order - 2))

    @classmethod
    def zeta_power(cls, order: int, exponent: int, coeff: LaurentPoly | Scalar = 1) -> CyclotomicElem:
        _check_prime(order)
        full: list[Coefficient] = [Fraction(0)] * order
        full[exponent % order] = _normalize(coeff)
        return cls._reduce(order, full)

    @classmethod
    def _reduce(cls, order: int, full: Sequence[Coefficient]) -> CyclotomicElem:
        # zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))
        top = full[order - 1]
        if _is_zero(top):
            return cls(order, full[: order - 1])
        return cls(order, [c - top for c in full[: order - 1]])

    def _check_order(self, other: CyclotomicElem) -> None:
        if self.order != other.order:
            raise CyclotomicError(f"Order mismatch: {self.order} vs {other.order}.")

    def __add__(self, other: CyclotomicElem) -> CyclotomicElem:
        self._check_order(other)
        return CyclotomicElem(self.order, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: CyclotomicElem) -> CyclotomicElem:
        self._check_order(other)
        return CyclotomicElem(self.order, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> CyclotomicElem:
        return CyclotomicElem(self.order, [-c for c in self.coords])

    def __mul__(self, other: CyclotomicElem | LaurentPoly | Scalar) -> CyclotomicElem:
        if not isinstance(other, CyclotomicElem):
            value = _normalize(other)
            return CyclotomicElem(self.order, [c * value for c in self.coords])
        return cyclo_mul(self, other)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coords)

    def is_scalar(self) -> bool:
        return all(_is_zero(c) for c in self.coords[1:])

    def to_scalar(self) -> Coefficient:
        if not self.is_scalar():
            raise CyclotomicError(f"Element has nonzero zeta coordinates: {self}.")
        return self.coords[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CyclotomicElem):
            return NotImplemented
        return self.order == other.order and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.order, self.coords))

    def __repr__(self) -> str:
        parts = ", ".join(str(c) for c in self.coords)
        return f"CyclotomicElem(p={self.order}, [{parts}])"


def _check_prime(order: int) -> None:
    if not isprime(order):
        raise CyclotomicError(f"Cyclotomic arithmetic needs a prime order, got {order}.")


def cyclo_mul(a: CyclotomicElem, b: CyclotomicElem) -> CyclotomicElem:
    a._check_order(b)
    p = a.order
    full: list[Coefficient] = [Fraction(0)] * p
    for i, x in enumerate(a.coords):
        if _is_zero(x):
            continue
        for j, y in enumerate(b.coords):
            if _is_zero(y):
                continue
            slot = (i + j) % p
            full[slot] = full[slot] + x * y
    return CyclotomicElem._reduce(p, full)


class TruncSeries:
    """Truncated power series sum_{i<=order} c_i z^i; coefficients past the order are unknown."""

    __slots__ = ("var", "_coeffs")

    def __init__(self, coeffs: Sequence[LaurentPoly | Scalar], var: str = "z") -> None:
        if not coeffs:
            raise TruncationError("A truncated series needs at least one coefficient.")
        self.var = var
        self._coeffs: tuple[Coefficient, ...] = tuple(_normalize(c) for c in coeffs)

    @classmethod
    def one(cls, order: int, var: str = "z") -> TruncSeries:
        return cls([Fraction(1)] + [Fraction(0)] * order, var)

    @classmethod
    def variable(cls, order: int, var: str = "z") -> TruncSeries:
        coeffs: list[Scalar] = [Fraction(0)] * (order + 1)
        if order >= 1:
            coeffs[1] = Fraction(1)
        return cls(coeffs, var)

    @classmethod
    def from_polynomial(cls, coeffs: Sequence[LaurentPoly | Scalar], order: int, var: str = "z") -> TruncSeries:
        """Exact polynomial padded (or cut) to the requested order."""
        padded = list(coeffs[: order + 1])
        padded.extend([Fraction(0)] * (order + 1 - len(padded)))
        return cls(padded, var)

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple[Coefficient, ...]:
        return self._coeffs

    def __getitem__(self, index: int) -> Coefficient:
        if index < 0:
            return Fraction(0)
        if index > self.order:
            raise TruncationError(f"Coefficient {index} is past the truncation order {self.order}.")
        return self._coeffs[index]

    def __iter__(self) -> Iterator[Coefficient]:
        return iter(self._coeffs)

    def truncate(self, order: int) -> TruncSeries:
        if order > self.order:
            raise TruncationError(f"Cannot extend order {self.order} to {order}.")
        return TruncSeries(self._coeffs[: order + 1], self.var)

    def valuation(self) -> int | None:
        for index, coeff in enumerate(self._coeffs):
            if not _is_zero(coeff):
                return index
        return None

    def _check_var(self, other: TruncSeries) -> None:
        if self.var != other.var:
            raise VariableMismatchError(f"Series in {self.var!r} and {other.var!r} do not mix.")

    def __add__(self, other: TruncSeries | LaurentPoly | Scalar) -> TruncSeries:
        if not isinstance(other, TruncSeries):
            coeffs = list(self._coeffs)
            coeffs[0] = coeffs[0] + _normalize(other)
            return TruncSeries(coeffs, self.var)
        self._check_var(other)
        order = min(self.order, other.order)
        return TruncSeries([self._coeffs[i] + other._coeffs[i] for i in range(order + 1)], self.var)

    __radd__ = __add__

    def __neg__(self) -> TruncSeries:
        return TruncSeries([-c for c in self._coeffs], self.var)

    def __sub__(self, other: TruncSeries | LaurentPoly | Scalar) -> TruncSeries:
        if isinstance(other, TruncSeries):
            return self + (-other)
        return self + (-_normalize(other))

    def __mul__(self, other: TruncSeries | LaurentPoly | Scalar) -> TruncSeries:
        if isinstance(other, TruncSeries):
            return series_mul(self, other)
        value = _normalize(other)
        return TruncSeries([c * value for c in self._coeffs], self.var)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> TruncSeries:
        return series_int_pow(self, exponent)

    def __truediv__(self, other: TruncSeries | LaurentPoly | Scalar) -> TruncSeries:
        if isinstance(other, TruncSeries):
            return series_div(self, other)
        return self * _invert(_normalize(other))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.var == other.var and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.var, self._coeffs))

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self._coeffs)
        return f"TruncSeries({self.var}, order={self.order}, [{body}])"

    def derivative(self) -> TruncSeries:
        if self.order == 0:
            raise TruncationError("The derivative of an order-0 series has no known coefficients.")
        return TruncSeries([self._coeffs[i] * i for i in range(1, self.order + 1)], self.var)

    def shift(self, places: int) -> TruncSeries:
        """Multiply by var^places; the known range moves up with it."""
        return TruncSeries([Fraction(0)] * places + list(self._coeffs), self.var)

    def to_json(self) -> dict[str, Any]:
        return {
            "var": self.var,
            "order": self.order,
            "coeffs": [_coefficient_json(c) for c in self._coeffs],
        }


def _coefficient_json(value: Coefficient) -> Any:
    if isinstance(value, LaurentPoly):
        return value.to_json()
    return format_rational(value)


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    a._check_var(b)
    order = min(a.order, b.order)
    out: list[Coefficient] = [Fraction(0)] * (order + 1)
    for i in range(order + 1):
        x = a._coeffs[i]
        if _is_zero(x):
            continue
        for j in range(order + 1 - i):
            y = b._coeffs[j]
            if _is_zero(y):
                continue
            out[i + j] = out[i + j] + x * y
    return TruncSeries(out, a.var)


def series_int_pow(a: TruncSeries, exponent: int) -> TruncSeries:
    if exponent < 0:
        raise DomainError("Series powers must be non-negative; divide explicitly instead.")
    result = TruncSeries.one(a.order, a.var)
    base = a
    while exponent:
        if exponent & 1:
            result = series_mul(result, base)
        exponent >>= 1
        if exponent:
            base = series_mul(base, base)
    return result


def series_div(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    a._check_var(b)
    shared = b.valuation()
    if shared is None:
        raise TruncationError("Division by a series that is zero to its order.")
    if shared:
        if shared > a.order:
            raise TruncationError("Numerator order is below the divisor's valuation.")
        if any(not _is_zero(a._coeffs[index]) for index in range(shared)):
            raise TruncationError("Numerator does not share the divisor's leading zeros.")
        a = TruncSeries(a._coeffs[shared:], a.var)
        b = TruncSeries(b._coeffs[shared:], b.var)
    order = min(a.order, b.order)
    lead_inverse = _invert(b._coeffs[0])
    quotient: list[Coefficient] = []
    for i in range(order + 1):
        acc = a._coeffs[i]
        for j in range(1, i + 1):
            term = b._coeffs[j]
            if not _is_zero(term):
                acc = acc - term * quotient[i - j]
        quotient.append(acc * lead_inverse)
    return TruncSeries(quotient, a.var)


def exp_series(order: int, scale: Scalar = 1, var: str = "z") -> TruncSeries:
    """e^(scale*z) to the given order."""
    scale = Fraction(scale)
    return TruncSeries([scale**i / math.factorial(i) for i in range(order + 1)], var)


def compose(outer: TruncSeries, inner: TruncSeries) -> TruncSeries:
    """outer(inner(z)) for inner with zero constant term, by Horner's rule."""
    outer._check_var(inner)
    if not _is_zero(inner[0]):
        raise TruncationError("Composition needs an inner series with zero constant term.")
    order = min(outer.order, inner.order)
    inner = inner.truncate(order)
    result = TruncSeries.from_polynomial([outer[order]], order, inner.var)
    for index in range(order - 1, -1, -1):
        result = series_mul(result, inner) + outer[index]
    return result
