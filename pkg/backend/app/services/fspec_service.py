from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from sympy import integer_nthroot

from app.core.errors import ConfigError, DomainError
from app.services.exactnum_service import LaurentPoly, format_rational, parse_rational

_logger = logging.getLogger(__name__)

SYMBOLIC_T = "symbolic"


class FKind(str, Enum):
    LINEAR = "linear"
    POLY = "poly"
    QPOW = "qpow"
    TABLE = "table"


@dataclass(frozen=True)
class FSpec:
    kind: FKind
    params: tuple[Fraction, ...]
    source: str = ""
    symbol: str = "q"

    @property
    def is_symbolic(self) -> bool:
        return self.kind is FKind.QPOW and len(self.params) == 1

    @property
    def is_polynomial(self) -> bool:
        return self.kind in (FKind.LINEAR, FKind.POLY)

    @property
    def degree(self) -> int | None:
        if self.kind is FKind.LINEAR:
            return 1 if self.params[0] != 0 else 0
        if self.kind is FKind.POLY:
            nonzero = [i for i, c in enumerate(self.params) if c != 0]
            return nonzero[-1] if nonzero else 0
        return None


def _parse_values(body: str, expected: int | None, text: str) -> tuple[Fraction, ...]:
    parts = [part for part in body.split(",")]
    if any(not part.strip() for part in parts):
        raise ConfigError(f"Empty parameter in f specification {text!r}.")
    if expected is not None and len(parts) != expected:
        raise ConfigError(f"{text!r} needs {expected} parameter(s), got {len(parts)}.")
    return tuple(parse_rational(part) for part in parts)


def _require_integer(value: Fraction, text: str) -> None:
    if value.denominator != 1:
        raise ConfigError(f"Exponent offset in {text!r} must be an integer.")


def _load_table(path_text: str) -> tuple[Fraction, ...]:
    path = Path(path_text)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"Cannot read table file {path_text!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Table file {path_text!r} is not valid JSON.") from exc
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"Table file {path_text!r} must hold a non-empty JSON array.")
    values = tuple(parse_rational(str(item)) for item in raw)
    for index, value in enumerate(values, start=1):
        if value == 0:
            raise ConfigError(f"Table file {path_text!r} has f({index}) = 0.")
    return values


def table_fspec(values: Sequence[Fraction | int | str], source: str = "<inline>") -> FSpec:
    parsed = tuple(v if isinstance(v, Fraction) else parse_rational(str(v)) for v in values)
    if not parsed:
        raise ConfigError("A table f needs at least one value.")
    if any(value == 0 for value in parsed):
        raise ConfigError("A table f may not contain zero values.")
    return FSpec(FKind.TABLE, parsed, source)


def parse_fspec(text: str) -> FSpec:
    kind_text, sep, body = text.strip().partition(":")
    if not sep or not body.strip():
        raise ConfigError(f"Malformed f specification {text!r}; expected '<kind>:<params>'.")
    try:
        kind = FKind(kind_text.strip().lower())
    except ValueError as exc:
        raise ConfigError(f"Unknown f kind {kind_text!r}.") from exc

    if kind is FKind.LINEAR:
        return FSpec(kind, _parse_values(body, 2, text))
    if kind is FKind.POLY:
        return FSpec(kind, _parse_values(body, None, text))
    if kind is FKind.QPOW:
        params = _parse_values(body, None, text)
        if len(params) == 1:
            _require_integer(params[0], text)
        elif len(params) == 2:
            if params[0] == 0:
                raise ConfigError(f"q-power base in {text!r} must be nonzero.")
            _require_integer(params[1], text)
        else:
            raise ConfigError(f"{text!r} needs 'qpow:<offset>' or 'qpow:<base>,<offset>'.")
        return FSpec(kind, params)
    path = body.strip()
    return FSpec(kind, _load_table(path), path)


def render_fspec(spec: FSpec) -> str:
    if spec.kind is FKind.TABLE:
        return f"table:{spec.source}"
    return f"{spec.kind.value}:" + ",".join(format_rational(p) for p in spec.params)


@lru_cache(maxsize=4096)
def eval_f(spec: FSpec, n: int) -> LaurentPoly:
    if n < 1:
        raise DomainError(f"f is defined on positive integers, got n={n}.")
    if spec.kind is FKind.LINEAR:
        alpha, beta = spec.params
        value = LaurentPoly.constant(alpha * n + beta)
    elif spec.kind is FKind.POLY:
        value = LaurentPoly.constant(sum(c * n**i for i, c in enumerate(spec.params)))
    elif spec.kind is FKind.QPOW:
        if spec.is_symbolic:
            value = LaurentPoly.monomial(n + int(spec.params[0]), 1, spec.symbol)
        else:
            base, offset = spec.params
            value = LaurentPoly.constant(base ** (n + int(offset)))
    else:
        if n > len(spec.params):
            raise DomainError(f"f({n}) is outside the table of length {len(spec.params)}.")
        value = LaurentPoly.constant(spec.params[n - 1])
    if value.is_zero():
        raise DomainError(f"f({n}) = 0 for {render_fspec(spec)}.")
    return value


def value_at_zero(spec: FSpec) -> LaurentPoly | None:
    """f(0) from the closed form, or None for tables."""
    if spec.kind is FKind.LINEAR:
        return LaurentPoly.constant(spec.params[1])
    if spec.kind is FKind.POLY:
        return LaurentPoly.constant(spec.params[0])
    if spec.kind is FKind.QPOW:
        if spec.is_symbolic:
            return LaurentPoly.monomial(int(spec.params[0]), 1, spec.symbol)
        base, offset = spec.params
        return LaurentPoly.constant(base ** int(offset))
    return None


def parse_t(text: str) -> LaurentPoly:
    cleaned = text.strip().lower()
    if cleaned == SYMBOLIC_T:
        return LaurentPoly.monomial(1, 1, "t")
    value = parse_rational(cleaned)
    if value == 0:
        raise ConfigError("t must be nonzero.")
    return LaurentPoly.constant(value)


def render_t(t: LaurentPoly) -> str:
    if t.is_constant():
        return format_rational(t.constant_value())
    return SYMBOLIC_T


def validate_configuration(spec: FSpec, t: LaurentPoly) -> None:
    if spec.is_symbolic and not t.is_constant():
        raise ConfigError("A symbolic f requires a numeric t; bivariate coefficients are not supported.")
    if not t.is_constant() and not t.is_monomial():
        raise ConfigError(f"t must be a constant or a single monomial, got {t}.")


def _rational_root(value: Fraction, degree: int) -> Fraction | None:
    if value < 0:
        if degree % 2 == 0:
            return None
        root = _rational_root(-value, degree)
        return -root if root is not None else None
    num, num_exact = integer_nthroot(value.numerator, degree)
    den, den_exact = integer_nthroot(value.denominator, degree)
    if num_exact and den_exact:
        return Fraction(int(num), int(den))
    return None


@dataclass(frozen=True)
class TRoots:
    """t and its requested roots expressed over one common variable."""

    t: LaurentPoly
    roots: dict[int, LaurentPoly] = field(hash=False)
    exact: bool = True

    def root(self, degree: int) -> LaurentPoly:
        try:
            return self.roots[degree]
        except KeyError as exc:
            raise DomainError(f"No root of degree {degree} was prepared.") from exc


def t_roots(t: LaurentPoly, degrees: Sequence[int], var: str = "u") -> TRoots:
    """Express t and t^(1/p) for every p in degrees without fractional exponents.

    Numeric t keeps exact rational roots when they all exist. Otherwise t is
    rewritten as u^(e*L) with L the lcm of the degrees, so t^(1/p) = u^(e*L/p).
    The rewrite is formal, so a negative t is handled the same way.
    """
    degrees = sorted(set(degrees))
    if any(p < 1 for p in degrees):
        raise DomainError("Root degrees must be positive.")
    if t.is_constant():
        value = t.constant_value()
        roots = {p: _rational_root(value, p) for p in degrees}
        if all(r is not None for r in roots.values()):
            return TRoots(t, {p: LaurentPoly.constant(r) for p, r in roots.items()})
        exponent = 1
        _logger.debug("t=%s has irrational roots; substituting t = %s^L", value, var)
    else:
        ((exponent, coeff),) = t.terms.items()
        if coeff != 1:
            raise DomainError(f"Symbolic t must be a bare power, got {t}.")
    lcm = math.lcm(*degrees)
    base = LaurentPoly.monomial(exponent * lcm, 1, var)
    roots = {p: LaurentPoly.monomial(exponent * lcm // p, 1, var) for p in degrees}
    return TRoots(base, roots, exact=False)
