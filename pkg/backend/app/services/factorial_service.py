from __future__ import annotations

from dataclasses import dataclass

from app.core.errors import DomainError
from app.services.exactnum_service import Coefficient, LaurentPoly, poly_product_expand
from app.services.fspec_service import FSpec, eval_f

ONE = LaurentPoly.constant(1)


@dataclass(frozen=True)
class PochhammerExpansion:
    n: int
    coeffs: tuple[LaurentPoly, ...]

    def coefficient(self, power: int) -> LaurentPoly:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return LaurentPoly()

    def evaluate(self, x: LaurentPoly) -> LaurentPoly:
        total = LaurentPoly()
        for coeff in reversed(self.coeffs):
            total = total * x + coeff
        return total


def _as_poly(value: Coefficient) -> LaurentPoly:
    return value if isinstance(value, LaurentPoly) else LaurentPoly.constant(value)


def pochhammer_roots(spec: FSpec, n: int, t: LaurentPoly) -> list[LaurentPoly]:
    return [eval_f(spec, k) * t ** (-k) for k in range(1, n)]


def pochhammer_poly(spec: FSpec, n: int, t: LaurentPoly = ONE) -> PochhammerExpansion:
    """Coefficients of prod_{k=1}^{n-1} (x + f(k) t^-k), lowest power of x first."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}.")
    coeffs = poly_product_expand(pochhammer_roots(spec, n, t))
    return PochhammerExpansion(n, tuple(_as_poly(c) for c in coeffs))


def bang_f(spec: FSpec, n: int) -> LaurentPoly:
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}.")
    result = ONE
    for j in range(1, n + 1):
        result = result * eval_f(spec, j)
    return result


def bang_ft(spec: FSpec, n: int, t: LaurentPoly = ONE) -> LaurentPoly:
    return bang_f(spec, n) * t ** (-(n * (n + 1) // 2))
