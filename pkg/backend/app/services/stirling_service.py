from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from app.core.config import get_settings
from app.core.errors import DomainError, OracleCapError
from app.schemas.report_schema import ReportCell, VerificationReport
from app.services.exactnum_service import LaurentPoly, TruncSeries, exp_series
from app.services.factorial_service import ONE, bang_f, bang_ft, pochhammer_poly, pochhammer_roots
from app.services.fspec_service import FKind, FSpec, eval_f, render_fspec, render_t, value_at_zero
from app.services.report_service import build_report, make_cell

_logger = logging.getLogger(__name__)

ZERO = LaurentPoly()
PRINTED = "printed"
NEWTON = "newton"


@dataclass(frozen=True)
class Triangle:
    spec: FSpec
    t: LaurentPoly
    rows: tuple[tuple[LaurentPoly, ...], ...]

    @property
    def order(self) -> int:
        return len(self.rows) - 1

    def entry(self, n: int, k: int) -> LaurentPoly:
        if n < 0 or n > self.order:
            raise DomainError(f"Row {n} is outside the triangle (0..{self.order}).")
        if k < 0 or k > n:
            return ZERO
        return self.rows[n][k]

    def row_polynomial(self, n: int) -> list[LaurentPoly]:
        """Coefficients of x^0..x^(n-1) in the n-th f(t)-Pochhammer product."""
        return [self.entry(n, k) for k in range(1, n + 1)] if n >= 1 else [ONE]


def _params(spec: FSpec, t: LaurentPoly, **extra: object) -> dict[str, object]:
    return {"f": render_fspec(spec), "t": render_t(t), **extra}


def _h(n: int) -> int:
    return n * (n + 1) // 2


@lru_cache(maxsize=256)
def s1_triangle(spec: FSpec, N: int, t: LaurentPoly = ONE) -> Triangle:
    if N < 0:
        raise DomainError(f"Triangle size must be non-negative, got {N}.")
    rows: list[tuple[LaurentPoly, ...]] = [(ONE,)]
    for n in range(1, N + 1):
        weight = eval_f(spec, n - 1) * t ** (1 - n) if n >= 2 else None
        previous = rows[-1]
        row = [ZERO]
        for k in range(1, n + 1):
            value = previous[k - 1]
            if weight is not None and k <= n - 1:
                value = value + weight * previous[k]
            row.append(value)
        rows.append(tuple(row))
    _logger.debug("Built %d-row triangle for f=%s t=%s", N + 1, render_fspec(spec), t)
    return Triangle(spec, t, tuple(rows))


def s1_entry_oracle(
    spec: FSpec, n: int, k: int, t: LaurentPoly = ONE, cap: int | None = None
) -> LaurentPoly:
    """Elementary symmetric polynomial e_(n-k) of f(j) t^-j, 1 <= j < n, by subset enumeration."""
    cap = get_settings().oracle_cap if cap is None else cap
    if n > cap:
        raise OracleCapError(f"Subset-enumeration oracle is capped at n <= {cap}, got n={n}.")
    if k < 0 or k > n:
        return ZERO
    if k == 0:
        return ONE if n == 0 else ZERO
    values = pochhammer_roots(spec, n, t)
    total = ZERO
    for subset in itertools.combinations(values, n - k):
        product = ONE
        for value in subset:
            product = product * value
        total = total + product
    return total


def classical_stirling_first(N: int) -> list[list[int]]:
    """Unsigned Stirling numbers of the first kind c(n, k), 0 <= k <= n <= N."""
    rows = [[1]]
    for n in range(1, N + 1):
        previous = rows[-1] + [0]
        rows.append([0] + [(n - 1) * previous[k] + previous[k - 1] for k in range(1, n + 1)])
    return rows


def s1_oracle_check(spec: FSpec, N: int, t: LaurentPoly = ONE) -> VerificationReport:
    triangle = s1_triangle(spec, N, t)
    cells: list[ReportCell] = []
    for n in range(N + 1):
        for k in range(n + 1):
            cells.append(make_cell([n, k], triangle.entry(n, k), s1_entry_oracle(spec, n, k, t)))
        if n >= 1:
            expansion = pochhammer_poly(spec, n, t)
            for k in range(1, n + 1):
                cells.append(
                    make_cell(
                        [n, k],
                        triangle.entry(n, k),
                        expansion.coefficient(k - 1),
                        note="row polynomial",
                    )
                )
    return build_report("s1-oracle", _params(spec, t, N=N), cells)


def s1_column_closed_forms(spec: FSpec, N: int, t: LaurentPoly = ONE) -> VerificationReport:
    triangle = s1_triangle(spec, N + 1, t)
    cells: list[ReportCell] = []
    for n in range(N + 1):
        scale = bang_ft(spec, n, t)
        cells.append(make_cell([n + 1, 1], triangle.entry(n + 1, 1), scale))
        for k in range(2, n + 2):
            total = ZERO
            for j in range(1, n + 1):
                total = total + triangle.entry(j, k - 1) * t ** _h(j) / bang_f(spec, j)
            cells.append(make_cell([n + 1, k], triangle.entry(n + 1, k), scale * total))
    return build_report("s1-columns", _params(spec, t, N=N), cells)


def _power_term(spec: FSpec, j: int, n: int, t: LaurentPoly, f_zero: LaurentPoly | None) -> LaurentPoly:
    """f(j)^n / t^(jn), with the j=0 term taken from f_zero (None means 0^n)."""
    if j == 0:
        if f_zero is None:
            return ONE if n == 0 else ZERO
        return f_zero**n
    return eval_f(spec, j) ** n * t ** (-j * n)


def s2_entry(
    spec: FSpec, n: int, k: int, t: LaurentPoly = ONE, normalization: str = PRINTED
) -> LaurentPoly:
    if n < 0 or k < 0:
        raise DomainError("Second-kind indices must be non-negative.")
    if normalization == PRINTED:
        total = ZERO
        for j in range(k + 1):
            sign = -1 if (k - j) % 2 else 1
            term = _power_term(spec, j, n, t, None) * Fraction(sign * math.comb(k, j), math.factorial(j))
            total = total + term
        return total
    if normalization == NEWTON:
        f_zero = value_at_zero(spec)
        total = ZERO
        for j in range(k + 1):
            sign = -1 if (k - j) % 2 else 1
            total = total + _power_term(spec, j, n, t, f_zero) * (sign * math.comb(k, j))
        return total / math.factorial(k)
    raise DomainError(f"Unknown normalization {normalization!r}.")


def s2_geom_hypothesis(spec: FSpec, t: LaurentPoly) -> bool:
    """Newton expansion is exact when f(j)^k t^(-jk) is a polynomial of degree <= k in j."""
    return t == 1 and spec.is_polynomial and (spec.degree or 0) <= 1


def s2_geom_transform_check(
    spec: FSpec, n: int, k: int, t: LaurentPoly = ONE, normalization: str = NEWTON
) -> VerificationReport:
    f_zero = value_at_zero(spec) if normalization == NEWTON else None
    second_kind = [s2_entry(spec, k, j, t, normalization) for j in range(k + 1)]
    cells: list[ReportCell] = []
    for m in range(n + 1):
        lhs = _power_term(spec, m, k, t, f_zero)
        rhs = ZERO
        for j in range(min(k, m) + 1):
            rhs = rhs + second_kind[j] * (math.factorial(m) // math.factorial(m - j))
        cells.append(make_cell([n, k, m], lhs, rhs))
    notes: list[str] = []
    advisory = normalization == PRINTED or not s2_geom_hypothesis(spec, t)
    if normalization == PRINTED:
        notes.append("second-kind numbers with 1/j! inside the sum and f(0) := 0")
    elif advisory:
        notes.append("outside the Newton-series hypothesis: f linear in n and t = 1")
    return build_report(
        f"s2-geom-{normalization}",
        _params(spec, t, n=n, k=k),
        cells,
        advisory=advisory,
        notes=notes,
    )


def s2star_entry(spec: FSpec, k: int, j: int) -> LaurentPoly:
    if k < 0 or j < 0:
        raise DomainError("Modified second-kind indices must be non-negative.")
    total = ZERO
    for m in range(1, j + 1):
        sign = -1 if (j - m) % 2 else 1
        total = total + Fraction(sign * math.comb(j, m), math.factorial(j)) / eval_f(spec, m) ** k
    return total


def s2star_ogf_check(spec: FSpec, k: int, N: int) -> VerificationReport:
    modified = [s2star_entry(spec, k, j) for j in range(N + 1)]
    cells = []
    for n in range(1, N + 1):
        rhs = ZERO
        for j in range(1, n + 1):
            rhs = rhs + modified[j] * (math.factorial(j) * math.comb(n, j))
        cells.append(make_cell([k, n], 1 / eval_f(spec, n) ** k, rhs))
    return build_report("s2star-ogf", {"f": render_fspec(spec), "k": k, "N": N}, cells)


def s2star_egf_check(spec: FSpec, r: int, N: int) -> VerificationReport:
    params = {"f": render_fspec(spec), "r": r, "N": N}
    if N <= 0:
        return build_report("s2star-egf", params, [])
    exponential = exp_series(N)
    rhs = TruncSeries.from_polynomial([0], N)
    for j in range(1, N + 1):
        weight = s2star_entry(spec, r, j)
        if weight.is_zero():
            continue
        factor = TruncSeries.from_polynomial([1, Fraction(1, j + 1)], N)
        term = (exponential * factor).shift(j).truncate(N)
        rhs = rhs + term * weight
    cells = []
    harmonic = ZERO
    for n in range(1, N + 1):
        harmonic = harmonic + 1 / eval_f(spec, n) ** r
        cells.append(make_cell([r, n], harmonic / math.factorial(n), rhs[n]))
    return build_report(
        "s2star-egf",
        params,
        cells,
        notes=["modified second-kind upper index taken equal to r"],
    )


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, m: int, var: str = "q") -> LaurentPoly:
    """[n choose m]_q by the q-Pascal rule."""
    if m < 0 or m > n:
        return LaurentPoly({}, var)
    if m == 0 or m == n:
        return LaurentPoly.constant(1, var)
    return gaussian_binomial(n - 1, m - 1, var) + LaurentPoly.monomial(m, 1, var) * gaussian_binomial(
        n - 1, m, var
    )


def qbinomial_check(offset: int, N: int) -> VerificationReport:
    """For f(n) = q^(n+offset), t = 1, rows are q-shifted Gaussian polynomials."""
    spec = FSpec(FKind.QPOW, (Fraction(offset),))
    triangle = s1_triangle(spec, N)
    cells = []
    for n in range(1, N + 1):
        for m in range(n):
            shift = LaurentPoly.monomial((1 + offset) * m + m * (m - 1) // 2, 1, spec.symbol)
            cells.append(make_cell([n, n - m], triangle.entry(n, n - m), shift * gaussian_binomial(n - 1, m)))
    return build_report("q-binomial", {"f": render_fspec(spec), "N": N}, cells)
