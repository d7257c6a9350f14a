from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from app.core.errors import DomainError
from app.schemas.report_schema import ReportCell, VerificationReport
from app.services.exactnum_service import (
    Coefficient,
    LaurentPoly,
    Scalar,
    TruncSeries,
    compose,
    exp_series,
    format_rational,
    series_div,
)
from app.services.factorial_service import ONE, bang_f
from app.services.fspec_service import FKind, FSpec, eval_f, render_fspec, render_t
from app.services.report_service import build_report, make_cell
from app.services.stirling_service import Triangle, classical_stirling_first, s1_triangle

_logger = logging.getLogger(__name__)


class SigmaVariant(str, Enum):
    SIGMA = "sigma"
    SIGMA_TILDE = "sigma_tilde"


class GfFamily(str, Enum):
    CLASSIC = "classic"
    ALPHA = "alpha"
    ALPHABETA = "alphabeta"


@dataclass(frozen=True)
class SigmaValue:
    spec: FSpec
    variant: SigmaVariant
    n: int
    x: int
    value: LaurentPoly


def _check_sigma_domain(n: int, x: int) -> None:
    if n < 0 or x < n + 1:
        raise DomainError(f"sigma_n(x) needs integers x >= n + 1 >= 1, got n={n}, x={x}.")


def _sigma_from_triangle(triangle: Triangle, variant: SigmaVariant, n: int, x: int) -> LaurentPoly:
    _check_sigma_domain(n, x)
    if variant is SigmaVariant.SIGMA:
        scale = bang_f(triangle.spec, x)
    else:
        scale = LaurentPoly.constant(math.factorial(x))
    return triangle.entry(x, x - n) * math.factorial(x - n - 1) / scale


def sigma_eval(
    spec: FSpec, variant: SigmaVariant | str, n: int, x: int, t: LaurentPoly = ONE
) -> LaurentPoly:
    _check_sigma_domain(n, x)
    return _sigma_from_triangle(s1_triangle(spec, x, t), SigmaVariant(variant), n, x)


def sigma_value(
    spec: FSpec, variant: SigmaVariant | str, n: int, x: int, t: LaurentPoly = ONE
) -> SigmaValue:
    variant = SigmaVariant(variant)
    return SigmaValue(spec, variant, n, x, sigma_eval(spec, variant, n, x, t))


def sigma_recurrence_check(spec: FSpec, N_n: int, N_x: int, t: LaurentPoly = ONE) -> VerificationReport:
    """Both first-order recurrences in x, for 1 <= n < x <= N_x and n <= N_n."""
    triangle = s1_triangle(spec, N_x + 1, t)
    cells: list[ReportCell] = []
    for x in range(2, N_x + 1):
        f_x = eval_f(spec, x)
        step = f_x * t ** (-x)
        for n in range(1, min(N_n, x - 1) + 1):
            for variant in SigmaVariant:
                lead = eval_f(spec, x + 1) if variant is SigmaVariant.SIGMA else LaurentPoly.constant(x + 1)
                lhs = lead * _sigma_from_triangle(triangle, variant, n, x + 1)
                rhs = (x - n) * _sigma_from_triangle(triangle, variant, n, x) + step * _sigma_from_triangle(
                    triangle, variant, n - 1, x
                )
                cells.append(make_cell([n, x], lhs, rhs, note=variant.value))
    return build_report(
        "convpoly-rec",
        {"f": render_fspec(spec), "t": render_t(t), "N_n": N_n, "N_x": N_x},
        cells,
    )


def sigma_base_line_check(spec: FSpec, N_x: int, t: LaurentPoly = ONE) -> list[VerificationReport]:
    """The n = 0 line of both recurrences, with and without the printed +[n = 0] term.

    Under sigma_0(x) = (x-1)!/x!_f the line is homogeneous; the printed form is
    reported as advisory with residual -1 in every cell.
    """
    triangle = s1_triangle(spec, N_x + 1, t)
    homogeneous: list[ReportCell] = []
    printed: list[ReportCell] = []
    for x in range(1, N_x + 1):
        for variant in SigmaVariant:
            lead = eval_f(spec, x + 1) if variant is SigmaVariant.SIGMA else LaurentPoly.constant(x + 1)
            lhs = lead * _sigma_from_triangle(triangle, variant, 0, x + 1)
            rhs = x * _sigma_from_triangle(triangle, variant, 0, x)
            homogeneous.append(make_cell([0, x], lhs, rhs, note=variant.value))
            printed.append(make_cell([0, x], lhs, rhs + 1, note=f"{variant.value}; +[n = 0] term"))
    params = {"f": render_fspec(spec), "t": render_t(t), "N_x": N_x}
    return [
        build_report("convpoly-rec-base", params, homogeneous),
        build_report("convpoly-rec-iverson", params, printed, advisory=True),
    ]


def sigma_definition_check(spec: FSpec, N: int, t: LaurentPoly = ONE) -> VerificationReport:
    """Rebuild [n+1, k] from sigma and from sigma-tilde at x = n + 1."""
    triangle = s1_triangle(spec, N + 1, t)
    cells: list[ReportCell] = []
    for n in range(N + 1):
        for k in range(1, n + 2):
            entry = triangle.entry(n + 1, k)
            sigma = _sigma_from_triangle(triangle, SigmaVariant.SIGMA, n + 1 - k, n + 1)
            tilde = _sigma_from_triangle(triangle, SigmaVariant.SIGMA_TILDE, n + 1 - k, n + 1)
            cells.append(make_cell([n + 1, k], entry, bang_f(spec, n + 1) / math.factorial(k - 1) * sigma, "sigma"))
            cells.append(
                make_cell([n + 1, k], entry, tilde * Fraction(math.factorial(n + 1), math.factorial(k - 1)), "sigma_tilde")
            )
    return build_report("convpoly-def", {"f": render_fspec(spec), "t": render_t(t), "N": N}, cells)


def _bernoulli_kernel(order: int, alpha: Scalar = 1) -> TruncSeries:
    """alpha z e^(alpha z) / (e^(alpha z) - 1) to the given order."""
    alpha = Fraction(alpha)
    grown = exp_series(order + 1, alpha)
    numerator = (grown * alpha).shift(1).truncate(order + 1)
    denominator = grown - 1
    return series_div(numerator, denominator)


def stirling_generating_series(order: int) -> TruncSeries:
    """z e^z / (e^z - 1) to the given order."""
    return _bernoulli_kernel(order)


def _family_spec(family: GfFamily, alpha: Fraction, beta: Fraction) -> tuple[FSpec, Fraction]:
    if family is GfFamily.CLASSIC:
        return FSpec(FKind.LINEAR, (Fraction(1), Fraction(0))), Fraction(0)
    if family is GfFamily.ALPHA:
        return FSpec(FKind.LINEAR, (alpha, 1 - alpha)), 1 - alpha
    return FSpec(FKind.LINEAR, (alpha, beta)), beta


def stirlingpoly_gf_check(
    family: GfFamily | str, n_max: int, x_max: int, alpha: Scalar = 2, beta: Scalar = 1
) -> VerificationReport:
    """[z^n] e^(c z) (alpha z e^(alpha z) / (e^(alpha z) - 1))^x against [x, x-n] (x-n-1)!/(x-1)!."""
    family = GfFamily(family)
    alpha = Fraction(1) if family is GfFamily.CLASSIC else Fraction(alpha)
    beta = Fraction(beta)
    spec, shift = _family_spec(family, alpha, beta)
    triangle = s1_triangle(spec, x_max)
    kernel = _bernoulli_kernel(n_max, alpha)
    prefactor = exp_series(n_max, shift)
    cells: list[ReportCell] = []
    for x in range(1, x_max + 1):
        series = prefactor * kernel**x
        for n in range(0, min(n_max, x - 1) + 1):
            scaled = _sigma_from_triangle(triangle, SigmaVariant.SIGMA_TILDE, n, x) * x
            cells.append(make_cell([n, x], scaled, series[n]))
    params = {
        "family": family.value,
        "f": render_fspec(spec),
        "alpha": format_rational(alpha),
        "beta": format_rational(beta),
        "n_max": n_max,
        "x_max": x_max,
    }
    return build_report(f"gf-{family.value}", params, cells)


@dataclass(frozen=True)
class Eulerian2Triangle:
    rows: tuple[tuple[int, ...], ...]

    def entry(self, n: int, k: int) -> int:
        if n < 0 or n >= len(self.rows) or k < 0 or k >= len(self.rows[n]):
            return 0
        return self.rows[n][k]


@lru_cache(maxsize=None)
def eulerian2_triangle(N: int) -> Eulerian2Triangle:
    rows: list[tuple[int, ...]] = [(1,)]
    for n in range(1, N + 1):
        previous = rows[-1]

        def prev(k: int) -> int:
            return previous[k] if 0 <= k < len(previous) else 0

        rows.append(tuple((k + 1) * prev(k) + (2 * n - 1 - k) * prev(k - 1) for k in range(n)))
    return Eulerian2Triangle(tuple(rows))


def eulerian2_identity_check(n_max: int, x_max: int) -> VerificationReport:
    eulerian = eulerian2_triangle(n_max)
    stirling = classical_stirling_first(x_max)
    cells: list[ReportCell] = []
    for n in range(n_max + 1):
        for x in range(n + 1, x_max + 1):
            expansion = sum(
                eulerian.entry(n, k) * math.comb(x + k, 2 * n) for k in range(len(eulerian.rows[n]))
            )
            cells.append(make_cell([n, x], stirling[x][x - n], expansion))
    return build_report("eulerian2", {"n_max": n_max, "x_max": x_max}, cells)


def solve_shift_series(
    base: TruncSeries, t_shift: int, order: int | None = None, iterations: int | None = None
) -> TruncSeries:
    """Fixed point of S_t(z) = S(z S_t(z)^t), starting from 1.

    Coefficient k is final after k + 1 iterations.
    """
    if t_shift < 0:
        raise DomainError("t_shift must be non-negative.")
    order = base.order if order is None else order
    base = base.truncate(order)
    iterations = order + 1 if iterations is None else iterations
    current = TruncSeries.one(order, base.var)
    for step in range(iterations):
        inner = (current**t_shift).shift(1).truncate(order)
        current = compose(base, inner)
        _logger.debug("shift fixed point: iteration %d of %d", step + 1, iterations)
    return current


def conv_family_shift_check(
    coeffs: Sequence[Scalar], t_shift: int, n_max: int, x_max: int
) -> VerificationReport:
    """x s_n(x + t n) / (x + t n) = [z^n] S_t(z)^x, with s_n(y) = [z^n] S(z)^y."""
    base = TruncSeries.from_polynomial([1, *coeffs], n_max)
    shifted = solve_shift_series(base, t_shift)
    cells: list[ReportCell] = []
    for x in range(1, x_max + 1):
        powered = shifted**x
        for n in range(n_max + 1):
            y = x + t_shift * n
            if y == 0:
                cells.append(make_cell([n, x], 0, 0, note="skipped: x + t n = 0"))
                continue
            lhs = Fraction(x, y) * (base**y)[n]
            cells.append(make_cell([n, x], lhs, powered[n]))
    params = {
        "coeffs": [format_rational(Fraction(c)) for c in coeffs[:n_max]],
        "t_shift": t_shift,
        "n_max": n_max,
        "x_max": x_max,
    }
    return build_report("conv-shift", params, cells)


@dataclass(frozen=True)
class ExperimentalFit:
    x: int
    series: TruncSeries
    targets: tuple[Coefficient, ...]
    report: VerificationReport


def experimental_targets(spec: FSpec, x: int, N: int, t: LaurentPoly = ONE) -> list[LaurentPoly]:
    """f_m(x) = sigma_m(x) / sigma_0(x) = [x, x-m] (x-m-1)!/(x-1)! for 0 <= m <= N."""
    if N > x - 1:
        raise DomainError(f"Targets up to m={N} need x >= {N + 1}, got x={x}.")
    triangle = s1_triangle(spec, x, t)
    return [triangle.entry(x, x - m) * Fraction(math.factorial(x - m - 1), math.factorial(x - 1)) for m in range(N + 1)]


def fit_experimental_gf(spec: FSpec, x: int, N: int, t: LaurentPoly = ONE) -> ExperimentalFit:
    """Solve f_n(x) = [z^n] F(z)^x for g_0 = 1, g_1, ..., g_N one coefficient at a time."""
    if x == 0:
        raise DomainError("x = 0 makes the triangular system singular.")
    if N < 1:
        raise DomainError("N must be at least 1.")
    targets = experimental_targets(spec, x, N, t)
    coeffs: list[Coefficient] = [Fraction(1)]
    for n in range(1, N + 1):
        partial = TruncSeries.from_polynomial(coeffs, n)
        known = (partial**x)[n]
        coeffs.append((targets[n] - known) / x)
    series = TruncSeries(coeffs)
    powered = series**x
    cells = [make_cell([n, x], powered[n], targets[n]) for n in range(N + 1)]
    report = build_report(
        "experimental-fit", {"f": render_fspec(spec), "t": render_t(t), "x": x, "N": N}, cells
    )
    return ExperimentalFit(x, series, tuple(targets), report)


def experimental_binomial_check(spec: FSpec, n_max: int, t: LaurentPoly = ONE) -> VerificationReport:
    """s_n(k) = f_(n-k)(n) against sum_j C(n, j) [z^(n-k)] (F(z) - 1)^j + [n = k]."""
    cells: list[ReportCell] = []
    for n in range(1, n_max + 1):
        if n == 1:
            series = TruncSeries.one(0)
            targets = experimental_targets(spec, 1, 0, t)
        else:
            fit = fit_experimental_gf(spec, n, n - 1, t)
            series, targets = fit.series, list(fit.targets)
        reduced = series - 1
        for k in range(1, n + 1):
            m = n - k
            total: Coefficient = Fraction(1 if m == 0 else 0)
            for j in range(1, m + 1):
                total = total + math.comb(n, j) * (reduced**j)[m]
            cells.append(make_cell([n, k], targets[m], total))
    return build_report(
        "experimental-binomial", {"f": render_fspec(spec), "t": render_t(t), "n_max": n_max}, cells
    )
