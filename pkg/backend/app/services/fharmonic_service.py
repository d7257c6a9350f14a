from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence

from sympy import isprime

from app.core.config import get_settings
from app.core.errors import DomainError
from app.schemas.report_schema import ReportCell, VerificationReport
from app.services.exactnum_service import (
    CyclotomicElem,
    LaurentPoly,
    Scalar,
    TruncSeries,
    exact_sum,
)
from app.services.factorial_service import ONE, bang_f, bang_ft
from app.services.fspec_service import FSpec, eval_f, render_fspec, render_t, t_roots
from app.services.report_service import build_report, make_cell
from app.services.stirling_service import Triangle, classical_stirling_first, s1_triangle

_logger = logging.getLogger(__name__)

ZERO = LaurentPoly()
DERIVED = "derived"
PRINTED = "printed"


def _h(n: int) -> int:
    return n * (n + 1) // 2


def _sign(power: int) -> int:
    return -1 if power % 2 else 1


def _params(spec: FSpec, t: LaurentPoly, **extra: object) -> dict[str, object]:
    return {"f": render_fspec(spec), "t": render_t(t), **extra}


def fharmonic_direct(spec: FSpec, p: int, n: int, arg: LaurentPoly | Scalar = ONE) -> LaurentPoly:
    """sum_{k=1}^{n} arg^k / f(k)^p."""
    if p < 1 or n < 0:
        raise DomainError(f"Need p >= 1 and n >= 0, got p={p}, n={n}.")
    arg = LaurentPoly.coerce(arg)
    total = ZERO
    for k in range(1, n + 1):
        total = total + arg**k / eval_f(spec, k) ** p
    return total


@dataclass(frozen=True)
class FHarmonicValue:
    spec: FSpec
    p: int
    n: int
    arg: str
    value: LaurentPoly


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of total into exactly `parts` non-negative parts."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def ftilde_series(spec: FSpec, n: int, t: LaurentPoly = ONE, order: int | None = None) -> TruncSeries:
    """sum_{k>=2} [n+1, k] w^k as a series in w, padded with exact zeros to `order`."""
    triangle = s1_triangle(spec, n + 1, t)
    coeffs = [ZERO, ZERO] + [triangle.entry(n + 1, k) for k in range(2, n + 2)]
    order = max(n + 1, order or 0)
    return TruncSeries.from_polynomial(coeffs, order, "w")


def harmonic_via_ftilde(spec: FSpec, p: int, n: int, t: LaurentPoly = ONE) -> LaurentPoly:
    """sum_k t^(kp)/f(k)^p from the w^(2p) coefficient of the f-tilde powers."""
    if p < 1:
        raise DomainError(f"p must be positive, got {p}.")
    triangle = s1_triangle(spec, n + 1, t)
    ftilde = ftilde_series(spec, n, t, 2 * p)
    first = triangle.entry(n + 1, 1)
    total = ZERO
    for j in range(p):
        extracted = (ftilde ** (p - j))[2 * p - j]
        total = total + Fraction(_sign(j) * p, p - j) * first**j * extracted
    return total * t ** (p * _h(n)) / bang_f(spec, n) ** p


def ftilde_monomials(p: int) -> dict[tuple[int, ...], Fraction]:
    """Expansion of the f-tilde extraction as a polynomial in the row entries [n+1, k].

    Keys are the sorted lower indices of each monomial, so (1, 3) stands for
    [n+1, 1] * [n+1, 3]. Every key sums to 2p.
    """
    expansion: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for j in range(p):
        weight = Fraction(_sign(j) * p, p - j)
        for parts in compositions(j, p - j):
            key = tuple(sorted([1] * j + [i + 2 for i in parts]))
            expansion[key] += weight
    return {key: value for key, value in sorted(expansion.items()) if value != 0}


def evaluate_monomials(monomials: dict[tuple[int, ...], Fraction], triangle: Triangle, n: int) -> LaurentPoly:
    total = ZERO
    for key, coeff in monomials.items():
        product = LaurentPoly.constant(coeff)
        for k in key:
            product = product * triangle.entry(n + 1, k)
        total = total + product
    return total


def _cyclo_poly_mul(
    a: list[CyclotomicElem], b: list[CyclotomicElem], order: int
) -> list[CyclotomicElem]:
    p = a[0].order
    out = [CyclotomicElem.scalar(p, 0) for _ in range(order + 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j in range(order + 1 - i):
            y = b[j]
            if y.is_zero():
                continue
            out[i + j] = out[i + j] + x * y
    return out


def harmonic_via_roots(spec: FSpec, p: int, n: int, t: LaurentPoly = ONE) -> LaurentPoly:
    """sum_k t^(kp)/f(k)^p from the product of the p root-of-unity twisted rows."""
    if not isprime(p):
        raise DomainError(f"The root-of-unity route needs a prime p, got {p}.")
    triangle = s1_triangle(spec, n + 1, t)
    order = 2 * p
    zero = CyclotomicElem.scalar(p, 0)
    product = [CyclotomicElem.scalar(p, 1)] + [zero] * order
    for m in range(p):
        twisted = [
            CyclotomicElem.zeta_power(p, m * (k - 1), triangle.entry(n + 1, k)) if 1 <= k <= n + 1 else zero
            for k in range(order + 1)
        ]
        product = _cyclo_poly_mul(product, twisted, order)
    extracted = product[order].to_scalar()
    return _sign(p + 1) * extracted * t ** (p * _h(n)) / bang_f(spec, n) ** p


@dataclass(frozen=True)
class SubstResult:
    value: LaurentPoly
    expected: LaurentPoly
    t: LaurentPoly
    root: LaurentPoly

    @property
    def holds(self) -> bool:
        return self.value == self.expected


def harmonic_via_subst(spec: FSpec, p: int, n: int, t: LaurentPoly = ONE) -> SubstResult:
    """sum_k t^k/f(k)^p from a triangle built at t^(1/p), in the substitution variable."""
    roots = t_roots(t, [p])
    if spec.is_symbolic and not roots.exact:
        raise DomainError("A symbolic f needs a t with exact rational roots.")
    root = roots.root(p)
    route = harmonic_via_roots if isprime(p) else harmonic_via_ftilde
    value = route(spec, p, n, root)
    expected = fharmonic_direct(spec, p, n, roots.t)
    return SubstResult(value, expected, roots.t, root)


def fharmonic_value(spec: FSpec, p: int, n: int, t: LaurentPoly = ONE, method: str = "direct") -> FHarmonicValue:
    if method == "direct":
        return FHarmonicValue(spec, p, n, "t^p", fharmonic_direct(spec, p, n, t**p))
    if method == "ftilde":
        return FHarmonicValue(spec, p, n, "t^p", harmonic_via_ftilde(spec, p, n, t))
    if method == "roots":
        return FHarmonicValue(spec, p, n, "t^p", harmonic_via_roots(spec, p, n, t))
    if method == "subst":
        result = harmonic_via_subst(spec, p, n, t)
        return FHarmonicValue(spec, p, n, f"t = {result.t}", result.value)
    raise DomainError(f"Unknown harmonic method {method!r}.")


def harmonic_routes_check(
    spec: FSpec, t: LaurentPoly = ONE, p_max: int = 5, n_max: int = 10, subst_p_max: int = 4
) -> list[VerificationReport]:
    ftilde_cells: list[ReportCell] = []
    roots_cells: list[ReportCell] = []
    subst_cells: list[ReportCell] = []
    for p in range(1, p_max + 1):
        for n in range(n_max + 1):
            direct = fharmonic_direct(spec, p, n, t**p)
            ftilde_cells.append(make_cell([p, n], harmonic_via_ftilde(spec, p, n, t), direct))
            if isprime(p):
                roots_cells.append(make_cell([p, n], harmonic_via_roots(spec, p, n, t), direct))
            if p <= subst_p_max:
                result = harmonic_via_subst(spec, p, n, t)
                subst_cells.append(make_cell([p, n], result.value, result.expected))
    params = _params(spec, t, p_max=p_max, n_max=n_max)
    return [
        build_report("harmonic-ftilde", params, ftilde_cells),
        build_report("harmonic-roots", params, roots_cells),
        build_report("harmonic-subst", {**params, "p_max": subst_p_max}, subst_cells),
    ]


def rising_factorial(a: Scalar, k: int) -> Fraction:
    """(a)_k = a (a+1) ... (a+k-1)."""
    result = Fraction(1)
    for i in range(k):
        result *= a + i
    return result


@dataclass(frozen=True)
class WfTable:
    n: int
    values: dict[int, LaurentPoly]
    recursion: str = DERIVED

    def __getitem__(self, m: int) -> LaurentPoly:
        return self.values[m]


def _power_harmonics(spec: FSpec, n: int, orders: int, t: LaurentPoly) -> dict[int, LaurentPoly]:
    return {j: fharmonic_direct(spec, j, n, t**j) for j in range(1, orders + 1)}


def wf_table(
    spec: FSpec, n: int, m_max: int, t: LaurentPoly = ONE, recursion: str = DERIVED
) -> WfTable:
    """Weighted f-harmonic sums w_f(n+1, m) for 1 <= m <= m_max.

    The base w_f(n+1, 1) is t^(-n(n+1)/2). The derived recursion weights the
    k-th term by (2-m)_k; the printed one by (-1)^k (1-m)_k.
    """
    if m_max < 1:
        raise DomainError("m_max must be at least 1.")
    if recursion not in (DERIVED, PRINTED):
        raise DomainError(f"Unknown recursion {recursion!r}.")
    harmonics = _power_harmonics(spec, n, m_max, t)
    values: dict[int, LaurentPoly] = {0: ZERO}
    for m in range(1, m_max + 1):
        total = t ** (-_h(n)) if m == 1 else ZERO
        for k in range(m):
            previous = values[m - 1 - k]
            if previous.is_zero():
                continue
            if recursion == DERIVED:
                factor = rising_factorial(2 - m, k)
            else:
                factor = _sign(k) * rising_factorial(1 - m, k)
            if factor:
                total = total + harmonics[k + 1] * previous * factor
        values[m] = total
    del values[0]
    return WfTable(n, values, recursion)


def s1_from_wf_check(
    spec: FSpec, N: int, t: LaurentPoly = ONE, recursion: str = DERIVED
) -> VerificationReport:
    triangle = s1_triangle(spec, N + 1, t)
    cells: list[ReportCell] = []
    for n in range(N + 1):
        table = wf_table(spec, n, n + 1, t, recursion)
        harmonics = _power_harmonics(spec, n, n + 1, t)
        for k in range(1, n + 2):
            entry = triangle.entry(n + 1, k)
            weighted = bang_f(spec, n) / math.factorial(k - 1) * table[k]
            cells.append(make_cell([n + 1, k, 1], entry, weighted))
            if recursion != DERIVED:
                continue
            total = bang_ft(spec, n, t) if k == 1 else ZERO
            for j in range(k - 1):
                total = total + triangle.entry(n + 1, k - 1 - j) * harmonics[j + 1] * Fraction(_sign(j), k - 1)
            cells.append(make_cell([n + 1, k, 2], entry, total))
    notes = []
    if t != 1:
        notes.append("w_f(n+1, 1) scaled to t^(-n(n+1)/2); an unscaled base differs from the triangle")
    if recursion == PRINTED:
        notes.append("recursion weighted by (-1)^k (1-m)_k")
    return build_report(
        f"wf-{recursion}",
        _params(spec, t, N=N),
        cells,
        advisory=recursion == PRINTED,
        notes=notes,
    )


def corollary_expansions_check(spec: FSpec, N: int, t: LaurentPoly = ONE) -> VerificationReport:
    triangle = s1_triangle(spec, N + 1, t)
    cells: list[ReportCell] = []
    for n in range(N + 1):
        P = _power_harmonics(spec, n, 4, t)
        scale = bang_f(spec, n) * t ** (-_h(n))
        closed = {
            2: P[1],
            3: (P[1] ** 2 - P[2]) / 2,
            4: (P[1] ** 3 - 3 * P[1] * P[2] + 2 * P[3]) / 6,
            5: (P[1] ** 4 - 6 * P[1] ** 2 * P[2] + 3 * P[2] ** 2 + 8 * P[1] * P[3] - 6 * P[4]) / 24,
        }
        for k, value in closed.items():
            cells.append(make_cell([n + 1, k], triangle.entry(n + 1, k), scale * value))
    return build_report("corollary", _params(spec, t, N=N), cells)


def _composition_products(triangle: Triangle, n: int, total: int, parts: int) -> LaurentPoly:
    result = ZERO
    for parts_tuple in compositions(total, parts):
        product = ONE
        for i in parts_tuple:
            product = product * triangle.entry(n + 1, i + 2)
        result = result + product
    return result


def prop1_recurrence_check(
    spec: FSpec, p: int, n: int, t: LaurentPoly = ONE, leading_factor: str = DERIVED
) -> VerificationReport:
    """F_n^(p+1)(t) from F_n^(p)(t) and products of triangle entries at t^(1/p), t^(1/(p+1)).

    The printed leading term carries no (p+1) factor; with it the residual is
    exactly p times that term.
    """
    if p < 1 or n < 0:
        raise DomainError(f"Need p >= 1 and n >= 0, got p={p}, n={n}.")
    roots = t_roots(t, [p, p + 1])
    if spec.is_symbolic and not roots.exact:
        raise DomainError("A symbolic f needs a t with exact rational roots.")
    big_t, low, high = roots.t, roots.root(p), roots.root(p + 1)
    tri_low = s1_triangle(spec, n + 1, low)
    tri_high = s1_triangle(spec, n + 1, high)
    h = _h(n)
    factorial = bang_f(spec, n)

    lhs = fharmonic_direct(spec, p + 1, n, big_t)
    lower = fharmonic_direct(spec, p, n, big_t)
    printed_lead = _sign(p) * big_t**h / (high ** (p * h) * factorial) * tri_high.entry(n + 1, p + 2)
    factor = p + 1 if leading_factor == DERIVED else 1

    second = ZERO
    for j in range(p):
        weight = Fraction(p * _sign(j + 1), p - j) * big_t**h / (low ** (j * h) * factorial ** (p - j))
        second = second + weight * _composition_products(tri_low, n, j, p - j)

    third = ZERO
    for j in range(p):
        weight = Fraction((p + 1) * _sign(j), p + 1 - j) * big_t**h / (high ** (j * h) * factorial ** (p + 1 - j))
        for i in range(j + 1):
            third = third + weight * tri_high.entry(n + 1, i + 2) * _composition_products(tri_high, n, j - i, p - j)

    rhs = lower + printed_lead * factor + second + third
    note = None
    if leading_factor != DERIVED and lhs != rhs:
        note = f"leading term lacks factor {p + 1}; missing {printed_lead * p}"
    cell = make_cell([p, n], lhs, rhs, note=note)
    notes = [] if roots.exact else [f"computed with t = {big_t}"]
    return build_report(
        f"prop1-{leading_factor}",
        _params(spec, t, p=p, n=n),
        [cell],
        advisory=leading_factor != DERIVED,
        notes=notes,
    )


def prop2_functional_eq_check(spec: FSpec, p: int, n: int, t: LaurentPoly = ONE) -> VerificationReport:
    if p < 2 or n < 0:
        raise DomainError(f"Need p >= 2 and n >= 0, got p={p}, n={n}.")
    triangle = s1_triangle(spec, n + 2, t)
    lhs = fharmonic_direct(spec, p, n + 1, t**p)
    base = fharmonic_direct(spec, p, n, t**p)
    f_next = eval_f(spec, n + 1)
    fact = bang_ft(spec, n + 1, t)
    step = t ** (n + 1)

    first = base + triangle.entry(n + 1, p) * _sign(p + 1) / fact
    for j in range(1, p):
        first = first + triangle.entry(n + 2, p + 1 - j) * _sign(p + 1 - j) * step**j / (f_next**j * fact)

    second = (
        base
        + step ** (p - 1) / f_next ** (p - 1)
        + (triangle.entry(n + 1, p) + triangle.entry(n + 1, p - 1)) * _sign(p - 1) / fact
        + triangle.entry(n + 2, p) * _sign(p) * step / (f_next * fact)
    )
    shifted = f_next / step - 1
    for j in range(p - 2):
        second = second + (
            triangle.entry(n + 2, j + 2)
            * _sign(j + 1)
            * shifted
            * step ** (p - 1 - j)
            / (f_next ** (p - 1 - j) * fact)
        )
    cells = [make_cell([p, n, 1], lhs, first), make_cell([p, n, 2], lhs, second)]
    return build_report("prop2", _params(spec, t, p=p, n=n), cells)


def stirling_harmonic_identity_check(p: int, n: int) -> VerificationReport:
    """1/n^p against the ordinary first-kind numbers, for f(n) = n and t = 1."""
    if p < 3 or n < 1:
        raise DomainError(f"Need p >= 3 and n >= 1, got p={p}, n={n}.")
    rows = classical_stirling_first(n + 1)

    def c(row: int, k: int) -> int:
        return rows[row][k] if 0 <= k <= row else 0

    fact = math.factorial(n)
    rhs = Fraction(1, n ** (p - 1))
    rhs += Fraction(_sign(p - 1) * (c(n, p) + c(n, p - 1)), fact)
    rhs += Fraction(c(n + 1, p) * _sign(p), n * fact)
    for j in range(p - 2):
        rhs += Fraction(c(n + 1, j + 2) * _sign(j + 1) * (n - 1), n ** (p - 1 - j) * fact)
    return build_report("euler-identity", {"p": p, "n": n}, [make_cell([p, n], Fraction(1, n**p), rhs)])


def nielsen_partial(t_idx: int, k: int, z: Scalar, N: int) -> Fraction:
    """Partial sum of [n, k] z^n / (n^t_idx n!) over 1 <= n <= N."""
    if N < 1:
        raise DomainError("N must be at least 1.")
    rows = classical_stirling_first(N)
    z = Fraction(z)
    terms = [
        Fraction(rows[n][k], n**t_idx * math.factorial(n)) * z**n
        for n in range(1, N + 1)
        if k <= n and rows[n][k]
    ]
    return exact_sum(terms)


class EulerMode(str, Enum):
    HARMONIC_OVER_F = "harmonic_over_f"
    FZETA = "fzeta"
    FZETA2R = "fzeta2r"


def _numeric_f(spec: FSpec, n: int) -> Fraction:
    value = eval_f(spec, n)
    if not value.is_constant():
        raise DomainError("Numeric series need a numeric f.")
    return value.constant_value()


def _inverse_powers(spec: FSpec, r: int, N: int) -> list[Fraction]:
    return [1 / _numeric_f(spec, n) ** r for n in range(1, N + 1)]


def euler_sum_closed_form(spec: FSpec, r: int, N: int) -> Fraction:
    """(zeta_f,N(r)^2 + zeta_f,N(2r)) / 2, equal to the harmonic_over_f partial sum."""
    terms = _inverse_powers(spec, r, N)
    return (exact_sum(terms) ** 2 + exact_sum(a * a for a in terms)) / 2


def euler_sum_numeric(
    spec: FSpec, r: int, N: int, mode: EulerMode | str = EulerMode.HARMONIC_OVER_F, direct: bool | None = None
) -> Fraction:
    if N < 1:
        raise DomainError("N must be at least 1.")
    mode = EulerMode(mode)
    if mode is EulerMode.FZETA:
        return exact_sum(_inverse_powers(spec, r, N))
    if mode is EulerMode.FZETA2R:
        return exact_sum(_inverse_powers(spec, 2 * r, N))
    if direct is None:
        direct = N <= get_settings().direct_sum_limit
    if not direct:
        _logger.debug("Summing %d terms through the squared f-zeta partial sums", N)
        return euler_sum_closed_form(spec, r, N)
    running = Fraction(0)
    terms = []
    for a in _inverse_powers(spec, r, N):
        running += a
        terms.append(running * a)
    return exact_sum(terms)


def hf_weighted_partial(
    spec: FSpec, orders: Sequence[int], s: int, t: Scalar, z: Scalar, N: int
) -> Fraction:
    if N < 1:
        raise DomainError("N must be at least 1.")
    t, z = Fraction(t), Fraction(z)
    running = {order: Fraction(0) for order in set(orders)}
    terms = []
    for n in range(1, N + 1):
        value = _numeric_f(spec, n)
        for order in running:
            running[order] += t ** (order * n) / value**order
        product = Fraction(1)
        for order in orders:
            product *= running[order]
        terms.append(product * z ** (s * n) / value**s)
    return exact_sum(terms)


def euler_sum_check(
    spec: FSpec,
    r_values: Sequence[int] = (2, 3),
    exact_terms: int = 200,
    reference: dict[int, float] | None = None,
    numeric_terms: int | None = None,
    tolerance: Fraction = Fraction(1, 1000),
) -> VerificationReport:
    """Direct sums against the squared f-zeta form, and optional limits within a tolerance."""
    params: dict[str, object] = {"f": render_fspec(spec), "r": list(r_values), "N": exact_terms}
    if spec.is_symbolic:
        return build_report("euler-sum-numeric", params, [], notes=["skipped: f is symbolic"])
    cells: list[ReportCell] = []
    for r in r_values:
        direct = euler_sum_numeric(spec, r, exact_terms, EulerMode.HARMONIC_OVER_F, direct=True)
        cells.append(make_cell([r, exact_terms], direct, euler_sum_closed_form(spec, r, exact_terms)))
    if reference:
        terms = numeric_terms or get_settings().euler_terms
        params["numeric_terms"] = terms
        for r, limit in reference.items():
            partial = euler_sum_numeric(spec, r, terms, EulerMode.HARMONIC_OVER_F)
            cells.append(
                make_cell([r, terms], partial, Fraction(limit), note="limit", tolerance=tolerance)
            )
    return build_report("euler-sum-numeric", params, cells)
