from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from sympy import zeta

from app.core.errors import ConfigError
from app.schemas.report_schema import VerificationReport
from app.services import convpoly_service as convpoly
from app.services import fharmonic_service as fharmonic
from app.services import stirling_service as stirling
from app.services.exactnum_service import LaurentPoly
from app.services.factorial_service import ONE
from app.services.fspec_service import FKind, FSpec, render_fspec, render_t, t_roots
from app.services.report_service import merge_reports

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuiteContext:
    spec: FSpec
    t: LaurentPoly = ONE
    max_n: int = 8

    @property
    def params(self) -> dict[str, object]:
        return {"f": render_fspec(self.spec), "t": render_t(self.t), "max_n": self.max_n}

    @classmethod
    def for_spec(cls, spec: FSpec, t: LaurentPoly = ONE, max_n: int = 8) -> SuiteContext:
        """Clamp max_n so every suite stays inside a table f (rows up to max_n + 2)."""
        if spec.kind is FKind.TABLE and max_n > len(spec.params) - 2:
            clamped = max(len(spec.params) - 2, 1)
            _logger.warning(
                "Table f has %d values; sweeping to n = %d instead of %d", len(spec.params), clamped, max_n
            )
            max_n = clamped
        return cls(spec, t, max_n)

    @property
    def is_classical(self) -> bool:
        return self.spec.kind is FKind.LINEAR and self.spec.params == (Fraction(1), Fraction(0))


Suite = Callable[[SuiteContext], list[VerificationReport]]


def _s1_oracle(ctx: SuiteContext) -> list[VerificationReport]:
    return [stirling.s1_oracle_check(ctx.spec, ctx.max_n, ctx.t)]


def _s1_columns(ctx: SuiteContext) -> list[VerificationReport]:
    return [stirling.s1_column_closed_forms(ctx.spec, ctx.max_n - 1, ctx.t)]


def _s2_geom(ctx: SuiteContext) -> list[VerificationReport]:
    reports = []
    for normalization in (stirling.NEWTON, stirling.PRINTED):
        per_k = [
            stirling.s2_geom_transform_check(ctx.spec, ctx.max_n, k, ctx.t, normalization)
            for k in range(1, 6)
        ]
        reports.append(merge_reports(f"s2-geom-{normalization}", ctx.params, per_k))
    return reports


def _s2star_ogf(ctx: SuiteContext) -> list[VerificationReport]:
    per_k = [stirling.s2star_ogf_check(ctx.spec, k, ctx.max_n) for k in range(1, 5)]
    return [merge_reports("s2star-ogf", ctx.params, per_k)]


def _s2star_egf(ctx: SuiteContext) -> list[VerificationReport]:
    per_r = [stirling.s2star_egf_check(ctx.spec, r, ctx.max_n) for r in range(1, 4)]
    return [merge_reports("s2star-egf", ctx.params, per_r)]


def _subst_p_max(ctx: SuiteContext) -> int:
    if not ctx.spec.is_symbolic:
        return 4
    p_max = 0
    while p_max < 4 and t_roots(ctx.t, [p_max + 1]).exact:
        p_max += 1
    return p_max


def _harmonic_routes(ctx: SuiteContext) -> list[VerificationReport]:
    return fharmonic.harmonic_routes_check(
        ctx.spec, ctx.t, p_max=5, n_max=ctx.max_n, subst_p_max=_subst_p_max(ctx)
    )


def _wf(ctx: SuiteContext) -> list[VerificationReport]:
    return [
        fharmonic.s1_from_wf_check(ctx.spec, ctx.max_n, ctx.t, fharmonic.DERIVED),
        fharmonic.s1_from_wf_check(ctx.spec, ctx.max_n, ctx.t, fharmonic.PRINTED),
    ]


def _corollary(ctx: SuiteContext) -> list[VerificationReport]:
    return [fharmonic.corollary_expansions_check(ctx.spec, ctx.max_n, ctx.t)]


def _prop1_orders(ctx: SuiteContext) -> tuple[list[int], list[int]]:
    """Orders p whose roots t^(1/p), t^(1/(p+1)) are usable for this f, and the skipped ones."""
    usable, skipped = [], []
    for p in range(1, 4):
        if ctx.spec.is_symbolic and not t_roots(ctx.t, [p, p + 1]).exact:
            skipped.append(p)
        else:
            usable.append(p)
    return usable, skipped


def _prop1(ctx: SuiteContext) -> list[VerificationReport]:
    reports = []
    n_max = min(ctx.max_n, 6)
    usable, skipped = _prop1_orders(ctx)
    notes = [f"skipped p={p}: symbolic f needs exact roots of t" for p in skipped]
    for factor in (fharmonic.DERIVED, fharmonic.PRINTED):
        cells = [
            fharmonic.prop1_recurrence_check(ctx.spec, p, n, ctx.t, factor)
            for p in usable
            for n in range(n_max + 1)
        ]
        reports.append(
            merge_reports(
                f"prop1-{factor}", ctx.params, cells, advisory=factor != fharmonic.DERIVED, notes=notes
            )
        )
    return reports


def _prop2(ctx: SuiteContext) -> list[VerificationReport]:
    per_cell = [
        fharmonic.prop2_functional_eq_check(ctx.spec, p, n, ctx.t)
        for p in range(2, 7)
        for n in range(ctx.max_n + 1)
    ]
    return [merge_reports("prop2", ctx.params, per_cell)]


def _euler_identity(ctx: SuiteContext) -> list[VerificationReport]:
    per_cell = [
        fharmonic.stirling_harmonic_identity_check(p, n)
        for p in range(3, 7)
        for n in range(1, 2 * ctx.max_n + 1)
    ]
    return [merge_reports("euler-identity", {"max_n": 2 * ctx.max_n}, per_cell)]


def _convpoly_rec(ctx: SuiteContext) -> list[VerificationReport]:
    return [
        convpoly.sigma_recurrence_check(ctx.spec, ctx.max_n, ctx.max_n, ctx.t),
        *convpoly.sigma_base_line_check(ctx.spec, ctx.max_n, ctx.t),
        convpoly.sigma_definition_check(ctx.spec, ctx.max_n, ctx.t),
    ]


def _gf_special(ctx: SuiteContext) -> list[VerificationReport]:
    n_max = min(ctx.max_n, 6)
    return [
        convpoly.stirlingpoly_gf_check(family, n_max, ctx.max_n)
        for family in convpoly.GfFamily
    ]


def _eulerian2(ctx: SuiteContext) -> list[VerificationReport]:
    return [convpoly.eulerian2_identity_check(min(ctx.max_n, 6), max(ctx.max_n, 12))]


def _conv_shift(ctx: SuiteContext) -> list[VerificationReport]:
    n_max = min(ctx.max_n, 5)
    x_max = min(ctx.max_n, 6)
    stirling_coeffs = list(convpoly.stirling_generating_series(n_max).coeffs[1:])
    reports = []
    for t_shift in range(3):
        reports.append(convpoly.conv_family_shift_check([1], t_shift, n_max, x_max))
        reports.append(convpoly.conv_family_shift_check(stirling_coeffs, t_shift, n_max, x_max))
    return [merge_reports("conv-shift", {"n_max": n_max, "x_max": x_max}, reports)]


def _experimental_fit(ctx: SuiteContext) -> list[VerificationReport]:
    fits = [
        convpoly.fit_experimental_gf(ctx.spec, x, x - 1, ctx.t).report
        for x in range(2, ctx.max_n + 1)
    ]
    return [
        merge_reports("experimental-fit", ctx.params, fits),
        convpoly.experimental_binomial_check(ctx.spec, ctx.max_n, ctx.t),
    ]


def zeta_reference(r_values: tuple[int, ...] = (2, 3)) -> dict[int, float]:
    """(zeta(r)^2 + zeta(2r)) / 2 for the ordinary harmonic numbers."""
    return {r: float((zeta(r) ** 2 + zeta(2 * r)) / 2) for r in r_values}


def _euler_sum_numeric(ctx: SuiteContext) -> list[VerificationReport]:
    reference = zeta_reference() if ctx.is_classical else None
    terms = len(ctx.spec.params) if ctx.spec.kind is FKind.TABLE else 200
    return [fharmonic.euler_sum_check(ctx.spec, exact_terms=terms, reference=reference)]


def _q_binomial(ctx: SuiteContext) -> list[VerificationReport]:
    return [stirling.qbinomial_check(offset, ctx.max_n) for offset in (0, 1)]


SUITES: dict[str, Suite] = {
    "s1-oracle": _s1_oracle,
    "s1-columns": _s1_columns,
    "s2-geom": _s2_geom,
    "s2star-ogf": _s2star_ogf,
    "s2star-egf": _s2star_egf,
    "harmonic-routes": _harmonic_routes,
    "wf": _wf,
    "corollary": _corollary,
    "prop1": _prop1,
    "prop2": _prop2,
    "euler-identity": _euler_identity,
    "convpoly-rec": _convpoly_rec,
    "gf-special": _gf_special,
    "eulerian2": _eulerian2,
    "conv-shift": _conv_shift,
    "experimental-fit": _experimental_fit,
    "euler-sum-numeric": _euler_sum_numeric,
    "q-binomial": _q_binomial,
}


def run_suites(ctx: SuiteContext, suite: str = "all") -> list[VerificationReport]:
    if suite == "all":
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise ConfigError(f"Unknown suite {suite!r}; choose one of: all, {', '.join(SUITES)}.")
    reports: list[VerificationReport] = []
    for name in names:
        _logger.info("Running suite %s for f=%s t=%s", name, render_fspec(ctx.spec), render_t(ctx.t))
        produced = SUITES[name](ctx)
        cells = sum(len(report.cells) for report in produced)
        _logger.info("Suite %s finished: %d reports, %d cells", name, len(produced), cells)
        reports.extend(produced)
    return reports


def exit_status(reports: list[VerificationReport]) -> int:
    """1 if any binding report has a failing cell, else 0."""
    return 1 if any(not report.advisory and not report.passed for report in reports) else 0
