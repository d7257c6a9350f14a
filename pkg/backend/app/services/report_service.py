from __future__ import annotations

import json
import logging
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Iterable, Sequence

import pandas as pd

from app.schemas.export_schema import LaurentPolyPayload, SeriesExport, TriangleExport, ValueExport
from app.schemas.report_schema import ReportCell, VerificationReport
from app.services.exactnum_service import LaurentPoly, TruncSeries, format_rational
from app.services.fspec_service import render_fspec, render_t

if TYPE_CHECKING:
    from app.services.stirling_service import Triangle

_logger = logging.getLogger(__name__)

APPROXIMATE_DIGITS = 12

Value = LaurentPoly | Fraction | int


def render_value(value: Value) -> str:
    if isinstance(value, LaurentPoly):
        return str(value)
    return format_rational(value)


def format_decimal(value: Fraction | int, digits: int) -> str:
    scaled = round(Fraction(value) * 10**digits)
    with localcontext() as ctx:
        ctx.prec = max(len(str(abs(scaled))), 1) + 2
        return str(Decimal(scaled).scaleb(-digits))


def _render_approximate(value: Value) -> str:
    if isinstance(value, LaurentPoly):
        value = value.constant_value()
    return format_decimal(value, APPROXIMATE_DIGITS)


def make_cell(
    indices: Sequence[int],
    lhs: Value,
    rhs: Value,
    note: str | None = None,
    tolerance: Fraction | None = None,
) -> ReportCell:
    residual = lhs - rhs
    render = render_value
    if tolerance is None:
        passed = residual == 0
    else:
        exact = residual.constant_value() if isinstance(residual, LaurentPoly) else Fraction(residual)
        passed = abs(exact) <= tolerance
        render = _render_approximate
    return ReportCell(
        indices=list(indices),
        lhs=render(lhs),
        rhs=render(rhs),
        residual=render(residual),
        passed=passed,
        note=note,
    )


def build_report(
    identity: str,
    params: dict[str, Any],
    cells: Iterable[ReportCell],
    advisory: bool = False,
    notes: Iterable[str] = (),
) -> VerificationReport:
    report = VerificationReport(
        identity=identity,
        params=params,
        cells=list(cells),
        advisory=advisory,
        notes=list(notes),
    )
    failures = report.failures
    if failures:
        level = logging.INFO if advisory else logging.WARNING
        _logger.log(
            level,
            "%s: %d of %d cells fail%s (first at %s, residual %s)",
            identity,
            len(failures),
            len(report.cells),
            " (advisory)" if advisory else "",
            failures[0].indices,
            failures[0].residual,
        )
    else:
        _logger.debug("%s: %d cells pass", identity, len(report.cells))
    return report


def reports_to_json(reports: Sequence[VerificationReport]) -> str:
    payload = [report.model_dump(by_alias=True, mode="json") for report in reports]
    return json.dumps(payload, indent=2)


def reports_to_frame(reports: Sequence[VerificationReport]) -> pd.DataFrame:
    rows = [
        {
            "identity": report.identity,
            "indices": " ".join(str(i) for i in cell.indices),
            "lhs": cell.lhs,
            "rhs": cell.rhs,
            "residual": cell.residual,
            "pass": cell.passed,
            "advisory": report.advisory,
            "note": cell.note or "",
        }
        for report in reports
        for cell in report.cells
    ]
    columns = ["identity", "indices", "lhs", "rhs", "residual", "pass", "advisory", "note"]
    return pd.DataFrame(rows, columns=columns)


def triangle_export(triangle: Triangle, kind: str = "s1") -> TriangleExport:
    return TriangleExport(
        f=render_fspec(triangle.spec),
        t=render_t(triangle.t),
        kind=kind,
        rows=[[LaurentPolyPayload(**entry.to_json()) for entry in row] for row in triangle.rows],
    )


def triangle_to_frame(triangle: Triangle) -> pd.DataFrame:
    rows = [
        {"n": n, "k": k, "value": render_value(entry)}
        for n, row in enumerate(triangle.rows)
        for k, entry in enumerate(row)
    ]
    return pd.DataFrame(rows, columns=["n", "k", "value"])


def series_export(series: TruncSeries) -> SeriesExport:
    return SeriesExport(**series.to_json())


def value_export(
    quantity: str, params: dict[str, Any], value: Value, digits: int | None = None
) -> ValueExport:
    decimal = None
    if digits is not None:
        if isinstance(value, LaurentPoly):
            decimal = format_decimal(value.constant_value(), digits) if value.is_constant() else None
        else:
            decimal = format_decimal(value, digits)
    return ValueExport(quantity=quantity, params=params, value=render_value(value), decimal=decimal)


def merge_reports(
    identity: str,
    params: dict[str, Any],
    reports: Iterable[VerificationReport],
    advisory: bool = False,
    notes: Sequence[str] = (),
) -> VerificationReport:
    """Concatenate cells of per-index reports into one report, in order."""
    reports = list(reports)
    cells = [cell for report in reports for cell in report.cells]
    notes = list(notes)
    for report in reports:
        notes.extend(note for note in report.notes if note not in notes)
    return build_report(identity, params, cells, advisory=advisory or any(r.advisory for r in reports), notes=notes)
