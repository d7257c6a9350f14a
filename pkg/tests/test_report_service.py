import json
import logging
from fractions import Fraction

from app.schemas.report_schema import ReportCell
from app.services.exactnum_service import LaurentPoly, TruncSeries
from app.services.report_service import (
    build_report,
    format_decimal,
    make_cell,
    merge_reports,
    reports_to_frame,
    reports_to_json,
    series_export,
    triangle_export,
    triangle_to_frame,
    value_export,
)
from app.services.stirling_service import s1_triangle


def test_make_cell_exact_and_symbolic() -> None:
    cell = make_cell([2, 1], Fraction(1, 2), Fraction(1, 3))
    assert not cell.passed
    assert cell.residual == "1/6"
    t = LaurentPoly.monomial(1)
    symbolic = make_cell([1], 2 * t**-1, t**-1 + t**-1, note="sym")
    assert symbolic.passed
    assert symbolic.lhs == "2*t^-1"
    assert symbolic.note == "sym"


def test_make_cell_with_tolerance_renders_decimals() -> None:
    cell = make_cell([2], Fraction(1, 3), Fraction(1, 3) + Fraction(1, 10000), tolerance=Fraction(1, 1000))
    assert cell.passed
    assert cell.lhs == "0.333333333333"
    assert cell.residual == "-0.000100000000"


def test_format_decimal() -> None:
    assert format_decimal(Fraction(1, 3), 5) == "0.33333"
    assert format_decimal(Fraction(-5, 2), 2) == "-2.50"
    assert format_decimal(Fraction(21, 16), 4) == "1.3125"


def test_report_serialises_pass_alias() -> None:
    report = build_report("demo", {"N": 1}, [make_cell([0], 1, 1)])
    payload = json.loads(reports_to_json([report]))
    assert payload[0]["cells"][0]["pass"] is True
    assert "passed" not in payload[0]["cells"][0]
    assert payload[0]["advisory"] is False
    cell = ReportCell.model_validate({"indices": [1], "lhs": "1", "rhs": "1", "residual": "0", "pass": True})
    assert cell.passed


def test_failing_report_logs_warning_and_advisory_logs_info(caplog) -> None:
    with caplog.at_level(logging.INFO, logger="app.services.report_service"):
        build_report("bad", {}, [make_cell([1], 1, 2)])
        build_report("printed", {}, [make_cell([1], 1, 2)], advisory=True)
    levels = {record.getMessage().split(":")[0]: record.levelno for record in caplog.records}
    assert levels["bad"] == logging.WARNING
    assert levels["printed"] == logging.INFO


def test_reports_to_frame_flattens_cells() -> None:
    report = build_report("demo", {}, [make_cell([3, 2], 1, 1, note="x"), make_cell([4, 1], 2, 1)])
    frame = reports_to_frame([report])
    assert list(frame.columns) == ["identity", "indices", "lhs", "rhs", "residual", "pass", "advisory", "note"]
    assert frame.loc[0, "indices"] == "3 2"
    assert frame["pass"].tolist() == [True, False]
    assert reports_to_frame([]).empty


def test_triangle_exports(classical) -> None:
    triangle = s1_triangle(classical, 3)
    export = triangle_export(triangle)
    assert export.f == "linear:1,0"
    assert export.rows[3][2].terms == {"0": "3"}
    frame = triangle_to_frame(triangle)
    assert len(frame) == 1 + 2 + 3 + 4
    assert frame[(frame["n"] == 3) & (frame["k"] == 1)]["value"].item() == "2"


def test_series_and_value_exports() -> None:
    export = series_export(TruncSeries([1, Fraction(1, 2)]))
    assert export.coeffs == ["1", "1/2"]
    value = value_export("demo", {}, Fraction(21, 16), digits=2)
    assert value.value == "21/16"
    assert value.decimal == "1.31"
    symbolic = value_export("demo", {}, LaurentPoly.monomial(2), digits=3)
    assert symbolic.decimal is None


def test_merge_reports_keeps_order_and_advisory_flag() -> None:
    first = build_report("a", {}, [make_cell([1], 1, 1)], notes=["shared"])
    second = build_report("a", {}, [make_cell([2], 1, 2)], advisory=True, notes=["shared"])
    merged = merge_reports("a", {"k": 2}, [first, second])
    assert [cell.indices for cell in merged.cells] == [[1], [2]]
    assert merged.advisory
    assert merged.notes == ["shared"]
    assert len(merged.failures) == 1
