import pytest

from app.core.errors import ConfigError
from app.services.fspec_service import parse_fspec, parse_t
from app.services.report_service import build_report, make_cell
from app.services.verify_service import SUITES, SuiteContext, exit_status, run_suites, zeta_reference


def test_every_suite_runs_for_the_classical_case(classical) -> None:
    context = SuiteContext.for_spec(classical, parse_t("1"), 4)
    reports = run_suites(context)
    identities = {report.identity for report in reports}
    assert {"s1-oracle", "prop1-derived", "prop1-printed", "wf-derived", "euler-sum-numeric"} <= identities
    assert exit_status(reports) == 0
    binding = [report for report in reports if not report.advisory]
    assert all(report.passed for report in binding)
    assert any(not report.passed for report in reports if report.advisory)


def test_full_sweep_is_clean_across_configurations(verify_configuration) -> None:
    spec, t = verify_configuration
    context = SuiteContext.for_spec(spec, t, 3)
    reports = run_suites(context)
    assert exit_status(reports) == 0
    assert {report.identity for report in reports} >= {"prop1-derived", "harmonic-subst", "q-binomial"}


def test_symbolic_f_skips_orders_without_exact_roots() -> None:
    spec = parse_fspec("qpow:1")
    reports = run_suites(SuiteContext(spec, parse_t("4"), 3), "prop1")
    derived = reports[0]
    assert derived.identity == "prop1-derived"
    assert {cell.indices[0] for cell in derived.cells} == {1}
    assert derived.notes == [
        "skipped p=2: symbolic f needs exact roots of t",
        "skipped p=3: symbolic f needs exact roots of t",
    ]
    assert reports[1].advisory
    subst = run_suites(SuiteContext(spec, parse_t("4"), 3), "harmonic-routes")[2]
    assert {cell.indices[0] for cell in subst.cells} == {1, 2}
    empty = run_suites(SuiteContext(spec, parse_t("3/2"), 3), "prop1")[0]
    assert empty.cells == []
    assert empty.passed


def test_table_context_is_clamped(table_spec) -> None:
    context = SuiteContext.for_spec(table_spec, parse_t("1"), 12)
    assert context.max_n == 10
    assert exit_status(run_suites(context, "prop2")) == 0


def test_unknown_suite_raises() -> None:
    with pytest.raises(ConfigError):
        run_suites(SuiteContext(parse_fspec("linear:1,0")), "nope")
    assert "q-binomial" in SUITES


def test_exit_status_ignores_advisory_failures() -> None:
    advisory = build_report("printed", {}, [make_cell([1], 1, 2)], advisory=True)
    binding = build_report("derived", {}, [make_cell([1], 1, 2)])
    assert exit_status([advisory]) == 0
    assert exit_status([advisory, binding]) == 1


def test_zeta_reference_values() -> None:
    reference = zeta_reference((2,))
    assert abs(reference[2] - 1.8940656589944918) < 1e-12
