from __future__ import annotations

import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator

from app.core.config import Settings
from app.core.errors import ConfigError
from app.schemas.run_config_schema import RunConfig
from app.services.convpoly_service import fit_experimental_gf, sigma_value
from app.services.exactnum_service import LaurentPoly
from app.services.fharmonic_service import euler_sum_numeric, fharmonic_value
from app.services.fspec_service import FSpec, parse_fspec, parse_t, render_fspec, validate_configuration
from app.services.report_service import (
    reports_to_frame,
    reports_to_json,
    series_export,
    triangle_export,
    triangle_to_frame,
    value_export,
)
from app.services.stirling_service import Triangle, s1_triangle, s2_entry
from app.services.verify_service import SuiteContext, exit_status, run_suites

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CommandOutput:
    text: str
    exit_code: int = 0


def _load_configuration(config: RunConfig) -> tuple[FSpec, LaurentPoly]:
    spec = parse_fspec(config.f)
    t = parse_t(config.t)
    validate_configuration(spec, t)
    return spec, t


def _check_cap(name: str, value: int, settings: Settings) -> None:
    if value > settings.max_n:
        raise ConfigError(f"{name} = {value} exceeds the configured cap {settings.max_n} (FSTIRLING_MAX_N).")


def triangle_command(config: RunConfig, settings: Settings) -> CommandOutput:
    spec, t = _load_configuration(config)
    rows = config.rows or 0
    _check_cap("--rows", rows, settings)
    if config.kind == "s1":
        triangle = s1_triangle(spec, rows, t)
    else:
        entries = tuple(
            tuple(s2_entry(spec, n, k, t, config.normalization) for k in range(n + 1)) for n in range(rows + 1)
        )
        triangle = Triangle(spec, t, entries)
    if config.output_format == "csv":
        return CommandOutput(triangle_to_frame(triangle).to_csv(index=False))
    return CommandOutput(triangle_export(triangle, config.kind).model_dump_json(indent=2))


def harmonic_command(config: RunConfig, settings: Settings) -> CommandOutput:
    spec, t = _load_configuration(config)
    result = fharmonic_value(spec, config.p, config.n, t, config.method)
    params = {"f": config.f, "t": config.t, "p": config.p, "n": config.n, "method": config.method, "arg": result.arg}
    return CommandOutput(value_export("harmonic", params, result.value, config.decimal).model_dump_json(indent=2))


def convpoly_command(config: RunConfig, settings: Settings) -> CommandOutput:
    spec, t = _load_configuration(config)
    x = config.x if config.x is not None else 0
    if config.fit:
        fit = fit_experimental_gf(spec, x, config.n, t)
        payload = {
            "series": series_export(fit.series).model_dump(mode="json"),
            "report": fit.report.model_dump(by_alias=True, mode="json"),
        }
        status = 0 if fit.report.passed else 1
        return CommandOutput(json.dumps(payload, indent=2), status)
    result = sigma_value(spec, config.variant, config.n, x, t)
    params = {"f": render_fspec(spec), "t": config.t, "variant": result.variant.value, "n": config.n, "x": x}
    return CommandOutput(value_export("sigma", params, result.value, config.decimal).model_dump_json(indent=2))


@contextmanager
def unbounded_int_digits() -> Iterator[None]:
    """Lift the int-to-str digit limit while exact sums with huge denominators are rendered."""
    if not hasattr(sys, "get_int_max_str_digits"):
        yield
        return
    previous = sys.get_int_max_str_digits()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(previous)


def eulersum_command(config: RunConfig, settings: Settings) -> CommandOutput:
    spec = parse_fspec(config.f)
    terms = config.terms or settings.euler_terms
    value = euler_sum_numeric(spec, config.r, terms, config.mode)
    params = {"f": render_fspec(spec), "r": config.r, "N": terms, "mode": config.mode}
    with unbounded_int_digits():
        text = value_export("euler-sum", params, value, config.decimal).model_dump_json(indent=2)
    return CommandOutput(text)


def verify_command(config: RunConfig, settings: Settings) -> CommandOutput:
    spec, t = _load_configuration(config)
    _check_cap("--max-n", config.max_n, settings)
    context = SuiteContext.for_spec(spec, t, config.max_n)
    reports = run_suites(context, config.suite)
    status = exit_status(reports)
    failing = [r.identity for r in reports if r.failures and not r.advisory]
    if failing:
        _logger.warning("Failing binding reports: %s", ", ".join(failing))
    if config.output_format == "csv":
        return CommandOutput(reports_to_frame(reports).to_csv(index=False), status)
    return CommandOutput(reports_to_json(reports), status)


HANDLERS = {
    "triangle": triangle_command,
    "harmonic": harmonic_command,
    "convpoly": convpoly_command,
    "eulersum": eulersum_command,
    "verify": verify_command,
}
