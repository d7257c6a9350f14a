from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from pydantic import ValidationError

from app.api.commands import HANDLERS
from app.core.config import Settings, get_settings
from app.core.errors import ConfigError, DomainError, FStirlingError
from app.core.logging_config import configure_logging
from app.schemas.run_config_schema import RunConfig
from app.services.verify_service import SUITES

_logger = logging.getLogger(__name__)


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--f", default="linear:1,0", help="linear:a,b | poly:c0,c1,... | qpow:offset | qpow:base,offset | table:path"
    )
    common.add_argument("--t", default="1", help="rational value or 'symbolic'")
    common.add_argument("--format", dest="output_format", choices=["json", "csv"], default="json")
    common.add_argument("--output", default=None, help="write to this path instead of stdout")
    common.add_argument("--decimal", type=int, nargs="?", const=settings.decimal_digits, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog=settings.app_name, description="Generalized Stirling triangles and f-harmonic identities."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    triangle = sub.add_parser("triangle", parents=[common], help="first- or second-kind triangle")
    triangle.add_argument("--kind", choices=["s1", "s2"], default="s1")
    triangle.add_argument("--normalization", choices=["printed", "newton"], default="newton")
    triangle.add_argument("--rows", type=int, required=True)

    harmonic = sub.add_parser("harmonic", parents=[common], help="p-order f-harmonic number")
    harmonic.add_argument("--p", type=int, default=1)
    harmonic.add_argument("--n", type=int, required=True)
    harmonic.add_argument("--method", choices=["direct", "ftilde", "roots", "subst"], default="direct")

    convpoly = sub.add_parser("convpoly", parents=[common], help="convolution-polynomial analogs")
    convpoly.add_argument("--n", type=int, default=0)
    convpoly.add_argument("--x", type=int, required=True)
    convpoly.add_argument("--variant", choices=["sigma", "sigma_tilde"], default="sigma")
    convpoly.add_argument("--fit", action="store_true", help="fit F(z) to the targets up to --n")

    eulersum = sub.add_parser("eulersum", parents=[common], help="Euler-sum partial sums")
    eulersum.add_argument("--r", type=int, default=2)
    eulersum.add_argument("--N", dest="terms", type=int, default=None)
    eulersum.add_argument("--mode", choices=["harmonic_over_f", "fzeta", "fzeta2r"], default="harmonic_over_f")

    verify = sub.add_parser("verify", parents=[common], help="run identity suites")
    verify.add_argument("--suite", choices=["all", *SUITES], default="all")
    verify.add_argument("--max-n", dest="max_n", type=int, default=8)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    settings = get_settings()
    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2

    configure_logging("DEBUG" if args.verbose else settings.log_level)
    try:
        config = RunConfig(**{key: value for key, value in vars(args).items() if value is not None})
        output = HANDLERS[config.command](config, settings)
    except ValidationError as exc:
        print(f"{parser.prog}: invalid arguments: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, DomainError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 2
    except FStirlingError as exc:
        _logger.error("%s failed: %s", args.command, exc)
        return 2

    if config.output is not None:
        config.output.write_text(output.text, encoding="utf-8")
        _logger.info("Wrote %s output to %s", config.command, config.output)
    else:
        sys.stdout.write(output.text)
        if not output.text.endswith("\n"):
            sys.stdout.write("\n")
    return output.exit_code


if __name__ == "__main__":
    sys.exit(run())
