"""
xxzff.cli
~~~~~~~~~

This module contains the ``xxzff`` command line interface.

Exit codes are 0 on success, 2 for invalid input, 3 for numerical failures
and failed verification checks, and 4 for cache errors.

"""

import argparse
import csv
import json
import logging
import sys
from typing import Any, List, Optional, Sequence, TextIO

import numpy as np

from .chain import Chain
from .config import prepare_restricted_sum
from .errors import CacheError, DomainError, InvalidConfigError, NumericalError
from .models import ResponseTotal
from .response import parse_grid
from .restricted import restricted_sum
from .version import __version__

logger = logging.getLogger(__name__)

#: Version of the JSON documents written to stdout.
OUTPUT_FORMAT = 1

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_CACHE = 4

_CORRELATOR_COLUMNS = "m, t, re, im, error"

_RESPONSE_COLUMNS = (
    "k, omega, S, then one column per channel named "
    "h<n_h>_s<r>x<n_r>_l<l_plus>,<l_minus>"
)


def _jsonable(value: Any) -> Any:
    if hasattr(value, "_asdict"):
        return {k: _jsonable(v) for k, v in value._asdict().items()}
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.generic):
        return value.item()
    return value


def _emit(document: Any, out: TextIO) -> None:
    json.dump({"format": OUTPUT_FORMAT, **_jsonable(document)}, out, indent=2)
    out.write("\n")


def _channel_name(channel) -> str:
    config = channel.n_config
    strings = "".join(f"_s{r}x{n}" for r, n in config.n_strings if n)
    l_plus, l_minus = config.umklapp
    return f"h{config.n_holes}{strings}_l{l_plus},{l_minus}"


def _write_response_csv(
    points: Sequence, totals: List[ResponseTotal], out: TextIO
) -> None:
    writer = csv.writer(out)
    names = [_channel_name(c) for c in totals[0].channels] if totals else []
    writer.writerow(["k", "omega", "S"] + names)
    for (k, omega), total in zip(points, totals):
        row = [repr(float(k)), repr(float(omega)), repr(total.value)]
        writer.writerow(row + [repr(c.value) for c in total.channels])


def _cell(value: Any) -> str:
    return "" if value is None else str(value)


def _chain(args: argparse.Namespace) -> Chain:
    if not args.config:
        raise InvalidConfigError("A run configuration is required (--config)")
    return Chain.from_file(args.config)


def cmd_thermo(args: argparse.Namespace, out: TextIO) -> int:
    report = _chain(args).thermo()
    if report.cache_hit:
        logger.info("Ground state read from the cache")
    _emit({"thermo": report}, out)
    return EXIT_OK


def cmd_strings(args: argparse.Namespace, out: TextIO) -> int:
    writer = csv.writer(out)
    writer.writerow(["r", "exists", "delta_r", "s_r"])
    for spec in _chain(args).strings(args.r_max):
        writer.writerow(
            [spec.r, str(spec.exists).lower(), _cell(spec.delta_r), _cell(spec.s_r)]
        )
    return EXIT_OK


def cmd_exponents(args: argparse.Namespace, out: TextIO) -> int:
    chain = _chain(args)
    description = chain.config.get("excitation")
    if description is not None and args.operator_spin is not None:
        description = {**description, "operator_spin": args.operator_spin}
    exponents = chain.exponents(description)
    _emit({"excitation": chain.excitation(description), "exponents": exponents}, out)
    return EXIT_OK


def cmd_correlator(args: argparse.Namespace, out: TextIO) -> int:
    chain = _chain(args)
    points = [(m, t) for m in args.m for t in args.t]
    values = chain.correlator_sweep(points)
    if args.csv_sweep or chain.config["output"] == "csv":
        writer = csv.writer(out)
        writer.writerow(["m", "t", "re", "im", "error"])
        for (m, t), value in zip(points, values):
            error = sum(term.quadrature_error_estimate for term in value.terms)
            total = value.total
            writer.writerow(
                [m, repr(t), repr(total.real), repr(total.imag), repr(error)]
            )
        return EXIT_OK
    rows = [{"m": m, "t": t, **v._asdict()} for (m, t), v in zip(points, values)]
    _emit({"correlator": rows}, out)
    return EXIT_OK


def cmd_response(args: argparse.Namespace, out: TextIO) -> int:
    chain = _chain(args)
    if args.grid:
        ks, omegas = parse_grid(args.grid)
        totals = chain.response_grid(ks, omegas)
        points = [(k, omega) for k in ks for omega in omegas]
        _write_response_csv(points, totals, out)
        return EXIT_OK
    if args.k is None or args.omega is None:
        raise DomainError("response needs --k and --omega, or --grid")
    total = chain.response(args.k, args.omega)
    if chain.config["output"] == "csv":
        _write_response_csv([(args.k, args.omega)], [total], out)
    else:
        _emit({"k": args.k, "omega": args.omega, "response": total}, out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, out: TextIO) -> int:
    if args.check == "restricted-sum":
        cfg = prepare_restricted_sum(
            {"nu": args.nu, "ell": args.ell, "L": args.L, "x": args.x, "cut": args.cut}
        )
        _emit({"restricted_sum": restricted_sum(cfg)}, out)
        return EXIT_OK
    checks = _chain(args).verify(quick=args.quick)
    failed = [c.name for c in checks if not c.passed and not c.report_only]
    _emit({"checks": checks, "failed": failed}, out)
    if failed:
        logger.error("%d checks failed: %s", len(failed), ", ".join(failed))
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xxzff",
        description="Correlation functions of the massless XXZ chain.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="more logging (repeatable)"
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    parser.add_argument("-c", "--config", help="JSON run configuration")
    commands = parser.add_subparsers(dest="command", required=True)

    thermo = commands.add_parser("thermo", help="solve and cache the ground state")
    thermo.set_defaults(handler=cmd_thermo)

    strings = commands.add_parser("strings", help="classify the bound states")
    strings.add_argument("--r-max", type=int, default=8)
    strings.set_defaults(handler=cmd_strings)

    exponents = commands.add_parser(
        "exponents", help="critical exponents of the configured excitation"
    )
    exponents.add_argument("--operator-spin", type=int, choices=(-1, 0, 1))
    exponents.set_defaults(handler=cmd_exponents)

    correlator = commands.add_parser(
        "correlator",
        help="the truncated correlator",
        description=f"With --csv-sweep the columns are: {_CORRELATOR_COLUMNS}.",
    )
    correlator.add_argument("--m", type=int, nargs="+", required=True)
    correlator.add_argument("--t", type=float, nargs="+", required=True)
    correlator.add_argument(
        "--csv-sweep", action="store_true", help="one CSV row per (m, t)"
    )
    correlator.set_defaults(handler=cmd_correlator)

    response = commands.add_parser(
        "response",
        help="the dynamic response function",
        description=f"CSV columns: {_RESPONSE_COLUMNS}.",
    )
    response.add_argument("--k", type=float)
    response.add_argument("--omega", type=float)
    response.add_argument("--grid", help="kmin:kmax:nk,omin:omax:no, written as CSV")
    response.set_defaults(handler=cmd_response)

    verify = commands.add_parser("verify", help="run the verification suite")
    verify.add_argument("--quick", action="store_true")
    verify.set_defaults(handler=cmd_verify, check=None)
    checks = verify.add_subparsers(dest="check")
    restricted = checks.add_parser(
        "restricted-sum", help="compare both sides of the restricted sum identity"
    )
    restricted.add_argument("--nu", type=float, required=True)
    restricted.add_argument("--ell", type=int, required=True)
    restricted.add_argument("--L", type=float, required=True)
    restricted.add_argument("--x", type=float, required=True)
    restricted.add_argument("--cut", type=int, default=60)
    return parser


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    else:
        level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(verbose, 2)]
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def main(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    out = sys.stdout if out is None else out
    try:
        return args.handler(args, out)
    except (InvalidConfigError, DomainError) as ex:
        logger.error("%s", ex)
        return EXIT_INVALID
    except CacheError as ex:
        logger.error("%s", ex)
        return EXIT_CACHE
    except NumericalError as ex:
        logger.error("%s (residual %s, tolerance %s)", ex, ex.residual, ex.tolerance)
        return EXIT_NUMERICAL
