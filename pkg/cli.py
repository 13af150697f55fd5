"""Command-line front end: reproduce tables, run verification suites, build states and evolve them."""
import sys
import argparse
import logging
from typing import Any, Dict, List, Optional, Sequence, TextIO

import numpy as np

from algebra.angular_ops import RotorConstants
from config.constants import EVOLUTION
from config.settings import configure_logging, get_settings
from services.evolution_service import EvolutionState
from services.initialization_service import InitializationService
from states.coherent import CoherentParams, default_space, mcs
from states.families import SequenceFamily, builtin_family, norm_series
from utils.csv_formatter import FORMATS, TableFormatter
from utils.errors import RotorError
from utils.hilbert import SpaceSpec, Tower
from utils.state_io import parse_complex, read_drive, read_family, write_state

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

TABLES = ("families", "norms", "expectations", "tensors", "measures", "all")
SUITES = ("algebra", "identities", "coherent", "expectations", "uncertainty", "zrep", "mellin", "unity",
          "evolution", "all")


def _rotor_constants(text: str) -> RotorConstants:
    values = [float(part) for part in text.split(",")]
    if len(values) != 3:
        raise ValueError(f"Expected 'A0,A1,A2', got {text!r}")
    return RotorConstants(*values)


def _add_family_arguments(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--family", type=int, choices=range(1, 9), help="builtin family id")
    group.add_argument("--family-file", help="family file: header 'tower radius', then 'two_j re im' rows")


def _add_state_arguments(parser: argparse.ArgumentParser) -> None:
    _add_family_arguments(parser)
    parser.add_argument("--z", type=parse_complex, required=True, help="complex z, e.g. 0.5 or 0.3-0.1i")
    parser.add_argument("--zl", type=parse_complex, default=0j, help="lab parameter zeta_L")
    parser.add_argument("--zm", type=parse_complex, default=0j, help="molecular parameter zeta_M")
    parser.add_argument("--jmax", type=float, help="truncate at this j (default: tail-controlled)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotor-coherent", description=__doc__)
    parser.add_argument("--format", choices=FORMATS, default=None, help="csv or aligned text")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    families = commands.add_parser("families", help="list families or their coefficients and norms")
    families.add_argument("action", choices=("table", "coefficients", "norm"))
    _add_family_arguments(families, required=False)
    families.add_argument("--jmax", type=float, default=4.0)
    families.add_argument("--z", type=parse_complex, default=None)

    state = commands.add_parser("mcs", help="build a molecular coherent state")
    _add_state_arguments(state)
    state.add_argument("--output", help="write the state file here instead of printing")

    expect = commands.add_parser("expect", help="expectation report in closed form")
    _add_state_arguments(expect)
    expect.add_argument("--direct", action="store_true", help="add the truncated-state oracle row")

    tables = commands.add_parser("tables", help="reproduce the published tables")
    tables.add_argument("action", choices=("reproduce",))
    tables.add_argument("--which", choices=TABLES, default="all")

    verify = commands.add_parser("verify", help="run a verification suite")
    verify.add_argument("suite", choices=SUITES)
    verify.add_argument("--jmax", type=float, default=None)
    verify.add_argument("--family", type=int, choices=range(1, 9), action="append", dest="families")
    verify.add_argument("--draws", type=int, default=None)

    evolve = commands.add_parser("evolve", help="evolve parameters under a drive, or run the rotor demo")
    _add_state_arguments(evolve)
    source = evolve.add_mutually_exclusive_group(required=True)
    source.add_argument("--drive", help="key = value drive file with aL, aL0, aM, aM0")
    source.add_argument("--rotor", type=_rotor_constants, help="rotor constants 'A0,A1,A2'")
    evolve.add_argument("--t-end", type=float, default=EVOLUTION["default_t_end"])
    evolve.add_argument("--dt", type=float, default=EVOLUTION["default_dt"])
    return parser


def _two_j(jmax: Optional[float]) -> Optional[int]:
    if jmax is None:
        return None
    two_j = int(round(2 * jmax))
    if abs(two_j - 2 * jmax) > 1e-9 or two_j < 0:
        raise ValueError(f"--jmax must be a nonnegative multiple of 1/2, got {jmax}")
    return two_j


def _family(args: argparse.Namespace) -> SequenceFamily:
    if getattr(args, "family_file", None):
        return read_family(args.family_file)
    return builtin_family(args.family)


def _space(family: SequenceFamily, x: float, jmax: Optional[float]) -> SpaceSpec:
    two_j = _two_j(jmax)
    if two_j is None:
        return default_space(family, x)
    if family.tower is Tower.INTEGER:
        two_j -= two_j % 2
    return SpaceSpec(two_j, family.tower)


class CommandRunner:
    def __init__(self, services: InitializationService, out: TextIO):
        self.services = services
        self.formatter: TableFormatter = services.formatter
        self.out = out

    def emit(self, rows: Sequence[Dict[str, Any]], title: Optional[str] = None) -> None:
        if title:
            self.out.write(f"# {title}\n")
        self.out.write(self.formatter.format_rows(rows))

    def families(self, args: argparse.Namespace) -> int:
        if args.action == "table":
            self.emit(self.services.table_service.families_table()["rows"])
            return EXIT_OK
        family = _family(args) if (args.family or args.family_file) else builtin_family(1)
        if args.action == "coefficients":
            two_j_max = _two_j(args.jmax)
            rows = [{"two_j": two_j, "c": family.c(two_j)} for two_j in range(0, two_j_max + 1, family.step)]
            self.emit(rows)
            return EXIT_OK
        if args.z is None:
            raise ValueError("'families norm' needs --z")
        result = norm_series(family, abs(args.z) ** 2)
        row = {"family": family.name, "modulus": abs(args.z), "N": result.value, "tail_bound": result.tail_bound,
               "terms": result.n_terms}
        if family.closed_N is not None:
            row["N_closed"] = family.closed_N(abs(args.z) ** 2)
        self.emit([row])
        return EXIT_OK

    def mcs(self, args: argparse.Namespace) -> int:
        family = _family(args)
        params = CoherentParams(family, args.z, args.zl, args.zm)
        state = mcs(params, _space(family, params.x, args.jmax))
        if args.output:
            write_state(state, args.output)
            return EXIT_OK
        rows = [{"two_j": label.two_j, "two_k": label.two_k, "two_m": label.two_m,
                 "re": value.real, "im": value.imag} for label, value in sorted(state.coeffs.items())]
        self.emit(rows)
        return EXIT_OK

    def expect(self, args: argparse.Namespace) -> int:
        family = _family(args)
        params = CoherentParams(family, args.z, args.zl, args.zm)
        service = self.services.expectation_service
        report, _n_lab, _n_mol = service.mcs_expectations(params)
        rows = [{"source": "closed", **report.to_dict()}]
        if args.direct:
            direct = service.mcs_direct_report(params, _space(family, params.x, args.jmax))
            rows.append({"source": "direct", **direct.to_dict()})
        self.emit(rows)
        return EXIT_OK

    def tables(self, args: argparse.Namespace) -> int:
        result = self.services.table_service.reproduce(args.which)
        tables = result["tables"] if args.which == "all" else {args.which: result}
        for name, table in tables.items():
            if "rows" in table:
                self.emit(table["rows"], title=name if args.which == "all" else None)
        if not result["success"]:
            self.out.write(self.formatter.defect_summary(result) + "\n")
            return EXIT_TOLERANCE
        return EXIT_OK

    def verify(self, args: argparse.Namespace) -> int:
        options: Dict[str, Any] = {}
        if args.jmax is not None:
            options["two_j_max"] = _two_j(args.jmax)
        if args.families:
            options["family_ids"] = args.families
        if args.draws is not None:
            options["draws"] = args.draws
        result = self.services.verification_service.run(args.suite, **options)
        self.emit(self.formatter.defect_rows(result))
        if not result["success"]:
            self.out.write(self.formatter.defect_summary(result) + "\n")
            return EXIT_TOLERANCE
        return EXIT_OK

    def evolve(self, args: argparse.Namespace) -> int:
        family = _family(args)
        params = CoherentParams(family, args.z, args.zl, args.zm)
        service = self.services.evolution_service
        if args.rotor is not None:
            space = _space(family, params.x, args.jmax)
            times = list(np.linspace(0.0, args.t_end, 5)[1:])
            result = service.rotor_decoherence_demo(params, args.rotor, times=times, space=space)
            rows = []
            for sample in result["samples"]:
                row = {key: value for key, value in sample.items() if key != "molecular_vector"}
                for axis, value in zip("xyz", sample["molecular_vector"]):
                    row[f"JM_{axis}"] = value
                rows.append(row)
            self.emit(rows)
            return EXIT_OK
        drive = read_drive(args.drive)
        trajectory = service.integrate(drive, EvolutionState(0.0, params.zeta_L, params.zeta_M, 0.0),
                                       args.t_end, args.dt)
        self.emit(service.trajectory_rows(params, trajectory))
        return EXIT_OK


def run(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    settings = get_settings()
    configure_logging(settings, verbose=args.verbose)
    services = InitializationService(settings)
    if not services.initialize(seed=args.seed, output_format=args.format):
        sys.stderr.write("Service initialization failed\n")
        return EXIT_DOMAIN

    runner = CommandRunner(services, out)
    try:
        return getattr(runner, args.command)(args)
    except (RotorError, ValueError, OSError) as e:
        logger.error(f"Command '{args.command}' failed: {e}", exc_info=True)
        sys.stderr.write(f"error: {e}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(run())
