from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from abc import ABC, abstractmethod
from collections.abc import Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, ClassVar, Dict

import mpmath
from wcmatch import fnmatch

from .berger import AtomicMeasure, atom_count_on_ray, berger_coefficients, berger_measure, verify_representation
from .completion import (
    TwoAtomSpec,
    family_completion,
    family_sector_ranges,
    same_p_completion,
    solve_same_p,
    target_moments,
    zero_atom_completion,
)
from .constants import (
    DEFAULT_BERGER_N_MAX,
    DEFAULT_DET_J_MAX,
    DEFAULT_DET_K_MAX,
    DEFAULT_REPORT_PREFIX,
    DEFAULT_SWEEP_JOBS,
    EXIT_OK,
    NOTE_BOUNDARY_ANTIDIAGONAL,
    NOTE_FINITE_DEPTH,
    NOTE_TWO_VS_THREE_ATOMS,
    PACKAGE_NAME,
    PACKAGE_VERSION,
)
from .decorators import exit_code_on_error
from .errors import GrwsError, InexactValue, InvalidArgument, InvariantBreach, NegativeCoefficient
from .hankel import condensation_check, determinant_table, hyponormality_order
from .log import log_info, log_warning
from .model import GrwsWeights, Prediction, WeightSequence, classify, make_params, moments_of, predict_properties
from .sequences import battery_depth, function_alternation_probe, precision_schedule, weights_battery
from .settings import get_setting_dotted, settings_overlay, use_settings_file
from .template import load_resource_template, render_note
from .transforms import run_pipeline
from .types import (
    BatteryTarget,
    Depth,
    Flavor,
    OutputFormat,
    ProbeFlavor,
    SectorLabel,
    ShiftParams,
)
from .utils import interval_precision, interval_str, parse_rational, rational_grid, rational_str

Report = Dict[str, Any]

_PROSE_THREE_ATOM_EXAMPLES = frozenset({ShiftParams(Fraction(2), Fraction(1, 4), Fraction(1, 2))})

SWEEP_CHECKS = ("hypo", "mid", "che", "berger")
SWEEP_COLUMNS = (
    "N",
    "D",
    "sectors",
    "special_ray_k",
    "hypo_order",
    "mid_verdict",
    "che_verdict",
    "berger_status",
    "error",
)


# ----------------- #
# argument parsing  #
# ----------------- #


def rational(text: str) -> Fraction:
    return parse_rational(text)


def point(text: str) -> tuple[Fraction, Fraction]:
    N, sep, D = text.partition(",")
    if not sep:
        raise ValueError(f"expected 'N,D', got {text!r}")
    return parse_rational(N), parse_rational(D)


def _add_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=rational, required=True, help="geometric parameter p > 1")
    parser.add_argument("--N", type=rational, required=True, help="numerator offset in (-1, 1), e.g. --N=-1/2")
    parser.add_argument("--D", type=rational, required=True, help="denominator offset in (-1, 1)")


def _add_depth(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--depth-n", type=int, help="highest difference order of batteries")
    parser.add_argument("--depth-k", type=int, help="highest sequence index of batteries")


def _add_probe(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k-probe", type=int, help="highest hyponormality order probed")
    parser.add_argument("--j-probe", type=int, help="highest starting index of probed Hankel windows")


def _params(args: argparse.Namespace) -> ShiftParams:
    return make_params(args.p, args.N, args.D)


# --------- #
# rendering #
# --------- #


def _json_default(value: Any) -> Any:
    if isinstance(value, Fraction):
        return rational_str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(map(str, value))
    return str(value)


def to_json(report: Report) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"


def to_csv(rows: Iterable[Report], columns: Iterable[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: "" if value is None else value for key, value in row.items()})
    return buffer.getvalue()


def _flatten(value: Any, path: str = "") -> Iterator[tuple[str, Any]]:
    if isinstance(value, dict):
        for key in sorted(value):
            yield from _flatten(value[key], f"{path}.{key}" if path else str(key))
    elif isinstance(value, list) and any(isinstance(item, (dict, list)) for item in value):
        for i, item in enumerate(value):
            yield from _flatten(item, f"{path}[{i}]")
    elif isinstance(value, list):
        yield path, ", ".join(map(str, value))
    else:
        yield path, value


def to_text(report: Report) -> str:
    headline = ("tool", "command", "params", "sector", "checks", "notes")
    details = list(_flatten({key: value for key, value in report.items() if key not in headline}))
    return load_resource_template("report.txt.jinja", keep_trailing_newline=True).render(
        tool=report["tool"],
        command=report["command"],
        params=report.get("params"),
        sector=report.get("sector"),
        checks=sorted(report.get("checks", {}).items()),
        details=details,
        notes=report.get("notes", []),
    )


# ----------------- #
# shared evaluation #
# ----------------- #


def _notes(params: ShiftParams, label: SectorLabel | None = None, depth: Depth | None = None) -> list[str]:
    notes = []
    if params in _PROSE_THREE_ATOM_EXAMPLES and label and label.special_ray_k is not None:
        k = label.special_ray_k
        notes.append(render_note(NOTE_TWO_VS_THREE_ATOMS, k=k, atoms=k + 1))
    if params.N < 0 and params.D == -params.N:
        notes.append(render_note(NOTE_BOUNDARY_ANTIDIAGONAL))
    if depth is not None:
        notes.append(render_note(NOTE_FINITE_DEPTH, n_max=depth.n_max, k_max=depth.k_max))
    return notes


def berger_check(params: ShiftParams, depth: int | None = None, n_max: int | None = None) -> Report:
    """Builds the Berger measure and compares its moments with `gamma`; failures become statuses."""
    n_max = get_setting_dotted("berger.n_max", DEFAULT_BERGER_N_MAX) if n_max is None else n_max
    try:
        measure = berger_measure(params, depth)
    except NegativeCoefficient as e:
        return {"status": "negative coefficient", "message": str(e)}
    except InvalidArgument as e:
        return {"status": "no tail bound", "message": str(e)}
    verdict = verify_representation(params, measure, n_max)
    return {
        "status": "ok" if verdict.holds else str(verdict.status),
        "atoms": len(measure.atoms),
        "truncated": measure.truncated,
        "verification": verdict.to_payload(),
    }


def verify_predictions(
    params: ShiftParams,
    prediction: Prediction,
    depth: Depth,
    k_probe: int | None = None,
    j_probe: int | None = None,
) -> Report:
    """Runs the battery matching each claim; a `holds-to-depth` result is evidence for the claim."""
    weights = GrwsWeights(params)
    n_max, k_max = depth.n_max, depth.k_max
    checks: Report = {"hyponormality": hyponormality_order(params, k_probe, j_probe).to_payload()}
    if prediction.mid:
        checks["mid"] = weights_battery(weights, Flavor.LOG_ALTERNATING, BatteryTarget.WEIGHTS, n_max, k_max)
    if prediction.bernstein:
        checks["bernstein"] = function_alternation_probe(params, ProbeFlavor.PLAIN, [1], n_max, k_max)
    if prediction.log_bernstein:
        checks["log_bernstein"] = function_alternation_probe(params, ProbeFlavor.LOG, [1], n_max, k_max)
    if prediction.completely_hyperexpansive:
        checks["completely_hyperexpansive"] = weights_battery(
            weights, Flavor.ALTERNATING, BatteryTarget.MOMENTS, n_max, k_max
        )
    if prediction.weights_log_completely_monotone:
        checks["weights_log_completely_monotone"] = weights_battery(
            weights, Flavor.LOG_MONOTONE, BatteryTarget.WEIGHTS, n_max, k_max
        )
    if prediction.subnormal:
        checks["berger"] = berger_check(params)
    return {name: value if isinstance(value, dict) else value.to_payload() for name, value in checks.items()}


def _weights_prefix(weights: WeightSequence, count: int) -> list[str]:
    values = []
    for n in range(count):
        try:
            values.append(rational_str(weights.weight_sq(n)))
        except InexactValue:
            with interval_precision(precision_schedule()[0]):
                values.append(interval_str(weights.weight_sq_enclosure(n)))
    return values


# -------- #
# commands #
# -------- #


class BaseGrwsCommand(ABC):
    name: ClassVar[str]
    help: ClassVar[str]
    table_columns: ClassVar[tuple[str, ...]] = ()
    """Columns of `--format csv`; empty when the report is not table-shaped."""

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        pass

    @abstractmethod
    def run(self, args: argparse.Namespace) -> Report:
        """Builds the command-specific part of the report."""

    @exit_code_on_error
    def execute(self, args: argparse.Namespace) -> int:
        output_format = OutputFormat(args.format)
        if output_format is OutputFormat.CSV and not self.table_columns:
            raise InvalidArgument(f"csv output is only available for table reports, not for {self.name}")
        report: Report = {"tool": {"name": PACKAGE_NAME, "version": PACKAGE_VERSION}, "command": self.name}
        report.update(self.run(args))
        report.setdefault("notes", [])
        if output_format is OutputFormat.CSV:
            sys.stdout.write(to_csv(report.get("rows", []), self.table_columns))
        elif output_format is OutputFormat.TEXT:
            sys.stdout.write(to_text(report))
        else:
            sys.stdout.write(to_json(report))
        return EXIT_OK


class ClassifyCommand(BaseGrwsCommand):
    name = "classify"
    help = "sector label, predicted properties and their verification"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _add_params(parser)
        parser.add_argument("--ray-depth", type=int, help="highest k searched for D = p^k N")
        parser.add_argument("--prefix", type=int, default=DEFAULT_REPORT_PREFIX, help="number of terms echoed")
        parser.add_argument("--approx", action="store_true", help="also echo decimal approximations of the weights")
        _add_depth(parser)
        _add_probe(parser)

    def run(self, args: argparse.Namespace) -> Report:
        params = _params(args)
        label = classify(params, args.ray_depth)
        prediction = predict_properties(params, label)
        depth = battery_depth(args.depth_n, args.depth_k)
        weights = GrwsWeights(params)
        report: Report = {
            "params": params.to_payload(),
            "sector": label.to_payload(),
            "predictions": prediction.to_payload(),
            "checks": verify_predictions(params, prediction, depth, args.k_probe, args.j_probe),
            "weights_sq": _weights_prefix(weights, args.prefix),
            "moments": [rational_str(value) for value in moments_of(params).prefix(args.prefix)],
            "notes": _notes(params, label, depth),
        }
        if args.approx:
            report["weights"] = [mpmath.nstr(weights.weight(n), 20) for n in range(args.prefix)]
        return report


class VerifyDetCommand(BaseGrwsCommand):
    name = "verify-det"
    help = "compare brute-force Hankel determinants with the closed form and check condensation"
    table_columns = ("k", "j", "det", "closed_form", "sign", "matches")

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _add_params(parser)
        parser.add_argument("--k-max", type=int, default=DEFAULT_DET_K_MAX, help="largest window size")
        parser.add_argument("--j-max", type=int, default=DEFAULT_DET_J_MAX, help="largest starting index")

    def run(self, args: argparse.Namespace) -> Report:
        params = _params(args)
        if args.k_max < 2 or args.j_max < 0:
            raise InvalidArgument("verify-det needs --k-max >= 2 and --j-max >= 0")
        rows = determinant_table(params, args.k_max, args.j_max)
        if mismatch := next((row for row in rows if not row.matches), None):
            raise InvariantBreach(f"closed form differs from the determinant at k={mismatch.k}, j={mismatch.j}")
        condensed = [(k, j) for k in range(3, args.k_max + 1) for j in range(args.j_max + 1)]
        if failure := next(((k, j) for k, j in condensed if not condensation_check(params, k, j)), None):
            raise InvariantBreach(f"condensation fails at k={failure[0]}, j={failure[1]}")
        return {
            "params": params.to_payload(),
            "rows": [row.to_payload() for row in rows],
            "condensation": {"checked": len(condensed), "holds": True},
        }


class VerifyBergerCommand(BaseGrwsCommand):
    name = "verify-berger"
    help = "build the atomic Berger measure and check that it represents the moments"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _add_params(parser)
        parser.add_argument("--depth", type=int, help="number of coefficients before truncation")
        parser.add_argument("--n-max", type=int, help="highest moment index compared")

    def run(self, args: argparse.Namespace) -> Report:
        params = _params(args)
        label = classify(params)
        n_max = get_setting_dotted("berger.n_max", DEFAULT_BERGER_N_MAX) if args.n_max is None else args.n_max
        coefficients = berger_coefficients(params, args.depth)
        measure: AtomicMeasure = berger_measure(params, args.depth)
        verdict = verify_representation(params, measure, n_max)
        if verdict.violated and verdict.witness:
            raise InvariantBreach(f"the measure of {params} misses gamma_{verdict.witness.k}")
        report: Report = {
            "params": params.to_payload(),
            "sector": label.to_payload(),
            "coefficients": {
                "m": [rational_str(value) for value in coefficients.m],
                "finite": coefficients.finite,
            },
            "measure": measure.to_payload(),
            "verification": verdict.to_payload(),
            "notes": _notes(params, label),
        }
        if label.special_ray_k is not None:
            report["atoms_on_ray"] = atom_count_on_ray(params)
        return report


class BatteryCommand(BaseGrwsCommand):
    name = "battery"
    help = "run a finite-difference battery on the weights or moments, or a resampling probe"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _add_params(parser)
        parser.add_argument("--flavor", choices=[str(flavor) for flavor in Flavor], default=str(Flavor.LOG_ALTERNATING))
        parser.add_argument("--target", choices=[str(target) for target in BatteryTarget], default="weights")
        parser.add_argument("--probe", choices=[str(flavor) for flavor in ProbeFlavor], help="resample f(hk) instead")
        parser.add_argument("--spacing", type=rational, action="append", help="probe spacing h (repeatable)")
        _add_depth(parser)

    def run(self, args: argparse.Namespace) -> Report:
        params = _params(args)
        depth = battery_depth(args.depth_n, args.depth_k)
        report: Report = {"params": params.to_payload(), "notes": _notes(params, depth=depth)}
        if args.probe:
            spacings = args.spacing or [Fraction(1)]
            verdict = function_alternation_probe(params, args.probe, spacings, depth.n_max, depth.k_max)
            report["probe"] = {"flavor": args.probe, "spacings": [rational_str(h) for h in spacings]}
        else:
            verdict = weights_battery(GrwsWeights(params), args.flavor, args.target, depth.n_max, depth.k_max)
            report["battery"] = {"flavor": args.flavor, "target": args.target}
        report["verdict"] = verdict.to_payload()
        return report


class TransformCommand(BaseGrwsCommand):
    name = "transform"
    help = "apply a pipeline such as 'aluthge|subshift:2,1|battery:log-alternating'"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _add_params(parser)
        parser.add_argument("--pipeline", required=True, help="'|'-separated transform and battery steps")
        parser.add_argument("--prefix", type=int, default=DEFAULT_REPORT_PREFIX, help="number of terms echoed")
        _add_depth(parser)

    def run(self, args: argparse.Namespace) -> Report:
        params = _params(args)
        depth = battery_depth(args.depth_n, args.depth_k)
        result = run_pipeline(GrwsWeights(params), args.pipeline, depth.n_max, depth.k_max)
        final = result.weights.params
        report: Report = {
            "params": params.to_payload(),
            "pipeline": result.steps,
            "result": {
                "params": final.to_payload() if final else None,
                "sector": classify(final).to_payload() if final else None,
                "weights_sq": _weights_prefix(result.weights, args.prefix),
            },
            "verdicts": [{"step": step, "verdict": verdict.to_payload()} for step, verdict in result.verdicts],
            "notes": _notes(params, depth=depth) if result.verdicts else [],
        }
        return report


class CompleteCommand(BaseGrwsCommand):
    name = "complete"
    help = "complete the first moments of (delta_1 + a delta_{1/p}) / (1 + a) with a GRWS"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--a", type=rational, required=True, help="relative mass a > 0 at 1/p")
        parser.add_argument("--p", type=rational, required=True, help="the second atom is 1/p")
        parser.add_argument("--N", type=rational, help="family parameter in (-1, 0]")
        parser.add_argument("--mass-at-zero", type=rational, help="replace the measure by (1 - t) delta_1 + t delta_0")

    def run(self, args: argparse.Namespace) -> Report:
        if args.mass_at_zero is not None:
            solutions = zero_atom_completion(args.mass_at_zero)
            return {
                "mass_at_zero": rational_str(args.mass_at_zero),
                "solutions": [solution.to_payload() for solution in solutions],
            }
        spec = TwoAtomSpec(args.a, args.p)
        ranges = family_sector_ranges(spec)
        report: Report = {
            "spec": {"a": rational_str(spec.a), "p": rational_str(spec.p)},
            "targets": [rational_str(value) for value in target_moments(spec)],
            "family_ranges": [sector_range.to_payload() for sector_range in ranges],
        }
        if args.N is not None:
            report["solution"] = family_completion(spec, args.N).to_payload()
            report["predicted_sector"] = next(str(r.sector) for r in ranges if args.N in r)
        else:
            report["solution"] = same_p_completion(spec).to_payload()
            report["same_p_roots"] = [[rational_str(N), rational_str(D)] for N, D in solve_same_p(spec)]
        return report


# ----- #
# sweep #
# ----- #


@dataclass(frozen=True)
class SweepTask:
    params: ShiftParams
    checks: tuple[str, ...]
    depth: Depth
    k_probe: int | None = None
    j_probe: int | None = None
    berger_depth: int | None = None


def sweep_row(task: SweepTask) -> Report:
    params = task.params
    label = classify(params)
    row: Report = {
        "N": rational_str(params.N),
        "D": rational_str(params.D),
        "sectors": "/".join(map(str, label.sorted_sectors())),
        "special_ray_k": label.special_ray_k,
        "hypo_order": None,
        "mid_verdict": None,
        "che_verdict": None,
        "berger_status": None,
        "error": None,
    }
    weights = GrwsWeights(params)
    n_max, k_max = task.depth.n_max, task.depth.k_max
    errors = []
    for check in task.checks:
        try:
            if check == "hypo":
                order = hyponormality_order(params, task.k_probe, task.j_probe).to_payload()["order"]
                row["hypo_order"] = str(order)
            elif check == "mid":
                verdict = weights_battery(weights, Flavor.LOG_ALTERNATING, BatteryTarget.WEIGHTS, n_max, k_max)
                row["mid_verdict"] = str(verdict.status)
            elif check == "che":
                verdict = weights_battery(weights, Flavor.ALTERNATING, BatteryTarget.MOMENTS, n_max, k_max)
                row["che_verdict"] = str(verdict.status)
            elif check == "berger":
                row["berger_status"] = berger_check(params, task.berger_depth)["status"]
        except GrwsError as e:
            log_warning(f"sweep point {params}: {check} failed: {e}")
            errors.append(f"{check}: {e}")
    if errors:
        row["error"] = "; ".join(errors)
    return row


class SweepCommand(BaseGrwsCommand):
    name = "sweep"
    help = "classify and test every point of a rational grid over the open square"
    table_columns = SWEEP_COLUMNS

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--p", type=rational, required=True, help="geometric parameter p > 1")
        grid = parser.add_mutually_exclusive_group(required=True)
        grid.add_argument("--step", type=rational, help="grid spacing; points -1 + i*step inside (-1, 1)")
        grid.add_argument("--point", type=point, action="append", help="explicit point 'N,D' (repeatable)")
        parser.add_argument("--checks", default="*", help=f"glob(s) over {', '.join(SWEEP_CHECKS)}, comma separated")
        parser.add_argument("--jobs", type=int, help="worker processes")
        parser.add_argument("--berger-depth", type=int, help="number of Berger coefficients before truncation")
        _add_depth(parser)
        _add_probe(parser)

    def run(self, args: argparse.Namespace) -> Report:
        if args.step is not None and args.step <= 0:
            raise InvalidArgument("the grid step must be positive")
        checks = tuple(check for check in SWEEP_CHECKS if fnmatch.fnmatch(check, args.checks.split(",")))
        if not checks:
            raise InvalidArgument(f"no check matches {args.checks!r}")
        if args.step is not None:
            values = rational_grid(args.step)
            points = [(N, D) for N in values for D in values]
        else:
            points = sorted(set(args.point))
        depth = battery_depth(args.depth_n, args.depth_k)
        tasks = [
            SweepTask(make_params(args.p, N, D), checks, depth, args.k_probe, args.j_probe, args.berger_depth)
            for N, D in points
        ]
        jobs = get_setting_dotted("sweep.jobs", DEFAULT_SWEEP_JOBS) if args.jobs is None else args.jobs
        log_info(f"sweeping {len(tasks)} points of p = {rational_str(args.p)} with {jobs} job(s)")
        if jobs > 1 and len(tasks) > 1:
            overlay = settings_overlay()
            with ProcessPoolExecutor(max_workers=jobs, initializer=use_settings_file, initargs=overlay) as pool:
                rows = list(pool.map(sweep_row, tasks))
        else:
            rows = [sweep_row(task) for task in tasks]
        log_info(f"sweep finished: {sum(row['error'] is not None for row in rows)} row(s) with errors")
        return {
            "p": rational_str(args.p),
            "selected_checks": list(checks),
            "rows": rows,
            "notes": [render_note(NOTE_FINITE_DEPTH, n_max=depth.n_max, k_max=depth.k_max)],
        }
