"""
Study Orchestrator

Runs the lamhom studies as step pipelines. Each study returns its structured
results together with a step log describing what was computed:

  homogenize  effective constants by the closed form, the cell solver, or both
  sweep       normalized constants and amplitudes over a parameter grid
  compare     heterogeneous solve against the homogenized solution
  validate    invariant suite on one laminate

The write_* functions turn a study result into the files of an output directory.
"""

import logging
import time
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from errors import ConfigError
from models import COMPONENTS, HarmonicLoad, Laminate, MicroGrid
from schemas import (
    SWEEP_PARAMETERS,
    EffectiveReport,
    StudyConfig,
    StudyStep,
    SweepFixed,
    SweepReport,
    ValidationSummary,
)
from services.parallel import ordered_map
from services.report_writer import columns_to_rows, write_csv, write_json, write_run_report
from solvers.cell_solver import (
    effective_from_profiles,
    profiles_from_solutions,
    sample_profiles,
    solve_cell_problems,
)
from solvers.hetero_solver import (
    compare,
    downscale_first_order,
    reconstruction_errors,
    solve_heterogeneous,
    upscale,
)
from solvers.laminate_homogenizer import (
    effective_constants_biphase,
    normalize_constants,
    perturbation_profiles_biphase,
)
from solvers.macro_solver import (
    amplitude_functions,
    load_for_amplitudes,
    sample_dimensionless,
    solve_homogenized,
)
from solvers.material_model import dimensionless_ratios, laminate_from_descriptor, ratio_laminate
from solvers.validation_suite import relative_discrepancy, run_validation

logger = logging.getLogger(__name__)

METHODS = ("analytic", "cell-solver", "both")
PROFILE_SAMPLES = 201

AMPLITUDE_COLUMNS = [
    "xi_alpha_tilde_1",
    "xi_beta_tilde_1",
    "xi_alpha_tilde_2",
    "xi_beta_tilde_2",
]
SWEEP_COLUMNS = (
    list(SWEEP_PARAMETERS)
    + ["nu"]
    + [f"{name}_tilde" for name in COMPONENTS]
    + AMPLITUDE_COLUMNS
    + ["undefined"]
)


# =============================================================================
# HELPERS
# =============================================================================
def _step(steps: List[StudyStep], title: str, description: str, details: Iterable[str] = ()) -> None:
    steps.append(StudyStep(step=len(steps) + 1, title=title, description=description, details=list(details)))
    logger.info("step %d: %s", len(steps), title)


def build_laminate(config: StudyConfig) -> Laminate:
    return laminate_from_descriptor(config.laminate)


def _describe_laminate(laminate: Laminate) -> List[str]:
    details = []
    for index, layer in enumerate(laminate.layers):
        kind = "isotropic" if layer.phase.isotropic is not None else "orthotropic"
        details.append(f"layer {index}: {kind}, fraction {layer.fraction:.6g}")
    return details


def _compare_load(config: StudyConfig, direction: int, laminate: Laminate) -> HarmonicLoad:
    """HarmonicLoad of the compare block along `direction`, period L = L_over_epsilon * epsilon."""
    block = config.compare
    load = block.load
    try:
        return HarmonicLoad(
            direction=direction,
            B=load.B,
            R=load.R,
            S=load.S,
            m=load.m,
            n=load.n,
            p=load.p,
            L=block.L_over_epsilon * laminate.epsilon,
        )
    except ValueError as exc:
        raise ConfigError(str(exc), loc=("compare", "load"))


def _targeted_load(config: StudyConfig, eff, load: HarmonicLoad) -> HarmonicLoad:
    targets = config.compare.load
    try:
        return load_for_amplitudes(eff, load, targets.xi_alpha, targets.xi_beta)
    except ValueError as exc:
        raise ConfigError(str(exc), loc=("compare", "load"))


# =============================================================================
# HOMOGENIZE
# =============================================================================
def run_homogenize(config: StudyConfig, method: str = "both") -> Dict[str, Any]:
    """
    Effective constants of the configured laminate.

    Args:
        config: study configuration; only the laminate (and the compare load,
            for amplitude values) is used
        method: "analytic", "cell-solver" or "both"

    Returns:
        {
            "report": EffectiveReport,
            "laminate": Laminate,
            "profiles": dict ProfileKind -> PerturbationProfile,
            "steps": list of StudyStep,
        }
    """
    if method not in METHODS:
        raise ValueError(f"unsupported method {method!r}, expected one of {', '.join(METHODS)}")
    steps: List[StudyStep] = []

    laminate = build_laminate(config)
    _step(
        steps,
        "Reading the laminate",
        f"The cell stacks {laminate.n_layers} layers along x2 with period epsilon = {laminate.epsilon:g} "
        f"under the {laminate.assumption.value if laminate.assumption else 'unspecified'} assumption.",
        _describe_laminate(laminate),
    )

    wants_analytic = method in ("analytic", "both")
    if wants_analytic and laminate.n_layers != 2:
        raise ConfigError(
            f"the analytic method needs exactly two layers, got {laminate.n_layers}",
            loc=("laminate", "layers"),
        )

    methods = {}
    profiles = None
    if wants_analytic:
        methods["analytic"] = effective_constants_biphase(laminate)
        profiles = perturbation_profiles_biphase(laminate)
        _step(
            steps,
            "Closed-form bi-phase constants",
            "Each cell problem has piecewise-linear profiles with equal fluxes in both layers; "
            "the effective constants follow from the layer-a slopes.",
            [f"{name} = {methods['analytic'].component(name):.12g}" for name in COMPONENTS],
        )
    if method in ("cell-solver", "both"):
        solutions = solve_cell_problems(laminate)
        methods["cell-solver"] = effective_from_profiles(laminate, solutions)
        if profiles is None:
            profiles = profiles_from_solutions(laminate, solutions)
        worst = max(solution.residual for solution in solutions)
        _step(
            steps,
            "Solving the cell problems",
            f"Solved {len(solutions)} layered cell problems; largest relative residual {worst:.3g}.",
            [f"{name} = {methods['cell-solver'].component(name):.12g}" for name in COMPONENTS],
        )

    discrepancy = None
    if len(methods) == 2:
        discrepancy = relative_discrepancy(methods["analytic"], methods["cell-solver"], laminate)
        _step(
            steps,
            "Comparing the two methods",
            f"The largest componentwise relative discrepancy is {discrepancy:.3e}.",
        )

    primary = methods.get("cell-solver") or methods["analytic"]
    violations = primary.violations()
    if violations:
        logger.warning("effective constants violate: %s", "; ".join(violations))

    ratios = normalized = None
    amplitudes = []
    if laminate.n_layers == 2:
        normalized = normalize_constants(primary, laminate)
        if all(phase.isotropic is not None for phase in laminate.phases):
            ratios = dimensionless_ratios(laminate)
        for direction in (1, 2):
            if config.compare is not None:
                load = _targeted_load(config, primary, _compare_load(config, direction, laminate))
            else:
                load = HarmonicLoad(direction=direction, B=1.0)
            amplitudes.append(amplitude_functions(primary, laminate, load))
        details = [
            f"{name}~ = {value:.12g}" if value is not None else f"{name}~ undefined"
            for name, value in normalized.components.items()
        ]
        details += [
            f"direction {amp.direction}: xi_alpha~ = {amp.xi_alpha_tilde}, xi_beta~ = {amp.xi_beta_tilde}"
            for amp in amplitudes
        ]
        _step(
            steps,
            "Normalizing by the phase averages",
            "Each component is divided by the plain mean of the two phase values, "
            "and the amplitude functions are evaluated along both axes.",
            details,
        )

    report = EffectiveReport(
        layers=laminate.n_layers,
        epsilon=laminate.epsilon,
        methods=methods,
        max_relative_discrepancy=discrepancy,
        ratios=ratios,
        normalized=normalized,
        amplitudes=amplitudes,
        steps=steps,
    )
    return {
        "report": report,
        "laminate": laminate,
        "profiles": profiles,
        "steps": steps,
    }


def write_homogenize(result: Dict[str, Any], out_dir: Path) -> List[Path]:
    """effective.json, effective.csv, profiles.csv and report.md."""
    out_dir = Path(out_dir)
    report: EffectiveReport = result["report"]
    rows = [{"method": name, **eff.as_row()} for name, eff in report.methods.items()]
    xi, values = sample_profiles(result["profiles"], PROFILE_SAMPLES)
    profile_columns = {"xi": xi, **{kind.value: samples for kind, samples in values.items()}}
    summary = {"layers": report.layers, "epsilon": report.epsilon}
    if report.max_relative_discrepancy is not None:
        summary["max relative discrepancy"] = report.max_relative_discrepancy
    return [
        write_json(out_dir / "effective.json", report),
        write_csv(out_dir / "effective.csv", ["method", *COMPONENTS], rows),
        write_csv(out_dir / "profiles.csv", list(profile_columns), columns_to_rows(profile_columns)),
        write_run_report(out_dir / "report.md", "Effective constants", result["steps"], summary),
    ]


# =============================================================================
# SWEEP
# =============================================================================
COUPLING_RATIOS = {"rho_alpha": ("alpha", "alpha_b"), "rho_beta": ("beta", "beta_b")}


def _sweep_base(config: StudyConfig, laminate: Laminate) -> Dict[str, Any]:
    """
    Values held fixed during the sweep: the ratios of the configured laminate
    when it is a bi-phase isotropic one with a common nu, overridden by every
    value set explicitly in the sweep's fixed block.

    A coupling that vanishes in both configured phases stays switched off
    (phase-b value 0) unless its ratio is set in the fixed block or swept.

    Raises:
        ConfigError: if a coupling vanishes in phase b only and its ratio is
            neither fixed nor swept
    """
    sweep = config.sweep
    explicit = sweep.fixed.model_dump(exclude_unset=True)
    swept = {sweep.parameter} | ({sweep.family.parameter} if sweep.family is not None else set())
    base = SweepFixed().model_dump()
    base.update({phase_b: 1.0 for _, phase_b in COUPLING_RATIOS.values()})
    try:
        ratios = dimensionless_ratios(laminate)
    except ValueError:
        ratios = None
    if ratios is not None:
        iso_a, iso_b = (phase.isotropic for phase in laminate.phases)
        for name in SWEEP_PARAMETERS:
            value = getattr(ratios, name)
            if value is not None:
                base[name] = value
        for name, (coupling, phase_b) in COUPLING_RATIOS.items():
            if name not in ratios.undefined or name in explicit or name in swept:
                continue
            if getattr(iso_a, coupling) != 0.0:
                raise ConfigError(
                    f"{name} is undefined for the configured laminate ({coupling} vanishes in phase b only); "
                    "set it in the fixed block",
                    loc=("sweep", "fixed", name),
                )
            base[phase_b] = 0.0
        if iso_a.nu == iso_b.nu:
            base["nu"] = iso_b.nu
        base["assumption"] = iso_b.assumption
    base.update(explicit)
    return base


def sweep_point(point: Dict[str, Any]) -> Dict[str, Any]:
    """
    One CSV row: the ratio laminate's normalized constants and amplitude functions.
    A switched-off coupling leaves its ratio empty and listed in `undefined`.
    """
    laminate = ratio_laminate(**point)
    eff = effective_constants_biphase(laminate)
    normalized = normalize_constants(eff, laminate)
    row: Dict[str, Any] = {name: point[name] for name in SWEEP_PARAMETERS}
    undefined = []
    for name, (_, phase_b) in COUPLING_RATIOS.items():
        if point[phase_b] == 0.0:
            row[name] = None
            undefined.append(name)
    row["nu"] = point["nu"]
    row.update({f"{name}_tilde": normalized.get(name) for name in COMPONENTS})
    undefined += list(normalized.undefined)
    for direction in (1, 2):
        amplitudes = amplitude_functions(eff, laminate, HarmonicLoad(direction=direction, B=1.0))
        row[f"xi_alpha_tilde_{direction}"] = amplitudes.xi_alpha_tilde
        row[f"xi_beta_tilde_{direction}"] = amplitudes.xi_beta_tilde
        undefined += [f"{name}_{direction}" for name in amplitudes.undefined]
    row["undefined"] = ";".join(undefined)
    return row


def run_sweep(config: StudyConfig, threads: Optional[int] = None) -> Dict[str, Any]:
    """
    Normalized constants over the sweep grid, one row per (family value, grid value).

    Returns:
        {
            "report": SweepReport,
            "steps": list of StudyStep,
        }
    """
    if config.sweep is None:
        raise ConfigError("the sweep study needs a 'sweep' block", loc=("sweep",))
    sweep = config.sweep
    steps: List[StudyStep] = []

    laminate = build_laminate(config)
    base = _sweep_base(config, laminate)
    _step(
        steps,
        "Fixing the reference laminate",
        "Phase b sits at unit properties, with a switched-off coupling at zero; phase a carries the ratios below.",
        [f"{name} = {value}" for name, value in base.items() if name != "assumption"],
    )

    grid = [float(value) for value in sweep.grid.points()]
    family_values = [float(v) for v in sweep.family.values] if sweep.family is not None else [None]
    points = []
    for family_value in family_values:
        for value in grid:
            point = dict(base)
            if family_value is not None:
                point[sweep.family.parameter] = family_value
            point[sweep.parameter] = value
            points.append(point)
    rows = ordered_map(sweep_point, points, threads)
    _step(
        steps,
        f"Sweeping {sweep.parameter}",
        f"Evaluated {len(rows)} grid points from {min(grid):g} to {max(grid):g}"
        + (f" for {len(family_values)} values of {sweep.family.parameter}." if sweep.family else "."),
        [f"{sum(1 for row in rows if row['undefined'])} rows carry undefined normalizations"],
    )

    report = SweepReport(
        parameter=sweep.parameter,
        family=sweep.family.parameter if sweep.family is not None else None,
        columns=SWEEP_COLUMNS,
        rows=rows,
        steps=steps,
    )
    return {"report": report, "steps": steps}


def write_sweep(result: Dict[str, Any], out_dir: Path) -> List[Path]:
    """sweep.csv and report.md."""
    out_dir = Path(out_dir)
    report: SweepReport = result["report"]
    summary = {"parameter": report.parameter, "rows": len(report.rows)}
    if report.family is not None:
        summary["family"] = report.family
    return [
        write_csv(out_dir / "sweep.csv", report.columns, report.rows),
        write_run_report(out_dir / "report.md", f"Sweep over {report.parameter}", result["steps"], summary),
    ]


# =============================================================================
# COMPARE
# =============================================================================
def run_compare(config: StudyConfig) -> Dict[str, Any]:
    """
    Heterogeneous solve of the laminate against its homogenized solution.

    Returns:
        {
            "report": ComparisonReport,
            "tables": dict file name -> (columns, rows),
            "steps": list of StudyStep,
        }
    """
    if config.compare is None:
        raise ConfigError("the compare study needs a 'compare' block", loc=("compare",))
    block = config.compare
    if block.load.direction != 2:
        raise ConfigError(
            "the heterogeneous comparison supports loads along the layering normal only",
            loc=("compare", "load", "direction"),
        )
    steps: List[StudyStep] = []
    runtimes: Dict[str, float] = {}

    laminate = build_laminate(config)
    _step(
        steps,
        "Reading the laminate",
        f"{block.L_over_epsilon} cells of {laminate.n_layers} layers, epsilon = {laminate.epsilon:g}.",
        _describe_laminate(laminate),
    )

    started = time.perf_counter()
    solutions = solve_cell_problems(laminate)
    eff = effective_from_profiles(laminate, solutions)
    profiles = profiles_from_solutions(laminate, solutions)
    load = _targeted_load(config, eff, _compare_load(config, 2, laminate))
    macro = solve_homogenized(eff, load)
    runtimes["homogenized"] = time.perf_counter() - started
    _step(
        steps,
        "Solving the homogenized problem",
        f"Load B = {load.B:g}, R = {load.R:.6g}, S = {load.S:.6g} with wave numbers "
        f"({load.m}, {load.n}, {load.p}) over L = {load.L:g}.",
        [f"Xi^alpha = {macro.xi_alpha}", f"Xi^beta = {macro.xi_beta}"],
    )

    grid = MicroGrid(cells=block.L_over_epsilon, nodes_per_layer=block.nodes_per_layer)
    started = time.perf_counter()
    try:
        micro = solve_heterogeneous(laminate, load, grid)
    except ValueError as exc:
        raise ConfigError(str(exc), loc=("compare",))
    runtimes["heterogeneous"] = time.perf_counter() - started
    _step(
        steps,
        "Solving the heterogeneous problem",
        f"Interface-aligned grid of {micro.x.size} nodes, {block.nodes_per_layer} per layer.",
    )

    started = time.perf_counter()
    predicted = downscale_first_order(macro, profiles, laminate, grid)
    runtimes["downscale"] = time.perf_counter() - started

    report = compare(macro, micro, laminate, runtimes)
    report = report.model_copy(update={"reconstruction": reconstruction_errors(predicted, micro)})
    _step(
        steps,
        "Comparing the fields",
        "Both sides pass through the same cell average before differencing; the first-order "
        "reconstruction is compared node by node.",
        [
            f"{item.field}: relative L2 {item.relative_l2}, Linf {item.linf}"
            for item in [*report.errors, *report.reconstruction]
        ]
        + [f"cell heat-flux check: {report.flux_check}"],
    )

    return {
        "report": report,
        "tables": _comparison_tables(macro, micro, laminate, block.samples),
        "steps": steps,
    }


def _comparison_tables(macro, micro, laminate: Laminate, samples: int) -> Dict[str, Any]:
    homogenized = sample_dimensionless(macro, samples)

    def centered(flux: np.ndarray) -> np.ndarray:
        return 0.5 * (flux + np.roll(flux, 1))

    micro_columns = {
        "x/L": micro.x / micro.L,
        "u": micro.u,
        "theta": micro.theta,
        "eta": micro.eta,
        "sigma22": centered(micro.sigma),
        "q": centered(micro.q),
        "j": centered(micro.j),
    }

    fields = upscale(micro, laminate)

    def starred(values: np.ndarray, scale: float) -> Optional[np.ndarray]:
        return values / scale if scale != 0.0 else None

    upscaled_columns = {
        "x/L": fields.x / micro.L,
        "U": fields.U,
        "Theta": fields.theta,
        "Upsilon": fields.upsilon,
        "U*": starred(fields.U, macro.a_B),
        "Theta*": starred(fields.theta, macro.theta_amplitude),
        "Upsilon*": starred(fields.upsilon, macro.upsilon_amplitude),
    }
    return {
        name: (list(columns), columns_to_rows(columns))
        for name, columns in (
            ("homogenized_fields.csv", homogenized),
            ("micro_fields.csv", micro_columns),
            ("upscaled_fields.csv", upscaled_columns),
        )
    }


def write_compare(result: Dict[str, Any], out_dir: Path) -> List[Path]:
    """comparison.json, the three field CSVs and report.md."""
    out_dir = Path(out_dir)
    report = result["report"]
    paths = [write_json(out_dir / "comparison.json", report)]
    for name, (columns, rows) in result["tables"].items():
        paths.append(write_csv(out_dir / name, columns, rows))
    summary = {"cells": report.cells, "nodes": report.nodes}
    summary.update({f"{item.field} relative L2": item.relative_l2 for item in report.errors})
    paths.append(write_run_report(out_dir / "report.md", "Heterogeneous comparison", result["steps"], summary))
    return paths


# =============================================================================
# VALIDATE
# =============================================================================
def run_validate(config: StudyConfig) -> Dict[str, Any]:
    """
    Invariant suite on the configured laminate. An inadmissible laminate is
    reported as a failed phase_admissibility check instead of raising.

    Returns:
        {
            "summary": ValidationSummary,
            "steps": list of StudyStep,
        }
    """
    steps: List[StudyStep] = []
    try:
        laminate = build_laminate(config)
    except ConfigError as exc:
        location = ".".join(str(part) for part in exc.loc)
        summary = ValidationSummary(
            passed=False,
            checks=[{"name": "phase_admissibility", "passed": False, "detail": f"{location}: {exc.message}"}],
        )
        _step(steps, "Building the laminate", "The laminate was rejected at construction.", [exc.message])
        return {"summary": summary.model_copy(update={"steps": steps}), "steps": steps}

    _step(steps, "Building the laminate", f"{laminate.n_layers} admissible layers.", _describe_laminate(laminate))
    summary = run_validation(laminate)
    _step(
        steps,
        "Running the checks",
        f"{len(summary.checks)} checks, {len(summary.failed)} failed.",
        [f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}" for check in summary.checks],
    )
    return {"summary": summary.model_copy(update={"steps": steps}), "steps": steps}


def write_validate(result: Dict[str, Any], out_dir: Path) -> List[Path]:
    """validation.json and report.md."""
    out_dir = Path(out_dir)
    summary: ValidationSummary = result["summary"]
    table = {"passed": summary.passed, "failed": ", ".join(summary.failed) or None}
    return [
        write_json(out_dir / "validation.json", summary),
        write_run_report(out_dir / "report.md", "Validation", result["steps"], table),
    ]


STUDIES = {
    "homogenize": (run_homogenize, write_homogenize),
    "sweep": (run_sweep, write_sweep),
    "compare": (run_compare, write_compare),
    "validate": (run_validate, write_validate),
}
