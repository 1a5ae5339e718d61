"""
Invariant checks run by `lamhom validate` on one laminate.

Every check returns a ValidationCheck; none raises for a failed property, so
the whole suite always runs and the summary lists every failure.
"""

import logging
from typing import Callable, List, Optional

import numpy as np

from models import (
    COMPONENTS,
    EffectiveProperties,
    HarmonicLoad,
    Laminate,
    Layer,
    PhaseProperties,
)
from schemas import ValidationCheck, ValidationSummary
from solvers.cell_solver import (
    effective_from_profiles,
    layer_fluxes,
    profiles_from_solutions,
    solve_cell_problems,
)
from solvers.laminate_homogenizer import (
    collapse_limits,
    effective_constants_biphase,
    effective_constants_isotropic,
    normalize_constants,
)
from solvers.macro_solver import amplitude_functions, field_equation_residuals, solve_homogenized
from solvers.material_model import dimensionless_ratios, ratio_laminate

logger = logging.getLogger(__name__)

TOLERANCE = 1e-12
COLLAPSE_FRACTION = 1e-6
COLLAPSE_TOLERANCE = 1e-4


def relative_discrepancy(
    first: EffectiveProperties, second: EffectiveProperties, laminate: Optional[Laminate] = None
) -> float:
    """
    Largest componentwise difference, each relative to the larger of the two
    values and, when a laminate is given, the largest phase value of that
    component.
    """
    worst = 0.0
    for name in COMPONENTS:
        x, y = first.component(name), second.component(name)
        scale = max(abs(x), abs(y))
        if laminate is not None:
            scale = max(scale, float(np.max(np.abs(laminate.component_values(name)))))
        if scale > 0:
            worst = max(worst, abs(x - y) / scale)
    return worst


def as_effective(phase: PhaseProperties, method: str = "phase") -> EffectiveProperties:
    return EffectiveProperties(**phase.as_row(), method=method)


def _check(name: str, passed: bool, detail: str) -> ValidationCheck:
    if not passed:
        logger.warning("check %s failed: %s", name, detail)
    return ValidationCheck(name=name, passed=bool(passed), detail=detail)


def check_cell_problems(laminate: Laminate) -> ValidationCheck:
    worst_closure = worst_flux = 0.0
    for solution in solve_cell_problems(laminate):
        slopes = np.asarray(solution.slopes)
        fluxes = layer_fluxes(laminate, solution.kind, slopes)
        scale = max(float(np.max(np.abs(fluxes))), float(np.max(np.abs(slopes))), 1e-300)
        worst_flux = max(worst_flux, float(np.max(np.abs(fluxes - solution.interface_constant))) / scale)
        worst_closure = max(worst_closure, abs(float(np.dot(laminate.fractions, slopes))) / max(float(np.max(np.abs(slopes))), 1.0))
    return _check(
        "cell_problem_balance",
        worst_closure <= TOLERANCE and worst_flux <= TOLERANCE,
        f"closure {worst_closure:.2e}, flux spread {worst_flux:.2e}",
    )


def check_profiles(laminate: Laminate) -> ValidationCheck:
    worst_mean = worst_gap = 0.0
    for profile in profiles_from_solutions(laminate, solve_cell_problems(laminate)).values():
        scale = max(float(np.max(np.abs(profile.slopes))), 1.0)
        worst_mean = max(worst_mean, abs(profile.mean()) / scale)
        worst_gap = max(worst_gap, profile.continuity_gap() / scale)
    return _check(
        "profiles_zero_mean_continuous",
        worst_mean <= TOLERANCE and worst_gap <= TOLERANCE,
        f"mean {worst_mean:.2e}, interface gap {worst_gap:.2e}",
    )


def check_admissible(laminate: Laminate) -> ValidationCheck:
    eff = effective_from_profiles(laminate, solve_cell_problems(laminate))
    problems = eff.violations()
    return _check(
        "effective_symmetric_positive",
        not problems,
        "; ".join(problems) or "Voigt matrix positive definite, K and D positive, K12 = D12 = 0",
    )


def check_refinement(laminate: Laminate) -> ValidationCheck:
    base = effective_from_profiles(laminate, solve_cell_problems(laminate))
    split = laminate.split(3)
    refined = effective_from_profiles(split, solve_cell_problems(split))
    gap = relative_discrepancy(base, refined, laminate)
    return _check("refinement_invariance", gap <= TOLERANCE, f"max relative change {gap:.2e} after splitting into thirds")


def check_bounds(laminate: Laminate) -> ValidationCheck:
    eff = effective_from_profiles(laminate, solve_cell_problems(laminate))
    f = laminate.fractions
    failures = []

    def harmonic(name: str) -> float:
        return 1.0 / float(np.dot(f, 1.0 / laminate.component_values(name)))

    def close(x: float, y: float) -> bool:
        return abs(x - y) <= TOLERANCE * max(abs(x), abs(y))

    for transport in ("K", "D"):
        normal = eff.component(transport + "22")
        lower, upper = harmonic(transport + "22"), laminate.average(transport + "22")
        if not (lower * (1 - TOLERANCE) <= normal <= upper * (1 + TOLERANCE)):
            failures.append(f"{transport}22 outside [harmonic, arithmetic]")
        if not close(eff.component(transport + "11"), laminate.average(transport + "11")):
            failures.append(f"{transport}11 differs from the arithmetic mean")
        if not close(normal, harmonic(transport + "22")):
            failures.append(f"{transport}22 differs from the harmonic mean")
    for name in ("C2222", "C1212"):
        if not close(eff.component(name), harmonic(name)):
            failures.append(f"{name} differs from the harmonic mean")
    if eff.C1111 > laminate.average("C1111") * (1 + TOLERANCE):
        failures.append("C1111 above the Voigt average")
    return _check("mixture_bounds", not failures, "; ".join(failures) or "all bounds hold")


def check_homogeneous_limit(laminate: Laminate) -> ValidationCheck:
    worst = 0.0
    for phase in laminate.phases:
        single = Laminate(layers=(Layer(phase=phase, fraction=1.0),), epsilon=laminate.epsilon)
        eff = effective_from_profiles(single, solve_cell_problems(single))
        worst = max(worst, relative_discrepancy(eff, as_effective(phase)))
    return _check("homogeneous_limit", worst <= TOLERANCE, f"max relative gap {worst:.2e} for single-phase cells")


def check_macro_residual(laminate: Laminate) -> ValidationCheck:
    eff = effective_from_profiles(laminate, solve_cell_problems(laminate))
    worst = 0.0
    for direction in (1, 2):
        load = HarmonicLoad(direction=direction, B=1.0, R=1.0, S=1.0, m=1, n=2, p=3, L=10.0 * laminate.epsilon)
        residuals = field_equation_residuals(solve_homogenized(eff, load), load)
        worst = max(worst, max(residuals.values()))
    return _check("macro_residual", worst <= TOLERANCE, f"max relative residual {worst:.2e}")


def check_oracle(laminate: Laminate) -> ValidationCheck:
    analytic = effective_constants_biphase(laminate)
    cell = effective_from_profiles(laminate, solve_cell_problems(laminate))
    gap = relative_discrepancy(analytic, cell, laminate)
    detail = f"closed forms vs cell solver {gap:.2e}"
    passed = gap <= TOLERANCE
    if all(phase.isotropic is not None for phase in laminate.phases):
        iso_gap = relative_discrepancy(effective_constants_isotropic(laminate), analytic, laminate)
        detail += f", isotropic forms vs orthotropic forms {iso_gap:.2e}"
        passed = passed and iso_gap <= TOLERANCE
    return _check("closed_form_oracle", passed, detail)


def check_collapse(laminate: Laminate) -> ValidationCheck:
    a, b = laminate.phases
    limits = collapse_limits(laminate)
    worst = 0.0
    for f_a, target in ((COLLAPSE_FRACTION, limits["b"]), (1.0 - COLLAPSE_FRACTION, limits["a"])):
        thin = Laminate(
            layers=(Layer(phase=a, fraction=f_a), Layer(phase=b, fraction=1.0 - f_a)),
            epsilon=laminate.epsilon,
        )
        worst = max(worst, relative_discrepancy(effective_constants_biphase(thin), as_effective(target), thin))
    return _check(
        "phase_collapse",
        worst <= COLLAPSE_TOLERANCE,
        f"max relative gap {worst:.2e} at f_a = {COLLAPSE_FRACTION:g} and 1 - {COLLAPSE_FRACTION:g}",
    )


def check_reciprocity(laminate: Laminate) -> ValidationCheck:
    ratios = dimensionless_ratios(laminate)
    iso_a, iso_b = (phase.isotropic for phase in laminate.phases)
    if iso_a.nu != iso_b.nu or iso_a.assumption != iso_b.assumption:
        return _check("reciprocity", True, "skipped: phases have different Poisson ratios")
    names = ("rho_C", "rho_alpha", "rho_beta", "rho_K", "rho_D")
    values = {name: getattr(ratios, name) for name in names}
    if any(value is None or value <= 0 for value in values.values()):
        return _check("reciprocity", True, "skipped: a ratio is zero or undefined")

    common = {"nu": iso_a.nu, "assumption": iso_a.assumption}
    forward = ratio_laminate(**values, zeta=ratios.zeta, **common)
    backward = ratio_laminate(**{k: 1.0 / v for k, v in values.items()}, zeta=1.0 / ratios.zeta, **common)

    def normalized(lam: Laminate):
        eff = effective_constants_biphase(lam)
        out = dict(normalize_constants(eff, lam).components)
        for direction in (1, 2):
            amps = amplitude_functions(eff, lam, HarmonicLoad(direction=direction, B=1.0))
            out[f"xi_alpha_tilde_{direction}"] = amps.xi_alpha_tilde
            out[f"xi_beta_tilde_{direction}"] = amps.xi_beta_tilde
        return out

    first, second = normalized(forward), normalized(backward)
    worst = 0.0
    for key, x in first.items():
        y = second[key]
        if x is None or y is None:
            continue
        worst = max(worst, abs(x - y) / max(abs(x), abs(y), 1e-300))
    return _check("reciprocity", worst <= TOLERANCE, f"max relative gap {worst:.2e} under rho -> 1/rho, zeta -> 1/zeta")


ALWAYS: List[Callable[[Laminate], ValidationCheck]] = [
    check_cell_problems,
    check_profiles,
    check_admissible,
    check_refinement,
    check_bounds,
    check_homogeneous_limit,
    check_macro_residual,
]
BIPHASE: List[Callable[[Laminate], ValidationCheck]] = [check_oracle, check_collapse]


def run_validation(laminate: Laminate) -> ValidationSummary:
    """Run every applicable check on the laminate."""
    checks = [_check("phase_admissibility", True, f"{laminate.n_layers} admissible layers, fractions sum to 1")]
    suite = list(ALWAYS)
    if laminate.n_layers == 2:
        suite += BIPHASE
        if all(phase.isotropic is not None for phase in laminate.phases):
            suite.append(check_reciprocity)
    for check in suite:
        checks.append(check(laminate))
    passed = all(check.passed for check in checks)
    logger.info("validation: %d checks, %s", len(checks), "passed" if passed else "FAILED")
    return ValidationSummary(passed=passed, checks=checks)
