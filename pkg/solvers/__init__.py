from .material_model import (
    make_isotropic_phase,
    dimensionless_ratios,
    ratio_laminate,
    laminate_from_descriptor,
)
from .laminate_homogenizer import (
    perturbation_profiles_biphase,
    effective_constants_biphase,
    effective_constants_isotropic,
    normalize_constants,
    collapse_limits,
)
from .cell_solver import (
    solve_cell_problem,
    solve_cell_problems,
    effective_from_profiles,
    effective_constants_cell,
)
from .macro_solver import (
    solve_homogenized,
    field_equation_residuals,
    amplitude_functions,
    load_for_amplitudes,
)
from .hetero_solver import (
    solve_heterogeneous,
    upscale,
    downscale_first_order,
    compare,
)
from .validation_suite import run_validation
from .study_orchestrator import (
    run_homogenize,
    run_sweep,
    run_compare,
    run_validate,
)

__all__ = [
    "make_isotropic_phase",
    "dimensionless_ratios",
    "ratio_laminate",
    "laminate_from_descriptor",
    "perturbation_profiles_biphase",
    "effective_constants_biphase",
    "effective_constants_isotropic",
    "normalize_constants",
    "collapse_limits",
    "solve_cell_problem",
    "solve_cell_problems",
    "effective_from_profiles",
    "effective_constants_cell",
    "solve_homogenized",
    "field_equation_residuals",
    "amplitude_functions",
    "load_for_amplitudes",
    "solve_heterogeneous",
    "upscale",
    "downscale_first_order",
    "compare",
    "run_validation",
    "run_homogenize",
    "run_sweep",
    "run_compare",
    "run_validate",
]
