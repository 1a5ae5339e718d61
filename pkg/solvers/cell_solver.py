"""
Semi-analytic solver for the first-order cell problems of an N-layer laminate.

Along the layering normal each cell problem reduces to: a piecewise-constant
slope s_i per layer, a generalized flux c_i*s_i + d_i equal in every layer,
and periodic closure sum_i f_i*s_i = 0. That is an (N+1)x(N+1) linear system
in the slopes and the shared flux, solved exactly.
"""

import logging
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import numpy as np

from errors import SolverError
from models import (
    PROBLEM_FOR_PROFILE,
    PROFILE_FOR_PROBLEM,
    CellProblemKind,
    EffectiveProperties,
    Laminate,
    LayerSlopeSolution,
    PerturbationProfile,
    ProfileKind,
)

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10

# kind -> (c component, d component, sign of d)
FLUX_COEFFICIENTS: Dict[CellProblemKind, Tuple[str, str, float]] = {
    CellProblemKind.MECH_11: ("C2222", "C1122", 1.0),
    CellProblemKind.MECH_22: ("C2222", "C2222", 1.0),
    CellProblemKind.MECH_12: ("C1212", "C1212", 1.0),
    CellProblemKind.THERMAL_COUPLING: ("C2222", "alpha22", -1.0),
    CellProblemKind.DIFFUSIVE_COUPLING: ("C2222", "beta22", -1.0),
    CellProblemKind.CONDUCTION: ("K22", "K22", 1.0),
    CellProblemKind.DIFFUSION: ("D22", "D22", 1.0),
}

SlopeSource = Union[LayerSlopeSolution, PerturbationProfile]


def flux_coefficients(laminate: Laminate, kind: CellProblemKind) -> Tuple[np.ndarray, np.ndarray]:
    c_name, d_name, sign = FLUX_COEFFICIENTS[kind]
    return laminate.component_values(c_name), sign * laminate.component_values(d_name)


def layer_fluxes(laminate: Laminate, kind: CellProblemKind, slopes) -> np.ndarray:
    """Generalized flux c_i*s_i + d_i in every layer."""
    c, d = flux_coefficients(laminate, kind)
    return c * np.asarray(slopes, dtype=float) + d


def solve_cell_problem(laminate: Laminate, kind: CellProblemKind) -> LayerSlopeSolution:
    """
    Solve one cell problem.

    Raises:
        SolverError: if the system is singular or the relative residual
            exceeds RESIDUAL_TOLERANCE
    """
    c, d = flux_coefficients(laminate, kind)
    n = laminate.n_layers
    matrix = np.zeros((n + 1, n + 1))
    rhs = np.zeros(n + 1)
    matrix[np.arange(n), np.arange(n)] = c
    matrix[:n, n] = -1.0
    rhs[:n] = -d
    matrix[n, :n] = laminate.fractions

    try:
        solution = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"{kind.value} cell problem is singular: {exc}")

    scale = np.linalg.norm(matrix, np.inf) * np.linalg.norm(solution, np.inf) + np.linalg.norm(rhs, np.inf)
    residual = float(np.linalg.norm(matrix @ solution - rhs, np.inf) / scale) if scale > 0 else 0.0
    if not np.all(np.isfinite(solution)) or residual > RESIDUAL_TOLERANCE:
        raise SolverError(f"{kind.value} cell problem residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:g}")

    logger.debug("%s: %d layers, flux %.6g, residual %.2e", kind.value, n, solution[n], residual)
    return LayerSlopeSolution(
        kind=kind,
        slopes=tuple(solution[:n].tolist()),
        interface_constant=float(solution[n]),
        residual=residual,
    )


def solve_cell_problems(laminate: Laminate) -> List[LayerSlopeSolution]:
    """One LayerSlopeSolution per CellProblemKind, in enum order."""
    return [solve_cell_problem(laminate, kind) for kind in CellProblemKind]


def profiles_from_solutions(
    laminate: Laminate, solutions: Iterable[LayerSlopeSolution]
) -> Dict[ProfileKind, PerturbationProfile]:
    """Zero-mean, continuous profiles built from solved slopes."""
    return {
        PROFILE_FOR_PROBLEM[sol.kind]: PerturbationProfile.from_slopes(
            PROFILE_FOR_PROBLEM[sol.kind], laminate.fractions, sol.slopes
        )
        for sol in solutions
    }


def _slopes_by_kind(
    laminate: Laminate, solutions: Union[Iterable[SlopeSource], Mapping[ProfileKind, PerturbationProfile]]
) -> Dict[CellProblemKind, np.ndarray]:
    if isinstance(solutions, Mapping):
        solutions = list(solutions.values())
    slopes: Dict[CellProblemKind, np.ndarray] = {}
    for item in solutions:
        kind = PROBLEM_FOR_PROFILE[item.kind] if isinstance(item, PerturbationProfile) else item.kind
        slopes[kind] = np.asarray(item.slopes, dtype=float)
    missing = [kind.value for kind in CellProblemKind if kind not in slopes]
    if missing:
        raise ValueError(f"missing cell problem solutions: {', '.join(missing)}")
    for kind, values in slopes.items():
        if values.shape != (laminate.n_layers,):
            raise ValueError(f"{kind.value} has {values.size} slopes for {laminate.n_layers} layers")
    return slopes


def effective_from_profiles(
    laminate: Laminate,
    solutions: Union[Iterable[SlopeSource], Mapping[ProfileKind, PerturbationProfile]],
    method: str = "cell-solver",
) -> EffectiveProperties:
    """
    Effective constants as cell averages of the fluctuation fields.

    C[p, q] = <e_p^T C e_q> with the local strains e_11 = (1, s11, 0),
    e_22 = (0, 1+s22, 0), e_12 = (0, 0, 1+s12) in Voigt order;
    K[q1, q2] = <G_q2^T K G_q1> with G_1 = (1, 0), G_2 = (0, 1+sM), D alike;
    alpha_11 = <alpha11 - C1122 sN~>, alpha_22 = <alpha22 - C2222 sN~>, beta alike.

    Accepts LayerSlopeSolutions or closed-form profiles.
    """
    slopes = _slopes_by_kind(laminate, solutions)
    f = laminate.fractions
    n = laminate.n_layers

    stiffness = np.stack([phase.voigt_matrix() for phase in laminate.phases])
    strains = np.zeros((n, 3, 3))
    strains[:, 0, 0] = 1.0
    strains[:, 1, 0] = slopes[CellProblemKind.MECH_11]
    strains[:, 1, 1] = 1.0 + slopes[CellProblemKind.MECH_22]
    strains[:, 2, 2] = 1.0 + slopes[CellProblemKind.MECH_12]
    C = np.einsum("i,iap,iab,ibq->pq", f, strains, stiffness, strains)
    C = 0.5 * (C + C.T)

    def transport(diag_1: str, diag_2: str, kind: CellProblemKind) -> np.ndarray:
        tensor = np.zeros((n, 2, 2))
        tensor[:, 0, 0] = laminate.component_values(diag_1)
        tensor[:, 1, 1] = laminate.component_values(diag_2)
        gradients = np.zeros((n, 2, 2))
        gradients[:, 0, 0] = 1.0
        gradients[:, 1, 1] = 1.0 + slopes[kind]
        return np.einsum("i,iap,iab,ibq->pq", f, gradients, tensor, gradients)

    K = transport("K11", "K22", CellProblemKind.CONDUCTION)
    D = transport("D11", "D22", CellProblemKind.DIFFUSION)

    s_tilde = slopes[CellProblemKind.THERMAL_COUPLING]
    s_hat = slopes[CellProblemKind.DIFFUSIVE_COUPLING]
    C1122 = laminate.component_values("C1122")
    C2222 = laminate.component_values("C2222")

    return EffectiveProperties(
        C1111=float(C[0, 0]),
        C2222=float(C[1, 1]),
        C1122=float(C[0, 1]),
        C1212=float(C[2, 2]),
        alpha11=float(np.dot(f, laminate.component_values("alpha11") - C1122 * s_tilde)),
        alpha22=float(np.dot(f, laminate.component_values("alpha22") - C2222 * s_tilde)),
        beta11=float(np.dot(f, laminate.component_values("beta11") - C1122 * s_hat)),
        beta22=float(np.dot(f, laminate.component_values("beta22") - C2222 * s_hat)),
        K11=float(K[0, 0]),
        K22=float(K[1, 1]),
        K12=float(0.5 * (K[0, 1] + K[1, 0])),
        D11=float(D[0, 0]),
        D22=float(D[1, 1]),
        D12=float(0.5 * (D[0, 1] + D[1, 0])),
        method=method,
    )


def effective_constants_cell(laminate: Laminate) -> EffectiveProperties:
    return effective_from_profiles(laminate, solve_cell_problems(laminate))


def sample_profiles(
    profiles: Mapping[ProfileKind, PerturbationProfile], samples: int = 201
) -> Tuple[np.ndarray, Dict[ProfileKind, np.ndarray]]:
    """Profile values on an evenly spaced xi grid over [0, 1), for the profile CSV dump."""
    xi = np.linspace(0.0, 1.0, samples, endpoint=False)
    return xi, {kind: profile(xi) for kind, profile in profiles.items()}
