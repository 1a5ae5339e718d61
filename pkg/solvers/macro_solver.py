"""
Homogenized thermodiffusive field equations under L-periodic harmonic loads.

Along axis x_j the homogenized problem is

    C_jjjj U'' - alpha_jj Theta' - beta_jj Upsilon' + b = 0
    K_jj Theta'' + r = 0
    D_jj Upsilon'' + s = 0

and for cosine sources it has the closed-form real solution built here.
"""

import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np

from models import (
    AmplitudeFunctions,
    EffectiveProperties,
    HarmonicLoad,
    Laminate,
    MacroSolution,
)

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 512


def directional_constants(eff: EffectiveProperties, direction: int) -> Tuple[float, float, float, float, float]:
    """(C_jjjj, alpha_jj, beta_jj, K_jj, D_jj) for load axis j."""
    j = f"{direction}{direction}"
    return (
        eff.component("C" + j * 2),
        eff.component("alpha" + j),
        eff.component("beta" + j),
        eff.component("K" + j),
        eff.component("D" + j),
    )


def solve_homogenized(eff: EffectiveProperties, load: HarmonicLoad) -> MacroSolution:
    """
    Closed-form homogenized fields for one harmonic load.

    Theta = R L^2/(K (2 pi n)^2) cos(2 pi n x/L), Upsilon alike with (S, D, p),
    U = B L^2/(C (2 pi m)^2) cos(2 pi m x/L)
        + R alpha L^3/(C K (2 pi n)^3) sin(2 pi n x/L)
        + S beta L^3/(C D (2 pi p)^3) sin(2 pi p x/L).

    Raises:
        ValueError: for non-positive C_jjjj or K_jj, or S != 0 with D_jj <= 0
    """
    C, alpha, beta, K, D = directional_constants(eff, load.direction)
    j = f"{load.direction}{load.direction}"
    if C <= 0:
        raise ValueError(f"C{j * 2} must be positive")
    if load.R != 0.0 and K <= 0:
        raise ValueError(f"K{j} must be positive for a heat source")
    if load.S != 0.0 and D <= 0:
        raise ValueError(f"D{j} must be positive for a mass source (singular diffusion)")

    L = load.L
    two_pi = 2.0 * math.pi
    a_B = load.B * L ** 2 / (C * (two_pi * load.m) ** 2) if load.B != 0.0 else 0.0
    a_R = load.R * alpha * L ** 3 / (C * K * (two_pi * load.n) ** 3) if load.R != 0.0 else 0.0
    a_S = load.S * beta * L ** 3 / (C * D * (two_pi * load.p) ** 3) if load.S != 0.0 else 0.0
    theta_amplitude = load.R * L ** 2 / (K * (two_pi * load.n) ** 2) if load.R != 0.0 else 0.0
    upsilon_amplitude = load.S * L ** 2 / (D * (two_pi * load.p) ** 2) if load.S != 0.0 else 0.0

    xi_alpha = alpha * load.R * L / (K * load.B) if load.B != 0.0 else None
    xi_beta = beta * load.S * L / (D * load.B) if load.B != 0.0 else None

    logger.debug(
        "homogenized solution j=%d: a_B=%.6g a_R=%.6g a_S=%.6g", load.direction, a_B, a_R, a_S
    )
    return MacroSolution(
        direction=load.direction,
        L=L,
        m=load.m,
        n=load.n,
        p=load.p,
        a_B=a_B,
        a_R=a_R,
        a_S=a_S,
        theta_amplitude=theta_amplitude,
        upsilon_amplitude=upsilon_amplitude,
        C=C,
        alpha=alpha,
        beta=beta,
        K=K,
        D=D,
        xi_alpha=xi_alpha,
        xi_beta=xi_beta,
    )


def load_sources(load: HarmonicLoad, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Body force b, heat source r and mass source s at x."""
    x = np.asarray(x, dtype=float)
    k = 2.0 * math.pi / load.L
    return (
        load.B * np.cos(k * load.m * x),
        load.R * np.cos(k * load.n * x),
        load.S * np.cos(k * load.p * x),
    )


def field_equation_residuals(solution: MacroSolution, load: HarmonicLoad, x=None) -> Dict[str, float]:
    """
    Largest residual of each homogenized equation over the points x, relative
    to the largest individual term of that equation. Defaults to 64 points.
    """
    if x is None:
        x = np.linspace(0.0, load.L, 64, endpoint=False)
    b, r, s = load_sources(load, x)
    equations = {
        "mechanical": (
            solution.C * solution.d2U(x),
            -solution.alpha * solution.dtheta(x),
            -solution.beta * solution.dupsilon(x),
            b,
        ),
        "thermal": (-solution.K * (2.0 * math.pi * solution.n / solution.L) ** 2 * solution.theta(x), r),
        "diffusive": (-solution.D * (2.0 * math.pi * solution.p / solution.L) ** 2 * solution.upsilon(x), s),
    }
    residuals = {}
    for name, terms in equations.items():
        scale = max(float(np.max(np.abs(term))) for term in terms)
        total = np.sum(terms, axis=0)
        residuals[name] = float(np.max(np.abs(total)) / scale) if scale > 0 else 0.0
    return residuals


def field_means(solution: MacroSolution, samples: int = DEFAULT_SAMPLES) -> Dict[str, float]:
    """Means of U, Theta, Upsilon over [0, L) by the periodic trapezoid rule."""
    x = np.linspace(0.0, solution.L, samples, endpoint=False)
    return {
        "U": float(np.mean(solution.U(x))),
        "theta": float(np.mean(solution.theta(x))),
        "upsilon": float(np.mean(solution.upsilon(x))),
    }


def sample_dimensionless(solution: MacroSolution, samples: int = DEFAULT_SAMPLES) -> Dict[str, Optional[np.ndarray]]:
    """
    U*, Theta*, Upsilon* on an x/L grid of `samples` points over [0, 1].
    A field whose scale vanishes comes back as None.
    """
    x_over_L = np.linspace(0.0, 1.0, samples)
    x = x_over_L * solution.L
    return {
        "x/L": x_over_L,
        "U*": solution.U_star(x),
        "Theta*": solution.theta_star(x),
        "Upsilon*": solution.upsilon_star(x),
    }


def _phase_mean(laminate: Laminate, name: str) -> Optional[float]:
    if laminate.n_layers != 2:
        return None
    a, b = laminate.phases
    return 0.5 * (a.component(name) + b.component(name))


def amplitude_functions(eff: EffectiveProperties, laminate: Laminate, load: HarmonicLoad) -> AmplitudeFunctions:
    """
    Xi^alpha = alpha_jj R L/(K_jj B) and Xi^beta = beta_jj S L/(D_jj B), with
    their normalized forms divided by the same expression built from the
    two-phase averages of alpha, K (beta, D). The normalized forms equal
    (alpha_jj/<alpha>) / (K_jj/<K>) and do not depend on the load amplitudes;
    they are defined for bi-phase laminates only.
    """
    _, alpha, beta, K, D = directional_constants(eff, load.direction)
    j = f"{load.direction}{load.direction}"
    undefined = []

    xi_alpha = xi_beta = None
    if load.B != 0.0:
        xi_alpha = alpha * load.R * load.L / (K * load.B)
        xi_beta = beta * load.S * load.L / (D * load.B)
    else:
        undefined += ["xi_alpha", "xi_beta"]

    def normalized(coupling: float, transport: float, coupling_name: str, transport_name: str) -> Optional[float]:
        mean_coupling = _phase_mean(laminate, coupling_name + j)
        mean_transport = _phase_mean(laminate, transport_name + j)
        if not mean_coupling or not mean_transport:
            return None
        return (coupling / transport) / (mean_coupling / mean_transport)

    xi_alpha_tilde = normalized(alpha, K, "alpha", "K")
    xi_beta_tilde = normalized(beta, D, "beta", "D")
    if xi_alpha_tilde is None:
        undefined.append("xi_alpha_tilde")
    if xi_beta_tilde is None:
        undefined.append("xi_beta_tilde")

    return AmplitudeFunctions(
        direction=load.direction,
        xi_alpha=xi_alpha,
        xi_beta=xi_beta,
        xi_alpha_tilde=xi_alpha_tilde,
        xi_beta_tilde=xi_beta_tilde,
        undefined=tuple(undefined),
    )


def load_for_amplitudes(
    eff: EffectiveProperties,
    load: HarmonicLoad,
    xi_alpha: Optional[float] = None,
    xi_beta: Optional[float] = None,
) -> HarmonicLoad:
    """
    Return `load` with R (and/or S) chosen so that Xi^alpha (Xi^beta) of the
    homogenized constants takes the requested value.

    Raises:
        ValueError: if B is zero, or the coupling needed for a nonzero target vanishes
    """
    if xi_alpha is None and xi_beta is None:
        return load
    if load.B == 0.0:
        raise ValueError("amplitude targets need a nonzero body force B")
    _, alpha, beta, K, D = directional_constants(eff, load.direction)
    update = {}
    if xi_alpha is not None:
        if alpha == 0.0 and xi_alpha != 0.0:
            raise ValueError("xi_alpha target needs a nonzero thermal coupling")
        update["R"] = xi_alpha * load.B * K / (alpha * load.L) if xi_alpha != 0.0 else 0.0
    if xi_beta is not None:
        if beta == 0.0 and xi_beta != 0.0:
            raise ValueError("xi_beta target needs a nonzero diffusive coupling")
        update["S"] = xi_beta * load.B * D / (beta * load.L) if xi_beta != 0.0 else 0.0
    return HarmonicLoad(**{**load.model_dump(), **update})
