"""
Material model: isotropic phase construction, laminate descriptors and the
dimensionless ratios of bi-phase laminates.
"""

import logging
from typing import Dict, Optional, Tuple

import pydantic

from errors import ConfigError
from models import (
    DimensionlessRatios,
    IsotropicInputs,
    Laminate,
    Layer,
    PhaseProperties,
    PlaneAssumption,
)
from schemas import LaminateDescriptor, PhaseSchema

logger = logging.getLogger(__name__)

# Phase b of a ratio laminate
UNIT_PHASE_VALUES = {"E": 1.0, "alpha": 1.0, "beta": 1.0, "K": 1.0, "D": 1.0}


def plane_strain_mapping(E: float, nu: float) -> Tuple[float, float]:
    """Return (E~, nu~) = (E/(1-nu^2), nu/(1-nu))."""
    return E / (1.0 - nu ** 2), nu / (1.0 - nu)


def make_isotropic_phase(
    E: float,
    nu: float,
    alpha: float = 0.0,
    beta: float = 0.0,
    K: float = 1.0,
    D: float = 1.0,
    assumption: PlaneAssumption = PlaneAssumption.PLANE_STRESS,
) -> PhaseProperties:
    """
    Build the plane tensors of an isotropic phase.

    C1111 = C2222 = E~/(1-nu~^2), C1122 = nu~ E~/(1-nu~^2), C1212 = E~/(2(1+nu~)),
    where the plane-strain case first maps (E, nu) to (E~, nu~) and plane
    stress uses them unchanged.

    Args:
        E: Young's modulus, > 0
        nu: Poisson ratio in (-1, 0.5)
        alpha, beta: thermal and diffusive stress couplings
        K, D: heat conductivity and mass diffusivity, > 0
        assumption: plane stress or plane strain

    Returns:
        PhaseProperties carrying the inputs in its `isotropic` field

    Raises:
        ValueError: on out-of-range inputs
    """
    inputs = IsotropicInputs(
        E=E, nu=nu, alpha=alpha, beta=beta, K=K, D=D,
        assumption=PlaneAssumption(assumption),
    )
    E_t, nu_t = inputs.E_tilde, inputs.nu_tilde
    stiffness = E_t / (1.0 - nu_t ** 2)
    return PhaseProperties(
        C1111=stiffness,
        C2222=stiffness,
        C1122=nu_t * stiffness,
        C1212=E_t / (2.0 * (1.0 + nu_t)),
        alpha11=alpha,
        alpha22=alpha,
        beta11=beta,
        beta22=beta,
        K11=K,
        K22=K,
        D11=D,
        D22=D,
        isotropic=inputs,
    )


def _ratio(numerator: float, denominator: float) -> Optional[float]:
    if denominator == 0.0:
        return None
    return numerator / denominator


def dimensionless_ratios(laminate: Laminate) -> DimensionlessRatios:
    """
    Phase-a over phase-b ratios of a bi-phase isotropic laminate.

    A ratio whose phase-b value is zero is returned as None and listed in
    `undefined`.
    """
    if laminate.n_layers != 2:
        raise ValueError(f"ratios need exactly two layers, got {laminate.n_layers}")
    iso_a, iso_b = (layer.phase.isotropic for layer in laminate.layers)
    if iso_a is None or iso_b is None:
        raise ValueError("ratios need isotropic phases")

    pairs = {
        "rho_C": (iso_a.E_tilde, iso_b.E_tilde),
        "rho_alpha": (iso_a.alpha, iso_b.alpha),
        "rho_beta": (iso_a.beta, iso_b.beta),
        "rho_K": (iso_a.K, iso_b.K),
        "rho_D": (iso_a.D, iso_b.D),
    }
    ratios: Dict[str, Optional[float]] = {name: _ratio(a, b) for name, (a, b) in pairs.items()}
    undefined = tuple(name for name, value in ratios.items() if value is None)
    if undefined:
        logger.debug("undefined ratios: %s", ", ".join(undefined))
    return DimensionlessRatios(
        **ratios,
        zeta=laminate.zeta,
        nu_a=iso_a.nu_tilde,
        nu_b=iso_b.nu_tilde,
        undefined=undefined,
    )


def ratio_laminate(
    rho_C: float = 1.0,
    rho_alpha: float = 1.0,
    rho_beta: float = 1.0,
    rho_K: float = 1.0,
    rho_D: float = 1.0,
    zeta: float = 1.0,
    nu: float = 0.3,
    assumption: PlaneAssumption = PlaneAssumption.PLANE_STRESS,
    epsilon: float = 1.0,
    alpha_b: float = UNIT_PHASE_VALUES["alpha"],
    beta_b: float = UNIT_PHASE_VALUES["beta"],
) -> Laminate:
    """
    Bi-phase isotropic laminate with phase b at unit properties and phase a
    scaled by the given ratios; both phases share nu.

    alpha_b and beta_b set the phase-b couplings. At zero the coupling is
    switched off in both phases and the matching ratio has no effect.
    """
    unit = UNIT_PHASE_VALUES
    phase_b = make_isotropic_phase(unit["E"], nu, alpha_b, beta_b, unit["K"], unit["D"], assumption)
    phase_a = make_isotropic_phase(
        rho_C * unit["E"], nu, rho_alpha * alpha_b, rho_beta * beta_b,
        rho_K * unit["K"], rho_D * unit["D"], assumption,
    )
    return Laminate.biphase(phase_a, phase_b, zeta=zeta, epsilon=epsilon, assumption=PlaneAssumption(assumption))


def phase_from_descriptor(phase: PhaseSchema, assumption: PlaneAssumption) -> PhaseProperties:
    if phase.isotropic is not None:
        iso = phase.isotropic
        return make_isotropic_phase(iso.E, iso.nu, iso.alpha, iso.beta, iso.K, iso.D, assumption)
    return PhaseProperties(**phase.orthotropic.model_dump())


def laminate_from_descriptor(descriptor: LaminateDescriptor) -> Laminate:
    """
    Turn the JSON laminate descriptor into a Laminate.

    Raises:
        ConfigError: with the descriptor location of the first inadmissible entry
    """
    layers = []
    for index, layer in enumerate(descriptor.layers):
        try:
            phase = phase_from_descriptor(layer.phase, descriptor.assumption)
        except ValueError as exc:
            raise ConfigError(_first_message(exc), loc=("laminate", "layers", index, "phase"))
        try:
            layers.append(Layer(phase=phase, fraction=layer.fraction))
        except ValueError as exc:
            raise ConfigError(_first_message(exc), loc=("laminate", "layers", index, "fraction"))
    try:
        laminate = Laminate(layers=tuple(layers), epsilon=descriptor.epsilon, assumption=descriptor.assumption)
    except ValueError as exc:
        raise ConfigError(_first_message(exc), loc=("laminate",))
    logger.debug("built laminate with %d layers, epsilon=%g", laminate.n_layers, laminate.epsilon)
    return laminate


def _first_message(exc: ValueError) -> str:
    if isinstance(exc, pydantic.ValidationError):
        errors = exc.errors()
        if errors:
            return errors[0]["msg"].removeprefix("Value error, ")
    return str(exc)
