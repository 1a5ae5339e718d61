import json

import numpy as np
import pytest

from models import Laminate, Layer, PhaseProperties, PlaneAssumption
from solvers.material_model import make_isotropic_phase, ratio_laminate


# =============================================================================
# Phases and laminates
# =============================================================================

@pytest.fixture
def stiff_phase():
    """Phase a of the reference laminates: ten times phase b in everything."""
    return make_isotropic_phase(E=10.0, nu=0.3, alpha=10.0, beta=10.0, K=10.0, D=10.0)


@pytest.fixture
def soft_phase():
    return make_isotropic_phase(E=1.0, nu=0.3, alpha=1.0, beta=1.0, K=1.0, D=1.0)


@pytest.fixture
def orthotropic_phase():
    return PhaseProperties(
        C1111=12.0, C2222=4.0, C1122=1.5, C1212=2.5,
        alpha11=0.7, alpha22=0.2, beta11=0.3, beta22=0.9,
        K11=3.0, K22=0.5, D11=0.8, D22=2.0,
    )


@pytest.fixture
def reference_laminate(stiff_phase, soft_phase):
    return Laminate.biphase(stiff_phase, soft_phase, zeta=1.0)


@pytest.fixture
def mixed_laminate(orthotropic_phase, soft_phase):
    return Laminate.biphase(orthotropic_phase, soft_phase, zeta=0.4, epsilon=0.25)


@pytest.fixture
def three_layer_laminate(stiff_phase, soft_phase, orthotropic_phase):
    return Laminate(
        layers=(
            Layer(phase=stiff_phase, fraction=0.2),
            Layer(phase=orthotropic_phase, fraction=0.5),
            Layer(phase=soft_phase, fraction=0.3),
        ),
        epsilon=0.5,
    )


def random_phase(
    rng: np.random.Generator,
    isotropic: bool,
    low: float = 0.02,
    high: float = 50.0,
    assumption: PlaneAssumption = PlaneAssumption.PLANE_STRESS,
) -> PhaseProperties:
    """Admissible phase with moduli log-uniform over [low, high]."""
    def magnitude() -> float:
        return float(10.0 ** rng.uniform(np.log10(low), np.log10(high)))

    if isotropic:
        return make_isotropic_phase(
            E=magnitude(),
            nu=float(rng.uniform(-0.5, 0.45)),
            alpha=float(rng.uniform(-1.0, 1.0)) * magnitude(),
            beta=float(rng.uniform(-1.0, 1.0)) * magnitude(),
            K=magnitude(),
            D=magnitude(),
            assumption=assumption,
        )
    C1111, C2222 = magnitude(), magnitude()
    return PhaseProperties(
        C1111=C1111,
        C2222=C2222,
        C1122=float(rng.uniform(-0.9, 0.9)) * np.sqrt(C1111 * C2222),
        C1212=magnitude(),
        alpha11=float(rng.uniform(-1.0, 1.0)) * magnitude(),
        alpha22=float(rng.uniform(-1.0, 1.0)) * magnitude(),
        beta11=float(rng.uniform(-1.0, 1.0)) * magnitude(),
        beta22=float(rng.uniform(-1.0, 1.0)) * magnitude(),
        K11=magnitude(),
        K22=magnitude(),
        D11=magnitude(),
        D22=magnitude(),
    )


def random_biphase(rng: np.random.Generator) -> Laminate:
    """Phase b near unit moduli, phase a spread over ratios in [0.02, 50]."""
    isotropic = bool(rng.integers(0, 2))
    assumption = PlaneAssumption.PLANE_STRAIN if rng.integers(0, 2) else PlaneAssumption.PLANE_STRESS
    zeta = float(10.0 ** rng.uniform(-1.0, 1.0))
    phase_a = random_phase(rng, isotropic, 0.02, 50.0, assumption)
    phase_b = random_phase(rng, isotropic, 0.5, 2.0, assumption)
    return Laminate.biphase(phase_a, phase_b, zeta=zeta, assumption=assumption)


@pytest.fixture(scope="session")
def laminate_from_seed():
    """Seed -> random admissible bi-phase laminate, for hypothesis-driven tests."""
    def build(seed: int) -> Laminate:
        return random_biphase(np.random.default_rng(seed))

    return build


@pytest.fixture(scope="session")
def random_laminates():
    """1000 seeded admissible bi-phase laminates, isotropic and orthotropic."""
    rng = np.random.default_rng(20240611)
    return [random_biphase(rng) for _ in range(1000)]


@pytest.fixture
def figure_laminate():
    """rho_C = rho_alpha = rho_K = 10, beta = 0, equal thickness."""
    return ratio_laminate(rho_C=10.0, rho_alpha=10.0, rho_beta=0.0, rho_K=10.0, rho_D=1.0, zeta=1.0)


# =============================================================================
# Study configurations
# =============================================================================

def isotropic_layer(fraction, E, nu=0.3, alpha=0.0, beta=0.0, K=1.0, D=1.0):
    return {
        "fraction": fraction,
        "phase": {"isotropic": {"E": E, "nu": nu, "alpha": alpha, "beta": beta, "K": K, "D": D}},
    }


@pytest.fixture
def config_dict():
    """Factory for study configuration dicts around a bi-phase isotropic laminate."""
    def build(**blocks):
        config = {
            "laminate": {
                "assumption": "plane-stress",
                "epsilon": 1.0,
                "layers": [
                    isotropic_layer(0.5, E=10.0, alpha=10.0, K=10.0, D=1.0),
                    isotropic_layer(0.5, E=1.0, alpha=1.0, K=1.0, D=1.0),
                ],
            }
        }
        config.update(blocks)
        return config

    return build


@pytest.fixture
def write_config(tmp_path):
    """Write a config dict as pretty JSON and return its path."""
    def write(config, name="study.json"):
        path = tmp_path / name
        path.write_text(json.dumps(config, indent=2), encoding="utf-8")
        return path

    return write
