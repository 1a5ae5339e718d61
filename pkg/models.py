"""
Domain value types for periodic layered thermodiffusive composites.

All models are frozen pydantic models: once built they are immutable and can
be shared between sweep workers without locking. The layering normal is the
e2 axis throughout; the fast coordinate xi runs over the unit cell [0, 1)
with the first layer starting at xi = 0.
"""

import math
from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


COMPONENTS: Tuple[str, ...] = (
    "C1111", "C2222", "C1122", "C1212",
    "alpha11", "alpha22", "beta11", "beta22",
    "K11", "K22", "D11", "D22",
)

FRACTION_SUM_TOLERANCE = 1e-12


class PlaneAssumption(str, Enum):
    PLANE_STRESS = "plane-stress"
    PLANE_STRAIN = "plane-strain"


class IsotropicInputs(BaseModel):
    """Engineering inputs of an isotropic phase, kept alongside the tensors it produced."""
    model_config = ConfigDict(frozen=True)

    E: float
    nu: float
    alpha: float = 0.0
    beta: float = 0.0
    K: float
    D: float
    assumption: PlaneAssumption = PlaneAssumption.PLANE_STRESS

    @model_validator(mode="after")
    def check_ranges(self) -> "IsotropicInputs":
        for name in ("E", "nu", "alpha", "beta", "K", "D"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.E <= 0:
            raise ValueError(f"E must be positive, got {self.E}")
        if not -1.0 < self.nu < 0.5:
            raise ValueError(f"nu must lie in (-1, 0.5), got {self.nu}")
        if self.K <= 0:
            raise ValueError(f"K must be positive, got {self.K}")
        if self.D <= 0:
            raise ValueError(f"D must be positive, got {self.D}")
        return self

    @property
    def E_tilde(self) -> float:
        if self.assumption is PlaneAssumption.PLANE_STRAIN:
            return self.E / (1.0 - self.nu ** 2)
        return self.E

    @property
    def nu_tilde(self) -> float:
        if self.assumption is PlaneAssumption.PLANE_STRAIN:
            return self.nu / (1.0 - self.nu)
        return self.nu


class _TensorComponents(BaseModel):
    model_config = ConfigDict(frozen=True)

    C1111: float
    C2222: float
    C1122: float
    C1212: float
    alpha11: float = 0.0
    alpha22: float = 0.0
    beta11: float = 0.0
    beta22: float = 0.0
    K11: float
    K22: float
    D11: float
    D22: float

    def voigt_matrix(self) -> np.ndarray:
        """Plane elastic stiffness in Voigt order (11, 22, 12)."""
        return np.array([
            [self.C1111, self.C1122, 0.0],
            [self.C1122, self.C2222, 0.0],
            [0.0, 0.0, self.C1212],
        ])

    def component(self, name: str) -> float:
        return float(getattr(self, name))

    def as_row(self) -> Dict[str, float]:
        return {name: self.component(name) for name in COMPONENTS}


class PhaseProperties(_TensorComponents):
    """
    One homogeneous, orthotropic phase with axes aligned to the layering.

    alpha and beta are stress-coupling tensors (stress per unit temperature
    and per unit chemical potential), not expansion coefficients.
    """
    isotropic: Optional[IsotropicInputs] = None

    @model_validator(mode="after")
    def check_admissible(self) -> "PhaseProperties":
        for name in COMPONENTS:
            if not math.isfinite(self.component(name)):
                raise ValueError(f"{name} must be finite")
        if self.C1111 <= 0 or self.C1212 <= 0:
            raise ValueError("elastic matrix is not positive definite: C1111 and C1212 must be positive")
        if self.C1111 * self.C2222 - self.C1122 ** 2 <= 0:
            raise ValueError("elastic matrix is not positive definite: C1122^2 >= C1111*C2222")
        for name in ("K11", "K22", "D11", "D22"):
            if self.component(name) <= 0:
                raise ValueError(f"{name} must be positive, got {self.component(name)}")
        return self


class EffectiveProperties(_TensorComponents):
    """Homogenized constants of a laminate, with the off-diagonal transport terms kept for checks."""
    K12: float = 0.0
    D12: float = 0.0
    method: str = "analytic"

    def violations(self, tolerance: float = 1e-12) -> List[str]:
        """Names of the admissibility conditions this set of constants fails."""
        problems = []
        if not all(math.isfinite(self.component(name)) for name in COMPONENTS):
            problems.append("non-finite component")
            return problems
        eig = np.linalg.eigvalsh(self.voigt_matrix())
        if eig.min() <= 0:
            problems.append("elastic Voigt matrix not positive definite")
        for pair in (("K11", "K22", "K12"), ("D11", "D22", "D12")):
            diag_a, diag_b, off = (getattr(self, n) for n in pair)
            if diag_a <= 0 or diag_b <= 0:
                problems.append(f"{pair[0][0]} not positive")
            elif abs(off) > tolerance * max(diag_a, diag_b):
                problems.append(f"{pair[2]} not negligible")
        return problems


class Layer(BaseModel):
    model_config = ConfigDict(frozen=True)

    phase: PhaseProperties
    fraction: float

    @field_validator("fraction")
    @classmethod
    def check_fraction(cls, value: float) -> float:
        if not (math.isfinite(value) and 0.0 < value <= 1.0):
            raise ValueError(f"thickness fraction must lie in (0, 1], got {value}")
        return value


class Laminate(BaseModel):
    """Ordered periodic stack of layers along e2 with cell period epsilon."""
    model_config = ConfigDict(frozen=True)

    layers: Tuple[Layer, ...] = Field(min_length=1)
    epsilon: float = 1.0
    assumption: Optional[PlaneAssumption] = None

    @model_validator(mode="after")
    def check_stack(self) -> "Laminate":
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        total = math.fsum(layer.fraction for layer in self.layers)
        if abs(total - 1.0) > FRACTION_SUM_TOLERANCE:
            raise ValueError(f"thickness fractions sum to {total!r}, expected 1")
        return self

    @classmethod
    def biphase(
        cls,
        phase_a: PhaseProperties,
        phase_b: PhaseProperties,
        zeta: float = 1.0,
        epsilon: float = 1.0,
        assumption: Optional[PlaneAssumption] = None,
    ) -> "Laminate":
        """Two-layer laminate with thickness ratio zeta = f_a / f_b."""
        if not (math.isfinite(zeta) and zeta > 0):
            raise ValueError(f"zeta must be positive, got {zeta}")
        f_a = zeta / (1.0 + zeta)
        f_b = 1.0 / (1.0 + zeta)
        return cls(
            layers=(Layer(phase=phase_a, fraction=f_a), Layer(phase=phase_b, fraction=f_b)),
            epsilon=epsilon,
            assumption=assumption,
        )

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def fractions(self) -> np.ndarray:
        return np.array([layer.fraction for layer in self.layers])

    @property
    def phases(self) -> List[PhaseProperties]:
        return [layer.phase for layer in self.layers]

    @property
    def zeta(self) -> float:
        if self.n_layers != 2:
            raise ValueError(f"zeta is defined for bi-phase laminates only, this one has {self.n_layers} layers")
        return self.layers[0].fraction / self.layers[1].fraction

    def component_values(self, name: str) -> np.ndarray:
        """Per-layer values of one component."""
        return np.array([layer.phase.component(name) for layer in self.layers])

    def average(self, name: str) -> float:
        return float(np.dot(self.fractions, self.component_values(name)))

    def split(self, pieces: int) -> "Laminate":
        """Same physics with every layer cut into equal sublayers."""
        if pieces < 1:
            raise ValueError("pieces must be at least 1")
        layers = tuple(
            Layer(phase=layer.phase, fraction=layer.fraction / pieces)
            for layer in self.layers
            for _ in range(pieces)
        )
        return Laminate(layers=layers, epsilon=self.epsilon, assumption=self.assumption)


class DimensionlessRatios(BaseModel):
    """Phase-a over phase-b ratios of a bi-phase isotropic laminate. None marks an undefined ratio."""
    model_config = ConfigDict(frozen=True)

    rho_C: Optional[float] = None
    rho_alpha: Optional[float] = None
    rho_beta: Optional[float] = None
    rho_K: Optional[float] = None
    rho_D: Optional[float] = None
    zeta: float
    nu_a: float
    nu_b: float
    undefined: Tuple[str, ...] = ()


class NormalizedProperties(BaseModel):
    """Effective constants divided by the two-phase average of the same component."""
    model_config = ConfigDict(frozen=True)

    components: Dict[str, Optional[float]]
    undefined: Tuple[str, ...] = ()

    def get(self, name: str) -> Optional[float]:
        return self.components.get(name)


class ProfileKind(str, Enum):
    N211 = "N211"
    N222 = "N222"
    N112 = "N112"
    NTILDE2 = "Ntilde2"
    NHAT2 = "Nhat2"
    M2 = "M2"
    W2 = "W2"


class CellProblemKind(str, Enum):
    MECH_11 = "mech-11"
    MECH_22 = "mech-22"
    MECH_12 = "mech-12"
    THERMAL_COUPLING = "thermal-coupling"
    DIFFUSIVE_COUPLING = "diffusive-coupling"
    CONDUCTION = "conduction"
    DIFFUSION = "diffusion"


PROFILE_FOR_PROBLEM: Dict[CellProblemKind, ProfileKind] = {
    CellProblemKind.MECH_11: ProfileKind.N211,
    CellProblemKind.MECH_22: ProfileKind.N222,
    CellProblemKind.MECH_12: ProfileKind.N112,
    CellProblemKind.THERMAL_COUPLING: ProfileKind.NTILDE2,
    CellProblemKind.DIFFUSIVE_COUPLING: ProfileKind.NHAT2,
    CellProblemKind.CONDUCTION: ProfileKind.M2,
    CellProblemKind.DIFFUSION: ProfileKind.W2,
}
PROBLEM_FOR_PROFILE: Dict[ProfileKind, CellProblemKind] = {v: k for k, v in PROFILE_FOR_PROBLEM.items()}


class PerturbationProfile(BaseModel):
    """
    Zero-mean, cell-periodic, piecewise-linear fluctuation over xi in [0, 1).

    offsets[i] is the profile value at the start of layer i.
    """
    model_config = ConfigDict(frozen=True)

    kind: ProfileKind
    fractions: Tuple[float, ...]
    slopes: Tuple[float, ...]
    offsets: Tuple[float, ...]

    @classmethod
    def from_slopes(cls, kind: ProfileKind, fractions, slopes) -> "PerturbationProfile":
        f = np.asarray(fractions, dtype=float)
        s = np.asarray(slopes, dtype=float)
        rises = f * s
        starts = np.concatenate(([0.0], np.cumsum(rises)[:-1]))
        # shift so the cell mean vanishes
        mean = float(np.sum(f * (starts + 0.5 * rises)))
        return cls(
            kind=kind,
            fractions=tuple(f.tolist()),
            slopes=tuple(s.tolist()),
            offsets=tuple((starts - mean).tolist()),
        )

    @property
    def starts(self) -> np.ndarray:
        f = np.asarray(self.fractions)
        return np.concatenate(([0.0], np.cumsum(f)[:-1]))

    def _locate(self, xi) -> Tuple[np.ndarray, np.ndarray]:
        xi = np.mod(np.asarray(xi, dtype=float), 1.0)
        index = np.searchsorted(self.starts, xi, side="right") - 1
        index = np.clip(index, 0, len(self.slopes) - 1)
        return xi, index

    def __call__(self, xi) -> np.ndarray:
        xi, index = self._locate(xi)
        offsets = np.asarray(self.offsets)
        slopes = np.asarray(self.slopes)
        return offsets[index] + slopes[index] * (xi - self.starts[index])

    def derivative(self, xi) -> np.ndarray:
        _, index = self._locate(xi)
        return np.asarray(self.slopes)[index]

    def mean(self) -> float:
        f = np.asarray(self.fractions)
        s = np.asarray(self.slopes)
        return float(np.sum(f * (np.asarray(self.offsets) + 0.5 * s * f)))

    def continuity_gap(self) -> float:
        """Largest jump across an interface, the periodic wrap included."""
        f = np.asarray(self.fractions)
        ends = np.asarray(self.offsets) + np.asarray(self.slopes) * f
        following = np.roll(np.asarray(self.offsets), -1)
        return float(np.max(np.abs(ends - following)))

    def closure(self) -> float:
        return float(np.dot(self.fractions, self.slopes))


class LayerSlopeSolution(BaseModel):
    """Per-layer slopes of one cell problem and the flux they all carry."""
    model_config = ConfigDict(frozen=True)

    kind: CellProblemKind
    slopes: Tuple[float, ...]
    interface_constant: float
    residual: float = 0.0


class HarmonicLoad(BaseModel):
    """
    L-periodic harmonic sources along axis x_j:
    b_j = B cos(2 pi m x/L), r = R cos(2 pi n x/L), s = S cos(2 pi p x/L).
    """
    model_config = ConfigDict(frozen=True)

    direction: Literal[1, 2] = 2
    B: float = 0.0
    R: float = 0.0
    S: float = 0.0
    m: int = 1
    n: int = 1
    p: int = 1
    L: float = 1.0

    @model_validator(mode="after")
    def check_load(self) -> "HarmonicLoad":
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValueError(f"L must be positive, got {self.L}")
        for amplitude, wave in (("B", "m"), ("R", "n"), ("S", "p")):
            value = getattr(self, amplitude)
            if not math.isfinite(value):
                raise ValueError(f"{amplitude} must be finite")
            if value != 0.0 and getattr(self, wave) == 0:
                raise ValueError(f"wave number {wave} must be nonzero when {amplitude} is nonzero")
        return self

    def scaled(self, factor_b: float = 1.0, factor_r: float = 1.0, factor_s: float = 1.0) -> "HarmonicLoad":
        return self.model_copy(update={"B": self.B * factor_b, "R": self.R * factor_r, "S": self.S * factor_s})


class MacroSolution(BaseModel):
    """
    Closed-form homogenized fields for one harmonic load:

        U(x) = a_B cos(k_m x) + a_R sin(k_n x) + a_S sin(k_p x)
        Theta(x) = t cos(k_n x),  Upsilon(x) = y cos(k_p x)

    with k_q = 2 pi q / L. The coefficients used by the fluxes are stored too.
    """
    model_config = ConfigDict(frozen=True)

    direction: Literal[1, 2]
    L: float
    m: int
    n: int
    p: int
    a_B: float
    a_R: float
    a_S: float
    theta_amplitude: float
    upsilon_amplitude: float
    C: float
    alpha: float
    beta: float
    K: float
    D: float
    xi_alpha: Optional[float] = None
    xi_beta: Optional[float] = None

    def _k(self, q: int) -> float:
        return 2.0 * math.pi * q / self.L

    def U(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (self.a_B * np.cos(self._k(self.m) * x)
                + self.a_R * np.sin(self._k(self.n) * x)
                + self.a_S * np.sin(self._k(self.p) * x))

    def dU(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        km, kn, kp = self._k(self.m), self._k(self.n), self._k(self.p)
        return (-self.a_B * km * np.sin(km * x)
                + self.a_R * kn * np.cos(kn * x)
                + self.a_S * kp * np.cos(kp * x))

    def d2U(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        km, kn, kp = self._k(self.m), self._k(self.n), self._k(self.p)
        return (-self.a_B * km ** 2 * np.cos(km * x)
                - self.a_R * kn ** 2 * np.sin(kn * x)
                - self.a_S * kp ** 2 * np.sin(kp * x))

    def theta(self, x) -> np.ndarray:
        return self.theta_amplitude * np.cos(self._k(self.n) * np.asarray(x, dtype=float))

    def dtheta(self, x) -> np.ndarray:
        kn = self._k(self.n)
        return -self.theta_amplitude * kn * np.sin(kn * np.asarray(x, dtype=float))

    def upsilon(self, x) -> np.ndarray:
        return self.upsilon_amplitude * np.cos(self._k(self.p) * np.asarray(x, dtype=float))

    def dupsilon(self, x) -> np.ndarray:
        kp = self._k(self.p)
        return -self.upsilon_amplitude * kp * np.sin(kp * np.asarray(x, dtype=float))

    def stress(self, x) -> np.ndarray:
        return self.C * self.dU(x) - self.alpha * self.theta(x) - self.beta * self.upsilon(x)

    def heat_flux(self, x) -> np.ndarray:
        return -self.K * self.dtheta(x)

    def mass_flux(self, x) -> np.ndarray:
        return -self.D * self.dupsilon(x)

    def U_star(self, x) -> Optional[np.ndarray]:
        if self.a_B == 0.0:
            return None
        return self.U(x) / self.a_B

    def theta_star(self, x) -> Optional[np.ndarray]:
        if self.theta_amplitude == 0.0:
            return None
        return self.theta(x) / self.theta_amplitude

    def upsilon_star(self, x) -> Optional[np.ndarray]:
        if self.upsilon_amplitude == 0.0:
            return None
        return self.upsilon(x) / self.upsilon_amplitude


class AmplitudeFunctions(BaseModel):
    model_config = ConfigDict(frozen=True)

    direction: Literal[1, 2]
    xi_alpha: Optional[float] = None
    xi_beta: Optional[float] = None
    xi_alpha_tilde: Optional[float] = None
    xi_beta_tilde: Optional[float] = None
    undefined: Tuple[str, ...] = ()


class MicroGrid(BaseModel):
    """Interface-aligned grid: each layer of each cell is cut into nodes_per_layer equal segments."""
    model_config = ConfigDict(frozen=True)

    cells: int = Field(ge=1)
    nodes_per_layer: int = Field(default=64, ge=4)


class MicroSolution(BaseModel):
    """
    Micro fields on a periodic grid of [0, L).

    Node arrays (x, u, theta, eta) have one entry per grid node; face arrays
    (x_faces, sigma, q, j) have one entry per segment, segment e joining node
    e and node e+1 (the last one wraps to x = L).
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    L: float
    epsilon: float
    x: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    eta: np.ndarray
    x_faces: np.ndarray
    sigma: np.ndarray
    q: np.ndarray
    j: np.ndarray
    dual_widths: np.ndarray
    body_force: Optional[np.ndarray] = None
    heat_source: Optional[np.ndarray] = None
    mass_source: Optional[np.ndarray] = None


class UpscaledFields(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: np.ndarray
    U: np.ndarray
    theta: np.ndarray
    upsilon: np.ndarray


class FieldError(BaseModel):
    """Relative errors of one field. None when the reference field is identically zero."""
    field: str
    relative_l2: Optional[float] = None
    linf: Optional[float] = None


class ComparisonReport(BaseModel):
    direction: int = 2
    L: float
    epsilon: float
    cells: int
    nodes_per_layer: int
    nodes: int
    averaging: str = "centered moving average of width epsilon, exact for piecewise-linear fields, periodic wrap"
    errors: List[FieldError]
    reconstruction: List[FieldError] = []
    flux_check: Optional[float] = None
    runtimes: Dict[str, float] = {}

    def error(self, field: str) -> Optional[FieldError]:
        for item in self.errors:
            if item.field == field:
                return item
        return None
