from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models import (
    AmplitudeFunctions,
    DimensionlessRatios,
    EffectiveProperties,
    NormalizedProperties,
    PlaneAssumption,
)


SWEEP_PARAMETERS = ("rho_C", "rho_alpha", "rho_beta", "rho_K", "rho_D", "zeta")
SweepParameter = Literal["rho_C", "rho_alpha", "rho_beta", "rho_K", "rho_D", "zeta"]


# =============================================================================
# LAMINATE DESCRIPTOR
# =============================================================================

class IsotropicPhaseSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    E: float
    nu: float
    alpha: float = 0.0
    beta: float = 0.0
    K: float
    D: float


class OrthotropicPhaseSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

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


class PhaseSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    isotropic: Optional[IsotropicPhaseSchema] = None
    orthotropic: Optional[OrthotropicPhaseSchema] = None

    @model_validator(mode="after")
    def exactly_one_kind(self) -> "PhaseSchema":
        if (self.isotropic is None) == (self.orthotropic is None):
            raise ValueError("a phase needs exactly one of 'isotropic' or 'orthotropic'")
        return self


class LayerSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fraction: float
    phase: PhaseSchema


class LaminateDescriptor(BaseModel):
    model_config = ConfigDict(extra="forbid")

    assumption: PlaneAssumption = PlaneAssumption.PLANE_STRESS
    epsilon: float = 1.0
    layers: List[LayerSchema] = Field(min_length=1)


# =============================================================================
# STUDY BLOCKS
# =============================================================================

class GridSpec(BaseModel):
    """Either an explicit list of values or a start/stop/num range."""
    model_config = ConfigDict(extra="forbid")

    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    num: Optional[int] = Field(default=None, ge=1)
    spacing: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def check_grid(self) -> "GridSpec":
        if self.values is not None:
            if self.start is not None or self.stop is not None or self.num is not None:
                raise ValueError("give either 'values' or 'start'/'stop'/'num', not both")
            if not self.values:
                raise ValueError("'values' must not be empty")
        elif self.start is None or self.stop is None or self.num is None:
            raise ValueError("a range grid needs 'start', 'stop' and 'num'")
        points = self.points()
        if not np.all(np.isfinite(points)) or np.any(points <= 0):
            raise ValueError("sweep grid values must be strictly positive and finite")
        return self

    def points(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.spacing == "log":
            if self.start <= 0 or self.stop <= 0:
                return np.array([float("nan")])
            return np.geomspace(self.start, self.stop, self.num)
        return np.linspace(self.start, self.stop, self.num)


class SweepFixed(BaseModel):
    """Values held fixed during a sweep. Phase b sits at unit properties, phase a carries the ratios."""
    model_config = ConfigDict(extra="forbid")

    rho_C: float = Field(default=1.0, gt=0)
    rho_alpha: float = Field(default=1.0, ge=0)
    rho_beta: float = Field(default=1.0, ge=0)
    rho_K: float = Field(default=1.0, gt=0)
    rho_D: float = Field(default=1.0, gt=0)
    zeta: float = Field(default=1.0, gt=0)
    nu: float = Field(default=0.3, gt=-1.0, lt=0.5)
    assumption: PlaneAssumption = PlaneAssumption.PLANE_STRESS


class SweepFamily(BaseModel):
    model_config = ConfigDict(extra="forbid")

    parameter: SweepParameter
    values: List[float] = Field(min_length=1)

    @field_validator("values")
    @classmethod
    def positive_values(cls, values: List[float]) -> List[float]:
        if not all(np.isfinite(v) and v > 0 for v in values):
            raise ValueError("family values must be strictly positive and finite")
        return values


class SweepBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    parameter: SweepParameter
    grid: GridSpec
    fixed: SweepFixed = SweepFixed()
    family: Optional[SweepFamily] = None

    @model_validator(mode="after")
    def distinct_parameters(self) -> "SweepBlock":
        if self.family is not None and self.family.parameter == self.parameter:
            raise ValueError("family parameter must differ from the swept parameter")
        return self


class LoadSchema(BaseModel):
    """Harmonic load without the period; L comes from L_over_epsilon and the laminate."""
    model_config = ConfigDict(extra="forbid")

    direction: Literal[1, 2] = 2
    B: float = 1.0
    R: float = 0.0
    S: float = 0.0
    m: int = 1
    n: int = 1
    p: int = 1
    xi_alpha: Optional[float] = None
    xi_beta: Optional[float] = None


class CompareBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    load: LoadSchema = LoadSchema()
    L_over_epsilon: int = Field(default=10, ge=2)
    nodes_per_layer: int = Field(default=64, ge=4)
    samples: int = Field(default=512, ge=2)


class OutputBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: Optional[str] = None


class StudyConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    laminate: LaminateDescriptor
    sweep: Optional[SweepBlock] = None
    compare: Optional[CompareBlock] = None
    output: OutputBlock = OutputBlock()


# =============================================================================
# REPORTS
# =============================================================================

class StudyStep(BaseModel):
    step: int
    title: str
    description: str
    details: List[str] = []


class EffectiveReport(BaseModel):
    layers: int
    epsilon: float
    methods: Dict[str, EffectiveProperties]
    max_relative_discrepancy: Optional[float] = None
    ratios: Optional[DimensionlessRatios] = None
    normalized: Optional[NormalizedProperties] = None
    amplitudes: List[AmplitudeFunctions] = []
    steps: List[StudyStep] = []


class SweepReport(BaseModel):
    parameter: str
    family: Optional[str] = None
    columns: List[str]
    rows: List[Dict[str, Any]]
    steps: List[StudyStep] = []


class ValidationCheck(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class ValidationSummary(BaseModel):
    passed: bool
    checks: List[ValidationCheck]
    steps: List[StudyStep] = []

    @property
    def failed(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]
