"""Pydantic models voor matrices, spectra, certificaten en trajecten.

Numpy arrays leven direct in de modellen; de geannoteerde types hieronder
regelen de JSON-vorm. Complexe matrices worden {"n", "re", "im"}, reële arrays
worden (geneste) lijsten en oneindige waarden worden de strings "inf"/"-inf".
"""

import math
from enum import Enum
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    FiniteFloat,
    PlainSerializer,
    model_validator,
)

from src.config import Tolerances


# ---------------------------------------------------------------------------
# Matrix-JSON en geannoteerde array types
# ---------------------------------------------------------------------------

class MatrixPayload(BaseModel):
    """Matrix-JSON: {"n": int, "re": [[...]], "im": [[...]]}, rij-georiënteerd."""
    n: int = Field(ge=1)
    re: list[list[FiniteFloat]]
    im: list[list[FiniteFloat]]

    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def _check_shape(self):
        for part in (self.re, self.im):
            if len(part) != self.n or any(len(row) != self.n for row in part):
                raise ValueError(f"Matrix-JSON heeft niet de vorm {self.n}x{self.n}")
        return self

    @classmethod
    def from_array(cls, value: np.ndarray) -> "MatrixPayload":
        return cls(n=int(value.shape[0]), re=value.real.tolist(), im=value.imag.tolist())

    def to_array(self) -> np.ndarray:
        return np.array(self.re, dtype=float) + 1j * np.array(self.im, dtype=float)


def _matrix_in(value) -> np.ndarray:
    if isinstance(value, np.ndarray):
        array = np.asarray(value, dtype=complex)
    elif isinstance(value, MatrixPayload):
        array = value.to_array()
    elif isinstance(value, dict):
        array = MatrixPayload.model_validate(value).to_array()
    else:
        raise ValueError("Verwacht een numpy array of matrix-JSON object")
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise ValueError(f"Verwacht een vierkante matrix, kreeg vorm {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError("Matrix bevat NaN of Inf")
    return array


def _matrix_out(value: np.ndarray) -> dict:
    return {"n": int(value.shape[0]), "re": value.real.tolist(), "im": value.imag.tolist()}


def _real_in(value) -> np.ndarray:
    array = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(array)):
        raise ValueError("Reële array bevat NaN of Inf")
    return array


def _real_out(value: np.ndarray) -> list:
    return np.asarray(value, dtype=float).tolist()


def _extended_in(value) -> float:
    if isinstance(value, str):
        match value:
            case "inf":
                return math.inf
            case "-inf":
                return -math.inf
        raise ValueError(f"Onbekende waarde: {value!r}")
    result = float(value)
    if math.isnan(result):
        raise ValueError("NaN is niet toegestaan")
    return result


def _extended_out(value: float) -> float | str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


ComplexMatrix = Annotated[
    np.ndarray,
    BeforeValidator(_matrix_in),
    PlainSerializer(_matrix_out, return_type=dict),
]

RealArray = Annotated[
    np.ndarray,
    BeforeValidator(_real_in),
    PlainSerializer(_real_out, return_type=list),
]

ExtendedFloat = Annotated[
    float,
    BeforeValidator(_extended_in),
    PlainSerializer(_extended_out, return_type=float | str),
]


class ArrayModel(BaseModel):
    """Basis voor modellen met numpy velden."""
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------

class EigenBasisEntry(ArrayModel):
    """Basiselement T_{l,m}, gedragen door de m-de diagonaal."""
    l: int
    m: int
    T: ComplexMatrix


class LaplacianLevel(BaseModel):
    l: int
    eigenvalue: float
    multiplicity: int


class BasisDump(ArrayModel):
    """Uitvoer van `zeitlin basis`: X1, X2, X3, ħ en het spectrum van Δn."""
    n: int
    hbar: float
    X: list[ComplexMatrix]
    spectrum: list[LaplacianLevel]


# ---------------------------------------------------------------------------
# Spectra en ratio-extrema
# ---------------------------------------------------------------------------

class CommonSpectrum(ArrayModel):
    n: int
    Lambda: ComplexMatrix
    p: RealArray
    w: RealArray


class RatioExtrema(ArrayModel):
    L: ExtendedFloat
    c: ExtendedFloat
    C: ExtendedFloat
    # p_j = p_k met w_j != w_k  ->  L = -inf
    degenerate_p: bool = False
    # w_j = w_k met p_j != p_k  ->  c = -inf, C = +inf
    degenerate_w: bool = False


# ---------------------------------------------------------------------------
# Stationaire toestanden
# ---------------------------------------------------------------------------

class ProvenanceKind(str, Enum):
    ZONAL = "ZONAL"
    EIGENSTATE = "EIGENSTATE"
    NEWTON = "NEWTON"
    LOADED = "LOADED"


class Provenance(BaseModel):
    kind: ProvenanceKind
    l: int | None = None
    # Polynoomcoëfficiënten van f (oplopende machten) en de gemeenschappelijke verschuiving
    f: list[float] | None = None
    shift: float | None = None
    iterations: int | None = None

    model_config = {"extra": "forbid"}


class SteadyState(ArrayModel):
    W0: ComplexMatrix
    P0: ComplexMatrix
    spectrum: CommonSpectrum
    commutator_residual: float
    laplacian_residual: float
    provenance: Provenance

    @property
    def n(self) -> int:
        return int(self.W0.shape[0])


class RigidityConclusion(str, Enum):
    DIAGONAL_CONFIRMED = "DIAGONAL_CONFIRMED"
    ZERO_CONFIRMED = "ZERO_CONFIRMED"
    NOT_APPLICABLE = "NOT_APPLICABLE"
    VIOLATION = "VIOLATION"


class RigidityReport(ArrayModel):
    L: ExtendedFloat
    alignment_rotation: RealArray
    offdiag_residual: float
    x3_commutator_residual: float
    energy_identity_residual: float
    norm_W0: float
    conclusion: RigidityConclusion


# ---------------------------------------------------------------------------
# Stabiliteitscertificaat
# ---------------------------------------------------------------------------

class Verdict(str, Enum):
    STABLE_BY_RATIO = "STABLE_BY_RATIO"
    INDETERMINATE = "INDETERMINATE"
    TRIVIAL = "TRIVIAL"


class CrossCheck(str, Enum):
    CONSISTENT = "CONSISTENT"
    INCONSISTENT = "INCONSISTENT"
    NOT_CHECKED = "NOT_CHECKED"


class SandwichReport(BaseModel):
    applicable: bool
    lower_slack: float | None = None
    upper_slack: float | None = None
    # Q <= (1/2 + C)||dW||^2, geldig zonder voorwaarde op P1 dW
    coarse_upper_slack: float | None = None
    # c||dW||^2 <= Q, altijd geldig
    refined_lower_slack: float | None = None
    # Q <= (1/6 + C)||dW||^2, alleen als P1 dW = 0
    refined_upper_slack: float | None = None
    refined_applicable: bool = False
    leakage: float = 0.0


class StabilityCertificate(ArrayModel):
    ratios: RatioExtrema
    verdict: Verdict
    hessian_full: RealArray
    hessian_constrained: RealArray
    p1_leakage: float
    cross_check: CrossCheck
    functional_bound: float | None = None
    tolerances: Tolerances
    input_hashes: dict[str, str]


# ---------------------------------------------------------------------------
# Trajecten en experimenten
# ---------------------------------------------------------------------------

class PerturbationMode(str, Enum):
    ORBIT = "ORBIT"
    GENERIC = "GENERIC"


class MonitorRow(BaseModel):
    """Eén CSV-regel: t,H,C2..Ck,L1,L2,L3,spec_drift,dist."""
    t: float
    H: float
    casimirs: list[float]
    momentum: list[float]
    spec_drift: float
    dist: float | None = None


class TrajectoryRecord(ArrayModel):
    h: float
    times: RealArray
    hamiltonian: RealArray
    # Rijen per tijdstip, kolommen C2..Ck
    casimirs: RealArray
    momentum: RealArray
    spec_drift: RealArray
    # Gesorteerd spectrum van -iW per tijdstip, oplopend
    spectra: RealArray | None = None
    dist: RealArray | None = None
    snapshot_stride: int | None = None
    snapshots: list[ComplexMatrix] = []
    inner_iterations: list[int] = []
    inner_residuals: RealArray = np.zeros(0)

    def rows(self) -> list[MonitorRow]:
        return [
            MonitorRow(
                t=float(self.times[k]),
                H=float(self.hamiltonian[k]),
                casimirs=self.casimirs[k].tolist(),
                momentum=self.momentum[k].tolist(),
                spec_drift=float(self.spec_drift[k]),
                dist=None if self.dist is None else float(self.dist[k]),
            )
            for k in range(len(self.times))
        ]


class LyapunovReport(ArrayModel):
    epsilon: float
    mode: PerturbationMode
    seed: int
    max_deviation: float
    times: RealArray
    deviation_series: RealArray
    certificate: StabilityCertificate | None = None


# ---------------------------------------------------------------------------
# Experimentconfiguratie (JSON via --config)
# ---------------------------------------------------------------------------

class ExperimentConfig(BaseModel):
    """Configuratie voor alle subcommando's. Onbekende sleutels worden geweigerd."""
    n: int = Field(16, ge=2)

    # steady
    mode: Literal["zonal", "eigenstate", "newton"] | None = None
    l: int | None = None
    coeffs: list[float] | None = None
    d: list[float] | None = None
    f: list[float] | None = None
    d_init: list[float] | None = None
    max_iter: int | None = None
    tol: float | None = None

    # evolve
    state: Path | None = None
    h: float = Field(0.1, gt=0)
    T: float = Field(10.0, gt=0)
    epsilon: list[float] | None = None
    perturbation: PerturbationMode = PerturbationMode.ORBIT
    seeds: list[int] = [0]
    snapshot_stride: int | None = None
    casimir_max: int = Field(5, ge=2)
    hessian: bool = False

    # render
    n_theta: int = 64
    n_phi: int = 128
    l_max: int | None = None

    tolerances: Tolerances | None = None

    model_config = {"extra": "forbid"}
