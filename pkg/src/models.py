"""Data models for fields, configurations and reports"""
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Dict, Iterator, List, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .config import CODE_VERSION, DEFAULT_MU, DEFAULT_PADDING, DEFAULT_PICARD_STEPS


class SymbolKind(str, Enum):
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"


class Normalization(str, Enum):
    UNIT_AMPLITUDES = "unit_amplitudes"
    MASS_NORMALIZED = "mass_normalized"


class Ensemble(str, Enum):
    UNIMODULAR = "unimodular"
    GAUSSIAN = "gaussian"
    DIAGONAL = "diagonal"


class CountMethod(str, Enum):
    BRUTE = "brute"
    DIVISOR = "divisor"
    CLOSED_FORM = "closed_form"


class Dealias(str, Enum):
    NONE = "none"
    PADDED = "padded"


class NumericalFailure(RuntimeError):
    """Raised when a computation produces NaN/Inf; carries the time at which it happened"""

    def __init__(self, message: str, t: Optional[float] = None):
        super().__init__(message if t is None else f"{message} (t={t:.6g})")
        self.t = t


@dataclass(frozen=True)
class FreqPoint:
    """A point n = (n1, n2) of the frequency lattice Z^2"""
    n1: int
    n2: int

    @classmethod
    def of(cls, value: Union["FreqPoint", Tuple[int, int]]) -> "FreqPoint":
        if isinstance(value, FreqPoint):
            return value
        n1, n2 = value
        return cls(int(n1), int(n2))

    def as_tuple(self) -> Tuple[int, int]:
        return (self.n1, self.n2)

    def __iter__(self) -> Iterator[int]:
        yield self.n1
        yield self.n2


PointLike = Union[FreqPoint, Tuple[int, int]]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class FourierCoeffs:
    """
    Finitely supported Fourier coefficients of a field on T^2.

    Stored sparsely: `freqs` is an (S, 2) int64 array sorted lexicographically
    without repeats, `amps` the matching complex amplitudes. Every stored
    frequency lies in the half-open box (-N, N]^2.
    """
    N: int
    freqs: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        if int(self.N) < 1:
            raise ValueError(f"Box half-width must be positive, got N={self.N}")
        freqs = np.array(self.freqs, dtype=np.int64).reshape(-1, 2)
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if freqs.shape[0] != amps.shape[0]:
            raise ValueError(f"{freqs.shape[0]} frequencies but {amps.shape[0]} amplitudes")
        if freqs.size and (freqs.min() <= -self.N or freqs.max() > self.N):
            bad = freqs[np.any((freqs <= -self.N) | (freqs > self.N), axis=1)][0]
            raise ValueError(f"Frequency ({bad[0]}, {bad[1]}) outside box (-{self.N}, {self.N}]^2")
        if not np.all(np.isfinite(amps)):
            raise ValueError("Amplitudes must be finite")

        order = np.lexsort((freqs[:, 1], freqs[:, 0]))
        freqs, amps = freqs[order], amps[order]
        if freqs.shape[0] > 1 and np.any(np.all(freqs[1:] == freqs[:-1], axis=1)):
            raise ValueError("Repeated frequency in coefficient support")

        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "freqs", _readonly(freqs))
        object.__setattr__(self, "amps", _readonly(amps))

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, N: int) -> "FourierCoeffs":
        return cls(N, np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.complex128))

    @classmethod
    def from_entries(cls, N: int, entries: Mapping[PointLike, complex]) -> "FourierCoeffs":
        if not entries:
            return cls.zeros(N)
        freqs = np.array([tuple(FreqPoint.of(n)) for n in entries], dtype=np.int64)
        amps = np.array(list(entries.values()), dtype=np.complex128)
        return cls(N, freqs, amps)

    @classmethod
    def from_dense(cls, N: int, values: np.ndarray) -> "FourierCoeffs":
        """Build from a (2N, 2N) array indexed by n + N - 1; exact zeros are dropped"""
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (2 * N, 2 * N):
            raise ValueError(f"Dense array shape {values.shape} does not match box N={N}")
        i1, i2 = np.nonzero(values)
        freqs = np.stack([i1 - N + 1, i2 - N + 1], axis=1)
        return cls(N, freqs, values[i1, i2])

    # -- views ------------------------------------------------------------

    def __len__(self) -> int:
        return int(self.amps.shape[0])

    def to_dense(self, N: Optional[int] = None) -> np.ndarray:
        N = self.N if N is None else N
        if len(self) and (self.freqs.min() <= -N or self.freqs.max() > N):
            raise ValueError(f"Support does not fit in box (-{N}, {N}]^2")
        dense = np.zeros((2 * N, 2 * N), dtype=np.complex128)
        dense[self.freqs[:, 0] + N - 1, self.freqs[:, 1] + N - 1] = self.amps
        return dense

    def as_dict(self) -> Dict[Tuple[int, int], complex]:
        return {(int(a), int(b)): complex(c) for (a, b), c in zip(self.freqs, self.amps)}

    def amplitude(self, n: PointLike) -> complex:
        n1, n2 = FreqPoint.of(n)
        hit = np.nonzero((self.freqs[:, 0] == n1) & (self.freqs[:, 1] == n2))[0]
        return complex(self.amps[hit[0]]) if hit.size else 0j

    def with_box(self, N: int) -> "FourierCoeffs":
        """Same field in another box; raises if the support does not fit"""
        return FourierCoeffs(N, self.freqs, self.amps)

    def with_amps(self, amps: np.ndarray) -> "FourierCoeffs":
        return FourierCoeffs(self.N, self.freqs, amps)

    def scaled(self, factor: complex) -> "FourierCoeffs":
        return self.with_amps(self.amps * factor)

    def bandwidth(self) -> int:
        """Smallest N' with the support inside (-N', N']^2"""
        if not len(self):
            return 1
        return int(max(1, self.freqs.max(), 1 - self.freqs.min()))


@dataclass(frozen=True, eq=False)
class GridField:
    """Samples of a field on the uniform M x M grid, values[j, k] = u(j/M, k/M)"""
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.complex128)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
            raise ValueError(f"Grid must be a non-empty square array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Grid samples must be finite")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def M(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True, eq=False)
class SpaceTimeCoeffs:
    """Coefficients u^(m, n) over integer time frequency m and spatial frequency n"""
    times: np.ndarray
    freqs: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=np.int64).reshape(-1)
        freqs = np.array(self.freqs, dtype=np.int64).reshape(-1, 2)
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if not (times.shape[0] == freqs.shape[0] == amps.shape[0]):
            raise ValueError("times, freqs and amps must have the same length")
        if not np.all(np.isfinite(amps)):
            raise ValueError("Amplitudes must be finite")
        object.__setattr__(self, "times", _readonly(times))
        object.__setattr__(self, "freqs", _readonly(freqs))
        object.__setattr__(self, "amps", _readonly(amps))

    @classmethod
    def from_entries(cls, entries: Mapping[Tuple[int, PointLike], complex]) -> "SpaceTimeCoeffs":
        keys = list(entries)
        times = np.array([m for m, _ in keys], dtype=np.int64)
        freqs = np.array([tuple(FreqPoint.of(n)) for _, n in keys], dtype=np.int64).reshape(-1, 2)
        return cls(times, freqs, np.array(list(entries.values()), dtype=np.complex128))


class DiagonalSpec(BaseModel):
    """The diagonal family phi_N; mass_normalized carries the factor N^(-1/2)"""
    N: int = Field(..., ge=0)
    normalization: Normalization = Normalization.UNIT_AMPLITUDES


class PicardConfig(BaseModel):
    """Parameters of the first Picard iterate A[phi](t)"""
    mu: float = Field(DEFAULT_MU, description="Nonlinearity coefficient")
    t: float = Field(1.0, description="Evaluation time")
    quadrature_steps: int = Field(DEFAULT_PICARD_STEPS, ge=1, description="Simpson panels")
    s: float = Field(0.0, description="Sobolev index of reported norms")
    grid_size: Optional[int] = Field(None, ge=1, description="Grid per dimension, default 6N+1")

    @field_validator("t", "mu", "s")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not np.isfinite(value):
            raise ValueError("must be finite")
        return value


class SolverConfig(BaseModel):
    """Split-step solver settings"""
    M: int = Field(..., ge=2, description="Grid points per dimension")
    dt: float = Field(..., gt=0)
    T_end: float = Field(..., ge=0)
    mu: float = DEFAULT_MU
    symbol: SymbolKind = SymbolKind.HYPERBOLIC
    record_every: int = Field(1, ge=1)
    s: float = Field(1.0, description="Sobolev index tracked in the trace")
    dealias: Dealias = Dealias.PADDED
    padding: float = Field(DEFAULT_PADDING, ge=1.0)

    @field_validator("M")
    @classmethod
    def _even_grid(cls, value: int) -> int:
        # an even grid carries exactly the box (-M/2, M/2]^2
        if value % 2:
            raise ValueError(f"grid size must be even, got M={value}")
        return value

    @property
    def box(self) -> int:
        return self.M // 2

    @property
    def n_steps(self) -> int:
        return int(round(self.T_end / self.dt))


class TraceRecord(BaseModel):
    t: float
    mass: float
    energy: float
    l2: float
    hs: float
    l4: float
    truncated_mass: float = 0.0


class EvolutionTrace(BaseModel):
    """Diagnostics recorded along a solver run"""
    records: List[TraceRecord] = Field(default_factory=list)
    s: float = 1.0

    @model_validator(mode="after")
    def _check_records(self) -> "EvolutionTrace":
        times = [r.t for r in self.records]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("Trace times must be strictly increasing")
        for record in self.records:
            if not all(np.isfinite(v) for v in record.model_dump().values()):
                raise ValueError(f"Non-finite diagnostics at t={record.t}")
        return self

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


class LipschitzRow(BaseModel):
    delta: float
    epsilon: float
    initial_distance: float
    final_distance: float
    ratio: float


class LatticeReport(BaseModel):
    """Per-level counts of A_l in the box [-N, N]^2"""
    N: int
    counts: Dict[int, int]
    argmax_level: Optional[int] = None
    max_count: int = 0
    method: CountMethod


class StrichartzRow(BaseModel):
    N: int
    ensemble: Ensemble
    trials: int
    max_ratio: float
    mean_ratio: float
    extremizer_ratio: float


class StrichartzReport(BaseModel):
    rows: List[StrichartzRow]
    symbol: SymbolKind
    seed: int
    slope: float
    residual: float
    extremizer_slope: float


class BilinearRow(BaseModel):
    N1: int
    N2: int
    trial: int
    bilinear: float
    ratio: float


class BilinearReport(BaseModel):
    rows: List[BilinearRow]
    seed: int
    max_ratio: float
    max_ratio_by_N2: Dict[int, float]


class ResonanceDecomposition(BaseModel):
    """Resonant / off-resonant split bounding ||e^{it box} f||_4^2"""
    exact: float = Field(..., description="||e^{it box} f||_{L^4}^2")
    resonant: float
    off_resonant: float
    max_off_resonant_count: int
    resonant_multiplicity: int
    resonant_cs_bound: float

    @property
    def bound(self) -> float:
        return self.resonant + self.off_resonant


class GalileanRow(BaseModel):
    pair: int
    m1: int
    m2: int
    l4_original: float
    l4_recentred: float
    relative_difference: float


class GrowthRow(BaseModel):
    N: int
    s: float
    t: float
    hs_norm: float
    ratio_to_N1plus_s: float
    ratio_to_N3s: float
    projected_hs_norm: float


class GrowthReport(BaseModel):
    rows: List[GrowthRow]
    slopes: Dict[str, float]
    residuals: Dict[str, float]
    threshold_half: str = Field("N^(1+s) <= N^(3s) forces s >= 1/2")
    threshold_quarter: str = Field("ill-posedness claimed for s < 1/4")


class RunManifest(BaseModel):
    """Everything needed to reproduce one command invocation"""
    command: str
    parameters: Dict[str, Any]
    seed: Optional[int] = None
    code_version: str = CODE_VERSION
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat())
    outputs: List[str] = Field(default_factory=list)
    status: str = "ok"
