from __future__ import annotations

import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .states import DensityMatrix

__all__ = (
    "AdiabaticRow",
    "BlochReportRow",
    "BlochState",
    "EnsembleResult",
    "Evolution",
    "QGrid",
    "SweepRow",
    "SweepSummary",
    "TrajectoryRecord",
)

BLOCH_FIELDS = ("x12", "x13", "x23", "y12", "y13", "y23", "z12", "z13")


class BlochState(BaseModel):
    """The eight real variables of the reduced equations of motion (z23 is not tracked)."""

    model_config = ConfigDict(frozen=True)

    x12: float = 0.0
    x13: float = 0.0
    x23: float = 0.0
    y12: float = 0.0
    y13: float = 0.0
    y23: float = 0.0
    z12: float = 0.0
    z13: float = 0.0

    @field_validator(*BLOCH_FIELDS)
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("Bloch components must be finite")
        return value

    @classmethod
    def from_array(cls, values: Any) -> BlochState:
        arr = np.asarray(values, dtype=np.float64)
        return cls(**dict(zip(BLOCH_FIELDS, arr.tolist(), strict=True)))

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in BLOCH_FIELDS], dtype=np.float64)


class BlochReportRow(BaseModel):
    alpha: float
    lambda_: float = Field(alias="lambda")
    denominator: float = math.nan
    analytic_residual: float = math.nan
    component_residuals: tuple[float, ...] = ()
    fixedpoint_distance: float = math.nan
    diverged: bool = False
    error: str | None = None
    # experimental comparison against the Liouvillian steady state
    liouvillian_distance: float | None = None
    jx: float | None = None
    jy: float | None = None
    jz: float | None = None

    model_config = ConfigDict(populate_by_name=True)


class AdiabaticRow(BaseModel):
    ratio: float
    g: float
    gamma_p: float
    trace_distance: float
    top_fock_population: float
    mean_photon_number: float
    concurrence_cavity: float
    concurrence_eliminated: float


class Evolution(BaseModel):
    """A deterministic time series of density matrices."""

    model_config = ConfigDict(frozen=True)

    times: list[float]
    states: list[DensityMatrix]

    @model_validator(mode="after")
    def _check_lengths(self) -> Evolution:
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        return self

    @property
    def final(self) -> DensityMatrix:
        return self.states[-1]


class TrajectoryRecord(BaseModel):
    """One conditioned run: states at every time, and per-step current, noise and diagnostics."""

    model_config = ConfigDict(frozen=True)

    seed: int
    times: list[float]
    states: list[DensityMatrix]
    photocurrent: list[float]
    dw: list[float]
    norm_corrections: list[float]
    min_eigenvalue_track: list[float]

    @model_validator(mode="after")
    def _check_lengths(self) -> TrajectoryRecord:
        n = len(self.states)
        if len(self.times) != n or len(self.min_eigenvalue_track) != n:
            raise ValueError("times, states and min_eigenvalue_track must have equal length")
        for name in ("photocurrent", "dw", "norm_corrections"):
            if len(getattr(self, name)) != n - 1:
                raise ValueError(f"{name} must have one entry per step")
        return self

    @property
    def final(self) -> DensityMatrix:
        return self.states[-1]


class EnsembleResult(BaseModel):
    """Ensemble-averaged conditioned states at the recorded times."""

    model_config = ConfigDict(frozen=True)

    n_trajectories: int
    seed: int
    dt: float
    times: list[float]
    mean_states: list[DensityMatrix]
    mean_photocurrent: float
    min_eigenvalue: float
    aborted_seeds: list[int] = Field(default_factory=list)

    @property
    def final(self) -> DensityMatrix:
        return self.mean_states[-1]

    @property
    def n_survivors(self) -> int:
        return self.n_trajectories - len(self.aborted_seeds)


class SweepRow(BaseModel):
    alpha: float
    lambda_: float = Field(alias="lambda")
    concurrence: float = math.nan
    r2: float = math.nan
    entropy: float = math.nan
    steady_residual: float = math.nan
    min_eig: float = math.nan
    error: str | None = None

    model_config = ConfigDict(populate_by_name=True)

    @property
    def ok(self) -> bool:
        return self.error is None


class SweepSummary(BaseModel):
    n_points: int
    n_failed: int
    best_alpha: float | None
    best_lambda: float | None
    best_concurrence: float | None
    best_r2: float | None
    mems_dominated: bool
    max_mems_excess: float | None


class QGrid(BaseModel):
    """Samples of the spin-1 Q function on a uniform (θ, φ) mesh."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    theta: np.ndarray
    phi: np.ndarray
    q: np.ndarray
    j: int = 1

    @model_validator(mode="after")
    def _check_shape(self) -> QGrid:
        if self.q.shape != (self.theta.size, self.phi.size):
            raise ValueError("q must have shape (n_theta, n_phi)")
        return self

    @property
    def normalization(self) -> float:
        """(2j+1)/(4π) · Σ Q sinθ Δθ Δφ; 1 for a unit-trace state up to quadrature error."""
        d_theta = self.theta[1] - self.theta[0]
        d_phi = self.phi[1] - self.phi[0]
        weights = np.sin(self.theta) * d_theta * d_phi
        return float((2 * self.j + 1) / (4 * np.pi) * np.sum(self.q * weights[:, None]))
