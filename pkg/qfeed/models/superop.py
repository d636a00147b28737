from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..exceptions import BasisError, DimensionError
from ..linalg import as_cmat, unvec, vec
from .states import BasisLabel, DensityMatrix

__all__ = ("Superop",)


class Superop(BaseModel):
    """A linear map on density matrices, stored as a d²×d² matrix acting on vec(ρ)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    basis: BasisLabel

    @field_validator("matrix", mode="before")
    @classmethod
    def _to_cmat(cls, value: Any) -> np.ndarray:
        arr = as_cmat(value)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_dim(self) -> Superop:
        if self.matrix.shape[0] != self.basis.dim**2:
            raise DimensionError(self.basis.dim**2, self.matrix.shape[0])
        return self

    @classmethod
    def zero(cls, basis: BasisLabel) -> Superop:
        return cls(matrix=np.zeros((basis.dim**2, basis.dim**2)), basis=basis)

    @property
    def dim(self) -> int:
        """The Hilbert-space dimension d (the matrix is d²×d²)."""
        return self.basis.dim

    def __add__(self, other: Superop) -> Superop:
        if other.basis != self.basis:
            raise BasisError(self.basis, other.basis)
        return Superop(matrix=self.matrix + other.matrix, basis=self.basis)

    def __mul__(self, scalar: complex) -> Superop:
        return Superop(matrix=self.matrix * scalar, basis=self.basis)

    __rmul__ = __mul__

    def apply(self, rho: np.ndarray | DensityMatrix) -> np.ndarray:
        """Applies the map to a matrix and returns the resulting matrix."""
        data = rho.data if isinstance(rho, DensityMatrix) else rho
        return unvec(self.matrix @ vec(data), self.dim)

    def trace_leak(self) -> float:
        """Returns max|(vec I)†·L|; zero for a trace-preserving generator."""
        identity = vec(np.eye(self.dim))
        return float(np.max(np.abs(identity.conj() @ self.matrix)))

    def is_trace_preserving(self, tol: float = 1e-12) -> bool:
        return self.trace_leak() <= tol * max(1.0, float(np.max(np.abs(self.matrix))))
