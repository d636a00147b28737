from __future__ import annotations

from enum import StrEnum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..exceptions import DimensionError, NotHermitianError, ParameterError
from ..linalg import as_cmat, hermitian_deviation

__all__ = (
    "DICKE3",
    "PRODUCT4",
    "QUBIT",
    "BasisLabel",
    "BasisTag",
    "DensityMatrix",
    "basis_from_name",
    "cavity_joint",
)

TRACE_TOL = 1e-8
STATE_HERMITIAN_TOL = 1e-10

QUBIT_DIMS = {"qubit": 2, "dicke3": 3, "product4": 4}


class BasisTag(StrEnum):
    QUBIT = "qubit"
    DICKE3 = "dicke3"
    PRODUCT4 = "product4"
    CAVITY = "cavity"


class BasisLabel(BaseModel):
    """Names the ordering of a state space.

    ``qubit`` is a single atom (|g⟩, |e⟩); ``dicke3`` is (|ee⟩, (|ge⟩+|eg⟩)/√2, |gg⟩);
    ``product4`` is (|gg⟩, |ge⟩, |eg⟩, |ee⟩);
    ``cavity`` is the qubit space (``qubit``) times photon numbers 0..n_fock-1,
    qubit-major.
    """

    model_config = ConfigDict(frozen=True)

    tag: BasisTag
    n_fock: int | None = None
    qubit: BasisTag | None = None

    @model_validator(mode="after")
    def _check_cavity_fields(self) -> BasisLabel:
        if self.tag is BasisTag.CAVITY:
            if self.n_fock is None or self.n_fock < 1:
                raise ValueError("cavity basis needs n_fock >= 1")
            if self.qubit not in {BasisTag.DICKE3, BasisTag.PRODUCT4}:
                raise ValueError("cavity basis needs a dicke3 or product4 qubit part")
        elif self.n_fock is not None or self.qubit is not None:
            raise ValueError("n_fock and qubit only apply to the cavity basis")
        return self

    @property
    def qubit_dim(self) -> int:
        tag = self.qubit if self.tag is BasisTag.CAVITY else self.tag
        return QUBIT_DIMS[tag]  # pyright: ignore[reportArgumentType]

    @property
    def qubit_label(self) -> BasisLabel:
        if self.tag is BasisTag.CAVITY:
            return BasisLabel(tag=self.qubit)  # pyright: ignore[reportArgumentType]
        return self

    @property
    def dim(self) -> int:
        if self.tag is BasisTag.CAVITY:
            return self.qubit_dim * self.n_fock  # pyright: ignore[reportOperatorIssue]
        return self.qubit_dim

    def __str__(self) -> str:
        if self.tag is BasisTag.CAVITY:
            return f"cavity({self.qubit}, n_fock={self.n_fock})"
        return str(self.tag)


QUBIT = BasisLabel(tag=BasisTag.QUBIT)
DICKE3 = BasisLabel(tag=BasisTag.DICKE3)
PRODUCT4 = BasisLabel(tag=BasisTag.PRODUCT4)


def cavity_joint(n_fock: int, qubit: BasisLabel = DICKE3) -> BasisLabel:
    """Returns the joint qubit-cavity basis label."""
    if n_fock < 1:
        raise ParameterError("n_fock", n_fock, "must be positive")
    return BasisLabel(tag=BasisTag.CAVITY, n_fock=n_fock, qubit=qubit.tag)


class DensityMatrix(BaseModel):
    """A unit-trace Hermitian matrix tagged with its basis.

    Positivity is not enforced on construction: conditioned states from the
    Euler scheme may dip slightly negative, and that is reported through
    :attr:`min_eigenvalue` rather than hidden.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    data: np.ndarray
    basis: BasisLabel

    @field_validator("data", mode="before")
    @classmethod
    def _to_cmat(cls, value: Any) -> np.ndarray:
        arr = as_cmat(value)
        deviation = hermitian_deviation(arr)
        if deviation > STATE_HERMITIAN_TOL:
            raise NotHermitianError(deviation)
        trace = np.trace(arr)
        if abs(trace - 1) > TRACE_TOL:
            raise ParameterError("trace", complex(trace), "density matrices must have unit trace")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_dim(self) -> DensityMatrix:
        if self.data.shape[0] != self.basis.dim:
            raise DimensionError(self.basis.dim, self.data.shape[0])
        return self

    @classmethod
    def from_ket(cls, ket: Any, basis: BasisLabel) -> DensityMatrix:
        """Builds the projector onto a normalized copy of ``ket``."""
        psi = np.asarray(ket, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return cls(data=np.outer(psi, psi.conj()), basis=basis)

    @classmethod
    def maximally_mixed(cls, basis: BasisLabel) -> DensityMatrix:
        return cls(data=np.eye(basis.dim) / basis.dim, basis=basis)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def purity(self) -> float:
        """Tr ρ²."""
        return float(np.real(np.vdot(self.data, self.data)))

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.data)[0])

    def expectation(self, op: np.ndarray) -> complex:
        """Returns Tr(op·ρ)."""
        return complex(np.trace(op @ self.data))


def basis_from_name(name: str) -> BasisLabel:
    """Looks up ``dicke3`` or ``product4`` by name.

    Raises:
        ParameterError: For any other name.
    """
    bases = {"dicke3": DICKE3, "product4": PRODUCT4}
    if name not in bases:
        raise ParameterError("basis", name, "must be dicke3 or product4")
    return bases[name]
