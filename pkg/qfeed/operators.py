"""Atomic and cavity operators.

Single-qubit matrices are written in the (|g⟩, |e⟩) ordering, so the two-qubit
product basis produced by ``kron`` is (|gg⟩, |ge⟩, |eg⟩, |ee⟩).

The collective quadratures follow the feedback convention ``Jx = J⁺ + J⁻`` and
``Jy = (J⁺ - J⁻)/i``; with ``Jz = [J⁺, J⁻]`` this gives ``[Jx, Jy] = 2i·Jz``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import BasisError, ParameterError
from .linalg import CMat, kron
from .models.states import DICKE3, PRODUCT4, BasisLabel, BasisTag, DensityMatrix

__all__ = (
    "CollectiveOps",
    "annihilation",
    "bell_state",
    "collective_ops",
    "dicke_isometry",
    "embed_dicke_to_product",
    "individual_lowering",
    "sigma_minus",
    "sigma_plus",
    "sigma_x",
    "sigma_y",
    "sigma_z",
    "singlet",
    "tensor_with_cavity",
)

SQRT2 = np.sqrt(2.0)


def sigma_minus() -> CMat:
    """|g⟩⟨e|."""
    return np.array([[0, 1], [0, 0]], dtype=np.complex128)


def sigma_plus() -> CMat:
    """|e⟩⟨g|."""
    return np.array([[0, 0], [1, 0]], dtype=np.complex128)


def sigma_x() -> CMat:
    return np.array([[0, 1], [1, 0]], dtype=np.complex128)


def sigma_y() -> CMat:
    return np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


def sigma_z() -> CMat:
    """The Pauli matrix diag(1, -1) in (g, e) ordering, so +1 on |g⟩.

    This equals -[σ⁺, σ⁻]. The collective Jz = [J⁺, J⁻] has the opposite sign:
    positive on excited atoms.
    """
    return np.array([[1, 0], [0, -1]], dtype=np.complex128)


class CollectiveOps(NamedTuple):
    jminus: CMat
    jplus: CMat
    jx: CMat
    jy: CMat
    jz: CMat


def _from_lowering(jminus: CMat) -> CollectiveOps:
    jplus = jminus.conj().T
    return CollectiveOps(
        jminus=jminus,
        jplus=jplus,
        jx=jplus + jminus,
        jy=(jplus - jminus) / 1j,
        jz=jplus @ jminus - jminus @ jplus,
    )


def collective_ops(basis: BasisLabel) -> CollectiveOps:
    """Builds J⁻, J⁺, Jx, Jy, Jz for the two atoms.

    Args:
        basis: ``dicke3`` or ``product4``.

    Returns:
        The five collective operators.

    Raises:
        BasisError: For the joint cavity basis; use :func:`tensor_with_cavity` there.
    """
    if basis.tag is BasisTag.DICKE3:
        jminus = np.zeros((3, 3), dtype=np.complex128)
        jminus[1, 0] = SQRT2
        jminus[2, 1] = SQRT2
        return _from_lowering(jminus)
    if basis.tag is BasisTag.PRODUCT4:
        identity = np.eye(2)
        return _from_lowering(kron(sigma_minus(), identity) + kron(identity, sigma_minus()))
    raise BasisError("dicke3 or product4", basis)


def individual_lowering(atom: int) -> CMat:
    """σ⁻ of atom 1 or 2 in the product basis."""
    identity = np.eye(2)
    if atom == 1:
        return kron(sigma_minus(), identity)
    if atom == 2:
        return kron(identity, sigma_minus())
    raise ParameterError("atom", atom, "must be 1 or 2")


def dicke_isometry() -> CMat:
    """The 4×3 map taking Dicke amplitudes to product-basis amplitudes."""
    v = np.zeros((4, 3), dtype=np.complex128)
    v[3, 0] = 1  # |ee⟩
    v[1, 1] = v[2, 1] = 1 / SQRT2  # (|ge⟩ + |eg⟩)/√2
    v[0, 2] = 1  # |gg⟩
    return v


def singlet() -> np.ndarray:
    """(|ge⟩ - |eg⟩)/√2 in the product basis."""
    return np.array([0, 1, -1, 0], dtype=np.complex128) / SQRT2


def embed_dicke_to_product(rho3: DensityMatrix) -> DensityMatrix:
    """Embeds a symmetric-subspace state into the product basis with an empty singlet.

    Product-basis inputs are returned unchanged.
    """
    if rho3.basis == PRODUCT4:
        return rho3
    if rho3.basis != DICKE3:
        raise BasisError(DICKE3, rho3.basis)
    v = dicke_isometry()
    rho4 = v @ rho3.data @ v.conj().T
    return DensityMatrix(data=(rho4 + rho4.conj().T) / 2, basis=PRODUCT4)


def bell_state(name: str) -> DensityMatrix:
    """One of the four Bell states in the product basis.

    Args:
        name: ``phi-plus``, ``phi-minus``, ``psi-plus`` or ``psi-minus``.
    """
    kets = {
        "phi-plus": [1, 0, 0, 1],
        "phi-minus": [1, 0, 0, -1],
        "psi-plus": [0, 1, 1, 0],
        "psi-minus": [0, 1, -1, 0],
    }
    if name not in kets:
        raise ParameterError("name", name, f"must be one of {', '.join(kets)}")
    return DensityMatrix.from_ket(kets[name], PRODUCT4)


def annihilation(n_fock: int) -> CMat:
    """The cavity lowering operator truncated to photon numbers 0..n_fock-1."""
    if n_fock < 1:
        raise ParameterError("n_fock", n_fock, "must be positive")
    return np.diag(np.sqrt(np.arange(1, n_fock)), k=1).astype(np.complex128)


def tensor_with_cavity(atom_op: CMat, cavity_op: CMat, n_fock: int) -> CMat:
    """Lifts an atom operator and a cavity operator to the joint (qubit-major) space."""
    cavity = np.asarray(cavity_op)
    if cavity.shape != (n_fock, n_fock):
        raise ParameterError("cavity_op", cavity.shape, f"must be {n_fock}x{n_fock}")
    return kron(atom_op, cavity)
