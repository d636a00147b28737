"""Spin-1 coherent states and the Q function of two-atom symmetric states."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import BasisError, NegativeQuasiProbabilityError, ParameterError
from .models.records import QGrid
from .models.states import DICKE3, DensityMatrix
from .operators import embed_dicke_to_product

if TYPE_CHECKING:
    import numpy.typing as npt

__all__ = (
    "REFERENCE_STATES",
    "coherent_state",
    "density_matrix_moduli",
    "q_cross_sections",
    "q_grid",
    "q_value",
    "qgrid_table",
    "reference_state",
)


Q_TOL = 1e-12
NORMALIZATION_TOL = 1e-4

# product-basis indices of ee, eg, ge, gg
SEPARABLE_ORDER = [3, 2, 1, 0]

REFERENCE_STATES: dict[str, list[complex]] = {
    "bell-phi-plus": [1, 0, 1],
    "bell-phi-minus": [1, 0, -1],
    "bell-psi-plus": [0, 1, 0],
    "ee": [1, 0, 0],
    "gg": [0, 0, 1],
}


def _coherent(theta: npt.ArrayLike, phi: npt.ArrayLike) -> np.ndarray:
    half = np.asarray(theta, dtype=np.float64) / 2
    phase = np.exp(-1j * np.asarray(phi, dtype=np.float64))
    cos, sin = np.cos(half), np.sin(half)
    return np.stack(
        np.broadcast_arrays(cos**2 * phase, math.sqrt(2) * cos * sin + 0j, sin**2 * phase.conj()),
        axis=-1,
    )


def coherent_state(theta: float, phi: float) -> np.ndarray:
    """|θ, φ⟩ for j = 1 in Dicke order (m = +1, 0, -1).

    The amplitudes are √C(2, 1+m)·cos^{1+m}(θ/2)·sin^{1-m}(θ/2)·e^{-imφ}.

    Raises:
        ParameterError: If θ lies outside [0, π].
    """
    if not 0 <= theta <= math.pi:
        raise ParameterError("theta", theta, "must lie in [0, pi]")
    return _coherent(theta, phi)


def _check(rho: DensityMatrix) -> None:
    if rho.basis != DICKE3:
        raise BasisError(DICKE3, rho.basis)


def _expectation(rho: DensityMatrix, c: np.ndarray) -> np.ndarray:
    q = np.einsum("...i,ij,...j->...", c.conj(), rho.data, c)
    imag = float(np.max(np.abs(q.imag))) if q.size else 0.0
    if imag > Q_TOL:
        logging.warning("Q function has an imaginary part of %.3e", imag)
    real = q.real
    lowest = float(np.min(real)) if real.size else 0.0
    if lowest < -Q_TOL:
        raise NegativeQuasiProbabilityError(lowest)
    return real


def q_value(rho: DensityMatrix, theta: float, phi: float) -> float:
    """Q(θ, φ) = ⟨θ, φ|ρ|θ, φ⟩.

    Raises:
        BasisError: If ρ is not a Dicke3 state.
        NegativeQuasiProbabilityError: If Q falls below -1e-12.
    """
    _check(rho)
    return float(_expectation(rho, coherent_state(theta, phi)))


def q_grid(rho: DensityMatrix, n_theta: int = 181, n_phi: int = 360) -> QGrid:
    """Samples Q on θ ∈ [0, π] (both ends included) and φ ∈ [0, 2π) (end excluded).

    A normalization more than 1e-4 away from 1 is logged as a warning.

    Raises:
        ParameterError: If either grid size is below 2.
    """
    _check(rho)
    if n_theta < 2:
        raise ParameterError("n_theta", n_theta, "must be at least 2")
    if n_phi < 2:
        raise ParameterError("n_phi", n_phi, "must be at least 2")

    theta = np.linspace(0, np.pi, n_theta)
    phi = np.linspace(0, 2 * np.pi, n_phi, endpoint=False)
    q = _expectation(rho, _coherent(theta[:, None], phi[None, :]))
    grid = QGrid(theta=theta, phi=phi, q=q)

    normalization = grid.normalization
    if abs(normalization - 1) > NORMALIZATION_TOL:
        logging.warning("Q grid %dx%d normalizes to %.6f", n_theta, n_phi, normalization)
    return grid


def q_cross_sections(rho: DensityMatrix, n: int = 360) -> dict[str, np.ndarray]:
    """Q along the three great circles in the xz, yz and xy planes.

    Each circle is parametrized by the angle t ∈ [0, 2π) from its first axis
    (z for the two vertical circles, x for the equator).

    Returns:
        ``angle`` and one array of Q values per plane.
    """
    _check(rho)
    if n < 2:
        raise ParameterError("n", n, "must be at least 2")
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    polar = np.arccos(np.clip(np.cos(t), -1, 1))
    upper = np.sin(t) >= 0
    xz_phi = np.where(upper, 0.0, np.pi)
    yz_phi = np.where(upper, np.pi / 2, 3 * np.pi / 2)
    return {
        "angle": t,
        "xz": _expectation(rho, _coherent(polar, xz_phi)),
        "yz": _expectation(rho, _coherent(polar, yz_phi)),
        "xy": _expectation(rho, _coherent(np.full_like(t, np.pi / 2), t)),
    }


def density_matrix_moduli(rho: DensityMatrix) -> np.ndarray:
    """|ρ_ij| in the separable ordering (ee, eg, ge, gg)."""
    rho4 = embed_dicke_to_product(rho)
    return np.abs(rho4.data)[np.ix_(SEPARABLE_ORDER, SEPARABLE_ORDER)]


def reference_state(name: str) -> DensityMatrix:
    """One of the fixed Dicke3 states used as Q-function landmarks.

    Args:
        name: ``bell-phi-plus``, ``bell-phi-minus``, ``bell-psi-plus``,
            ``identity`` (I/3), ``gg`` or ``ee``.
    """
    if name == "identity":
        return DensityMatrix.maximally_mixed(DICKE3)
    if name not in REFERENCE_STATES:
        choices = ", ".join([*REFERENCE_STATES, "identity"])
        raise ParameterError("state", name, f"must be one of {choices}")
    return DensityMatrix.from_ket(REFERENCE_STATES[name], DICKE3)


def qgrid_table(grid: QGrid) -> tuple[list[str], list[list[float]]]:
    """Tabulates a grid as (theta, phi, q) rows, θ-major."""
    rows = [
        [float(theta), float(phi), float(grid.q[i, j])]
        for i, theta in enumerate(grid.theta)
        for j, phi in enumerate(grid.phi)
    ]
    return ["theta", "phi", "q"], rows
