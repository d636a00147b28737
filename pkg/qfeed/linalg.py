"""Dense complex linear algebra for the small matrices used throughout the package.

Every operator, density matrix and superoperator is a square ``complex128``
ndarray. Vectorization is column-stacking everywhere: ``vec(m)[j * dim + i] == m[i, j]``,
so that ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
"""

from __future__ import annotations

import warnings
from typing import TypeAlias

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .exceptions import (
    ConvergenceError,
    DimensionError,
    NotHermitianError,
    NotPSDError,
    SingularMatrixError,
)

__all__ = (
    "CMat",
    "as_cmat",
    "herm_eig",
    "hermitian_deviation",
    "kron",
    "psd_sqrt",
    "solve_linear",
    "trace_distance",
    "unvec",
    "vec",
)

CMat: TypeAlias = npt.NDArray[np.complex128]

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
PIVOT_TOL = 1e-14


def hermitian_deviation(m: npt.ArrayLike) -> float:
    """Returns max|M - M^dagger| for a square matrix."""
    arr = np.asarray(m)
    return float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0


def as_cmat(m: npt.ArrayLike, *, hermitian: bool = False) -> CMat:
    """Converts an array-like to a validated square complex matrix.

    Args:
        m: The matrix entries.
        hermitian: Whether to enforce Hermiticity to within 1e-12.

    Returns:
        A ``complex128`` copy of the input.

    Raises:
        DimensionError: If the matrix is empty or not square.
        NotHermitianError: If ``hermitian`` is set and the matrix is not Hermitian.
    """
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError("square matrix", arr.shape)
    if arr.shape[0] == 0:
        raise DimensionError("dim >= 1", 0)
    if hermitian:
        deviation = hermitian_deviation(arr)
        if deviation > HERMITIAN_TOL:
            raise NotHermitianError(deviation)
    return arr


def herm_eig(m: npt.ArrayLike) -> tuple[npt.NDArray[np.float64], CMat]:
    """Diagonalizes a Hermitian matrix.

    Args:
        m: A Hermitian matrix (to within 1e-12).

    Returns:
        The eigenvalues in ascending order and the matrix whose columns are the
        matching orthonormal eigenvectors.

    Raises:
        NotHermitianError: If the input is not Hermitian.
        ConvergenceError: If LAPACK fails to converge.
    """
    arr = as_cmat(m, hermitian=True)
    try:
        w, v = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as e:
        residual = float(np.linalg.norm(arr - np.diag(np.diag(arr))))
        raise ConvergenceError(residual) from e
    return w, v


def psd_sqrt(m: npt.ArrayLike) -> CMat:
    """Square root of a Hermitian positive-semidefinite matrix.

    Eigenvalues down to -1e-10 are treated as integrator noise and clipped to zero.

    Raises:
        NotPSDError: If an eigenvalue lies below -1e-10.
    """
    w, v = herm_eig(m)
    if w[0] < -PSD_TOL:
        raise NotPSDError(float(w[0]))
    root = np.sqrt(np.clip(w, 0.0, None))
    r = (v * root) @ v.conj().T
    return (r + r.conj().T) / 2


def kron(a: npt.ArrayLike, b: npt.ArrayLike) -> CMat:
    """Kronecker product with ``(a ⊗ b)[i*db + k, j*db + l] = a[i, j] * b[k, l]``."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def solve_linear(a: npt.ArrayLike, rhs: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """Solves ``a @ x = rhs`` by LU decomposition with partial pivoting.

    Raises:
        DimensionError: If ``rhs`` does not match the matrix dimension.
        SingularMatrixError: If a pivot falls below 1e-14 in magnitude.
    """
    arr = as_cmat(a)
    b = np.asarray(rhs, dtype=np.complex128)
    if b.shape != (arr.shape[0],):
        raise DimensionError((arr.shape[0],), b.shape)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(arr, check_finite=True)
    pivot = float(np.min(np.abs(np.diag(lu))))
    if pivot < PIVOT_TOL:
        raise SingularMatrixError(pivot)
    return scipy.linalg.lu_solve((lu, piv), b)


def vec(m: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """Column-stacks a square matrix."""
    return np.asarray(m, dtype=np.complex128).reshape(-1, order="F")


def unvec(v: npt.ArrayLike, dim: int) -> CMat:
    """Inverse of :func:`vec`.

    Raises:
        DimensionError: If ``v`` does not hold ``dim**2`` entries.
    """
    arr = np.asarray(v, dtype=np.complex128)
    if arr.shape != (dim * dim,):
        raise DimensionError((dim * dim,), arr.shape)
    return arr.reshape((dim, dim), order="F")


def trace_distance(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Returns ½‖a - b‖₁ for two Hermitian matrices."""
    diff = np.asarray(a, dtype=np.complex128) - np.asarray(b, dtype=np.complex128)
    w = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(np.sum(np.abs(w)) / 2)
