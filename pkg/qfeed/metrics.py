"""Entanglement and mixedness of two-qubit states, and the (α, λ) sweeps built on them."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import BasisError, ParameterError, QFeedError
from .generators import feedback_drift_generator, steady_residual, steady_state
from .linalg import CMat, herm_eig, kron, psd_sqrt
from .models.records import SweepRow, SweepSummary
from .models.states import DICKE3, PRODUCT4, BasisLabel, DensityMatrix
from .operators import embed_dicke_to_product, sigma_y

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .models.params import ModelParams

__all__ = (
    "concurrence",
    "linear_entropy",
    "mems_concurrence",
    "mems_r2",
    "purity_r2",
    "spin_flip",
    "sweep",
    "sweep_point",
    "summarize_sweep",
    "sweep_table",
    "von_neumann_entropy",
)


MEMS_KINK = 2 / 3


def _as_product(rho: DensityMatrix) -> DensityMatrix:
    if rho.basis == DICKE3:
        return embed_dicke_to_product(rho)
    if rho.basis != PRODUCT4:
        raise BasisError("dicke3 or product4", rho.basis)
    return rho


def spin_flip(rho4: DensityMatrix) -> CMat:
    """ρ̃ = (σy⊗σy) ρ* (σy⊗σy), conjugation taken in the product basis.

    Raises:
        BasisError: If the state is not in the product basis.
    """
    if rho4.basis != PRODUCT4:
        raise BasisError(PRODUCT4, rho4.basis)
    yy = kron(sigma_y(), sigma_y())
    return yy @ rho4.data.conj() @ yy


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence.

    The square roots of the eigenvalues of ρρ̃ are the singular values of
    X = √ρ·(σy⊗σy)·√ρ*. They are read off as the top four eigenvalues of the
    Hermitian dilation [[0, X], [X†, 0]], so the spectrum of ρρ̃ never passes
    through a square root.

    Args:
        rho: A Dicke3 or product-basis state.

    Returns:
        max(√λ₁ - √λ₂ - √λ₃ - √λ₄, 0), clamped to [0, 1].

    Raises:
        NotPSDError: If ρ has an eigenvalue below -1e-10.
    """
    rho4 = _as_product(rho)
    root = psd_sqrt(rho4.data)
    yy = kron(sigma_y(), sigma_y())
    x = root @ yy @ root.conj()
    zero = np.zeros_like(x)
    dilation = np.block([[zero, x], [x.conj().T, zero]])
    w, _ = herm_eig((dilation + dilation.conj().T) / 2)
    roots = np.clip(w[::-1][:4], 0.0, None)
    value = roots[0] - roots[1] - roots[2] - roots[3]
    return float(min(max(value, 0.0), 1.0))


def purity_r2(rho: DensityMatrix) -> float:
    """r² = (4/3)(Tr ρ² - 1/4): 1 for pure states, 0 for I/4, 1/9 for I₃/3 embedded."""
    return 4 / 3 * (_as_product(rho).purity - 1 / 4)


def linear_entropy(rho: DensityMatrix) -> float:
    """S_L = 1 - r², the mixedness coordinate of the MEMS frontier."""
    return 1 - purity_r2(rho)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr ρ ln ρ, with eigenvalues below 1e-15 dropped."""
    w = np.linalg.eigvalsh(rho.data)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log(w)))


def mems_r2(c: float) -> float:
    """Purity of the maximally entangled mixed state with concurrence ``c``.

    Raises:
        ParameterError: If ``c`` lies outside [0, 1].
    """
    if not 0 <= c <= 1:
        raise ParameterError("c", c, "concurrence must lie in [0, 1]")
    g = c / 2 if c > MEMS_KINK else 1 / 3
    return 1 - 0.75 * (4 * g * (2 - 3 * g) - c * c)


def mems_concurrence(r2: float) -> float:
    """Largest concurrence compatible with purity ``r2``; the inverse of :func:`mems_r2`.

    Below the kink r² = 3c²/4, above it r² = 1 - 3c + 3c².
    """
    r2 = min(max(r2, 0.0), 1.0)
    if r2 <= mems_r2(MEMS_KINK):
        return math.sqrt(4 * r2 / 3)
    return (3 + math.sqrt(12 * r2 - 3)) / 6


def sweep_point(alpha: float, lambda_: float, p_base: ModelParams, basis: BasisLabel = DICKE3) -> SweepRow:
    """Steady state, concurrence and purity at one (α, λ); failures are recorded in the row."""
    p = p_base.replace(alpha=alpha, lambda_=lambda_)
    try:
        generator = feedback_drift_generator(p, basis)
        rho = steady_state(generator)
        return SweepRow(
            alpha=alpha,
            lambda_=lambda_,
            concurrence=concurrence(rho),
            r2=purity_r2(rho),
            entropy=von_neumann_entropy(rho),
            steady_residual=steady_residual(generator, rho),
            min_eig=rho.min_eigenvalue,
        )
    except QFeedError as e:
        logging.warning("Sweep point (%g, %g) failed: %s", alpha, lambda_, e)
        return SweepRow(alpha=alpha, lambda_=lambda_, error=str(e))


def _sweep_chunk(
    points: Sequence[tuple[float, float]], p_base: ModelParams, basis: BasisLabel
) -> list[SweepRow]:
    return [sweep_point(alpha, lambda_, p_base, basis) for alpha, lambda_ in points]


def sweep(
    alphas: Sequence[float],
    lambdas: Sequence[float],
    p_base: ModelParams,
    *,
    basis: BasisLabel = DICKE3,
    jobs: int = 1,
) -> list[SweepRow]:
    """Evaluates every (α, λ) pair, α-major, and returns one row per pair.

    Args:
        alphas: Driving amplitudes.
        lambdas: Feedback amplitudes.
        p_base: Parameters supplying everything except α and λ.
        basis: ``dicke3`` or, with individual decay, ``product4``.
        jobs: Worker processes; the rows do not depend on it.

    Raises:
        ParameterError: If either grid is empty.
    """
    if not alphas:
        raise ParameterError("alphas", list(alphas), "grid must not be empty")
    if not lambdas:
        raise ParameterError("lambdas", list(lambdas), "grid must not be empty")

    points = [(float(a), float(l)) for a in alphas for l in lambdas]  # noqa: E741
    logging.info("Sweeping %d points with %d job(s)", len(points), jobs)
    if jobs <= 1:
        return _sweep_chunk(points, p_base, basis)

    chunks = [points[i::jobs] for i in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_sweep_chunk, chunks, [p_base] * jobs, [basis] * jobs))
    rows: list[SweepRow] = [None] * len(points)  # type: ignore[list-item]
    for offset, chunk_rows in enumerate(results):
        rows[offset::jobs] = chunk_rows
    return rows


def summarize_sweep(rows: Sequence[SweepRow], *, tol: float = 1e-9) -> SweepSummary:
    """Finds the concurrence maximum and checks that no row crosses the MEMS frontier."""
    good = [row for row in rows if row.ok]
    best = max(good, key=lambda row: row.concurrence, default=None)
    excesses = [row.concurrence - mems_concurrence(row.r2) for row in good]
    max_excess = max(excesses, default=None)
    return SweepSummary(
        n_points=len(rows),
        n_failed=len(rows) - len(good),
        best_alpha=best.alpha if best else None,
        best_lambda=best.lambda_ if best else None,
        best_concurrence=best.concurrence if best else None,
        best_r2=best.r2 if best else None,
        mems_dominated=max_excess is None or max_excess <= tol,
        max_mems_excess=max_excess,
    )


def sweep_table(rows: Sequence[SweepRow]) -> tuple[list[str], list[list[float | str | None]]]:
    """Tabulates sweep rows; failed points keep NaN metrics and carry the error text."""
    header = ["alpha", "lambda", "concurrence", "r2", "steady_residual", "min_eig", "entropy", "error"]
    table: list[list[float | str | None]] = [
        [
            row.alpha,
            row.lambda_,
            row.concurrence,
            row.r2,
            row.steady_residual,
            row.min_eig,
            row.entropy,
            row.error.replace(",", ";") if row.error else None,
        ]
        for row in rows
    ]
    return header, table
