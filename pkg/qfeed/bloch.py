"""The eight-variable reduced equations of motion and their closed-form steady state.

Both are transcribed coefficient by coefficient, including the terms that look
like misprints. Nothing here is used to compute physical results; the
authoritative dynamics live in :mod:`qfeed.generators`, and
:func:`consistency_report` measures how far the printed forms are from them.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import QFeedError, SingularDenominatorError
from .generators import feedback_drift_generator, steady_state
from .models.records import BLOCH_FIELDS, BlochReportRow, BlochState
from .models.states import DICKE3
from .operators import collective_ops

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .models.params import ModelParams
    from .models.states import DensityMatrix

__all__ = (
    "analytic_steady",
    "consistency_report",
    "denominator",
    "fixed_point",
    "linear_part",
    "ode_rhs",
    "report_table",
    "trial_mapping",
)


SQRT2 = math.sqrt(2.0)
DENOMINATOR_TOL = 1e-12
FIXED_POINT_DT = 1e-3
FIXED_POINT_HORIZON = 200.0
DIVERGENCE_CUTOFF = 1e6

X12, X13, X23, Y12, Y13, Y23, Z12, Z13 = range(len(BLOCH_FIELDS))
DICKE_PAIRS = {"12": (0, 1), "13": (0, 2), "23": (1, 2)}


def linear_part(p: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Returns (M, c) with ds/dt = M·s + c in the order of ``BLOCH_FIELDS``."""
    a, lam, g = p.alpha, p.lambda_, p.gamma
    r = SQRT2 * a
    m = np.zeros((8, 8))
    c = np.zeros(8)

    m[X12, X12] = -2 * g
    m[X12, X23] = lam**2 / g
    m[X12, Y13] = r
    c[X12] = -2 * lam  # printed without a variable

    m[X13, X13] = -g - lam**2 / g - 2 * lam
    m[X13, Y12] = -r
    m[X13, Y23] = r

    m[X23, X12] = 2 * g + lam**2 / g
    m[X23, X23] = -(g**2 + lam**2)
    m[X23, Y13] = r

    m[Y12, X13] = -r
    m[Y12, Y12] = 2 * g + 6 * lam + 5 * lam**2 / g
    m[Y12, Y13] = -2 * r

    m[Y13, X12] = -r
    m[Y13, X23] = r
    m[Y13, Y13] = g + 2 * lam + 2 * lam**2 / g

    m[Y23, X13] = r
    m[Y23, Y12] = -2 * g - 3 * lam**2 / g - 6 * lam
    m[Y23, Y23] = g + 4 * lam + 5 * lam**2 / g
    m[Y23, Z12] = 2 * r
    m[Y23, Z13] = -2 * r

    m[Z12, X13] = -2 * lam - 3 * lam**2 / g
    m[Z12, Y12] = -2 * r
    m[Z12, Y23] = r
    m[Z12, Z12] = -8 * g / 3
    m[Z12, Z13] = 2 * g / 3 - 4 * lam / 3 + 2 * lam**2 / g
    c[Z12] = -2 * g / 3 - 4 * lam / 3

    m[Z13, X13] = 2 * lam
    m[Z13, Y12] = -r
    m[Z13, Y23] = -r
    m[Z13, Z12] = 2 * g / 3 + 4 * lam / 3
    m[Z13, Z13] = -(4 * g / 3 + 8 * lam / 3 + 2 * lam**2 / g)
    c[Z13] = -4 * g / 3 + 8 * lam / 3

    return m, c


def ode_rhs(p: ModelParams, s: BlochState) -> BlochState:
    """Evaluates the right-hand sides of the eight equations at ``s``."""
    m, c = linear_part(p)
    return BlochState.from_array(m @ s.as_array() + c)


def denominator(p: ModelParams) -> float:
    """The common denominator S of the closed-form steady state.

    The factor 2α²γ² multiplies only the bracketed trinomial; 116γλ³ + 60λ⁴ are
    separate terms. S is not sign-definite: it is negative around (0, -1).
    """
    a, lam, g = p.alpha, p.lambda_, p.gamma
    return (
        24 * a**4 * g**4
        + 2 * g**8
        + 26 * g**7 * lam
        + 143 * g**6 * lam**2
        + 432 * g**5 * lam**3
        + 789 * g**4 * lam**4
        + 926 * g**3 * lam**5
        + 726 * g**2 * lam**6
        + 352 * g * lam**7
        + 96 * lam**8
        + 2 * a**2 * g**2 * (4 * g**4 + 22 * g**3 * lam + 65 * g**2 * lam**2)
        + 116 * g * lam**3
        + 60 * lam**4
    )


def analytic_steady(p: ModelParams) -> BlochState:
    """The closed-form steady state A/S ... H/S.

    x12, x23 and y13 are exact zeros. F keeps its repeated 44γλ³ term.

    Raises:
        SingularDenominatorError: If |S| < 1e-12.
    """
    a, lam, g = p.alpha, p.lambda_, p.gamma
    s = denominator(p)
    if abs(s) < DENOMINATOR_TOL:
        raise SingularDenominatorError(s)

    quartic = 2 * g**4 + 14 * g**3 * lam + 33 * g**2 * lam**2 + 32 * g * lam**3 + 16 * lam**4
    inner = 4 * a**2 * g**2 * (g**2 + 3 * g * lam + lam**2) + lam**2 * quartic
    b = 2 * g * (g + 2 * lam) * inner
    d = 2 * SQRT2 * a * g**2 * (g + 2 * lam) * (4 * a**2 * g**2 + lam**2 * (5 * g**2 + 20 * g * lam + 16 * lam**2))
    f = (
        2
        * SQRT2
        * a
        * g**2
        * (g + 2 * lam)
        * (
            4 * a**2 * g**2
            + 2 * g**4
            + 14 * g**3 * lam
            + 37 * g**2 * lam**2
            + 44 * g * lam**3
            + 44 * g * lam**3
            + 16 * lam**4
        )
    )
    gg = g * (g + 2 * lam) * inner
    h = g * (g + 2 * lam) ** 3 * (4 * a**2 * lam**2 + quartic)
    return BlochState(x12=0.0, x13=b / s, x23=0.0, y12=d / s, y13=0.0, y23=f / s, z12=gg / s, z13=h / s)


def fixed_point(
    p: ModelParams,
    *,
    dt: float = FIXED_POINT_DT,
    t_final: float = FIXED_POINT_HORIZON,
) -> tuple[np.ndarray, bool]:
    """Integrates the equations from s = 0 with RK4 and returns the end point.

    The system is affine, so one RK4 step is a fixed 9×9 matrix on (s, 1). The
    state is checked once per unit of time and the run stops as diverged when a
    component exceeds 1e6 in magnitude or stops being finite.

    Returns:
        The final state and whether the run diverged.
    """
    m, c = linear_part(p)
    aug = np.zeros((9, 9))
    aug[:8, :8] = m
    aug[:8, 8] = c
    h = dt * aug
    step = np.eye(9)
    term = np.eye(9)
    for k in range(1, 5):
        term = term @ h / k
        step = step + term

    steps_per_check = max(1, round(1.0 / dt))
    n_steps = round(t_final / dt)
    check = np.linalg.matrix_power(step, steps_per_check)
    u = np.zeros(9)
    u[8] = 1.0
    done = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while done < n_steps:
            block = min(steps_per_check, n_steps - done)
            u = (check if block == steps_per_check else np.linalg.matrix_power(step, block)) @ u
            done += block
            if not np.all(np.isfinite(u)) or np.max(np.abs(u[:8])) > DIVERGENCE_CUTOFF:
                logging.debug("Bloch integration diverged at t = %g for %s", done * dt, p)
                return u[:8], True
    return u[:8], False


def trial_mapping(rho: DensityMatrix) -> BlochState:
    """Experimental: reads Bloch-like variables off a Dicke3 state.

    Uses x_ij = 2·Re ρ_ij, y_ij = 2·Im ρ_ij and z_ij = ρ_jj - ρ_ii with 1-based
    Dicke indices. This is one guess at the variables' meaning, not an established map.
    """
    data = rho.data
    values: dict[str, float] = {}
    for pair, (i, j) in DICKE_PAIRS.items():
        values[f"x{pair}"] = 2 * float(data[i, j].real)
        values[f"y{pair}"] = 2 * float(data[i, j].imag)
        values[f"z{pair}"] = float((data[j, j] - data[i, i]).real)
    return BlochState(**{name: values[name] for name in BLOCH_FIELDS})


def _report_row(p: ModelParams, experimental: bool) -> BlochReportRow:
    row: dict[str, object] = {"alpha": p.alpha, "lambda_": p.lambda_, "denominator": denominator(p)}
    try:
        analytic = analytic_steady(p)
    except SingularDenominatorError as e:
        logging.warning("No closed-form steady state at (%g, %g): %s", p.alpha, p.lambda_, e)
        return BlochReportRow(**row, error=str(e))  # pyright: ignore[reportArgumentType]

    residuals = np.abs(ode_rhs(p, analytic).as_array())
    final, diverged = fixed_point(p)
    row.update(
        analytic_residual=float(np.max(residuals)),
        component_residuals=tuple(residuals.tolist()),
        diverged=diverged,
        fixedpoint_distance=math.nan if diverged else float(np.max(np.abs(final - analytic.as_array()))),
    )

    if experimental:
        try:
            rho = steady_state(feedback_drift_generator(p, DICKE3))
        except QFeedError as e:
            logging.warning("No Liouvillian steady state at (%g, %g): %s", p.alpha, p.lambda_, e)
            row["error"] = str(e)
        else:
            ops = collective_ops(DICKE3)
            trial = trial_mapping(rho).as_array()
            row.update(
                liouvillian_distance=float(np.max(np.abs(trial - analytic.as_array()))),
                jx=rho.expectation(ops.jx).real,
                jy=rho.expectation(ops.jy).real,
                jz=rho.expectation(ops.jz).real,
            )
    return BlochReportRow(**row)  # pyright: ignore[reportArgumentType]


def _report_chunk(grid: Sequence[ModelParams], experimental: bool) -> list[BlochReportRow]:
    return [_report_row(p, experimental) for p in grid]


def consistency_report(
    grid: Sequence[ModelParams],
    *,
    experimental: bool = False,
    jobs: int = 1,
) -> list[BlochReportRow]:
    """Compares the closed-form steady state with the equations it should solve.

    For every parameter set the row holds the residual of the equations at the
    closed-form state, the end point of a t = 200 RK4 run from zero and its
    distance from the closed form. Divergence and a vanishing denominator are
    recorded in the row; no pass/fail judgment is made.

    Args:
        grid: Parameter sets to evaluate, in output order.
        experimental: Also compare against the Liouvillian steady state through
            :func:`trial_mapping` and report ⟨Jx⟩, ⟨Jy⟩, ⟨Jz⟩.
        jobs: Worker processes; the rows do not depend on it.

    Returns:
        One row per grid point.
    """
    logging.info("Building the Bloch consistency report over %d points", len(grid))
    if jobs <= 1 or len(grid) <= 1:
        return _report_chunk(grid, experimental)

    chunks = [list(grid[i::jobs]) for i in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_report_chunk, chunks, [experimental] * jobs))
    rows: list[BlochReportRow] = [None] * len(grid)  # type: ignore[list-item]
    for offset, chunk_rows in enumerate(results):
        rows[offset::jobs] = chunk_rows
    return rows


def report_table(rows: Sequence[BlochReportRow]) -> tuple[list[str], list[list[object]]]:
    """Tabulates a report: the five fixed columns first, then diagnostics."""
    header = ["alpha", "lambda", "analytic_residual", "fixedpoint_distance", "diverged_flag", "denominator"]
    header += [f"residual_{name}" for name in BLOCH_FIELDS]
    experimental = any(row.liouvillian_distance is not None for row in rows)
    if experimental:
        header += ["liouvillian_distance", "jx", "jy", "jz"]
    table: list[list[object]] = []
    for row in rows:
        residuals = list(row.component_residuals) or [math.nan] * len(BLOCH_FIELDS)
        line: list[object] = [
            row.alpha,
            row.lambda_,
            row.analytic_residual,
            row.fixedpoint_distance,
            row.diverged,
            row.denominator,
            *residuals,
        ]
        if experimental:
            line += [row.liouvillian_distance, row.jx, row.jy, row.jz]
        table.append(line)
    return header, table
