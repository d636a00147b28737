"""Conditioned evolution under homodyne detection, with and without feedback.

Trajectories are integrated in batches: an ``(N, d, d)`` array holds N
conditioned states and every step updates all of them with one set of array
operations. Trajectory ``k`` of an ensemble seeded with ``seed`` draws its
noise from ``RngStream(seed + k)``, so it is the same trajectory that
:func:`run_trajectory` produces with that seed.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import TYPE_CHECKING, Literal, NamedTuple

import numpy as np

from .exceptions import (
    DivergedStateError,
    EnsembleAbortedError,
    ParameterError,
    QFeedError,
    StepSizeError,
    TrajectoryAbortedError,
)
from .generators import feedback_drift_generator, unmodulated_generator
from .models.records import EnsembleResult, TrajectoryRecord
from .models.states import DensityMatrix
from .operators import collective_ops, individual_lowering

if TYPE_CHECKING:
    from .linalg import CMat
    from .models.params import ModelParams
    from .models.states import BasisLabel

__all__ = (
    "RngStream",
    "SmeStepper",
    "gaussian_increment",
    "measurement_superop",
    "photocurrent_sample",
    "run_ensemble",
    "run_trajectory",
    "sme_step_feedback",
    "sme_step_nofeedback",
    "trajectory_table",
)


Scheme = Literal["euler", "kraus"]

MAX_TRACE_CORRECTION = 0.05
MAX_STATE_ENTRY = 2.0
RECOMMENDED_DT = 1e-3
ENSEMBLE_CHUNK = 250


class RngStream:
    """A reproducible stream of standard normal samples.

    Samples are drawn from ``numpy.random.default_rng(seed)`` in fixed-size
    blocks, so the sequence does not depend on how the caller asks for it.
    """

    BLOCK = 1024

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self.counter = 0
        self._rng = np.random.default_rng(seed)
        self._buffer = np.empty(0)
        self._pos = 0

    def _refill(self) -> None:
        self._buffer = self._rng.standard_normal(self.BLOCK)
        self._pos = 0

    def normal(self) -> float:
        if self._pos == self._buffer.size:
            self._refill()
        value = float(self._buffer[self._pos])
        self._pos += 1
        self.counter += 1
        return value

    def take(self, n: int) -> np.ndarray:
        """Returns the next ``n`` samples."""
        out = np.empty(n)
        filled = 0
        while filled < n:
            if self._pos == self._buffer.size:
                self._refill()
            count = min(n - filled, self._buffer.size - self._pos)
            out[filled : filled + count] = self._buffer[self._pos : self._pos + count]
            self._pos += count
            filled += count
        self.counter += n
        return out


def gaussian_increment(rng: RngStream, dt: float) -> float:
    """A Wiener increment: √dt times the next standard normal sample.

    Raises:
        ParameterError: If ``dt`` is not positive.
    """
    if dt <= 0:
        raise ParameterError("dt", dt, "must be positive")
    return math.sqrt(dt) * rng.normal()


def measurement_superop(m: CMat, rho: np.ndarray) -> np.ndarray:
    """𝓗[M]ρ = Mρ + ρM† - Tr[(M + M†)ρ]ρ, for one state or a batch of states."""
    mdag = m.conj().T
    expect = np.einsum("ij,...ji->...", m + mdag, rho)
    return m @ rho + rho @ mdag - expect[..., None, None] * rho


def _vec_batch(rhos: np.ndarray) -> np.ndarray:
    n, d, _ = rhos.shape
    return rhos.transpose(0, 2, 1).reshape(n, d * d)


def _unvec_batch(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape(v.shape[0], d, d).transpose(0, 2, 1)


class SmeStepper:
    """One integration step of the conditioned master equation for a batch of states.

    With feedback the drift is :func:`~qfeed.generators.feedback_drift_generator`
    and the noise enters through 𝓗[-i√γJ⁻ - iλJx]. Without feedback the drift is
    :func:`~qfeed.generators.unmodulated_generator` and the noise enters through
    𝓗[√γJ⁻]. The ``kraus`` scheme (no feedback only) applies the normalized map
    ρ ↦ KρK† with K = I - iH dt - ½c†c dt + c·dy and dy = dW + ⟨c + c†⟩dt, which
    keeps pure states pure.
    """

    def __init__(
        self,
        p: ModelParams,
        basis: BasisLabel,
        *,
        feedback: bool = True,
        scheme: Scheme = "euler",
    ) -> None:
        if scheme not in {"euler", "kraus"}:
            raise ParameterError("scheme", scheme, "must be 'euler' or 'kraus'")
        if scheme == "kraus" and feedback:
            raise ParameterError("scheme", scheme, "the Kraus scheme is only available without feedback")

        self.p = p
        self.basis = basis
        self.feedback = feedback
        self.scheme = scheme
        self.dim = basis.dim

        ops = collective_ops(basis)
        if feedback:
            self.drift = feedback_drift_generator(p, basis).matrix
            self.noise_op = -1j * math.sqrt(p.gamma) * ops.jminus - 1j * p.lambda_ * ops.jx
        else:
            self.drift = unmodulated_generator(p, basis).matrix
            self.noise_op = math.sqrt(p.gamma) * ops.jminus
        self.hamiltonian = p.alpha * ops.jx

        # unobserved individual decay channels, folded into the Kraus map
        self.side_channels = [
            math.sqrt(rate) * individual_lowering(atom)
            for atom, rate in ((1, p.gamma1), (2, p.gamma2))
            if rate > 0
        ]

    def step(self, rhos: np.ndarray, dt: float, dws: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Advances every state by ``dt``.

        Args:
            rhos: States, shape ``(N, d, d)``.
            dt: The step size.
            dws: Wiener increments, shape ``(N,)``.

        Returns:
            The new states (Hermitian, unit trace) and each state's trace correction.

        Raises:
            StepSizeError: If an Euler step moves a trace by more than 0.05 or leaves
                a state non-finite.
            DivergedStateError: If a state picks up an entry larger than 2 in modulus.
        """
        new, corrections, failed = self.step_each(rhos, dt, dws)
        if np.any(failed):
            k = int(np.argmax(failed))
            if not corrections[k] <= MAX_TRACE_CORRECTION:
                raise StepSizeError(float(corrections[k]), dt)
            raise DivergedStateError(float(np.max(np.abs(new[k]))), dt)
        return new, corrections

    def step_each(
        self, rhos: np.ndarray, dt: float, dws: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Advances every state by ``dt`` and flags the ones whose step failed.

        A step fails when the trace moves by more than 0.05 or the state stops being
        finite. It also fails on an entry above 2 in modulus, which no unit-trace
        state near the positive cone has. Failed states are returned unnormalized.

        Returns:
            The new states, each state's trace correction and the failure mask.
        """
        if self.scheme == "kraus":
            new, corrections = self._kraus_step(rhos, dt, dws)
            return new, corrections, ~np.isfinite(corrections)

        drift = _unvec_batch(_vec_batch(rhos) @ self.drift.T, self.dim)
        new = rhos + dt * drift + dws[:, None, None] * measurement_superop(self.noise_op, rhos)
        new = (new + new.conj().transpose(0, 2, 1)) / 2
        traces = np.real(np.einsum("nii->n", new))
        corrections = np.abs(traces - 1)
        peaks = np.max(np.abs(new), axis=(1, 2), initial=0.0)
        failed = ~((corrections <= MAX_TRACE_CORRECTION) & (peaks <= MAX_STATE_ENTRY))
        scale = np.where(failed, 1.0, traces)
        return new / scale[:, None, None], corrections, failed

    def _kraus_step(self, rhos: np.ndarray, dt: float, dws: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        c = self.noise_op
        cdag = c.conj().T
        identity = np.eye(self.dim)
        base = identity - 1j * self.hamiltonian * dt - 0.5 * (cdag @ c) * dt
        for side in self.side_channels:
            base = base - 0.5 * (side.conj().T @ side) * dt

        quadrature = np.real(np.einsum("ij,nji->n", c + cdag, rhos))
        dys = dws + quadrature * dt
        kraus = base[None, :, :] + dys[:, None, None] * c[None, :, :]
        new = kraus @ rhos @ kraus.conj().transpose(0, 2, 1)
        for side in self.side_channels:
            new = new + dt * (side @ rhos @ side.conj().T)
        new = (new + new.conj().transpose(0, 2, 1)) / 2
        traces = np.real(np.einsum("nii->n", new))
        return new / traces[:, None, None], np.abs(traces - 1)


def _single_step(
    rho_c: DensityMatrix,
    p: ModelParams,
    dt: float,
    dw: float,
    *,
    feedback: bool,
    scheme: Scheme,
) -> tuple[DensityMatrix, float]:
    if dt <= 0:
        raise ParameterError("dt", dt, "must be positive")
    stepper = SmeStepper(p, rho_c.basis, feedback=feedback, scheme=scheme)
    new, corrections = stepper.step(np.array(rho_c.data)[None], dt, np.array([dw]))
    return DensityMatrix(data=new[0], basis=rho_c.basis), float(corrections[0])


def sme_step_feedback(
    rho_c: DensityMatrix, p: ModelParams, dt: float, dw: float
) -> tuple[DensityMatrix, float]:
    """One Euler-Maruyama step of the feedback-modulated conditioned master equation.

    ρ' = ρ + dt·Lρ + dW·𝓗[-i√γJ⁻ - iλJx]ρ, symmetrized and renormalized.

    Args:
        rho_c: The conditioned state (Dicke3, or product4 with individual decay).
        p: Model parameters.
        dt: The step size; 1e-3 or below is recommended.
        dw: The Wiener increment for this step.

    Returns:
        The new state and the magnitude of the trace correction applied.

    Raises:
        StepSizeError: If the trace correction exceeds 0.05.
    """
    return _single_step(rho_c, p, dt, dw, feedback=True, scheme="euler")


def sme_step_nofeedback(
    rho_c: DensityMatrix,
    p: ModelParams,
    dt: float,
    dw: float,
    *,
    scheme: Scheme = "euler",
) -> tuple[DensityMatrix, float]:
    """One step of the conditioned master equation without feedback.

    The Euler step is ρ' = ρ + dt·(-i[αJx, ρ] + γD[J⁻]ρ) + dW·𝓗[√γJ⁻]ρ. With
    ``scheme="kraus"`` the normalized Kraus map of :class:`SmeStepper` is used instead.
    """
    return _single_step(rho_c, p, dt, dw, feedback=False, scheme=scheme)


def photocurrent_sample(rho_c: DensityMatrix, p: ModelParams, dt: float, dw: float) -> float:
    """I = √γ⟨Jx⟩ + (dW/dt)/√η."""
    if dt <= 0:
        raise ParameterError("dt", dt, "must be positive")
    jx = collective_ops(rho_c.basis).jx
    return math.sqrt(p.gamma) * rho_c.expectation(jx).real + dw / dt / math.sqrt(p.eta)


def _check_run(t_final: float, dt: float) -> int:
    if dt <= 0:
        raise ParameterError("dt", dt, "must be positive")
    if t_final < 0:
        raise ParameterError("t_final", t_final, "must be non-negative")
    if dt > RECOMMENDED_DT:
        logging.warning("Step dt = %g is above the recommended %g", dt, RECOMMENDED_DT)
    return round(t_final / dt)


def run_trajectory(
    rho0: DensityMatrix,
    p: ModelParams,
    t_final: float,
    dt: float,
    seed: int,
    *,
    feedback: bool = True,
    scheme: Scheme = "euler",
) -> TrajectoryRecord:
    """Integrates one conditioned trajectory and records every step.

    Negative eigenvalues of the Euler scheme are recorded in
    ``min_eigenvalue_track`` and left in place.

    Args:
        rho0: The initial state.
        p: Model parameters.
        t_final: The final time; 0 gives a record holding only ``rho0``.
        dt: The step size.
        seed: Seeds the noise; equal seeds give bit-identical records.
        feedback: Whether the driving is modulated by the photocurrent.
        scheme: ``euler`` or, without feedback, ``kraus``.

    Raises:
        TrajectoryAbortedError: If a step fails; the partial record is attached.
    """
    n_steps = _check_run(t_final, dt)
    stepper = SmeStepper(p, rho0.basis, feedback=feedback, scheme=scheme)
    rng = RngStream(seed)
    sqrt_dt = math.sqrt(dt)

    times = [0.0]
    states = [rho0]
    photocurrent: list[float] = []
    dws: list[float] = []
    corrections: list[float] = []
    min_eigs = [rho0.min_eigenvalue]

    rho = np.array(rho0.data)[None]
    for n in range(n_steps):
        dw = sqrt_dt * rng.normal()
        try:
            current = photocurrent_sample(states[-1], p, dt, dw)
            rho, correction = stepper.step(rho, dt, np.array([dw]))
            state = DensityMatrix(data=rho[0], basis=rho0.basis)
        except QFeedError as e:
            partial = TrajectoryRecord(
                seed=seed,
                times=times,
                states=states,
                photocurrent=photocurrent,
                dw=dws,
                norm_corrections=corrections,
                min_eigenvalue_track=min_eigs,
            )
            raise TrajectoryAbortedError(n, partial, e) from e

        photocurrent.append(current)
        dws.append(dw)
        corrections.append(float(correction[0]))
        times.append((n + 1) * dt)
        states.append(state)
        min_eigs.append(state.min_eigenvalue)

    return TrajectoryRecord(
        seed=seed,
        times=times,
        states=states,
        photocurrent=photocurrent,
        dw=dws,
        norm_corrections=corrections,
        min_eigenvalue_track=min_eigs,
    )


class _ChunkSums(NamedTuple):
    states: np.ndarray
    counts: np.ndarray
    current_sum: float
    current_count: int
    min_eig: float
    aborted: list[int]


def _run_chunk(
    rho0: DensityMatrix,
    p: ModelParams,
    n_steps: int,
    dt: float,
    seeds: list[int],
    feedback: bool,
    scheme: Scheme,
    stride: int,
    burn_in_steps: int,
) -> _ChunkSums:
    """Runs a batch of trajectories and returns sums over the batch.

    A trajectory whose step fails is frozen and left out of every later sum, so
    each recorded sum covers the trajectories still running at that time.
    """
    stepper = SmeStepper(p, rho0.basis, feedback=feedback, scheme=scheme)
    streams = [RngStream(seed) for seed in seeds]
    n = len(seeds)
    sqrt_dt = math.sqrt(dt)
    jx = collective_ops(rho0.basis).jx
    current_scale = math.sqrt(p.gamma)
    noise_scale = 1 / (dt * math.sqrt(p.eta))

    rhos = np.repeat(np.array(rho0.data)[None], n, axis=0)
    alive = np.ones(n, dtype=bool)
    recorded = [rhos.sum(axis=0)]
    counts = [n]
    min_eig = float(np.min(np.linalg.eigvalsh(rhos)))
    current_sum = 0.0
    current_count = 0

    done = 0
    while done < n_steps:
        block = min(RngStream.BLOCK, n_steps - done)
        noise = np.stack([stream.take(block) for stream in streams], axis=1) * sqrt_dt
        for k in range(block):
            step = done + k
            running = np.flatnonzero(alive)
            dws = noise[k, running]
            if step >= burn_in_steps and running.size:
                jx_mean = np.real(np.einsum("ij,nji->n", jx, rhos[running]))
                current_sum += float(np.sum(current_scale * jx_mean + dws * noise_scale))
                current_count += running.size
            if running.size:
                with np.errstate(all="ignore"):
                    new, _, failed = stepper.step_each(rhos[running], dt, dws)
                rhos[running[~failed]] = new[~failed]
                if np.any(failed):
                    alive[running[failed]] = False
                    for i in running[failed]:
                        logging.warning("Trajectory %d aborted at step %d", seeds[i], step)
            if (step + 1) % stride == 0 or step + 1 == n_steps:
                recorded.append(rhos[alive].sum(axis=0))
                counts.append(int(np.count_nonzero(alive)))
                if np.any(alive):
                    min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(rhos[alive]))))
        done += block
    aborted = [seeds[i] for i in np.flatnonzero(~alive)]
    return _ChunkSums(np.array(recorded), np.array(counts), current_sum, current_count, min_eig, aborted)


def run_ensemble(
    rho0: DensityMatrix,
    p: ModelParams,
    t_final: float,
    dt: float,
    n_trajectories: int,
    seed: int,
    *,
    feedback: bool = True,
    scheme: Scheme = "euler",
    stride: int = 1,
    burn_in: float = 0.0,
    jobs: int = 1,
) -> EnsembleResult:
    """Averages ``n_trajectories`` conditioned trajectories.

    Trajectories are processed in fixed chunks of 250 and the chunk sums are
    added in chunk order, so the result does not depend on ``jobs``. A trajectory
    whose Euler step fails is aborted on its own: it is counted in
    ``aborted_seeds`` and each mean state averages the trajectories still
    running at that time.

    Args:
        rho0: The common initial state.
        p: Model parameters.
        t_final: The final time.
        dt: The step size.
        n_trajectories: Ensemble size.
        seed: Trajectory ``k`` uses seed ``seed + k``.
        feedback: Whether the driving is modulated by the photocurrent.
        scheme: ``euler`` or, without feedback, ``kraus``.
        stride: Record the mean state every ``stride`` steps (and at the end).
        burn_in: Photocurrent samples before this time are left out of the mean.
        jobs: Worker processes.

    Returns:
        The mean states at the recorded times, the mean photocurrent, the
        smallest conditioned eigenvalue seen at a recorded time and the seeds of
        the aborted trajectories.

    Raises:
        EnsembleAbortedError: If every trajectory aborted.
    """
    n_steps = _check_run(t_final, dt)
    if n_trajectories < 1:
        raise ParameterError("n_trajectories", n_trajectories, "must be positive")
    if stride < 1:
        raise ParameterError("stride", stride, "must be positive")

    seeds = [seed + k for k in range(n_trajectories)]
    chunks = [seeds[i : i + ENSEMBLE_CHUNK] for i in range(0, n_trajectories, ENSEMBLE_CHUNK)]
    burn_in_steps = round(burn_in / dt)
    args = (rho0, p, n_steps, dt)
    tail = (feedback, scheme, stride, burn_in_steps)
    logging.info(
        "Running %d trajectories of %d steps in %d chunk(s) with %d job(s)",
        n_trajectories,
        n_steps,
        len(chunks),
        jobs,
    )

    if jobs <= 1 or len(chunks) == 1:
        results = [_run_chunk(*args, chunk, *tail) for chunk in chunks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_chunk, *args, chunk, *tail) for chunk in chunks]
            results = [future.result() for future in futures]

    state_sum = results[0].states
    counts = results[0].counts
    current_sum = results[0].current_sum
    current_count = results[0].current_count
    for result in results[1:]:
        state_sum = state_sum + result.states
        counts = counts + result.counts
        current_sum += result.current_sum
        current_count += result.current_count
    min_eig = min(result.min_eig for result in results)
    aborted = [s for result in results for s in result.aborted]

    if counts[-1] == 0:
        raise EnsembleAbortedError(n_trajectories, dt)
    if aborted:
        logging.warning("%d of %d trajectories aborted at dt = %g", len(aborted), n_trajectories, dt)

    recorded_steps = [0, *[s for s in range(1, n_steps + 1) if s % stride == 0 or s == n_steps]]
    means = state_sum / counts[:, None, None]
    mean_states = [
        DensityMatrix(data=(m + m.conj().T) / 2 / np.real(np.trace(m)), basis=rho0.basis)
        for m in means
    ]
    return EnsembleResult(
        n_trajectories=n_trajectories,
        seed=seed,
        dt=dt,
        times=[s * dt for s in recorded_steps],
        mean_states=mean_states,
        mean_photocurrent=current_sum / current_count if current_count else math.nan,
        min_eigenvalue=min_eig,
        aborted_seeds=aborted,
    )


def trajectory_table(record: TrajectoryRecord, *, include_state: bool = False) -> tuple[list[str], list[list[float]]]:
    """Tabulates a trajectory, one row per recorded time.

    Row k holds the state at t_k and the current, increment and trace correction
    of the step leaving it; the final row has NaN in those three columns.
    """
    header = ["t", "I", "dW", "trace_correction", "min_eig"]
    dim = record.states[0].dim
    if include_state:
        for i in range(dim):
            for j in range(dim):
                header += [f"re_{i + 1}{j + 1}", f"im_{i + 1}{j + 1}"]

    rows: list[list[float]] = []
    n_steps = len(record.photocurrent)
    for k, (t, state) in enumerate(zip(record.times, record.states, strict=True)):
        if k < n_steps:
            row = [t, record.photocurrent[k], record.dw[k], record.norm_corrections[k]]
        else:
            row = [t, math.nan, math.nan, math.nan]
        row.append(record.min_eigenvalue_track[k])
        if include_state:
            for value in state.data.reshape(-1):
                row += [float(value.real), float(value.imag)]
        rows.append(row)
    return header, rows
