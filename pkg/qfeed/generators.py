"""Ensemble-average generators (Liouvillians) and what can be done with them.

All superoperators use the column-stacking convention of :mod:`qfeed.linalg`:
``A ρ B`` corresponds to ``kron(B.T, A) @ vec(ρ)``.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

from .exceptions import BasisError, NonUniqueSteadyStateError, ParameterError
from .linalg import CMat, as_cmat, kron, solve_linear, unvec, vec
from .models.records import Evolution
from .models.states import (
    DICKE3,
    PRODUCT4,
    QUBIT,
    BasisLabel,
    BasisTag,
    DensityMatrix,
    cavity_joint,
)
from .models.superop import Superop
from .operators import annihilation, collective_ops, individual_lowering

if TYPE_CHECKING:
    from .models.params import ModelParams

__all__ = (
    "cavity_generator",
    "dissipator",
    "feedback_drift_generator",
    "hamiltonian_part",
    "mean_photon_number",
    "partial_trace_cavity",
    "propagate",
    "steady_residual",
    "steady_state",
    "top_fock_population",
    "unmodulated_generator",
)


UNIQUENESS_TOL = 1e-9
MIN_FOCK = 4


def _left(a: CMat) -> CMat:
    """ρ ↦ aρ."""
    return kron(np.eye(a.shape[0]), a)


def _right(b: CMat) -> CMat:
    """ρ ↦ ρb."""
    return kron(b.T, np.eye(b.shape[0]))


def _sandwich(a: CMat, b: CMat) -> CMat:
    """ρ ↦ aρb."""
    return kron(b.T, a)


def _basis_for(dim: int) -> BasisLabel:
    if dim == 2:
        return QUBIT
    if dim == 3:
        return DICKE3
    if dim == 4:
        return PRODUCT4
    raise BasisError("a 2-, 3- or 4-dimensional atomic operator", dim)


def dissipator(a: CMat, basis: BasisLabel | None = None) -> Superop:
    """D[A]ρ = AρA† - {A†A, ρ}/2 as a superoperator."""
    a = as_cmat(a)
    ada = a.conj().T @ a
    matrix = kron(a.conj(), a) - 0.5 * _left(ada) - 0.5 * _right(ada)
    return Superop(matrix=matrix, basis=basis or _basis_for(a.shape[0]))


def hamiltonian_part(h: CMat, basis: BasisLabel | None = None) -> Superop:
    """ρ ↦ -i[H, ρ].

    Raises:
        NotHermitianError: If ``h`` is not Hermitian.
    """
    h = as_cmat(h, hermitian=True)
    return Superop(matrix=-1j * (_left(h) - _right(h)), basis=basis or _basis_for(h.shape[0]))


def _check_basis(p: ModelParams, basis: BasisLabel) -> None:
    if basis.tag not in {BasisTag.DICKE3, BasisTag.PRODUCT4}:
        raise BasisError("dicke3 or product4", basis)
    if basis.tag is BasisTag.DICKE3 and p.has_individual_decay:
        # individual decay couples the symmetric subspace to the singlet
        raise BasisError(PRODUCT4, basis)


def _individual_decay(p: ModelParams, basis: BasisLabel) -> Superop:
    out = Superop.zero(basis)
    if p.gamma1 > 0:
        out += p.gamma1 * dissipator(individual_lowering(1), basis)
    if p.gamma2 > 0:
        out += p.gamma2 * dissipator(individual_lowering(2), basis)
    return out


def unmodulated_generator(p: ModelParams, basis: BasisLabel = DICKE3) -> Superop:
    """The driven superfluorescence generator -i[αJx, ρ] + γD[J⁻]ρ (+ individual decay).

    Raises:
        BasisError: If individual decay is requested in the Dicke basis.
    """
    _check_basis(p, basis)
    ops = collective_ops(basis)
    return (
        hamiltonian_part(p.alpha * ops.jx, basis)
        + p.gamma * dissipator(ops.jminus, basis)
        + _individual_decay(p, basis)
    )


def feedback_drift_generator(p: ModelParams, basis: BasisLabel = DICKE3) -> Superop:
    """The drift of the feedback-modulated stochastic master equation.

    L = γD[J⁻] - i[αJx, ·] - i[F, -iJ⁻ρ + iρJ⁺] + (1/γ)D[F] with F = λJx,
    plus individual decay in the product basis. Reduces entrywise to
    :func:`unmodulated_generator` at λ = 0.
    """
    _check_basis(p, basis)
    ops = collective_ops(basis)
    f = p.lambda_ * ops.jx
    # -i[F, -iJ⁻ρ + iρJ⁺] = -F J⁻ ρ + F ρ J⁺ + J⁻ ρ F - ρ J⁺ F
    feedback = (
        -_left(f @ ops.jminus)
        + _sandwich(f, ops.jplus)
        + _sandwich(ops.jminus, f)
        - _right(ops.jplus @ f)
    )
    generator = (
        p.gamma * dissipator(ops.jminus, basis)
        + hamiltonian_part(p.alpha * ops.jx, basis)
        + Superop(matrix=feedback, basis=basis)
        + (1 / p.gamma) * dissipator(f, basis)
        + _individual_decay(p, basis)
    )
    if not generator.is_trace_preserving():
        logging.warning("Feedback generator leaks trace: %.3e", generator.trace_leak())
    return generator


def cavity_generator(p: ModelParams, n_fock: int = 6) -> Superop:
    """The displaced-frame atom+cavity generator.

    The qubits see the drive g·α₀/(2γ_p) on Jx and their individual decays; the
    cavity couples through -i(g/2)[J⁺b + J⁻b†, ·] and decays through γ_p·D[b].
    The qubit part is Dicke3 unless individual decay needs the product basis.

    Raises:
        ParameterError: If the cavity parameters are missing, the mode is not heavily
            damped (γ_p < 10·g), or n_fock < 4.
    """
    p.require_cavity_regime()
    if n_fock < MIN_FOCK:
        raise ParameterError("n_fock", n_fock, f"must be at least {MIN_FOCK}")

    qubit = PRODUCT4 if p.has_individual_decay else DICKE3
    joint = cavity_joint(n_fock, qubit)
    ops = collective_ops(qubit)
    b = annihilation(n_fock)
    fock_identity = np.eye(n_fock)
    qubit_identity = np.eye(qubit.dim)

    drive = p.effective_alpha * kron(ops.jx, fock_identity)
    coupling = 0.5 * p.g * (kron(ops.jplus, b) + kron(ops.jminus, b.conj().T))  # pyright: ignore[reportOptionalOperand]
    generator = (
        hamiltonian_part(drive, joint)
        + hamiltonian_part(coupling, joint)
        + p.gamma_p * dissipator(kron(qubit_identity, b), joint)  # pyright: ignore[reportOperatorIssue]
    )
    if p.gamma1 > 0:
        generator += p.gamma1 * dissipator(kron(individual_lowering(1), fock_identity), joint)
    if p.gamma2 > 0:
        generator += p.gamma2 * dissipator(kron(individual_lowering(2), fock_identity), joint)
    return generator


def steady_state(l: Superop) -> DensityMatrix:  # noqa: E741
    """Finds the unique zero-eigenvalue state of a trace-preserving generator.

    The diagonal equations of L sum to zero, so the first one is replaced by the
    trace functional and the resulting square system is solved directly.

    Args:
        l: The generator.

    Returns:
        The steady state, Hermitian-symmetrized and trace-normalized.

    Raises:
        NonUniqueSteadyStateError: If L has a second (near-)zero singular value.
        SingularMatrixError: If the bordered system is singular.
    """
    matrix = np.array(l.matrix)
    singular_values = scipy.linalg.svdvals(matrix)
    scale = max(float(singular_values[0]), 1e-300)
    if singular_values[-2] < UNIQUENESS_TOL * scale:
        raise NonUniqueSteadyStateError(sorted(singular_values.tolist()))

    d = l.dim
    matrix[0, :] = vec(np.eye(d)).conj()
    rhs = np.zeros(d * d, dtype=np.complex128)
    rhs[0] = 1
    rho = unvec(solve_linear(matrix, rhs), d)
    rho = (rho + rho.conj().T) / 2
    rho /= np.trace(rho).real
    state = DensityMatrix(data=rho, basis=l.basis)

    min_eig = state.min_eigenvalue
    if min_eig < -1e-9:
        logging.warning("Steady state has a negative eigenvalue %.3e", min_eig)
    return state


def steady_residual(l: Superop, rho: DensityMatrix) -> float:  # noqa: E741
    """Returns ‖L·vec(ρ)‖∞."""
    return float(np.max(np.abs(l.matrix @ vec(rho.data))))


def propagate(
    l: Superop,  # noqa: E741
    rho0: DensityMatrix,
    t_final: float,
    dt: float,
    *,
    stride: int = 1,
) -> Evolution:
    """Integrates dρ/dt = Lρ with classical fourth-order Runge-Kutta.

    For a linear generator one RK4 step is multiplication by
    P = I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24, which is built once.

    Args:
        l: The generator.
        rho0: The initial state.
        t_final: The final time.
        dt: The step size; steps above 0.01/‖L‖∞ are logged as a warning.
        stride: Record every ``stride``-th step (the final state is always recorded).

    Returns:
        The recorded times and states.
    """
    if rho0.basis != l.basis:
        raise BasisError(l.basis, rho0.basis)
    if dt <= 0:
        raise ParameterError("dt", dt, "must be positive")
    if t_final < 0:
        raise ParameterError("t_final", t_final, "must be non-negative")
    if stride < 1:
        raise ParameterError("stride", stride, "must be positive")

    norm = float(np.max(np.sum(np.abs(l.matrix), axis=1)))
    if norm > 0 and dt > 0.01 / norm:
        logging.warning("Step dt = %g exceeds the recommended 0.01/|L| = %.3e", dt, 0.01 / norm)

    n_steps = round(t_final / dt)
    hl = dt * l.matrix
    step = np.eye(hl.shape[0], dtype=np.complex128)
    term = step
    for k in range(1, 5):
        term = term @ hl / k
        step = step + term

    d = l.dim
    v = vec(rho0.data)
    times = [0.0]
    states = [rho0]
    for n in range(1, n_steps + 1):
        v = step @ v
        if n % stride == 0 or n == n_steps:
            rho = unvec(v, d)
            times.append(n * dt)
            states.append(DensityMatrix(data=(rho + rho.conj().T) / 2, basis=l.basis))
    return Evolution(times=times, states=states)


def partial_trace_cavity(nu: DensityMatrix) -> DensityMatrix:
    """Traces the cavity mode out of a joint qubit-cavity state."""
    if nu.basis.tag is not BasisTag.CAVITY:
        raise BasisError("cavity", nu.basis)
    dq = nu.basis.qubit_dim
    n = nu.basis.n_fock
    reduced = np.einsum("iaja->ij", nu.data.reshape(dq, n, dq, n))  # pyright: ignore[reportCallIssue, reportArgumentType]
    return DensityMatrix(data=(reduced + reduced.conj().T) / 2, basis=nu.basis.qubit_label)


def _photon_populations(nu: DensityMatrix) -> np.ndarray:
    if nu.basis.tag is not BasisTag.CAVITY:
        raise BasisError("cavity", nu.basis)
    dq = nu.basis.qubit_dim
    n = nu.basis.n_fock
    return np.real(np.einsum("iaia->a", nu.data.reshape(dq, n, dq, n)))  # pyright: ignore[reportCallIssue, reportArgumentType]


def top_fock_population(nu: DensityMatrix) -> float:
    """Population of the highest retained photon number; should stay below 1e-8."""
    return float(_photon_populations(nu)[-1])


def mean_photon_number(nu: DensityMatrix) -> float:
    populations = _photon_populations(nu)
    return float(np.dot(np.arange(populations.size), populations))
