from __future__ import annotations

import numpy as np
import pytest
from conftest import random_density

from qfeed import (
    BasisError,
    ModelParams,
    NonUniqueSteadyStateError,
    NotHermitianError,
    ParameterError,
    annihilation,
    cavity_generator,
    collective_ops,
    dissipator,
    feedback_drift_generator,
    hamiltonian_part,
    mean_photon_number,
    partial_trace_cavity,
    propagate,
    sigma_minus,
    singlet,
    steady_residual,
    steady_state,
    tensor_with_cavity,
    top_fock_population,
    trace_distance,
    unmodulated_generator,
)
from qfeed.models.states import DICKE3, PRODUCT4, QUBIT, DensityMatrix, cavity_joint


def test_single_qubit_decay():
    generator = dissipator(sigma_minus())
    assert generator.basis == QUBIT
    assert generator.is_trace_preserving()

    excited = DensityMatrix.from_ket([0, 1], QUBIT)
    evolution = propagate(generator, excited, 1.0, 0.001, stride=100)
    assert len(evolution.times) == 11
    assert evolution.final.data[1, 1].real == pytest.approx(np.exp(-1.0), abs=1e-9)

    rho = steady_state(generator)
    np.testing.assert_allclose(rho.data, np.diag([1, 0]), atol=1e-12)


def test_hamiltonian_part_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hamiltonian_part(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize(("alpha", "lambda_"), [(0.0, 0.0), (0.4, -0.8), (-1.3, 0.7), (2.0, -1.5)])
def test_feedback_generator_is_trace_preserving(alpha, lambda_):
    generator = feedback_drift_generator(ModelParams(alpha=alpha, lambda_=lambda_))
    assert generator.is_trace_preserving()


def test_feedback_generator_reduces_without_feedback():
    p = ModelParams(alpha=0.7, lambda_=0.0, gamma=1.3)
    np.testing.assert_array_equal(
        feedback_drift_generator(p).matrix, unmodulated_generator(p).matrix
    )


def test_steady_state_without_drive_is_ground():
    rho = steady_state(feedback_drift_generator(ModelParams()))
    np.testing.assert_allclose(rho.data, np.diag([0, 0, 1]), atol=1e-12)


def test_steady_state_is_a_fixed_point(feedback_optimum):
    generator = feedback_drift_generator(feedback_optimum)
    rho = steady_state(generator)
    assert steady_residual(generator, rho) < 1e-12
    assert rho.min_eigenvalue > -1e-12


def test_steady_state_symmetric_in_alpha():
    plus = steady_state(feedback_drift_generator(ModelParams(alpha=0.4, lambda_=-0.8)))
    minus = steady_state(feedback_drift_generator(ModelParams(alpha=-0.4, lambda_=-0.8)))
    flip = np.diag([1, -1, 1])
    np.testing.assert_allclose(flip @ plus.data @ flip, minus.data, atol=1e-12)


def test_dark_singlet_makes_steady_state_non_unique():
    with pytest.raises(NonUniqueSteadyStateError) as excinfo:
        steady_state(feedback_drift_generator(ModelParams(alpha=0.4, lambda_=-0.8), PRODUCT4))
    assert excinfo.value.singular_values[1] < 1e-9


def test_half_gamma_feedback_is_unique():
    generator = feedback_drift_generator(ModelParams(alpha=0.4, lambda_=-0.5))
    rho = steady_state(generator)
    assert steady_residual(generator, rho) < 1e-10
    assert np.trace(rho.data).real == pytest.approx(1.0)


def test_individual_decay_needs_product_basis():
    p = ModelParams(alpha=0.4, gamma1=0.1)
    with pytest.raises(BasisError):
        feedback_drift_generator(p, DICKE3)
    generator = feedback_drift_generator(p, PRODUCT4)
    assert generator.is_trace_preserving()
    rho = steady_state(generator)
    assert rho.basis == PRODUCT4


def test_product_basis_matches_dicke_without_individual_decay(feedback_optimum):
    from qfeed import embed_dicke_to_product

    rho3 = steady_state(feedback_drift_generator(feedback_optimum, DICKE3))
    generator4 = feedback_drift_generator(feedback_optimum, PRODUCT4)
    # the singlet is dark, so only the residual is compared
    assert steady_residual(generator4, embed_dicke_to_product(rho3)) < 1e-12


def test_propagation_reaches_steady_state(feedback_optimum, ground):
    generator = feedback_drift_generator(feedback_optimum)
    evolution = propagate(generator, ground, 40.0, 0.001, stride=40000)
    assert evolution.times == [0.0, pytest.approx(40.0)]
    assert trace_distance(evolution.final.data, steady_state(generator).data) < 1e-6


def test_propagate_zero_time(ground):
    evolution = propagate(unmodulated_generator(ModelParams(alpha=0.3)), ground, 0.0, 0.01)
    assert evolution.times == [0.0]
    np.testing.assert_array_equal(evolution.final.data, ground.data)


def test_propagate_validates_inputs(ground):
    generator = unmodulated_generator(ModelParams())
    with pytest.raises(ParameterError):
        propagate(generator, ground, 1.0, 0.0)
    with pytest.raises(ParameterError):
        propagate(generator, ground, 1.0, 0.01, stride=0)
    with pytest.raises(BasisError):
        propagate(generator, DensityMatrix.maximally_mixed(PRODUCT4), 1.0, 0.01)


def test_cavity_regime_checks():
    with pytest.raises(ParameterError):
        cavity_generator(ModelParams(g=1.0, gamma_p=5.0, alpha0=0.76))
    with pytest.raises(ParameterError):
        cavity_generator(ModelParams(g=1.0, gamma_p=20.0, alpha0=0.76), n_fock=3)
    with pytest.raises(ParameterError):
        cavity_generator(ModelParams(g=1.0))


def test_uncoupled_cavity_relaxes_to_vacuum():
    p = ModelParams(g=0.0, gamma_p=1.0, alpha0=1.0, gamma1=0.2, gamma2=0.3)
    generator = cavity_generator(p, n_fock=4)
    assert generator.basis == cavity_joint(4, PRODUCT4)
    joint = steady_state(generator)
    assert mean_photon_number(joint) == pytest.approx(0.0, abs=1e-12)
    assert top_fock_population(joint) == pytest.approx(0.0, abs=1e-12)
    reduced = partial_trace_cavity(joint)
    assert reduced.basis == PRODUCT4
    np.testing.assert_allclose(reduced.data, np.diag([1, 0, 0, 0]), atol=1e-12)


def test_partial_trace_needs_cavity_basis(ground):
    with pytest.raises(BasisError):
        partial_trace_cavity(ground)


def test_matrix_forms_match_direct_evaluation(rng):
    for _ in range(100):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        h = (a + a.conj().T) / 2
        rho = random_density(rng, 3)
        ada = a.conj().T @ a
        np.testing.assert_allclose(
            dissipator(a, DICKE3).apply(rho),
            a @ rho @ a.conj().T - (ada @ rho + rho @ ada) / 2,
            atol=1e-12,
        )
        np.testing.assert_allclose(hamiltonian_part(h, DICKE3).apply(rho), -1j * (h @ rho - rho @ h), atol=1e-12)


def test_generators_preserve_hermiticity(rng):
    for _ in range(20):
        alpha, lambda_ = rng.uniform(-2, 2, size=2)
        p = ModelParams(alpha=alpha, lambda_=lambda_, gamma1=0.05, gamma2=0.1)
        generator = feedback_drift_generator(p, PRODUCT4)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        probe = a + a.conj().T
        out = generator.apply(probe)
        np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def _singlet_population(rho: DensityMatrix) -> float:
    s = singlet()
    return float((s.conj() @ rho.data @ s).real)


@pytest.mark.parametrize(("gamma_i", "drifts"), [(0.0, False), (0.05, True)])
def test_individual_decay_moves_singlet_population(gamma_i, drifts):
    sym = np.array([0, 1, 1, 0]) / np.sqrt(2)
    start = DensityMatrix(data=0.5 * np.outer(sym, sym) + 0.5 * np.outer(singlet(), singlet().conj()), basis=PRODUCT4)
    generator = unmodulated_generator(ModelParams(alpha=0.38, gamma1=gamma_i, gamma2=gamma_i), PRODUCT4)
    final = propagate(generator, start, 2.0, 1e-3, stride=2000).final
    drift = abs(_singlet_population(final) - 0.5)
    if drifts:
        assert drift > 1e-3
    else:
        assert drift < 1e-10


def test_partial_trace_matches_index_contraction(rng):
    n_fock = 4
    basis = cavity_joint(n_fock, DICKE3)
    ops = collective_ops(DICKE3)
    b = annihilation(n_fock)
    nu = random_density(rng, basis.dim)
    emitted = tensor_with_cavity(ops.jminus, b.conj().T, n_fock) @ nu @ tensor_with_cavity(ops.jplus, b, n_fock)
    emitted = (emitted + emitted.conj().T) / 2
    emitted /= np.trace(emitted).real

    expected = np.zeros((3, 3), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            for k in range(n_fock):
                expected[i, j] += emitted[i * n_fock + k, j * n_fock + k]
    reduced = partial_trace_cavity(DensityMatrix(data=emitted, basis=basis))
    np.testing.assert_allclose(reduced.data, expected, atol=1e-12)
