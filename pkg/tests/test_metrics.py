from __future__ import annotations

import math

import numpy as np
import pytest
from conftest import random_density, random_unitary

from qfeed import (
    BasisError,
    DensityMatrix,
    ModelParams,
    ParameterError,
    bell_state,
    concurrence,
    feedback_drift_generator,
    linear_entropy,
    mems_concurrence,
    mems_r2,
    purity_r2,
    singlet,
    spin_flip,
    steady_state,
    summarize_sweep,
    sweep,
    sweep_point,
    sweep_table,
    von_neumann_entropy,
)
from qfeed.models.states import DICKE3, PRODUCT4, QUBIT
from qfeed.utils import csv_text, grid


def direct_concurrence(rho: np.ndarray) -> float:
    """Square roots of the non-Hermitian ρρ̃ spectrum, sorted in decreasing order."""
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    w = np.linalg.eigvals(rho @ yy @ rho.conj() @ yy)
    roots = np.sort(np.sqrt(np.clip(w.real, 0, None)))[::-1]
    return max(0.0, roots[0] - roots[1] - roots[2] - roots[3])


@pytest.mark.parametrize("name", ["phi-plus", "phi-minus", "psi-plus", "psi-minus"])
def test_bell_states_are_maximally_entangled(name):
    rho = bell_state(name)
    assert concurrence(rho) == pytest.approx(1.0, abs=1e-9)
    assert purity_r2(rho) == pytest.approx(1.0)


def test_separable_states(ground):
    assert concurrence(ground) == pytest.approx(0.0, abs=1e-12)
    assert concurrence(DensityMatrix.maximally_mixed(PRODUCT4)) == pytest.approx(0.0, abs=1e-12)


def test_partially_entangled_pure_state(rng):
    assert concurrence(DensityMatrix.from_ket([0, 0.6, 0.8, 0], PRODUCT4)) == pytest.approx(0.96, abs=1e-12)
    for _ in range(100):
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        norm = math.hypot(abs(a), abs(b))
        a, b = a / norm, b / norm
        # a|eg⟩ + b|ge⟩
        rho = DensityMatrix.from_ket([0, b, a, 0], PRODUCT4)
        assert concurrence(rho) == pytest.approx(2 * abs(a * b), abs=1e-12)


def test_symmetric_dicke_state():
    # |sym⟩ is the psi-plus Bell state
    rho = DensityMatrix.from_ket([0, 1, 0], DICKE3)
    assert concurrence(rho) == pytest.approx(1.0, abs=1e-9)


def test_against_non_hermitian_route(rng):
    for _ in range(1000):
        data = random_density(rng, 4, int(rng.integers(1, 5)))
        rho = DensityMatrix(data=data, basis=PRODUCT4)
        assert concurrence(rho) == pytest.approx(direct_concurrence(data), abs=1e-9)


def test_local_unitary_invariance(rng):
    rho = DensityMatrix(data=random_density(rng, 4, 2), basis=PRODUCT4)
    local = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
    rotated = DensityMatrix(data=local @ rho.data @ local.conj().T, basis=PRODUCT4)
    assert concurrence(rotated) == pytest.approx(concurrence(rho), abs=1e-9)


def test_spin_flip_needs_product_basis(ground):
    with pytest.raises(BasisError):
        spin_flip(ground)
    with pytest.raises(BasisError):
        concurrence(DensityMatrix.maximally_mixed(QUBIT))


def test_purity_landmarks(ground):
    assert purity_r2(ground) == pytest.approx(1.0)
    assert purity_r2(DensityMatrix.maximally_mixed(PRODUCT4)) == pytest.approx(0.0, abs=1e-15)
    assert purity_r2(DensityMatrix.maximally_mixed(DICKE3)) == pytest.approx(1 / 9)
    assert linear_entropy(ground) == pytest.approx(0.0, abs=1e-15)


def test_von_neumann_entropy(ground):
    assert von_neumann_entropy(ground) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(DensityMatrix.maximally_mixed(PRODUCT4)) == pytest.approx(math.log(4))


@pytest.mark.parametrize(("c", "r2"), [(0.0, 0.0), (0.5, 0.1875), (2 / 3, 1 / 3), (0.8, 0.52), (1.0, 1.0)])
def test_mems_frontier(c, r2):
    assert mems_r2(c) == pytest.approx(r2)
    assert mems_concurrence(r2) == pytest.approx(c)


def test_mems_rejects_out_of_range():
    with pytest.raises(ParameterError):
        mems_r2(1.2)


def test_steady_concurrence_without_feedback(no_feedback_optimum):
    rho = steady_state(feedback_drift_generator(no_feedback_optimum))
    assert concurrence(rho) == pytest.approx(0.1124, abs=5e-3)
    assert purity_r2(rho) == pytest.approx(0.945, abs=5e-3)


def test_steady_concurrence_with_feedback(feedback_optimum):
    rho = steady_state(feedback_drift_generator(feedback_optimum))
    assert concurrence(rho) == pytest.approx(0.303, abs=5e-3)
    assert purity_r2(rho) == pytest.approx(0.335, abs=5e-3)
    # feedback beats the best unmodulated point
    assert concurrence(rho) > 0.2


def test_sweep_point_records_failure():
    row = sweep_point(0.4, -0.8, ModelParams(), PRODUCT4)
    assert not row.ok
    assert math.isnan(row.concurrence)
    assert "not unique" in row.error


def test_sweep_order_and_symmetry():
    rows = sweep([-0.4, 0.0, 0.4], [0.0, -0.8], ModelParams())
    assert [(row.alpha, row.lambda_) for row in rows] == [
        (-0.4, 0.0),
        (-0.4, -0.8),
        (0.0, 0.0),
        (0.0, -0.8),
        (0.4, 0.0),
        (0.4, -0.8),
    ]
    assert all(row.ok for row in rows)
    assert rows[0].concurrence == pytest.approx(rows[4].concurrence, abs=1e-10)
    assert rows[1].concurrence == pytest.approx(rows[5].concurrence, abs=1e-10)
    assert rows[2].concurrence == pytest.approx(0.0, abs=1e-12)
    assert all(row.steady_residual < 1e-10 for row in rows)


def test_sweep_rejects_empty_grid():
    with pytest.raises(ParameterError):
        sweep([], [0.0], ModelParams())


def test_sweep_is_independent_of_jobs():
    alphas = [0.2, 0.4]
    lambdas = [-0.8, -0.5, 0.0]
    serial = sweep(alphas, lambdas, ModelParams())
    parallel = sweep(alphas, lambdas, ModelParams(), jobs=2)
    assert csv_text(*sweep_table(parallel)) == csv_text(*sweep_table(serial))


def test_summary_and_table():
    p = ModelParams()
    rows = [sweep_point(0.4, -0.8, p), sweep_point(0.4, -0.5, p, PRODUCT4), sweep_point(0.4, 0.0, p)]
    summary = summarize_sweep(rows)
    assert summary.n_points == 3
    assert summary.n_failed == 1
    assert summary.best_lambda == -0.8
    assert summary.best_concurrence == pytest.approx(0.303, abs=5e-3)
    assert summary.mems_dominated

    header, table = sweep_table(rows)
    assert header[0:4] == ["alpha", "lambda", "concurrence", "r2"]
    assert header[-1] == "error"
    failed = table[1]
    assert math.isnan(failed[2])
    assert "," not in failed[-1]
    assert table[0][-1] is None


def test_summary_of_failed_sweep():
    summary = summarize_sweep(sweep([0.4], [-0.8, -0.5], ModelParams(), basis=PRODUCT4))
    assert summary.best_alpha is None
    assert summary.mems_dominated


@pytest.mark.parametrize("gamma_i", [1e-3, 0.05])
def test_individual_decay_fills_singlet(gamma_i):
    # individual decay both feeds and empties the singlet at rate γᵢ, so its share
    # does not vanish as γᵢ → 0
    p = ModelParams(alpha=0.4, lambda_=-0.8, gamma1=gamma_i, gamma2=gamma_i)
    rows = sweep([0.4], [-0.8], p, basis=PRODUCT4)
    assert rows[0].ok
    assert rows[0].concurrence == 0.0
    rho = steady_state(feedback_drift_generator(p, PRODUCT4))
    s = singlet()
    assert (s.conj() @ rho.data @ s).real > 0.2


@pytest.mark.slow
def test_full_feedback_plane():
    rows = sweep(grid(-1, 1, 0.02), grid(-1.5, 0.5, 0.02), ModelParams(), jobs=4)
    assert len(rows) == 101 * 101
    summary = summarize_sweep(rows)
    assert summary.best_concurrence == pytest.approx(0.3042, abs=1e-3)
    assert abs(summary.best_alpha) == pytest.approx(0.4)
    assert summary.best_lambda == pytest.approx(-0.82)
    assert summary.mems_dominated
