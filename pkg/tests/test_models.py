from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError

from qfeed import (
    BasisError,
    BlochState,
    DensityMatrix,
    DimensionError,
    ModelParams,
    NotHermitianError,
    ParameterError,
    RunConfig,
    Superop,
)
from qfeed.models.states import DICKE3, PRODUCT4, QUBIT, BasisLabel, BasisTag, basis_from_name, cavity_joint
from qfeed.utils import csv_text, format_number, grid, parse_grid


def test_params_alias_and_defaults():
    p = ModelParams.model_validate({"alpha": 0.4, "lambda": -0.8})
    assert p.lambda_ == -0.8
    assert p.gamma == 1.0
    assert not p.has_individual_decay
    assert p.model_dump(by_alias=True)["lambda"] == -0.8
    assert ModelParams(gamma1=0.1).has_individual_decay


@pytest.mark.parametrize("changes", [{"gamma": 0.0}, {"eta": 1.5}, {"eta": 0.0}, {"gamma1": -0.1}])
def test_params_validation(changes):
    with pytest.raises(ValidationError):
        ModelParams(**changes)


def test_params_replace_validates():
    p = ModelParams(alpha=0.4)
    q = p.replace(lambda_=-0.8)
    assert (q.alpha, q.lambda_) == (0.4, -0.8)
    assert p.lambda_ == 0.0
    with pytest.raises(ValidationError):
        p.replace(gamma=-1.0)


def test_cavity_parameters():
    p = ModelParams(g=1.0, gamma_p=20.0, alpha0=0.76)
    assert p.effective_alpha == pytest.approx(0.019)
    assert p.effective_gamma == pytest.approx(0.05)
    p.require_cavity_regime()
    with pytest.raises(ParameterError):
        ModelParams().effective_gamma  # noqa: B018


def test_basis_labels():
    assert DICKE3.dim == 3
    assert PRODUCT4.dim == 4
    assert QUBIT.dim == 2
    joint = cavity_joint(5, PRODUCT4)
    assert joint.dim == 20
    assert joint.qubit_label == PRODUCT4
    assert str(joint) == "cavity(product4, n_fock=5)"
    assert basis_from_name("dicke3") == DICKE3
    with pytest.raises(ParameterError):
        basis_from_name("qubit")
    with pytest.raises(ValidationError):
        BasisLabel(tag=BasisTag.DICKE3, n_fock=3)
    with pytest.raises(ParameterError):
        cavity_joint(0)


def test_density_matrix_validation():
    with pytest.raises(ParameterError):
        DensityMatrix(data=np.eye(3), basis=DICKE3)
    with pytest.raises(NotHermitianError):
        DensityMatrix(data=[[0.5, 0.3], [0.0, 0.5]], basis=QUBIT)
    with pytest.raises(DimensionError):
        DensityMatrix(data=np.eye(4) / 4, basis=DICKE3)


def test_density_matrix_is_read_only():
    rho = DensityMatrix.maximally_mixed(DICKE3)
    with pytest.raises(ValueError, match="read-only"):
        rho.data[0, 0] = 1


def test_density_matrix_helpers():
    rho = DensityMatrix.from_ket([1, 1j], QUBIT)
    assert rho.purity == pytest.approx(1.0)
    assert rho.min_eigenvalue == pytest.approx(0.0, abs=1e-15)
    assert rho.expectation(np.diag([1, -1])) == pytest.approx(0.0)
    assert DensityMatrix.maximally_mixed(PRODUCT4).purity == pytest.approx(0.25)


def test_superop_arithmetic():
    identity = Superop(matrix=np.eye(9), basis=DICKE3)
    doubled = identity + 1.0 * identity
    np.testing.assert_allclose(doubled.apply(np.eye(3) / 3), 2 * np.eye(3) / 3)
    assert Superop.zero(DICKE3).is_trace_preserving()
    assert not identity.is_trace_preserving()
    with pytest.raises(BasisError):
        identity + Superop.zero(PRODUCT4)
    with pytest.raises(DimensionError):
        Superop(matrix=np.eye(4), basis=DICKE3)


def test_bloch_state_rejects_non_finite():
    with pytest.raises(ValidationError):
        BlochState(x12=math.inf)
    s = BlochState.from_array(np.arange(8.0))
    assert s.z13 == 7.0
    np.testing.assert_array_equal(s.as_array(), np.arange(8.0))


def test_run_config_env():
    config = RunConfig(
        command="traj",
        out="out",
        jobs=2,
        params={"alpha": 0.4, "lambda_": -0.8, "feedback": True, "basis": None, "seed": 3},
    )
    assert config.to_env().splitlines() == [
        "# qfeed traj",
        "alpha=0.40000000000000002",
        "basis=None",
        "feedback=true",
        "lambda=-0.80000000000000004",
        "seed=3",
        "jobs=2",
    ]
    with pytest.raises(ValidationError):
        RunConfig(command="traj", out="out", jobs=0, params={})


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(True) == "1"
    assert format_number(None) == ""
    assert format_number(np.int64(4)) == "4"
    assert format_number(math.nan) == "nan"
    assert csv_text(["a", "b"], [[1, "x"]]) == "a,b\n1,x\n"


def test_grid():
    assert grid(0, 1, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]
    values = grid(-1.5, 0.5, 0.02)
    assert len(values) == 101
    assert -0.5 in values
    assert grid(0.3, 0.3, 0.1) == [0.3]
    with pytest.raises(ParameterError):
        grid(0, 1, 0)
    with pytest.raises(ParameterError):
        grid(1, 0, 0.1)


def test_parse_grid():
    assert parse_grid("0:0.5:0.25") == [0.0, 0.25, 0.5]
    assert parse_grid("10, 30,100") == [10.0, 30.0, 100.0]
    for text in ("", "1:2", "a,b"):
        with pytest.raises(ParameterError):
            parse_grid(text)
