from __future__ import annotations

import math

import numpy as np
import pytest

from qfeed import (
    BlochState,
    ModelParams,
    NonUniqueSteadyStateError,
    SingularDenominatorError,
    analytic_steady,
    bloch,
    consistency_report,
    denominator,
    fixed_point,
    linear_part,
    ode_rhs,
    report_table,
    trial_mapping,
)
from qfeed.models.records import BLOCH_FIELDS
from qfeed.utils import csv_text

ORIGIN = ModelParams()


def test_constant_terms_at_zero_state():
    rhs = ode_rhs(ORIGIN, BlochState())
    assert rhs.z12 == pytest.approx(-2 / 3)
    assert rhs.z13 == pytest.approx(-4 / 3)
    assert rhs.x12 == 0

    # the stray -2λ in the x12 equation
    assert ode_rhs(ModelParams(lambda_=0.5), BlochState()).x12 == pytest.approx(-1.0)


def test_equations_are_affine(rng):
    p = ModelParams(alpha=0.3, lambda_=-0.2, gamma=1.4)
    s1 = rng.normal(size=8)
    s2 = rng.normal(size=8)
    m, c = linear_part(p)
    zero = ode_rhs(p, BlochState()).as_array()
    np.testing.assert_allclose(zero, c)

    combined = ode_rhs(p, BlochState.from_array(s1 + 2 * s2)).as_array() - zero
    separate = (ode_rhs(p, BlochState.from_array(s1)).as_array() - zero) + 2 * (
        ode_rhs(p, BlochState.from_array(s2)).as_array() - zero
    )
    np.testing.assert_allclose(combined, separate, atol=1e-12)
    np.testing.assert_allclose(combined, m @ (s1 + 2 * s2), atol=1e-12)


def test_denominator_landmarks():
    assert denominator(ORIGIN) == pytest.approx(2.0)
    assert denominator(ModelParams(lambda_=-1.0)) == pytest.approx(-36.0)
    assert denominator(ModelParams(alpha=0.38)) == pytest.approx(3.6556, abs=1e-3)


def test_closed_form_at_origin():
    s = analytic_steady(ORIGIN)
    assert s.as_array().tolist() == [0, 0, 0, 0, 0, 0, 0, pytest.approx(1.0)]

    residual = ode_rhs(ORIGIN, s)
    assert residual.z13 == pytest.approx(-8 / 3)
    for name in BLOCH_FIELDS[:-1]:
        assert getattr(residual, name) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize(("alpha", "lambda_"), [(0.4, -0.8), (0.38, 0.0), (-0.7, 0.3)])
def test_closed_form_structure(alpha, lambda_):
    s = analytic_steady(ModelParams(alpha=alpha, lambda_=lambda_))
    assert s.x12 == 0.0
    assert s.x23 == 0.0
    assert s.y13 == 0.0

    mirrored = analytic_steady(ModelParams(alpha=-alpha, lambda_=lambda_))
    assert mirrored.x13 == pytest.approx(s.x13)
    assert mirrored.z12 == pytest.approx(s.z12)
    assert mirrored.z13 == pytest.approx(s.z13)
    assert mirrored.y12 == pytest.approx(-s.y12)
    assert mirrored.y23 == pytest.approx(-s.y23)


def test_closed_form_z12_is_half_x13():
    s = analytic_steady(ModelParams(alpha=0.25, lambda_=-0.3))
    assert s.z12 == pytest.approx(s.x13 / 2)


def test_fixed_point_at_origin():
    final, diverged = fixed_point(ORIGIN)
    assert not diverged
    np.testing.assert_allclose(final[:6], 0.0, atol=1e-12)
    assert final[6] == pytest.approx(-4 / 7, abs=1e-9)
    assert final[7] == pytest.approx(-9 / 7, abs=1e-9)


def test_fixed_point_flags_divergence():
    # y12 grows like exp(2γt) once anything feeds it
    _, diverged = fixed_point(ModelParams(alpha=0.5))
    assert diverged


def test_trial_mapping_of_ground(ground):
    s = trial_mapping(ground)
    assert s.z13 == pytest.approx(1.0)
    assert s.z12 == pytest.approx(0.0)
    assert s.x12 == s.y12 == 0.0


def test_report_covers_grid():
    grid = [ModelParams(alpha=a, lambda_=lam) for a in (-0.5, 0.0, 0.5) for lam in (-0.25, 0.0, 0.25)]
    rows = consistency_report(grid)
    assert [(row.alpha, row.lambda_) for row in rows] == [(p.alpha, p.lambda_) for p in grid]

    origin = rows[4]
    assert origin.error is None
    assert origin.analytic_residual == pytest.approx(8 / 3)
    assert origin.fixedpoint_distance == pytest.approx(16 / 7, abs=1e-9)
    assert not origin.diverged
    assert len(origin.component_residuals) == len(BLOCH_FIELDS)

    header, table = report_table(rows)
    assert header[:5] == ["alpha", "lambda", "analytic_residual", "fixedpoint_distance", "diverged_flag"]
    assert "liouvillian_distance" not in header
    assert len(table) == len(grid)
    assert all(len(line) == len(header) for line in table)


def test_report_is_independent_of_jobs():
    grid = [ModelParams(alpha=a, lambda_=-0.25) for a in (-0.5, 0.0, 0.5)]
    assert csv_text(*report_table(consistency_report(grid, jobs=2))) == csv_text(
        *report_table(consistency_report(grid, jobs=1))
    )


def test_experimental_columns():
    rows = consistency_report([ORIGIN], experimental=True)
    header, table = report_table(rows)
    assert header[-4:] == ["liouvillian_distance", "jx", "jy", "jz"]
    row = rows[0]
    assert row.liouvillian_distance == pytest.approx(0.0, abs=1e-9)
    assert row.jz == pytest.approx(-2.0)
    assert row.jx == pytest.approx(0.0, abs=1e-12)


def test_experimental_records_liouvillian_failure(monkeypatch):
    def degenerate(generator):
        raise NonUniqueSteadyStateError([0.0, 1e-17, 0.3])

    monkeypatch.setattr(bloch, "steady_state", degenerate)
    row = consistency_report([ModelParams(alpha=0.4, lambda_=-0.8)], experimental=True)[0]
    assert row.error is not None
    assert row.liouvillian_distance is None
    assert math.isfinite(row.analytic_residual)


def test_singular_denominator_is_recorded(monkeypatch):
    monkeypatch.setattr(bloch, "denominator", lambda p: 0.0)
    with pytest.raises(SingularDenominatorError):
        analytic_steady(ORIGIN)

    row = consistency_report([ORIGIN])[0]
    assert row.error is not None
    assert math.isnan(row.analytic_residual)
    assert row.component_residuals == ()

    _, table = report_table([row])
    assert len(table[0]) == 6 + len(BLOCH_FIELDS)
