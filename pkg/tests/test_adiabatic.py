from __future__ import annotations

import pytest

from qfeed import ParameterError, adiabatic_row, adiabatic_table, compare_adiabatic


def test_elimination_improves_with_damping():
    rows = compare_adiabatic([10, 30, 100])
    distances = [row.trace_distance for row in rows]
    assert distances == sorted(distances, reverse=True)
    assert distances[0] == pytest.approx(1.31e-3, rel=0.05)
    assert distances[-1] < 0.02
    assert distances[-1] == pytest.approx(1.36e-5, rel=0.05)


def test_row_contents():
    row = adiabatic_row(30)
    assert row.gamma_p == 30
    assert row.top_fock_population < 1e-8
    assert 0 < row.mean_photon_number < 0.1
    assert row.concurrence_eliminated == pytest.approx(0.1124, abs=5e-3)
    assert row.concurrence_cavity == pytest.approx(row.concurrence_eliminated, abs=1e-2)


def test_rejects_weak_damping():
    with pytest.raises(ParameterError):
        adiabatic_row(5)


def test_table_columns():
    header, table = adiabatic_table(compare_adiabatic([10]))
    assert header[:3] == ["ratio", "g", "gamma_p"]
    assert "trace_distance" in header
    assert len(table) == 1
    assert len(table[0]) == len(header)
