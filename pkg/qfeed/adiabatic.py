"""Checks the collective-decay model against the cavity it was derived from."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from .generators import (
    cavity_generator,
    mean_photon_number,
    partial_trace_cavity,
    steady_state,
    top_fock_population,
    unmodulated_generator,
)
from .linalg import trace_distance
from .metrics import concurrence
from .models.params import ModelParams
from .models.records import AdiabaticRow

if TYPE_CHECKING:
    from collections.abc import Sequence

__all__ = ("adiabatic_row", "adiabatic_table", "compare_adiabatic")


TOP_FOCK_LIMIT = 1e-8


def adiabatic_row(ratio: float, *, g: float = 1.0, alpha: float = 0.38, n_fock: int = 6) -> AdiabaticRow:
    """Compares the reduced cavity steady state with the eliminated model at γ_p = ratio·g.

    The eliminated model has γ_eff = g²/γ_p and is driven at α·γ_eff, so every
    ratio sits at the same point in units of γ_eff. The cavity drive α₀ = 2αg
    produces that same qubit drive after displacement.
    """
    gamma_p = ratio * g
    gamma_eff = g * g / gamma_p
    cavity = ModelParams(g=g, gamma_p=gamma_p, alpha0=2 * alpha * g)
    eliminated = ModelParams(alpha=alpha * gamma_eff, gamma=gamma_eff)

    joint = steady_state(cavity_generator(cavity, n_fock))
    reduced = partial_trace_cavity(joint)
    target = steady_state(unmodulated_generator(eliminated))

    top = top_fock_population(joint)
    if top > TOP_FOCK_LIMIT:
        logging.warning("Photon-number truncation at n_fock = %d leaves %.3e in the top level", n_fock, top)
    return AdiabaticRow(
        ratio=ratio,
        g=g,
        gamma_p=gamma_p,
        trace_distance=trace_distance(reduced.data, target.data),
        top_fock_population=top,
        mean_photon_number=mean_photon_number(joint),
        concurrence_cavity=concurrence(reduced),
        concurrence_eliminated=concurrence(target),
    )


def compare_adiabatic(
    ratios: Sequence[float], *, g: float = 1.0, alpha: float = 0.38, n_fock: int = 6
) -> list[AdiabaticRow]:
    """Runs :func:`adiabatic_row` for each ratio γ_p/g, in the given order."""
    rows = [adiabatic_row(ratio, g=g, alpha=alpha, n_fock=n_fock) for ratio in ratios]
    for row in rows:
        logging.info("gamma_p/g = %g: trace distance %.3e", row.ratio, row.trace_distance)
    return rows


def adiabatic_table(rows: Sequence[AdiabaticRow]) -> tuple[list[str], list[list[float]]]:
    header = list(AdiabaticRow.model_fields)
    return header, [[getattr(row, name) for name in header] for row in rows]
