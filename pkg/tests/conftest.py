from __future__ import annotations

import asyncio
from typing import TYPE_CHECKING

import numpy as np
import pytest

from qfeed import App, DensityMatrix, ModelParams
from qfeed.models.states import DICKE3, PRODUCT4

if TYPE_CHECKING:
    from pathlib import Path

    from qfeed.models.states import BasisLabel


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    """A random density matrix of the given rank (full rank by default)."""
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(rng: np.random.Generator, basis: BasisLabel = PRODUCT4) -> DensityMatrix:
    return DensityMatrix(data=random_density(rng, basis.dim), basis=basis)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def ground() -> DensityMatrix:
    """|gg⟩ in the Dicke basis."""
    return DensityMatrix.from_ket([0, 0, 1], DICKE3)


@pytest.fixture
def no_feedback_optimum() -> ModelParams:
    return ModelParams(alpha=0.38, lambda_=0.0)


@pytest.fixture
def feedback_optimum() -> ModelParams:
    return ModelParams(alpha=0.4, lambda_=-0.8)


@pytest.fixture
def run_cli(tmp_path: Path):
    """Runs ``qfeed`` with the given arguments in a fresh output directory."""

    def run(*argv: str, app: App | None = None) -> int:
        return asyncio.run((app or App()).run([*argv, "--out", str(tmp_path), "--quiet"]))

    return run
