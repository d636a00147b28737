from __future__ import annotations

from typing import Any

from ..models.params import ModelParams
from ..models.states import DICKE3, PRODUCT4, BasisLabel, DensityMatrix, basis_from_name

__all__ = ("density_record", "model_params", "resolve_basis")


def model_params(**values: Any) -> ModelParams:
    """Builds parameters from command options, dropping the ones left unset."""
    return ModelParams.model_validate({k: v for k, v in values.items() if v is not None})


def resolve_basis(name: str | None, p: ModelParams) -> BasisLabel:
    """The named basis, or product4 when individual decay is on and dicke3 otherwise."""
    if name is None:
        return PRODUCT4 if p.has_individual_decay else DICKE3
    return basis_from_name(name)


def density_record(rho: DensityMatrix) -> dict[str, Any]:
    return {
        "basis": str(rho.basis),
        "real": rho.data.real.tolist(),
        "imag": rho.data.imag.tolist(),
    }
