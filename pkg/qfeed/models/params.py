from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from ..exceptions import ParameterError

__all__ = ("ModelParams",)


class ModelParams(BaseModel):
    """Physical parameters in units where the collective decay rate sets the time scale."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    alpha: float = 0.0
    lambda_: float = Field(0.0, alias="lambda")
    gamma: float = Field(1.0, gt=0)
    gamma1: float = Field(0.0, ge=0)
    gamma2: float = Field(0.0, ge=0)
    eta: float = Field(1.0, gt=0, le=1)

    # cavity model only
    g: float | None = Field(None, ge=0)
    gamma_p: float | None = Field(None, gt=0)
    alpha0: float | None = None

    @property
    def has_individual_decay(self) -> bool:
        return self.gamma1 > 0 or self.gamma2 > 0

    @property
    def effective_alpha(self) -> float:
        """The qubit drive g·α₀/(2γ_p) left after displacing the cavity mode."""
        g, gamma_p, alpha0 = self._cavity_triplet()
        return g * alpha0 / (2 * gamma_p)

    @property
    def effective_gamma(self) -> float:
        """The collective decay rate g²/γ_p left after eliminating the cavity mode."""
        g, gamma_p, _ = self._cavity_triplet()
        return g * g / gamma_p

    def _cavity_triplet(self) -> tuple[float, float, float]:
        if self.g is None or self.gamma_p is None or self.alpha0 is None:
            raise ParameterError("g/gamma_p/alpha0", None, "the cavity model needs all three")
        return self.g, self.gamma_p, self.alpha0

    def require_cavity_regime(self) -> None:
        """Checks the adiabatic validity heuristic γ_p ≥ 10·g.

        Raises:
            ParameterError: If the cavity parameters are missing or the mode is not heavily damped.
        """
        g, gamma_p, _ = self._cavity_triplet()
        if gamma_p < 10 * g:
            raise ParameterError("gamma_p", gamma_p, f"must be at least 10*g = {10 * g:g}")

    def replace(self, **changes: float | None) -> ModelParams:
        """Returns a copy with some fields changed, validating the result."""
        data = self.model_dump()
        data.update(changes)
        return ModelParams.model_validate(data)
