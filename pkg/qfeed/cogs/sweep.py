from __future__ import annotations

from ..app import Cog
from ..command import command
from ..context import Context
from ..exceptions import ParameterError, UsageError
from ..metrics import summarize_sweep, sweep, sweep_table
from ..utils import parse_grid
from ._shared import model_params, resolve_basis


def _grid_option(name: str, text: str) -> list[float]:
    try:
        values = parse_grid(text)
    except ParameterError as e:
        raise UsageError(f"{name}: {e}") from e
    if not values:
        raise UsageError(f"{name} must not be empty")
    return values


class SweepCog(Cog):
    @command
    async def sweep(
        self,
        ctx: Context,
        alphas: str = "-1:1:0.02",
        lambdas: str = "-1.5:0.5:0.02",
        gamma: float = 1.0,
        gamma1: float = 0.0,
        gamma2: float = 0.0,
        basis: str | None = None,
    ) -> None:
        """Concurrence and purity over an (alpha, lambda) grid, plus the argmax summary.

        Grids are ``start:stop:step`` (inclusive) or comma-separated values.
        """
        alpha_values = _grid_option("alphas", alphas)
        lambda_values = _grid_option("lambdas", lambdas)
        p = model_params(gamma=gamma, gamma1=gamma1, gamma2=gamma2)
        label = resolve_basis(basis, p)

        rows = await ctx.run(sweep, alpha_values, lambda_values, p, basis=label, jobs=ctx.jobs)
        header, table = sweep_table(rows)
        await ctx.write_csv("sweep.csv", header, table)
        await ctx.write_json("sweep_summary.json", summarize_sweep(rows).model_dump())
