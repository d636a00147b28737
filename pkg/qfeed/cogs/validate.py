from __future__ import annotations

from ..adiabatic import adiabatic_table, compare_adiabatic
from ..app import Cog
from ..bloch import consistency_report, report_table
from ..command import command
from ..context import Context
from ..exceptions import ParameterError, UsageError
from ..utils import parse_grid
from ._shared import model_params


class ValidateCog(Cog):
    @command
    async def validate(
        self,
        ctx: Context,
        ratios: str = "10,30,100",
        g: float = 1.0,
        alpha: float = 0.38,
        n_fock: int = 6,
        bloch_alphas: str = "-1:1:0.25",
        bloch_lambdas: str = "-1:1:0.25",
        gamma: float = 1.0,
        experimental: bool = False,
    ) -> None:
        """Adiabatic-elimination check and the reduced-equation consistency report."""
        try:
            ratio_values = parse_grid(ratios)
            alphas = parse_grid(bloch_alphas)
            lambdas = parse_grid(bloch_lambdas)
        except ParameterError as e:
            raise UsageError(str(e)) from e

        adiabatic = await ctx.run(compare_adiabatic, ratio_values, g=g, alpha=alpha, n_fock=n_fock)
        header, rows = adiabatic_table(adiabatic)
        await ctx.write_csv("adiabatic.csv", header, rows)

        grid = [model_params(alpha=a, lambda_=lam, gamma=gamma) for a in alphas for lam in lambdas]
        report = await ctx.run(consistency_report, grid, experimental=experimental, jobs=ctx.jobs)
        header, rows = report_table(report)
        await ctx.write_csv("bloch_report.csv", header, rows)

        distances = [row.trace_distance for row in adiabatic]
        await ctx.write_json(
            "validate_summary.json",
            {
                "adiabatic_trace_distances": distances,
                "adiabatic_monotone": all(b < a for a, b in zip(distances, distances[1:], strict=False)),
                "bloch_points": len(report),
                "bloch_completed": sum(1 for row in report if row.error is None),
                "bloch_diverged": sum(1 for row in report if row.diverged),
            },
        )
