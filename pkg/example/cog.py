from __future__ import annotations

from qfeed import (
    Cog,
    Context,
    ModelParams,
    command,
    concurrence,
    feedback_drift_generator,
    mems_concurrence,
    purity_r2,
    steady_state,
)


class FrontierCog(Cog):
    @command
    async def frontier(self, ctx: Context, alpha: float = 0.4, lambda_: float = -0.8) -> None:
        """How far the steady state sits below the maximally entangled mixed states."""
        p = ModelParams(alpha=alpha, lambda_=lambda_)
        rho = steady_state(feedback_drift_generator(p))
        c, r2 = concurrence(rho), purity_r2(rho)
        await ctx.write_json(
            "frontier.json",
            {"concurrence": c, "r2": r2, "frontier_concurrence": mems_concurrence(r2)},
        )
