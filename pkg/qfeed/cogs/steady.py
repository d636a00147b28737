from __future__ import annotations

from ..app import Cog
from ..command import command
from ..context import Context
from ..generators import feedback_drift_generator, steady_residual, steady_state
from ..metrics import concurrence, linear_entropy, purity_r2, von_neumann_entropy
from ..operators import collective_ops
from ._shared import density_record, model_params, resolve_basis


class SteadyCog(Cog):
    @command
    async def steady(
        self,
        ctx: Context,
        alpha: float = 0.38,
        lambda_: float = 0.0,
        gamma: float = 1.0,
        gamma1: float = 0.0,
        gamma2: float = 0.0,
        eta: float = 1.0,
        basis: str | None = None,
    ) -> None:
        """Steady state of the feedback master equation with its entanglement and purity."""
        p = model_params(
            alpha=alpha, lambda_=lambda_, gamma=gamma, gamma1=gamma1, gamma2=gamma2, eta=eta
        )
        label = resolve_basis(basis, p)
        generator = feedback_drift_generator(p, label)
        rho = await ctx.run(steady_state, generator)
        ops = collective_ops(label)

        await ctx.write_json(
            "steady.json",
            {
                "params": p.model_dump(by_alias=True),
                "rho": density_record(rho),
                "concurrence": concurrence(rho),
                "r2": purity_r2(rho),
                "linear_entropy": linear_entropy(rho),
                "von_neumann_entropy": von_neumann_entropy(rho),
                "steady_residual": steady_residual(generator, rho),
                "min_eigenvalue": rho.min_eigenvalue,
                "jx": rho.expectation(ops.jx).real,
                "jy": rho.expectation(ops.jy).real,
                "jz": rho.expectation(ops.jz).real,
            },
        )
