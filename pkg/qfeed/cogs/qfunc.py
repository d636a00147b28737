from __future__ import annotations

import numpy as np

from ..app import Cog
from ..command import command
from ..context import Context
from ..generators import feedback_drift_generator, steady_state
from ..qfunc import density_matrix_moduli, q_cross_sections, q_grid, qgrid_table, reference_state
from ._shared import density_record, model_params

SEPARABLE_LABELS = ("ee", "eg", "ge", "gg")


class QFuncCog(Cog):
    @command
    async def qfunc(
        self,
        ctx: Context,
        state: str = "steady",
        alpha: float = 0.4,
        lambda_: float = -0.8,
        gamma: float = 1.0,
        n_theta: int = 181,
        n_phi: int = 360,
        n_section: int = 360,
    ) -> None:
        """Q function of a reference state or of the feedback steady state on a (theta, phi) grid."""
        if state == "steady":
            p = model_params(alpha=alpha, lambda_=lambda_, gamma=gamma)
            rho = await ctx.run(steady_state, feedback_drift_generator(p))
        else:
            rho = reference_state(state)

        grid = await ctx.run(q_grid, rho, n_theta, n_phi)
        header, rows = qgrid_table(grid)
        await ctx.write_csv("qgrid.csv", header, rows)

        moduli = density_matrix_moduli(rho)
        await ctx.write_csv(
            "moduli.csv",
            ["row", *SEPARABLE_LABELS],
            [[label, *moduli[i].tolist()] for i, label in enumerate(SEPARABLE_LABELS)],
        )

        sections = q_cross_sections(rho, n_section)
        names = ["angle", "xz", "yz", "xy"]
        await ctx.write_csv(
            "cross_sections.csv", names, np.column_stack([sections[name] for name in names]).tolist()
        )

        i, j = np.unravel_index(int(np.argmax(grid.q)), grid.q.shape)
        await ctx.write_json(
            "qfunc_summary.json",
            {
                "state": state,
                "normalization": grid.normalization,
                "q_max": float(grid.q[i, j]),
                "theta_at_max": float(grid.theta[i]),
                "phi_at_max": float(grid.phi[j]),
                "rho_ee": float(rho.data[0, 0].real),
                "rho": density_record(rho),
            },
        )
