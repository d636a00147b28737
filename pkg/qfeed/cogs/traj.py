from __future__ import annotations

import math

from ..app import Cog
from ..command import command
from ..context import Context
from ..exceptions import NotPSDError, NumericalError, UsageError
from ..generators import feedback_drift_generator, propagate, steady_state, unmodulated_generator
from ..linalg import trace_distance
from ..metrics import concurrence, purity_r2
from ..models.states import DICKE3, DensityMatrix
from ..operators import collective_ops
from ..trajectories import run_ensemble, run_trajectory, trajectory_table
from ._shared import density_record, model_params, resolve_basis

INITIAL_KETS = {
    "gg": {"dicke3": [0, 0, 1], "product4": [1, 0, 0, 0]},
    "ee": {"dicke3": [1, 0, 0], "product4": [0, 0, 0, 1]},
}


def _concurrence(rho: DensityMatrix) -> float:
    # conditioned Euler states may leave the positive cone slightly
    try:
        return concurrence(rho)
    except NotPSDError:
        return math.nan


class TrajCog(Cog):
    @command
    async def traj(
        self,
        ctx: Context,
        alpha: float = 0.4,
        lambda_: float = -0.8,
        gamma: float = 1.0,
        gamma1: float = 0.0,
        gamma2: float = 0.0,
        eta: float = 1.0,
        seed: int = 0,
        n_trajectories: int = 1,
        t_final: float = 20.0,
        dt: float = 1e-3,
        stride: int = 100,
        burn_in: float = 0.0,
        feedback: bool = True,
        scheme: str = "euler",
        initial: str = "gg",
        basis: str | None = None,
        save_trajectories: bool = False,
        include_state: bool = False,
    ) -> None:
        """Conditioned trajectories and their ensemble mean against deterministic propagation."""
        if n_trajectories < 1:
            raise UsageError("n_trajectories must be at least 1")
        if initial not in INITIAL_KETS:
            raise UsageError(f"initial must be one of {', '.join(INITIAL_KETS)}")
        p = model_params(
            alpha=alpha, lambda_=lambda_, gamma=gamma, gamma1=gamma1, gamma2=gamma2, eta=eta
        )
        label = resolve_basis(basis, p)
        rho0 = DensityMatrix.from_ket(INITIAL_KETS[initial][str(label)], label)

        if save_trajectories:
            for k in range(n_trajectories):
                record = await ctx.run(
                    run_trajectory, rho0, p, t_final, dt, seed + k, feedback=feedback, scheme=scheme
                )
                header, rows = trajectory_table(record, include_state=include_state)
                await ctx.write_csv(f"trajectory_{seed + k}.csv", header, rows)

        ensemble = await ctx.run(
            run_ensemble,
            rho0,
            p,
            t_final,
            dt,
            n_trajectories,
            seed,
            feedback=feedback,
            scheme=scheme,
            stride=stride,
            burn_in=burn_in,
            jobs=ctx.jobs,
        )
        generator = feedback_drift_generator(p, label) if feedback else unmodulated_generator(p, label)
        reference = await ctx.run(propagate, generator, rho0, t_final, dt, stride=stride)

        ee_index = 0 if label == DICKE3 else label.dim - 1
        rows = [
            [
                t,
                _concurrence(mean),
                purity_r2(mean),
                mean.data[ee_index, ee_index].real,
                _concurrence(exact),
                trace_distance(mean.data, exact.data),
            ]
            for t, mean, exact in zip(ensemble.times, ensemble.mean_states, reference.states, strict=True)
        ]
        await ctx.write_csv(
            "ensemble.csv",
            ["t", "concurrence", "r2", "rho_ee", "concurrence_deterministic", "trace_distance"],
            rows,
        )

        summary: dict[str, object] = {
            "n_trajectories": n_trajectories,
            "n_aborted": len(ensemble.aborted_seeds),
            "aborted_seeds": ensemble.aborted_seeds,
            "seed": seed,
            "dt": dt,
            "t_final": t_final,
            "final_concurrence": _concurrence(ensemble.final),
            "final_trace_distance": trace_distance(ensemble.final.data, reference.final.data),
            "mean_photocurrent": ensemble.mean_photocurrent,
            "min_eigenvalue": ensemble.min_eigenvalue,
            "final_mean_state": density_record(ensemble.final),
        }
        try:
            rho_ss = steady_state(generator)
        except NumericalError as e:
            summary["steady_state_error"] = str(e)
        else:
            jx = collective_ops(label).jx
            summary["steady_concurrence"] = concurrence(rho_ss)
            summary["expected_photocurrent"] = math.sqrt(p.gamma) * rho_ss.expectation(jx).real
        await ctx.write_json("ensemble_summary.json", summary)
