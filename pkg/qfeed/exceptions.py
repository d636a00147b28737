from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .models.records import TrajectoryRecord


class QFeedError(Exception):
    pass


class ContractError(QFeedError):
    pass


class NumericalError(QFeedError):
    pass


class CommandError(QFeedError):
    pass


# contract violations


class NotHermitianError(ContractError):
    def __init__(self, deviation: float) -> None:
        self.deviation = deviation

    def __str__(self) -> str:
        return f"Matrix is not Hermitian: max|M - M^dagger| = {self.deviation:.3e}"


class DimensionError(ContractError):
    def __init__(self, expected: Any, got: Any) -> None:
        self.expected = expected
        self.got = got

    def __str__(self) -> str:
        return f"Dimension mismatch: expected {self.expected}, got {self.got}"


class BasisError(ContractError):
    def __init__(self, expected: Any, got: Any) -> None:
        self.expected = expected
        self.got = got

    def __str__(self) -> str:
        return f"Basis mismatch: expected {self.expected}, got {self.got}"


class ParameterError(ContractError):
    def __init__(self, name: str, value: Any, reason: str) -> None:
        self.name = name
        self.value = value
        self.reason = reason

    def __str__(self) -> str:
        return f"Invalid value {self.value!r} for {self.name}: {self.reason}"


class NegativeQuasiProbabilityError(ContractError):
    def __init__(self, value: float) -> None:
        self.value = value

    def __str__(self) -> str:
        return f"Q function evaluated to {self.value:.3e}, below the -1e-12 tolerance"


# numerical failures


class NotPSDError(NumericalError):
    def __init__(self, eigenvalue: float) -> None:
        self.eigenvalue = eigenvalue

    def __str__(self) -> str:
        return f"Matrix is not positive semidefinite: eigenvalue {self.eigenvalue:.3e}"


class ConvergenceError(NumericalError):
    def __init__(self, residual: float) -> None:
        self.residual = residual

    def __str__(self) -> str:
        return f"Eigensolver failed to converge, residual {self.residual:.3e}"


class SingularMatrixError(NumericalError):
    def __init__(self, pivot: float) -> None:
        self.pivot = pivot

    def __str__(self) -> str:
        return f"Linear system is singular: pivot magnitude {self.pivot:.3e}"


class NonUniqueSteadyStateError(NumericalError):
    def __init__(self, singular_values: Sequence[float]) -> None:
        self.singular_values = list(singular_values)

    def __str__(self) -> str:
        smallest = ", ".join(f"{s:.3e}" for s in self.singular_values[:3])
        return f"Steady state is not unique: smallest singular values of L are {smallest}"


class SingularDenominatorError(NumericalError):
    def __init__(self, value: float) -> None:
        self.value = value

    def __str__(self) -> str:
        return f"Steady-state denominator S = {self.value:.3e} is too close to zero"


class StepSizeError(NumericalError):
    def __init__(self, correction: float, dt: float) -> None:
        self.correction = correction
        self.dt = dt

    def __str__(self) -> str:
        return f"Trace correction {self.correction:.3e} exceeds 0.05 in one step of dt = {self.dt:g}, reduce the step size"


class DivergedStateError(StepSizeError):
    def __init__(self, entry: float, dt: float) -> None:
        super().__init__(entry, dt)
        self.entry = entry

    def __str__(self) -> str:
        return f"Conditioned state diverged: an entry reached {self.entry:.3e} in one step of dt = {self.dt:g}, reduce the step size"


class TrajectoryAbortedError(NumericalError):
    def __init__(self, step: int, record: TrajectoryRecord, e: Exception) -> None:
        self.step = step
        self.record = record
        self.e = e

    def __str__(self) -> str:
        return f"Trajectory aborted at step {self.step}: {self.e}"


class EnsembleAbortedError(NumericalError):
    def __init__(self, n_trajectories: int, dt: float) -> None:
        self.n_trajectories = n_trajectories
        self.dt = dt

    def __str__(self) -> str:
        return f"All {self.n_trajectories} trajectories aborted at dt = {self.dt:g}"


# command layer


class CommandExecError(CommandError):
    def __init__(self, command_name: str, e: Exception) -> None:
        self.command_name = command_name
        self.e = e

    def __str__(self) -> str:
        return f"An error occurred while executing the command {self.command_name}: {self.e}"


class ParamParseError(CommandError):
    def __init__(self, command_name: str, e: Exception) -> None:
        self.command_name = command_name
        self.e = e

    def __str__(self) -> str:
        return f"An error occurred while parsing the parameters of the command {self.command_name}: {self.e}"


class IntConvertError(CommandError):
    def __init__(self, param_name: str, value: Any) -> None:
        self.param_name = param_name
        self.value = value

    def __str__(self) -> str:
        return f"The parameter {self.param_name} is type hinted as int, but the value {self.value} cannot be converted to int"


class FloatConvertError(CommandError):
    def __init__(self, param_name: str, value: Any) -> None:
        self.param_name = param_name
        self.value = value

    def __str__(self) -> str:
        return f"The parameter {self.param_name} is type hinted as float, but the value {self.value} cannot be converted to float"


class CogLoadError(CommandError):
    def __init__(self, cog_path: Any, e: Exception | str) -> None:
        self.cog_path = cog_path
        self.e = e

    def __str__(self) -> str:
        return f"An error occurred while loading the cog {self.cog_path}: {self.e}"


class UsageError(CommandError):
    def __init__(self, reason: str) -> None:
        self.reason = reason

    def __str__(self) -> str:
        return f"Usage error: {self.reason}"


def exit_code_for(error: BaseException) -> int:
    """Maps an error to the process exit code.

    Args:
        error: The error that stopped the command.

    Returns:
        1 for usage, configuration and contract errors, 2 for numerical failures.
    """
    cause = error.e if isinstance(error, CommandExecError) else error
    if isinstance(cause, NumericalError):
        return 2
    return 1
