from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any

import numpy as np

from .exceptions import ParameterError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

__all__ = ("csv_text", "format_number", "grid", "parse_grid")

GRID_DECIMALS = 12


def format_number(value: Any) -> str:
    """Formats a value for a CSV cell: floats with 17 significant digits.

    Args:
        value: A number, bool, string or None.

    Returns:
        The cell text; None becomes an empty cell.
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        return "%.17g" % float(value)  # noqa: UP031
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Renders a header and rows as newline-terminated comma-separated text."""
    lines = [",".join(header)]
    lines.extend(",".join(format_number(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def grid(start: float, stop: float, step: float) -> list[float]:
    """Returns start, start + step, ..., stop (inclusive), rounded to 12 decimals.

    Rounding keeps grid points such as -0.5 exact, so special lines of the
    parameter plane are hit rather than missed by a rounding error.

    Raises:
        ParameterError: If ``step`` is not positive or ``stop < start``.
    """
    if step <= 0:
        raise ParameterError("step", step, "must be positive")
    if stop < start:
        raise ParameterError("stop", stop, f"must not be below start = {start:g}")
    n = math.floor((stop - start) / step + 1e-9)
    return np.round(start + step * np.arange(n + 1), GRID_DECIMALS).tolist()


def parse_grid(text: str) -> list[float]:
    """Parses ``start:stop:step`` or a comma-separated list of values.

    Raises:
        ParameterError: If the text is empty or malformed.
    """
    text = text.strip()
    if not text:
        raise ParameterError("grid", text, "must not be empty")
    try:
        if ":" in text:
            parts = [float(part) for part in text.split(":")]
            if len(parts) != 3:
                raise ParameterError("grid", text, "expected start:stop:step")
            return grid(*parts)
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ParameterError("grid", text, str(e)) from e
