from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from ..utils import format_number

__all__ = ("RunConfig",)


class RunConfig(BaseModel):
    """The fully resolved inputs of one command run, defaults filled in."""

    model_config = ConfigDict(frozen=True)

    command: str
    out: str
    jobs: int = Field(1, ge=1)
    params: dict[str, Any]

    def to_env(self) -> str:
        """Renders the run as a flat ``KEY=value`` file that ``--config`` reads back."""
        lines = [f"# qfeed {self.command}"]
        for name, value in sorted(self.params.items()):
            key = name.removesuffix("_")
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif value is None:
                text = "None"
            else:
                text = format_number(value)
            lines.append(f"{key}={text}")
        lines.append(f"jobs={self.jobs}")
        return "\n".join(lines) + "\n"
