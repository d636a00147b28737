from __future__ import annotations

import asyncio
import json
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any, TypeVar

import aiofiles

from .utils import csv_text

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from .models.config import RunConfig

__all__ = ("Context",)

T = TypeVar("T")


def _json_ready(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_json_ready(v) for v in value]
    return value


class Context:
    """What a running command gets: its output directory, worker count and writers."""

    def __init__(self, *, command: str, out_dir: Path, jobs: int = 1) -> None:
        self.command = command
        self.out_dir = out_dir
        self.jobs = jobs
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        return self.out_dir / name

    async def write_text(self, name: str, text: str) -> Path:
        """Writes a text file into the output directory.

        Args:
            name: The file name, relative to the output directory.
            text: The content.

        Returns:
            The path written.
        """
        path = self.path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        async with aiofiles.open(path, "w", encoding="utf-8", newline="\n") as f:
            await f.write(text)
        self.written.append(path)
        logging.info("Wrote %s", path)
        return path

    async def write_json(self, name: str, data: Any) -> Path:
        """Writes JSON with sorted keys; non-finite numbers become null."""
        text = json.dumps(_json_ready(data), indent=2, sort_keys=True, allow_nan=False)
        return await self.write_text(name, text + "\n")

    async def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Writes a CSV file with the given header, numbers at 17 significant digits."""
        return await self.write_text(name, csv_text(header, rows))

    async def echo_config(self, config: RunConfig) -> None:
        """Records the resolved configuration before any computation starts."""
        await self.write_text(f"{config.command}.config.env", config.to_env())
        await self.write_json(f"{config.command}.config.json", config.model_dump(mode="json"))

    async def run(self, func: Callable[..., T], /, *args: Any, **kwargs: Any) -> T:
        """Runs blocking numerical work off the event loop."""
        return await asyncio.to_thread(func, *args, **kwargs)
