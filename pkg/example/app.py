from __future__ import annotations

import asyncio
import os
import sys

from dotenv import load_dotenv

from qfeed import App

load_dotenv()


async def main() -> int:
    """Runs the built-in commands plus the example cog."""
    app = App(out_dir=os.getenv("QFEED_OUT", "example-out"))
    app.add_cog("example.cog")
    return await app.run(sys.argv[1:] or ["frontier", "--config", "example/frontier.env"])


sys.exit(asyncio.run(main()))
