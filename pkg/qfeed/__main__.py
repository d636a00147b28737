from __future__ import annotations

import asyncio
import sys

from dotenv import load_dotenv

from .app import App


def main() -> None:
    """Entry point of the ``qfeed`` command."""
    load_dotenv()
    sys.exit(asyncio.run(App().run(sys.argv[1:])))


if __name__ == "__main__":
    main()
