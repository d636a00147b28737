from __future__ import annotations

from ._shared import *
