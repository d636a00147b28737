from __future__ import annotations

from .config import *
from .params import *
from .records import *
from .states import *
from .superop import *
