from __future__ import annotations

from .adiabatic import *
from .app import *
from .bloch import *
from .command import *
from .context import *
from .exceptions import *
from .generators import *
from .linalg import *
from .metrics import *
from .models import *
from .operators import *
from .qfunc import *
from .trajectories import *
