"""Generalized (phi-) cellular automata over finite groups."""

from .errors import BudgetExceeded, GcaError, NotBijective, NotEquivariant, StructureError, TheoremViolation
from .groups import *  # noqa: F401,F403
from .configs import *  # noqa: F401,F403
from .gca import *  # noqa: F401,F403
from .monoid import *  # noqa: F401,F403
from .automorphisms import *  # noqa: F401,F403
from .eca import *  # noqa: F401,F403
from .verify import *  # noqa: F401,F403
from .report import Certificate

__version__ = "0.1.0"
