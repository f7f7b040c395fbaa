"""Phase-space quasiprobability distributions of a single bosonic mode.

Wigner, Kirkwood-Rihaczek, Husimi Q, characteristic-function and Cohen-class
distributions, each computable by several independent routes that are
cross-checked against one another.
"""

__version__ = "0.1.0"

from .errors import QuasiprobError  # noqa: E402
from .fockspace import DensityOperator, PhasePoint, make_state  # noqa: E402
from .statespec import StateSpec, parse_state_spec  # noqa: E402

__all__ = [
    "DensityOperator",
    "PhasePoint",
    "QuasiprobError",
    "StateSpec",
    "make_state",
    "parse_state_spec",
]
