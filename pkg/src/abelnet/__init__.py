"""Abelian networks: execution, algebraic invariants, recurrence, update dynamics and enumeration."""

from ._kernel import BACKEND
from .core import Configuration, Digraph, Network, Processor, execute_word, stabilize, step
from .errors import AbelnetError

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AbelnetError",
    "Configuration",
    "Digraph",
    "Network",
    "Processor",
    "execute_word",
    "stabilize",
    "step",
]
