"""Finite-time Lyapunov exponents of reversible one-dimensional cellular automata."""

from .core import (
    Alphabet,
    CapExceeded,
    CellularAutomaton,
    Configuration,
    SpaceTimeDiagram,
    compose,
    from_function,
    from_table,
    identity,
    iterate,
    minimized,
    mirror,
    product,
    shift,
    step,
)

__all__ = [
    "Alphabet",
    "CapExceeded",
    "CellularAutomaton",
    "Configuration",
    "SpaceTimeDiagram",
    "compose",
    "from_function",
    "from_table",
    "identity",
    "iterate",
    "minimized",
    "mirror",
    "product",
    "shift",
    "step",
]
