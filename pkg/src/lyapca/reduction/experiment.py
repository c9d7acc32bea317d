"""Front-speed experiments for the particle constructions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..analysis import front_trace
from ..core import CellularAutomaton, Configuration
from .belt import build_conveyor_F
from .particle import FAST_R
from .sofic import build_sofic_F, smallest_empty_C

FAST = Fraction(2)
SLOW = Fraction(5, 3)


@dataclass(frozen=True)
class SpeedReport:
    target: str
    n: int
    positions: tuple[int, ...]
    slope: Fraction
    classification: str
    empty_C: int | None = None


def classify(slope: Fraction, tol: float = 0.1) -> str:
    if slope >= FAST - Fraction(tol):
        return "fast"
    if slope <= SLOW + Fraction(tol):
        return "slow"
    return "inconclusive"


def perturbed_pair(G: CellularAutomaton, B, lower: Configuration | None = None, target: str = "conveyor"):
    """Build the automaton and two configurations differing by a fast particle at cell 0."""
    if lower is None:
        lower = Configuration.uniform(min(B) if B else 0)
    sofic = build_sofic_F(G, B)
    x = sofic.make_config(Configuration.uniform(0), lower)
    y = sofic.make_config(Configuration((0,), (FAST_R,), (0,), 0), lower)
    if target == "sofic":
        return sofic.F, x, y
    if target == "conveyor":
        belt = build_conveyor_F(G, B)
        return belt.F, belt.embed(sofic, x), belt.embed(sofic, y)
    raise ValueError("target must be 'sofic' or 'conveyor'")


def speed_experiment(
    G: CellularAutomaton,
    B,
    n: int = 60,
    lower: Configuration | None = None,
    target: str = "conveyor",
    tol: float = 0.1,
    c_search: int = 0,
) -> SpeedReport:
    """Track how far right a single fast particle pushes the disagreement in ``n`` steps."""
    if n < 10:
        raise ValueError("n must be at least 10 for a meaningful slope")
    ca, x, y = perturbed_pair(G, B, lower, target)
    trace = front_trace(ca, x, y, n, "right")
    empty = smallest_empty_C(G, B, c_search) if c_search else None
    return SpeedReport(target, n, trace.positions, trace.slope, classify(trace.slope, tol), empty)
