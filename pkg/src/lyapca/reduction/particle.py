"""The bouncing-particle automaton ``S`` on configurations with at most one particle.

Walls ``‖`` never move.  ``→`` and ``←`` travel two cells per step, ``↘`` and
``↙`` one cell per step, and a particle that meets a wall turns into the
particle of the same speed heading the other way.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from ..analysis import DecisionResult
from ..core import Alphabet, CellularAutomaton, Configuration, from_table

PARTICLE_ALPHABET = Alphabet.of("0", "‖", "←", "→", "↙", "↘")
EMPTY, WALL, FAST_L, FAST_R, SLOW_L, SLOW_R = range(6)
PARTICLES = frozenset({FAST_L, FAST_R, SLOW_L, SLOW_R})
ANY = -1

# reverses the direction of travel
FLIP = {EMPTY: EMPTY, WALL: WALL, FAST_L: FAST_R, FAST_R: FAST_L, SLOW_L: SLOW_R, SLOW_R: SLOW_L}

# rightward rules on the window x[i-2..i+2]; leftward ones are their mirror images
_RIGHT_RULES = (
    ((FAST_R, EMPTY, EMPTY, ANY, ANY), FAST_R),
    ((ANY, FAST_R, EMPTY, WALL, ANY), FAST_L),
    ((ANY, ANY, FAST_R, EMPTY, ANY), EMPTY),
    ((ANY, EMPTY, FAST_R, WALL, ANY), EMPTY),
    ((ANY, WALL, FAST_R, WALL, ANY), FAST_R),
    ((ANY, ANY, EMPTY, FAST_R, WALL), FAST_L),
    ((ANY, SLOW_R, EMPTY, ANY, ANY), SLOW_R),
    ((ANY, ANY, SLOW_R, EMPTY, ANY), EMPTY),
    ((ANY, ANY, SLOW_R, WALL, ANY), SLOW_L),
)


def _mirror_rule(rule):
    pattern, out = rule
    return tuple(ANY if s == ANY else FLIP[s] for s in reversed(pattern)), FLIP[out]


RULES = _RIGHT_RULES + tuple(_mirror_rule(r) for r in _RIGHT_RULES)


def particle_rule(*window: int) -> int:
    """First matching rule, identity otherwise."""
    for pattern, out in RULES:
        if all(p == ANY or p == s for p, s in zip(pattern, window)):
            return out
    return window[2]


@functools.lru_cache(maxsize=None)
def make_S() -> CellularAutomaton:
    words = itertools.product(range(6), repeat=5)
    table = np.fromiter((particle_rule(*w) for w in words), dtype=np.int64, count=6**5)
    return from_table(PARTICLE_ALPHABET, -2, 2, table, "S")


def particle_count(x: Configuration) -> float:
    """Number of particles; infinite when a periodic tail carries one."""
    if PARTICLES & (set(x.left) | set(x.right)):
        return float("inf")
    return sum(1 for s in x.center if s in PARTICLES)


def in_Y(x: Configuration) -> bool:
    return particle_count(x) <= 1


def walls(x: Configuration, lo: int, hi: int) -> np.ndarray:
    return np.flatnonzero(x.window(lo, hi) == WALL) + lo


def check_S_on_Y(radius: int = 6) -> dict[str, bool]:
    """Exact local check that ``S`` conserves walls and the particle, and is bijective on ``Y``.

    The image of a one-particle configuration only depends on the walls
    within distance 4 of the particle, and the particle moves at most two
    cells, so two preimages of one image sit within distance 4.  Listing
    every wall pattern on a window of radius 6 with the particle at offsets
    ``-2..2`` therefore covers every possible collision and every preimage.
    """
    S = make_S()
    width = 2 * radius + 1
    pats = np.array(list(itertools.product((EMPTY, WALL), repeat=width)), dtype=np.int64)
    conserving = True
    images: dict[tuple, list] = {}
    targets_hit: set[tuple] = set()
    for off in range(-2, 3):
        c = radius + off
        base = pats[pats[:, c] == EMPTY]
        for t in sorted(PARTICLES):
            w = base.copy()
            w[:, c] = t
            out = S.apply_words(w)  # covers cells -radius+2 .. radius-2
            inner = w[:, 2:-2]
            is_part = np.isin(out, list(PARTICLES))
            walls_ok = np.array_equal(out == WALL, inner == WALL)
            if not walls_ok or not np.all(is_part.sum(axis=1) == 1):
                conserving = False
            pos = np.argmax(is_part, axis=1) + 2 - radius
            typ = out[np.arange(len(out)), np.argmax(is_part, axis=1)]
            for row, p2, t2 in zip(base, pos, typ):
                key = (row.tobytes(), int(p2), int(t2))
                images.setdefault(key, []).append((off, t))
                if p2 == 0:
                    targets_hit.add((row.tobytes(), int(t2)))
    injective = all(len(v) == 1 for v in images.values())
    centre = pats[pats[:, radius] == EMPTY]
    surjective = all((row.tobytes(), t) in targets_hit for row in centre for t in PARTICLES)
    return {"conserving": conserving, "injective": injective, "surjective": surjective}


@functools.lru_cache(maxsize=None)
def _cached_check():
    return check_S_on_Y()


def certify_S(prop: str) -> DecisionResult:
    res = _cached_check()
    ok = res["conserving"] and res[prop]
    return DecisionResult(prop, ok, None, "exhaustive one-particle neighborhoods on Y")
