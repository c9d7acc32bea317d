"""Arrow decorations that turn a tiling question into a question about one automaton.

Every tile of a two-way deterministic set ``T`` and of its completion
``T^c`` is decorated with an arrow tile.  Tiles of ``T`` get a tile from
``T1`` (arrows pass straight through), completion tiles get a tile from
``T2`` (arrows are created or turned).  An edge color ``1`` means an arrow crosses that edge; horizontal
edges only ever carry the downward arrow and vertical edges the leftward
one, so a single bit per edge suffices.

The automaton is ``F = H . J . G`` on ``A = A1 x {0, 1, 2}`` where ``G``
runs the decorated tiles and ``J``, ``H`` are involutions that move a
marker between the layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    Alphabet,
    CellularAutomaton,
    compose,
    from_table,
    identity,
    minimized,
    product,
    symbol_map,
)
from ..tiles import TileSet, WangTile, ca_from_tileset, complete

# (N, E, S, W) over {0, 1}; 1 marks an arrow crossing the edge
T1 = TileSet(
    (
        WangTile("b", "0", "0", "0", "0"),
        WangTile("L", "0", "1", "0", "1"),
        WangTile("D", "1", "0", "1", "0"),
        WangTile("LD", "1", "1", "1", "1"),
    ),
    ("0", "1"),
)

T2 = TileSet(
    (
        WangTile("w", "0", "0", "0", "1"),
        WangTile("ws", "0", "1", "1", "1"),
        WangTile("d", "1", "0", "1", "0"),
        WangTile("ne", "1", "1", "0", "0"),
    ),
    ("0", "1"),
)

BLANK = "b"
LAYER2 = Alphabet.of("0", "1", "2")


def decorated_tileset(ts: TileSet) -> tuple[TileSet, list[tuple[str, str]]]:
    """``A1 = (T x T1) u (T^c x T2)`` with product colors; also returns (base, arrow) ids."""
    full = complete(ts)
    complement = [WangTile("~" + t.id, t.n, t.e, t.s, t.w) for t in full.tiles[len(ts.tiles) :]]
    tiles, names = [], []
    for group, arrows in ((ts.tiles, T1), (tuple(complement), T2)):
        for t in group:
            for s in arrows.tiles:
                tid = f"({t.id},{s.id})"
                tiles.append(WangTile(tid, f"{t.n}{s.n}", f"{t.e}{s.e}", f"{t.s}{s.s}", f"{t.w}{s.w}"))
                names.append((t.id, s.id))
    colors = tuple(f"{c}{a}" for c in ts.colors for a in "01")
    return TileSet(tuple(tiles), colors), names


@dataclass(frozen=True)
class ImmortalityBundle:
    """The automaton ``F = H . J . G`` and the blank set ``B = (T x {b}) x {0}``."""

    base: TileSet
    decorated: TileSet
    names: tuple[tuple[str, str], ...]
    alphabet: Alphabet
    G: CellularAutomaton
    J1: CellularAutomaton
    J2: CellularAutomaton
    H: CellularAutomaton
    F: CellularAutomaton
    B: frozenset[int]

    def symbol(self, base_id: str, arrow_id: str, layer: int) -> int:
        return self.names.index((base_id, arrow_id)) * 3 + layer


def j1_map() -> list[int]:
    return [0, 2, 1]


def j2_rule(a: int, b: int) -> int:
    if (a, b) == (0, 2):
        return 1
    if (a, b) == (1, 2):
        return 0
    return a


def build_immortality_ca(ts: TileSet) -> ImmortalityBundle:
    decorated, names = decorated_tileset(ts)
    g1 = ca_from_tileset(decorated)
    a1 = decorated.alphabet()
    alph = a1.product(LAYER2)
    G = product(g1, identity(LAYER2), lazy=False, cap=10**8)
    J1 = product(identity(a1), symbol_map(LAYER2, j1_map(), "j1"), lazy=False)
    j2 = from_table(LAYER2, 0, 1, [j2_rule(a, b) for a in range(3) for b in range(3)], "j2")
    J2 = product(identity(a1), j2, lazy=False, cap=10**8)
    # h swaps layer values 0 and 1 on arrow tiles, i.e. everything but the blank tiles of T
    h = []
    for i, (t, arrow) in enumerate(names):
        blank = arrow == BLANK and not t.startswith("~")
        for c in range(3):
            h.append(3 * i + (c if blank or c == 2 else 1 - c))
    H = symbol_map(alph, h, "H")
    J = compose(J2, J1, cap=10**8)
    F = minimized(compose(H, compose(J, G, cap=10**8), cap=10**8))
    bset = frozenset(i * 3 for i, (t, s) in enumerate(names) if s == BLANK and not t.startswith("~"))
    return ImmortalityBundle(ts, decorated, tuple(names), alph, G, J1, J2, H, F, bset)
