"""Wang tiles, determinism, completion, and the automata they define.

A complete two-way deterministic tile set ``T`` gives a reversible
automaton ``G_T`` with ``G_T(x)[i] = f(x[i], x[i+1])``, where ``f(a, b)``
is the unique tile whose north color is ``a``'s south color and whose
east color is ``b``'s west color.  Space-time diagrams of ``G_T`` are then
valid tilings along the anti-diagonals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import Alphabet, CapExceeded, CellularAutomaton, Configuration, from_table, iterate


@dataclass(frozen=True)
class WangTile:
    id: str
    n: str
    e: str
    s: str
    w: str

    @property
    def ne(self) -> tuple[str, str]:
        return (self.n, self.e)

    @property
    def sw(self) -> tuple[str, str]:
        return (self.s, self.w)


@dataclass(frozen=True)
class TileSet:
    tiles: tuple[WangTile, ...]
    colors: tuple[str, ...] = ()

    def __post_init__(self):
        ids = [t.id for t in self.tiles]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate tile ids")
        used = sorted({c for t in self.tiles for c in (t.n, t.e, t.s, t.w)})
        if not self.colors:
            object.__setattr__(self, "colors", tuple(used))
        elif not set(used) <= set(self.colors):
            raise ValueError("tile uses an undeclared color")

    def __len__(self) -> int:
        return len(self.tiles)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.tiles)

    def by_id(self, tid: str) -> WangTile:
        for t in self.tiles:
            if t.id == tid:
                return t
        raise KeyError(tid)

    def alphabet(self) -> Alphabet:
        return Alphabet(self.ids)


@dataclass(frozen=True)
class DeterminismReport:
    ne: bool
    sw: bool
    ne_violation: tuple[str, str] | None = None
    sw_violation: tuple[str, str] | None = None

    @property
    def two_way(self) -> bool:
        return self.ne and self.sw


def _first_clash(tiles, key):
    seen = {}
    for t in tiles:
        k = key(t)
        if k in seen:
            return (seen[k], t.id)
        seen[k] = t.id
    return None


def check_determinism(ts: TileSet) -> DeterminismReport:
    ne = _first_clash(ts.tiles, lambda t: t.ne)
    sw = _first_clash(ts.tiles, lambda t: t.sw)
    return DeterminismReport(ne is None, sw is None, ne, sw)


def is_complete(ts: TileSet) -> bool:
    c = len(ts.colors)
    return check_determinism(ts).two_way and len(ts.tiles) == c * c


def complete(ts: TileSet) -> TileSet:
    """Add tiles pairing missing NE and SW color pairs in lexicographic order."""
    rep = check_determinism(ts)
    if not rep.two_way:
        raise ValueError("tile set is not two-way deterministic")
    pairs = list(itertools.product(ts.colors, repeat=2))
    have_ne = {t.ne for t in ts.tiles}
    have_sw = {t.sw for t in ts.tiles}
    xs = [p for p in pairs if p not in have_ne]
    ys = [p for p in pairs if p not in have_sw]
    taken = set(ts.ids)
    new = []
    k = 0
    for (n, e), (s, w) in zip(xs, ys):
        while f"c{k}" in taken:
            k += 1
        new.append(WangTile(f"c{k}", n, e, s, w))
        taken.add(f"c{k}")
    return TileSet(ts.tiles + tuple(new), ts.colors)


def ca_from_tileset(ts: TileSet) -> CellularAutomaton:
    """The radius-1/2 automaton ``G_T`` of a complete tile set."""
    if not is_complete(ts):
        raise ValueError("tile set must be complete")
    ne = {t.ne: i for i, t in enumerate(ts.tiles)}
    k = len(ts.tiles)
    table = np.empty(k * k, dtype=np.int64)
    for i, a in enumerate(ts.tiles):
        for j, b in enumerate(ts.tiles):
            table[i * k + j] = ne[(a.s, b.w)]
    return from_table(ts.alphabet(), 0, 1, table, "G_T")


@dataclass(frozen=True)
class Patch:
    """A rectangle of tile ids; ``rows[0]`` is the northmost row."""

    rows: tuple[tuple[str, ...], ...]

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def height(self) -> int:
        return len(self.rows)


def check_valid_patch(ts: TileSet, patch: Patch) -> tuple[bool, tuple | None]:
    """Check matching edges; returns the first violating pair of ``(col, row)`` cells."""
    tile = {t.id: t for t in ts.tiles}
    for r, row in enumerate(patch.rows):
        for c, tid in enumerate(row):
            if tid not in tile:
                raise ValueError(f"unknown tile {tid!r}")
            if c + 1 < len(row) and tile[tid].e != tile[row[c + 1]].w:
                return False, ((c, r), (c + 1, r))
            if r + 1 < patch.height and tile[tid].s != tile[patch.rows[r + 1][c]].n:
                return False, ((c, r), (c, r + 1))
    return True, None


def tiling_from_orbit(ca: CellularAutomaton, ts: TileSet, x: Configuration, width: int, height: int) -> Patch:
    """The patch ``eta(i, k) = F^(-i-k)(x)[i]`` for ``0 <= i < width``.

    Rows run north to south over ``k = -(width-1), ..., -(width-1)-(height-1)``,
    so every exponent ``-i-k`` is non-negative.
    """
    orbit = iterate(ca, x, width + height - 2)
    ktop = -(width - 1)
    rows = []
    for r in range(height):
        k = ktop - r
        rows.append(tuple(ts.ids[orbit[-i - k].at(i)] for i in range(width)))
    return Patch(tuple(rows))


def random_deterministic_tileset(rng: np.random.Generator, n_colors: int, n_tiles: int) -> TileSet:
    """Random two-way deterministic tile set: distinct NE pairs matched to distinct SW pairs."""
    colors = [str(i) for i in range(n_colors)]
    pairs = list(itertools.product(colors, repeat=2))
    if n_tiles > len(pairs):
        raise ValueError("too many tiles for the number of colors")
    ne = rng.permutation(len(pairs))[:n_tiles]
    sw = rng.permutation(len(pairs))[:n_tiles]
    tiles = tuple(
        WangTile(f"t{i}", pairs[a][0], pairs[a][1], pairs[b][0], pairs[b][1]) for i, (a, b) in enumerate(zip(ne, sw))
    )
    return TileSet(tiles, tuple(colors))


# ---------------------------------------------------------------- local immortality


def _periodic_step(ca: CellularAutomaton, word: tuple[int, ...]) -> tuple[int, ...]:
    m, a = ca.memory, ca.anticipation
    p = len(word)
    ext = [word[(i + m) % p] for i in range(p + a - m)]
    return tuple(int(v) for v in ca.apply_word(ext))


def diagonal_ok(cycle: list[tuple[int, ...]], bset: set[int], p: int, q: int) -> bool:
    """Check ``F^(iq+j)(x)[ip]`` in ``B`` along a temporal cycle of a periodic point."""
    period_t = len(cycle)
    period_x = len(cycle[0])
    for i in range(period_t * period_x):
        for j in range(q + 1):
            if cycle[(i * q + j) % period_t][(i * p) % period_x] not in bset:
                return False
    return True


def search_local_immortality(
    ca: CellularAutomaton, bset, p: int, q: int, period_cap: int = 4, time_cap: int = 1000, word_cap: int = 10**6
) -> Configuration | None:
    """Search spatially periodic configurations for a ``(p, q)``-witness.

    Returns a configuration on a temporal cycle that keeps symbols from ``B``
    along the slope ``p/q``, or ``None`` if none was found within the bounds
    (which says nothing about existence).
    """
    bset = set(int(b) for b in bset)
    k = ca.alphabet.size
    for per in range(1, period_cap + 1):
        if k**per > word_cap:
            raise CapExceeded("too many periodic words")
        for word in itertools.product(range(k), repeat=per):
            seen: dict[tuple[int, ...], int] = {}
            orbit = []
            cur = word
            while cur not in seen and len(orbit) <= time_cap:
                seen[cur] = len(orbit)
                orbit.append(cur)
                cur = _periodic_step(ca, cur)
            if cur not in seen:
                continue
            cycle = orbit[seen[cur] :]
            if diagonal_ok(cycle, bset, p, q):
                return Configuration.periodic(cycle[0])
    return None
