"""Conveyor belts: simulating the particle layer on a full shift.

A cell of ``Γ`` holds two particle-layer symbols (top and bottom track) and
a marker in ``{+, -, 0}``.  Markers cut every configuration into belts of
the form ``+...+ 0 -...-`` (the ``0`` cell carries the belt's only particle)
or ``+...+ -...-`` (no particle).  A closed belt is a ring: the top track
read left to right, then the bottom track read right to left with every
particle reversed.  ``F1'`` moves the particle of each belt by one step of
``S`` along its ring and then rewrites the markers around the new
position, so particles turn around at the ends of their belt.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from ..analysis import DecisionResult, is_injective, is_surjective
from ..core import Alphabet, CellularAutomaton, Configuration, all_words, compose, lazy_ca
from .particle import EMPTY, FLIP, PARTICLE_ALPHABET, PARTICLES, WALL, certify_S, particle_rule
from .sofic import COND_REACH, SoficBundle, as_half_radius, cond_rows, swap_core

PLUS, MINUS, ZERO = "+", "-", "0"
SIGMA = (EMPTY, WALL)


def _gamma_entries() -> list[tuple[int, int, str]]:
    out = [(a, b, d) for a in SIGMA for b in SIGMA for d in (PLUS, MINUS)]
    out += [(q, s, ZERO) for q in sorted(PARTICLES) for s in SIGMA]
    out += [(s, q, ZERO) for s in SIGMA for q in sorted(PARTICLES)]
    return out


GAMMA_ENTRIES = tuple(_gamma_entries())
GAMMA = Alphabet(tuple(f"{PARTICLE_ALPHABET.symbols[a]}{PARTICLE_ALPHABET.symbols[b]}{d}" for a, b, d in GAMMA_ENTRIES))
_INDEX = {e: i for i, e in enumerate(GAMMA_ENTRIES)}
TOP = np.array([e[0] for e in GAMMA_ENTRIES])
BOT = np.array([e[1] for e in GAMMA_ENTRIES])
DEL = np.array(["+-0".index(e[2]) for e in GAMMA_ENTRIES])  # 0:+ 1:- 2:0
_FLIP = np.array([FLIP[s] for s in range(6)])

RADIUS = 8


def gamma(top: int, bottom: int, delta: str) -> int:
    try:
        return _INDEX[(top, bottom, delta)]
    except KeyError:
        raise ValueError(f"({top}, {bottom}, {delta!r}) is not a belt cell") from None


def _encode(top, bot, dl) -> np.ndarray:
    # a particle that left the word leaves a marker 0 without particle; such
    # cells lie in the margin that callers discard
    out = []
    for a, b, d in zip(top, bot, dl):
        key = (int(a), int(b), "+-0"[int(d)])
        out.append(_INDEX.get(key, _INDEX.get((int(a), int(b), MINUS), 0)))
    return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------- decomposition


@dataclass(frozen=True)
class Belt:
    """A maximal segment ``[lo, hi)``; an end is open when the segment is cut by the word boundary."""

    lo: int
    hi: int
    closed_left: bool
    closed_right: bool
    cells: tuple[int, ...]

    def particle(self) -> int | None:
        for k, g in enumerate(self.cells):
            if DEL[g] == 2:
                return self.lo + k
        return None

    def well_formed(self) -> bool:
        d = [int(DEL[g]) for g in self.cells]
        s = "".join("+-0"[v] for v in d)
        stripped = s.lstrip("+")
        if stripped.startswith("0"):
            stripped = stripped[1:]
        return set(stripped) <= {"-"}


def decompose(word) -> list[Belt]:
    """Cut a finite ``Γ``-word into belts."""
    w = np.asarray(word, dtype=np.int64)
    d = DEL[w]
    cuts = [0]
    for i in range(1, len(w)):
        if d[i - 1] in (1, 2) and d[i] in (0, 2):
            cuts.append(i)
    cuts.append(len(w))
    belts = []
    for j in range(len(cuts) - 1):
        lo, hi = cuts[j], cuts[j + 1]
        belts.append(Belt(lo, hi, j > 0, j < len(cuts) - 2, tuple(int(g) for g in w[lo:hi])))
    return belts


def serialize(belts: list[Belt]) -> tuple[int, ...]:
    return tuple(g for b in belts for g in b.cells)


# ---------------------------------------------------------------- particle motion along a belt


def _path(lo: int, hi: int, closed_left: bool, closed_right: bool):
    """Cells of the belt in travel order and whether the path closes into a ring."""
    top = [(k, 0) for k in range(lo, hi)]
    bot = [(k, 1) for k in range(hi - 1, lo - 1, -1)]
    if closed_left and closed_right:
        return [top + bot], True
    if closed_right:
        return [top + bot], False
    if closed_left:
        return [bot + top], False
    return [top, bot], False


def ring_step(syms: list[int], k: int, ring: bool) -> tuple[list[int], int]:
    """Move the particle at index ``k`` of a path by one step of ``S``.

    Other occurrences of the particle's own cell (on short rings) read as
    empty, and cells beyond the ends of a line read as empty.  Returns the
    new path symbols and the new particle index (possibly off the line).
    """
    n = len(syms)

    def at(j):
        if ring:
            if j != k and (j - k) % n == 0:
                return EMPTY
            return syms[j % n]
        return syms[j] if 0 <= j < n else EMPTY

    window = [at(k + d) for d in range(-4, 5)]
    outs = [particle_rule(*window[d : d + 5]) for d in range(5)]  # path k-2 .. k+2
    hits = [d for d, s in enumerate(outs) if s in PARTICLES]
    if len(hits) != 1:
        raise RuntimeError("particle not conserved")
    d = hits[0] - 2
    new = list(syms)
    tau = outs[hits[0]]
    new[k % n if ring else k] = EMPTY
    k2 = k + d
    if ring:
        k2 %= n
        new[k2] = tau
    elif 0 <= k2 < n:
        new[k2] = tau
    return new, k2


def belt_step_row(word: np.ndarray) -> np.ndarray:
    """``F1'`` on one finite ``Γ``-word (all cells; cells near the ends may be unreliable)."""
    top = TOP[word].copy()
    bot = BOT[word].copy()
    dl = DEL[word].copy()
    for belt in decompose(word):
        p = belt.particle()
        if p is None:
            continue
        paths, ring = _path(belt.lo, belt.hi, belt.closed_left, belt.closed_right)
        track = 0 if top[p] in PARTICLES else 1
        for path in paths:
            if (p, track) in path:
                break
        k = path.index((p, track))
        syms = [int(top[c]) if t == 0 else int(_FLIP[bot[c]]) for c, t in path]
        new, k2 = ring_step(syms, k, ring)
        for (c, t), s in zip(path, new):
            if t == 0:
                top[c] = s
            else:
                bot[c] = _FLIP[s]
        if 0 <= k2 < len(path):
            newpos = path[k2][0]
            cells = np.arange(belt.lo, belt.hi)
            dl[belt.lo : belt.hi] = np.where(cells < newpos, 0, np.where(cells == newpos, 2, 1))
    return _encode(top, bot, dl)


def belt_step(word) -> np.ndarray:
    return belt_step_row(np.asarray(word, dtype=np.int64))


def check_rings(max_len: int = 8) -> dict[str, bool]:
    """Exhaustive one-particle check on rings of length ``<= max_len``.

    For every wall pattern the map ``(position, type) -> (position, type)``
    must be a bijection that keeps the walls.
    """
    ok_inj = ok_surj = ok_cons = True
    for n in range(1, max_len + 1):
        for walls in itertools.product(SIGMA, repeat=n):
            seen = {}
            for k in range(n):
                if walls[k] == WALL:
                    continue
                for t in sorted(PARTICLES):
                    syms = list(walls)
                    syms[k] = t
                    new, k2 = ring_step(syms, k, True)
                    rest = [s for j, s in enumerate(new) if j != k2]
                    if rest != [s for j, s in enumerate(walls) if j != k2] or walls[k2] == WALL:
                        ok_cons = False
                    seen.setdefault((k2, new[k2]), []).append((k, t))
            free = sum(1 for s in walls if s != WALL)
            if any(len(v) > 1 for v in seen.values()):
                ok_inj = False
            if len(seen) != free * len(PARTICLES):
                ok_surj = False
    return {"conserving": ok_cons, "injective": ok_inj, "surjective": ok_surj}


@functools.lru_cache(maxsize=None)
def _rings_cached():
    return check_rings()


def certify_belt(prop: str) -> DecisionResult:
    rings = _rings_cached()
    line = certify_S(prop)
    ok = rings["conserving"] and rings[prop] and bool(line.verdict)
    return DecisionResult(prop, ok, None, "belts are preserved; exhaustive rings up to length 8 and one-particle lines")


# ---------------------------------------------------------------- the automaton F'


@dataclass(frozen=True)
class BeltBundle:
    G: CellularAutomaton
    B: frozenset[int]
    alphabet: Alphabet
    F1: CellularAutomaton
    G2: CellularAutomaton
    F2: CellularAutomaton
    F: CellularAutomaton

    @property
    def k2(self) -> int:
        return self.G.alphabet.size

    def embed(self, sofic: SoficBundle, x: Configuration, split: int = 0) -> Configuration:
        """Put a configuration of the sofic system on the top track of one bi-infinite belt.

        Markers are ``+`` left of the particle and ``-`` right of it; without a
        particle they switch from ``+`` to ``-`` at cell ``split``.
        """
        up, lo = sofic.layers(x)
        a, b = min(up.start, lo.start), max(up.end, lo.end)
        lp = len(up.left) * len(lo.left)
        rp = len(up.right) * len(lo.right)
        u = up.window(a - lp, b + rp)
        v = lo.window(a - lp, b + rp)
        parts = [i for i, s in enumerate(u) if s in PARTICLES]
        if len(parts) > 1 or PARTICLES & (set(up.left) | set(up.right)):
            raise ValueError("upper layer must contain at most one particle")
        pos = parts[0] if parts else None

        def cell(i, s):
            if pos is None:
                d = PLUS if i + a - lp < split else MINUS
            else:
                d = PLUS if i < pos else (ZERO if i == pos else MINUS)
            return gamma(int(s), EMPTY, d) * self.k2

        w = np.array([cell(i, s) for i, s in enumerate(u)]) + v
        return Configuration(tuple(w[:lp]), tuple(w[lp : len(w) - rp]), tuple(w[len(w) - rp :]), a)

    def top_layer(self, x: Configuration) -> Configuration:
        """Project to the top track and inner layer, as a configuration of the sofic system."""
        k2 = self.k2
        return x.mapped(lambda s: int(TOP[s // k2]) * k2 + s % k2)


def build_conveyor_F(G: CellularAutomaton, B) -> BeltBundle:
    G = as_half_radius(G)
    if is_injective(G).verdict is not True:
        raise ValueError("inner CA must be reversible")
    k2 = G.alphabet.size
    bset = frozenset(int(b) for b in B)
    if any(not 0 <= b < k2 for b in bset):
        raise ValueError("B must be a subset of the inner alphabet")
    bmask = np.zeros(k2, dtype=bool)
    bmask[list(bset)] = True
    alph = GAMMA.product(G.alphabet)

    def f1_fn(words):
        g, lo = words // k2, words % k2
        out = np.empty_like(g)
        for r in range(len(g)):
            out[r] = belt_step_row(g[r])
        return out[:, RADIUS:-RADIUS] * k2 + lo[:, RADIUS:-RADIUS]

    F1 = lazy_ca(
        alph, -RADIUS, RADIUS, f1_fn, name="F1'",
        certify={"injective": lambda: certify_belt("injective"), "surjective": lambda: certify_belt("surjective")},
    )

    def g2_fn(words):
        g, lo = words // k2, words % k2
        cur = lo
        for _ in range(10):
            cur = G.apply_words(cur)
        return g[:, :-10] * k2 + cur

    inner_cert = {
        "injective": lambda: DecisionResult("injective", is_injective(G).verdict, None, "G^10 on the lower layer"),
        "surjective": lambda: DecisionResult("surjective", is_surjective(G).verdict, None, "G^10 on the lower layer"),
    }
    G2 = lazy_ca(alph, 0, 10, g2_fn, name="G2'", certify=inner_cert)

    def f2_fn(words):
        g, lo = words // k2, words % k2
        L = words.shape[1]
        cond = cond_rows(G, bmask, lo)  # cells 0 .. L-12
        cond = np.hstack([cond, np.zeros((len(words), 1), dtype=bool)])
        gg = g[:, : L - 10]
        guard = np.zeros_like(cond)
        guard[:, :-1] = DEL[gg[:, 1:]] == 1
        c = cond & guard
        new_top = swap_core(TOP[gg], c)
        new_bot = swap_core(BOT[gg], c)
        dl = DEL[gg[:, 1:-1]]
        enc = _ENCODE_TABLE[new_top, new_bot, dl]
        return enc * k2 + lo[:, 1 : L - 11]

    from .sofic import _swap_involution_cached

    def f2_cert(prop):
        return DecisionResult(prop, _swap_involution_cached(), None, "involution: per-track swap with guarded condition bits")

    F2 = lazy_ca(
        alph, -1, COND_REACH, f2_fn, name="F2'",
        certify={"injective": lambda: f2_cert("injective"), "surjective": lambda: f2_cert("surjective")},
    )
    F = compose(F1, compose(G2, F2, lazy=True), lazy=True)
    return BeltBundle(G, bset, alph, F1, G2, F2, F)


def _encode_table() -> np.ndarray:
    t = np.full((6, 6, 3), -1, dtype=np.int64)
    for i, (a, b, d) in enumerate(GAMMA_ENTRIES):
        t[a, b, "+-0".index(d)] = i
    return t


_ENCODE_TABLE = _encode_table()
