"""A particle layer riding on top of a one-sided reversible automaton ``G``.

On ``X = Y x A2^Z`` the map is ``F = F1 . G2 . F2``:

* ``F2`` swaps ``→0`` and ``↙‖`` at cells ``i, i+1`` whenever the lower layer
  leaves ``B`` near ``i`` within the next ten steps of ``G``,
* ``G2`` applies ``G^10`` to the lower layer,
* ``F1`` applies the particle automaton ``S`` to the upper layer.

A fast particle can only keep heading right while the lower layer stays in
``B`` along the slope-1/5 diagonal; otherwise it is sent back to bounce off
a wall before it may continue.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from ..analysis import DecisionResult, is_injective, is_surjective
from ..core import (
    Alphabet,
    CapExceeded,
    CellularAutomaton,
    Configuration,
    all_words,
    compose,
    identity,
    lazy_ca,
    product,
)
from .particle import EMPTY, FAST_R, PARTICLE_ALPHABET, SLOW_L, WALL, certify_S, in_Y, make_S

COND_REACH = 11  # cond(i) reads the lower layer on cells i .. i+11


def as_half_radius(G: CellularAutomaton) -> CellularAutomaton:
    """Rewrite a rule with window inside ``{0, 1}`` on exactly that window."""
    if G.memory < 0 or G.anticipation > 1:
        raise ValueError("inner CA must be radius-1/2 (window within cells i, i+1)")
    if (G.memory, G.anticipation) == (0, 1):
        return G
    k = G.alphabet.size
    words = all_words(k, 2)
    if G.memory == G.anticipation == 0:
        table = G.apply_words(words[:, :1])[:, 0]
    else:
        table = G.apply_words(words[:, 1:])[:, 0]
    return CellularAutomaton(G.alphabet, 0, 1, table=table, name=G.name)


def cond_rows(G: CellularAutomaton, bmask: np.ndarray, lower: np.ndarray) -> np.ndarray:
    """The swap condition at cells ``0 .. L-12`` of each lower-layer row.

    True when ``G^j(x2)[i]`` leaves ``B`` for some ``0 <= j <= 5`` or
    ``G^j(x2)[i+1]`` leaves ``B`` for some ``5 <= j <= 10``.
    """
    n_out = lower.shape[1] - COND_REACH
    cond = np.zeros((lower.shape[0], max(n_out, 0)), dtype=bool)
    cur = lower
    for j in range(11):
        if j <= 5:
            cond |= ~bmask[cur[:, :n_out]]
        if j >= 5:
            cond |= ~bmask[cur[:, 1 : n_out + 1]]
        if j < 10:
            cur = G.apply_words(cur)
    return cond


def swap_core(upper: np.ndarray, cond: np.ndarray) -> np.ndarray:
    """Apply the ``→0 <-> ↙‖`` swap given the condition bits.

    ``cond[:, i]`` is the condition at cell ``i`` of ``upper``; the result
    covers cells ``1 .. L-2``.
    """
    left, mid, right = upper[:, :-2], upper[:, 1:-1], upper[:, 2:]
    c_here = cond[:, 1:-1]
    c_left = cond[:, :-2]
    out = mid.copy()
    out[c_here & (mid == FAST_R) & (right == EMPTY)] = SLOW_L
    out[c_here & (mid == SLOW_L) & (right == WALL)] = FAST_R
    out[c_left & (left == FAST_R) & (mid == EMPTY)] = WALL
    out[c_left & (left == SLOW_L) & (mid == WALL)] = EMPTY
    return out


def swap_is_involution(width: int = 5) -> bool:
    """Exhaustive check over upper-layer words and condition patterns of the given width."""
    words = all_words(6, width)
    bits = np.array(list(itertools.product((False, True), repeat=width)))
    for b in bits:
        cond = np.broadcast_to(b, words.shape)
        once = swap_core(words, cond)
        twice = swap_core(once, cond[:, 1:-1])
        if not np.array_equal(twice, words[:, 2:-2]):
            return False
    return True


@functools.lru_cache(maxsize=None)
def _swap_involution_cached() -> bool:
    return swap_is_involution()


@dataclass(frozen=True)
class SoficBundle:
    G: CellularAutomaton
    B: frozenset[int]
    alphabet: Alphabet
    S: CellularAutomaton
    F1: CellularAutomaton
    G2: CellularAutomaton
    F2: CellularAutomaton
    F: CellularAutomaton

    @property
    def k2(self) -> int:
        return self.G.alphabet.size

    def pair(self, upper: int, lower: int) -> int:
        return upper * self.k2 + lower

    def make_config(self, upper: Configuration, lower: Configuration) -> Configuration:
        """Stack two layers; the upper one must carry at most one particle."""
        if not in_Y(upper):
            raise ValueError("upper layer must contain at most one particle")
        lo = min(upper.start, lower.start)
        hi = max(upper.end, lower.end)
        lp = len(upper.left) * len(lower.left)
        rp = len(upper.right) * len(lower.right)
        u = upper.window(lo - lp, hi + rp)
        v = lower.window(lo - lp, hi + rp)
        w = u * self.k2 + v
        return Configuration(tuple(w[:lp]), tuple(w[lp : len(w) - rp]), tuple(w[len(w) - rp :]), lo)

    def layers(self, x: Configuration) -> tuple[Configuration, Configuration]:
        up = x.mapped(lambda s: s // self.k2)
        lo = x.mapped(lambda s: s % self.k2)
        return up, lo


def build_sofic_F(G: CellularAutomaton, B) -> SoficBundle:
    """Assemble ``F = F1 . G2 . F2`` for a reversible radius-1/2 ``G`` and ``B``."""
    G = as_half_radius(G)
    if is_injective(G).verdict is not True:
        raise ValueError("inner CA must be reversible")
    k2 = G.alphabet.size
    bset = frozenset(int(b) for b in B)
    if any(not 0 <= b < k2 for b in bset):
        raise ValueError("B must be a subset of the inner alphabet")
    bmask = np.zeros(k2, dtype=bool)
    bmask[list(bset)] = True
    alph = PARTICLE_ALPHABET.product(G.alphabet)
    S = make_S()

    s_cert = {"injective": lambda: certify_S("injective"), "surjective": lambda: certify_S("surjective")}
    layered = product(S, identity(G.alphabet), lazy=True)
    F1 = lazy_ca(alph, layered.memory, layered.anticipation, layered.word_fn, name="F1", certify=s_cert)

    def g2_fn(words):
        up, lo = words // k2, words % k2
        cur = lo
        for _ in range(10):
            cur = G.apply_words(cur)
        return up[:, :-10] * k2 + cur

    inner_cert = {
        "injective": lambda: DecisionResult("injective", is_injective(G).verdict, None, "G^10 on the lower layer"),
        "surjective": lambda: DecisionResult("surjective", is_surjective(G).verdict, None, "G^10 on the lower layer"),
    }
    G2 = lazy_ca(alph, 0, 10, g2_fn, name="G2", certify=inner_cert)

    def f2_fn(words):
        up, lo = words // k2, words % k2
        L = words.shape[1]
        cond = cond_rows(G, bmask, lo)  # cells 0 .. L-12
        cond = np.hstack([cond, np.zeros((len(words), 1), dtype=bool)])
        new_up = swap_core(up[:, : L - 10], cond)  # cells 1 .. L-12
        return new_up * k2 + lo[:, 1 : L - 11]

    def f2_cert(prop):
        ok = _swap_involution_cached()
        return DecisionResult(prop, ok, None, "involution: exhaustive swap check with free condition bits")

    # F2 output cell k reads upper cells k-1..k+1 and lower cells k-1..k+11
    F2 = lazy_ca(
        alph, -1, COND_REACH, f2_fn, name="F2",
        certify={"injective": lambda: f2_cert("injective"), "surjective": lambda: f2_cert("surjective")},
    )
    F = compose(F1, compose(G2, F2, lazy=True), lazy=True)
    return SoficBundle(G, bset, alph, S, F1, G2, F2, F)


def smallest_empty_C(G: CellularAutomaton, B, n_max: int, node_cap: int = 10**6) -> int | None:
    """Smallest ``N <= n_max`` with no word satisfying the slope-1/5 constraint up to ``2N``.

    ``C(n)`` is the set of ``x`` with ``G^(5i+j)(x)[i]`` in ``B`` for
    ``0 <= i <= n`` and ``0 <= j <= 5``.  The search extends words to the
    right and prunes as soon as a constraint is violated.
    """
    G = as_half_radius(G)
    k = G.alphabet.size
    bset = set(int(b) for b in B)
    for N in range(1, n_max + 1):
        n = 2 * N
        length = 6 * n + 6
        # constraint (i, j) reads cells i .. i+5i+j
        checks: dict[int, list[tuple[int, int]]] = {}
        for i in range(n + 1):
            for j in range(6):
                checks.setdefault(i + 5 * i + j, []).append((i, j))
        nodes = 0
        found = False
        stack = [()]
        while stack:
            w = stack.pop()
            nodes += 1
            if nodes > node_cap:
                raise CapExceeded("constraint search exceeded node cap")
            if len(w) == length:
                found = True
                break
            for s in range(k):
                v = w + (s,)
                last = len(v) - 1
                ok = True
                for i, j in checks.get(last, ()):
                    t = 5 * i + j
                    seg = np.asarray(v[i : i + t + 1])
                    for _ in range(t):
                        seg = G.apply_word(seg)
                    if int(seg[0]) not in bset:
                        ok = False
                        break
                if ok:
                    stack.append(v)
        if not found:
            return N
    return None
