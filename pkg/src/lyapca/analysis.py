"""Decision procedures and finite-time Lyapunov quantities.

Injectivity and surjectivity of tabulated rules are decided on the pair
graph: nodes are pairs of ``(w-1)``-words, and each pair of ``w``-words with
equal image gives an edge.  A bi-infinite path through an off-diagonal node
is a pair of distinct configurations with the same image; a path leaving
and re-entering the diagonal is a diamond, which rules out surjectivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .core import (
    CapExceeded,
    CellularAutomaton,
    Configuration,
    all_words,
    compose,
    from_table,
    minimized,
    mirror,
    step,
    window_codes,
)

UNDECIDED = "undecided: cap"


@dataclass(frozen=True)
class DecisionResult:
    property: str
    verdict: bool | None
    certificate: object = None
    note: str = ""

    @property
    def status(self) -> str:
        if self.verdict is None:
            return UNDECIDED
        return "true" if self.verdict else "false"

    def __bool__(self) -> bool:
        return bool(self.verdict)


@dataclass(frozen=True)
class ExponentReport:
    direction: str
    n: int
    value: int
    trace: tuple[int, ...] | None = None

    @property
    def normalized(self) -> Fraction:
        return Fraction(self.value, self.n)


@dataclass(frozen=True)
class FrontTrace:
    side: str
    positions: tuple[int, ...]

    @property
    def slope(self) -> Fraction:
        n = len(self.positions) - 1
        h = n // 2
        return Fraction(self.positions[n] - self.positions[h], n - h)


# ---------------------------------------------------------------- pair graph


@dataclass
class _PairGraph:
    k: int
    v: int
    graph: csr_matrix

    @property
    def n_nodes(self) -> int:
        return self.v * self.v

    def diagonal(self) -> np.ndarray:
        return np.arange(self.v) * (self.v + 1)

    def off_diagonal_mask(self) -> np.ndarray:
        ids = np.arange(self.n_nodes)
        return ids // self.v != ids % self.v


def _pair_graph(ca: CellularAutomaton, cap: int) -> _PairGraph:
    k, w = ca.alphabet.size, ca.width
    v = k ** (w - 1)
    labels = ca.table
    counts = np.bincount(labels, minlength=k)
    if v * v > cap or int((counts.astype(np.int64) ** 2).sum()) > cap:
        raise CapExceeded("pair graph too large")
    order = np.argsort(labels, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(counts)])
    src, dst = [], []
    for b in range(k):
        g = order[bounds[b] : bounds[b + 1]]
        if g.size == 0:
            continue
        hi, lo = g // k, g % v
        src.append((hi[:, None] * v + hi[None, :]).ravel())
        dst.append((lo[:, None] * v + lo[None, :]).ravel())
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    n = v * v
    graph = csr_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(n, n))
    return _PairGraph(k, v, graph)


def _reach(graph: csr_matrix, sources: np.ndarray):
    """Multi-source BFS; returns (reached mask, predecessor array)."""
    n = graph.shape[0]
    if sources.size == 0:
        return np.zeros(n, dtype=bool), np.full(n, -9999)
    extra = csr_matrix(
        (np.ones(sources.size, dtype=np.int8), (np.full(sources.size, n), sources)), shape=(n + 1, n + 1)
    )
    big = csr_matrix((graph.data, graph.indices, graph.indptr), shape=(n, n))
    big.resize((n + 1, n + 1))
    order, pred = breadth_first_order(big + extra, n, directed=True, return_predecessors=True)
    mask = np.zeros(n + 1, dtype=bool)
    mask[order] = True
    return mask[:n], pred[:n]


def _path_to(pred: np.ndarray, node: int) -> list[int]:
    """Walk predecessors back to a source of a multi-source BFS."""
    n = pred.size
    path = [node]
    while pred[path[-1]] >= 0 and pred[path[-1]] != n:
        path.append(int(pred[path[-1]]))
    return path[::-1]


def _cycle_through(graph: csr_matrix, node: int) -> list[int]:
    """A cycle ``[node, ..., last]`` with an edge ``last -> node``."""
    order, pred = breadth_first_order(graph, node, directed=True, return_predecessors=True)
    reached = np.zeros(graph.shape[0], dtype=bool)
    reached[order] = True
    incoming = graph.T.tocsr()[node].indices
    cands = [int(u) for u in incoming if reached[u]]
    if not cands:
        raise RuntimeError("node is not on a cycle")
    last = cands[0]
    path = [last]
    while path[-1] != node:
        path.append(int(pred[path[-1]]))
    return path[::-1]


def _cyclic_nodes(graph: csr_matrix) -> np.ndarray:
    _, comp = connected_components(graph, directed=True, connection="strong")
    sizes = np.bincount(comp)
    cyclic = sizes[comp] > 1
    coo = graph.tocoo()
    loops = coo.row[coo.row == coo.col]
    cyclic[loops] = True
    return cyclic


def _letters(pg: _PairGraph, nodes: list[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    u = [(z // pg.v) % pg.k for z in nodes]
    w = [(z % pg.v) % pg.k for z in nodes]
    return tuple(u), tuple(w)


# ---------------------------------------------------------------- decisions


def is_injective(ca: CellularAutomaton, cap: int = 10**8) -> DecisionResult:
    """Decide injectivity; a negative answer carries two configurations with equal image."""
    if ca.lazy:
        if "injective" in ca.certify:
            return ca.certify["injective"]()
        if ca.parts:
            results = [is_injective(p, cap) for p in ca.parts]
            if all(r.verdict is True for r in results):
                return DecisionResult("injective", True, None, "every factor is injective")
            if results[-1].verdict is False:
                return DecisionResult("injective", False, results[-1].certificate, "first factor applied is not injective")
        return DecisionResult("injective", None, None, "no exact procedure for this lazy automaton")
    if ca.width == 1:
        seen: dict[int, int] = {}
        for s, t in enumerate(ca.table):
            if int(t) in seen:
                x = Configuration.uniform(seen[int(t)])
                y = Configuration.uniform(s)
                return DecisionResult("injective", False, (x, y), "symbol map is not a permutation")
            seen[int(t)] = s
        return DecisionResult("injective", True)
    try:
        pg = _pair_graph(ca, cap)
    except CapExceeded:
        return DecisionResult("injective", None, None, "pair graph exceeds cap")
    off = pg.off_diagonal_mask()
    cyclic = _cyclic_nodes(pg.graph)
    bad = np.flatnonzero(cyclic & off)
    if bad.size:
        cyc = _cycle_through(pg.graph, int(bad[0]))
        u, w = _letters(pg, cyc)
        x, y = Configuration.periodic(u), Configuration.periodic(w)
        return DecisionResult("injective", False, (x, y), "off-diagonal cycle in the pair graph")
    fwd, pred_f = _reach(pg.graph, np.flatnonzero(cyclic))
    bwd, pred_b = _reach(pg.graph.T.tocsr(), np.flatnonzero(cyclic))
    bad = np.flatnonzero(fwd & bwd & off)
    if bad.size == 0:
        return DecisionResult("injective", True, None, "no bi-infinite off-diagonal path")
    z = int(bad[0])
    head = _path_to(pred_f, z)  # cyclic a -> ... -> z
    tail = _path_to(pred_b, z)[::-1]  # z -> ... -> cyclic b
    a_cyc = _cycle_through(pg.graph, head[0])
    b_cyc = _cycle_through(pg.graph, tail[-1])
    path = head + tail[1:]
    left_nodes = a_cyc[1:] + a_cyc[:1]
    lu, lw = _letters(pg, left_nodes)
    cu, cw = _letters(pg, path[1:])
    ru, rw = _letters(pg, b_cyc[1:] + b_cyc[:1])
    x = Configuration(lu, cu, ru, 0)
    y = Configuration(lw, cw, rw, 0)
    return DecisionResult("injective", False, (x, y), "off-diagonal path between cycles")


def is_surjective(ca: CellularAutomaton, cap: int = 10**8, subset_cap: int = 200_000) -> DecisionResult:
    """Decide surjectivity; a negative answer carries an orphan word when one is found."""
    if ca.lazy:
        if "surjective" in ca.certify:
            return ca.certify["surjective"]()
        if ca.parts:
            results = [is_surjective(p, cap) for p in ca.parts]
            if all(r.verdict is True for r in results):
                return DecisionResult("surjective", True, None, "every factor is surjective")
        return DecisionResult("surjective", None, None, "no exact procedure for this lazy automaton")
    if ca.width == 1:
        missing = sorted(set(range(ca.alphabet.size)) - set(map(int, ca.table)))
        if missing:
            return DecisionResult("surjective", False, (missing[0],), "symbol map is not onto")
        return DecisionResult("surjective", True)
    try:
        pg = _pair_graph(ca, cap)
    except CapExceeded:
        return DecisionResult("surjective", None, None, "pair graph exceeds cap")
    diag = pg.diagonal()
    fwd, _ = _reach(pg.graph, diag)
    bwd, _ = _reach(pg.graph.T.tocsr(), diag)
    if not np.any(fwd & bwd & pg.off_diagonal_mask()):
        return DecisionResult("surjective", True, None, "pair graph has no diamond")
    orphan = find_orphan(ca, subset_cap)
    return DecisionResult("surjective", False, orphan, "diamond in the pair graph")


def find_orphan(ca: CellularAutomaton, subset_cap: int = 200_000) -> tuple[int, ...] | None:
    """Shortest word without preimage, by subset construction on the de Bruijn graph."""
    k, w = ca.alphabet.size, ca.width
    v = k ** (w - 1)
    codes = np.arange(k**w)
    succ = [[np.unique(codes[(codes // k == u) & (ca.table == b)] % v) for b in range(k)] for u in range(v)]
    start = np.ones(v, dtype=bool)
    seen = {start.tobytes(): None}
    frontier = [(start, ())]
    while frontier:
        nxt = []
        for s, word in frontier:
            nodes = np.flatnonzero(s)
            for b in range(k):
                t = np.zeros(v, dtype=bool)
                for u in nodes:
                    t[succ[u][b]] = True
                if not t.any():
                    return word + (b,)
                key = t.tobytes()
                if key not in seen:
                    seen[key] = None
                    nxt.append((t, word + (b,)))
                    if len(seen) > subset_cap:
                        return None
        frontier = nxt
    return None


def preimage_counts(ca: CellularAutomaton, length: int) -> np.ndarray:
    """Number of preimages of every word of the given length (balance check)."""
    words = all_words(ca.alphabet.size, length + ca.width - 1)
    imgs = ca.apply_words(words)
    codes = window_codes(imgs, ca.alphabet.size, length)[:, 0]
    return np.bincount(codes, minlength=ca.alphabet.size**length)


def inverse(ca: CellularAutomaton, radius_cap: int = 4, cap: int = 10**7) -> CellularAutomaton:
    """Local rule of the inverse automaton, found by growing the inverse window."""
    res = is_injective(ca)
    if res.verdict is not True:
        raise ValueError(f"automaton is not known to be injective ({res.status})")
    k = ca.alphabet.size
    m, a = ca.memory, ca.anticipation
    c = -((m + a) // 2)
    for r in range(radius_cap + 1):
        wout = 2 * r + 1
        ell = wout + (a - m)
        idx = r - c - m
        if not 0 <= idx < ell:
            continue
        if k**ell > cap:
            raise CapExceeded("inverse search window exceeds cap")
        words = all_words(k, ell)
        codes = window_codes(ca.apply_words(words), k, wout)[:, 0]
        target = words[:, idx]
        table = np.zeros(k**wout, dtype=np.int64)
        table[codes] = target
        if np.array_equal(table[codes], target):
            return minimized(from_table(ca.alphabet, c - r, c + r, table, f"inv({ca.name})"))
    raise CapExceeded(f"no inverse with radius <= {radius_cap}")


# ---------------------------------------------------------------- exponents


def _right_check(ca, x: Configuration, n: int, s: int, method: str, cap: int) -> bool:
    """Whether changes strictly left of ``-s`` stay left of 0 for ``n`` steps."""
    m, a = ca.memory, ca.anticipation
    k = ca.alphabet.size
    free = -s - n * m
    r0 = -s - n * m + n * a
    if k**free > cap:
        raise CapExceeded(f"{k}^{free} assignments exceed cap {cap}")
    fixed = x.window(-s, r0)
    cur = np.hstack([all_words(k, free), np.broadcast_to(fixed, (k**free, fixed.size))])
    ref = x.window(n * m, r0)[None, :]
    for i in range(1, n + 1):
        cur = ca.apply_words(cur)
        ref = ca.apply_words(ref)
        if method == "propagate":
            cur = np.unique(cur, axis=0)
        lo = -(n - i) * m
        hi = -s - n * m
        if hi > lo and np.any(cur[:, lo:hi] != ref[:, lo:hi]):
            return False
    return True


def _lambda_right(ca, x, n, method, cap) -> int:
    m = ca.memory
    if m >= 0 or n == 0:
        return 0
    for s in range(-n * m - 1, -1, -1):
        if not _right_check(ca, x, n, s, method, cap):
            return s + 1
    return 0


def _oriented(ca, x, direction):
    if direction in ("right", "+"):
        return ca, x
    if direction in ("left", "-"):
        return mirror(ca), x.reflected()
    raise ValueError(f"direction must be 'left' or 'right', not {direction!r}")


def lambda_finite(
    ca: CellularAutomaton,
    x: Configuration,
    n: int,
    direction: str = "right",
    method: str = "propagate",
    cap: int = 10**7,
    trace: bool = False,
) -> ExponentReport:
    """Finite-time exponent at ``x``: how far perturbations can travel in ``n`` steps.

    ``direction="right"`` measures perturbations from the left spreading
    rightward; ``"left"`` is the mirror image.  ``method`` is ``"propagate"``
    (deduplicated word sets) or ``"brute"`` (every assignment carried along).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if method not in ("propagate", "brute"):
        raise ValueError(f"unknown method {method!r}")
    if max(x.symbols_used()) >= ca.alphabet.size:
        raise ValueError("configuration uses symbols outside the alphabet")
    g, y = _oriented(ca, x, direction)
    value = _lambda_right(g, y, n, method, cap)
    tr = tuple(_lambda_right(g, y, i, method, cap) for i in range(1, n + 1)) if trace else None
    return ExponentReport("right" if direction in ("right", "+") else "left", n, value, tr)


def lambda_bar_finite(
    ca: CellularAutomaton, x: Configuration, n: int, direction: str = "right", method: str = "propagate", cap: int = 10**7
) -> ExponentReport:
    """Maximum of the finite-time exponent over all translates of ``x``.

    Translates far from the center only see the periodic tails, so one
    period beyond the reach of ``n`` steps on each side covers every value.
    Radii are scanned from the largest down, across all translates at once:
    the first radius some translate fails at gives the maximum, and the
    checks at large radii are the cheap ones.
    """
    g, y = _oriented(ca, x, direction)
    name = "right" if direction in ("right", "+") else "left"
    if g.memory >= 0 or n == 0:
        return ExponentReport(name, n, 0)
    span = n * (abs(ca.memory) + abs(ca.anticipation)) + 1
    translates = [y.shifted(k) for k in range(y.start - span - len(y.left), y.end + span + len(y.right) + 1)]
    for s in range(-n * g.memory - 1, -1, -1):
        for t in translates:
            if not _right_check(g, t, n, s, method, cap):
                return ExponentReport(name, n, s + 1)
    return ExponentReport(name, n, 0)


def max_lambda_finite(ca: CellularAutomaton, n: int, direction: str = "right", cap: int = 10**7) -> ExponentReport:
    """Maximum of the finite-time exponent over all configurations.

    Perturbations left of ``-s`` can reach cell 0 within ``i`` steps exactly
    when the local rule of ``F^i`` reads some offset below ``-s``, so the
    maximum is read off the effective memory of the powers of ``F``.
    """
    g = ca if direction in ("right", "+") else mirror(ca)
    name = "right" if direction in ("right", "+") else "left"
    if g.memory >= 0 or n == 0:
        return ExponentReport(name, n, 0)
    if g.lazy:
        raise CapExceeded("maximum over configurations needs a tabulated rule")
    best = 0
    p = minimized(g)
    best = max(best, -p.memory)
    for _ in range(2, n + 1):
        p = minimized(compose(g, p, lazy=False, cap=cap))
        best = max(best, -p.memory)
    return ExponentReport(name, n, best)


# ---------------------------------------------------------------- fronts


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def extreme_difference(x: Configuration, y: Configuration, side: str) -> int | None:
    """Rightmost (``side="right"``) or leftmost disagreement of two configurations."""
    lo = min(x.start, y.start)
    hi = max(x.end, y.end)
    lp = _lcm(len(x.left), len(y.left))
    rp = _lcm(len(x.right), len(y.right))
    if side == "right":
        if not np.array_equal(x.window(hi, hi + rp), y.window(hi, hi + rp)):
            raise ValueError("configurations differ on a whole right tail")
        wx, wy = x.window(lo - lp, hi), y.window(lo - lp, hi)
        diff = np.flatnonzero(wx != wy)
        return None if diff.size == 0 else int(lo - lp + diff[-1])
    if side == "left":
        if not np.array_equal(x.window(lo - lp, lo), y.window(lo - lp, lo)):
            raise ValueError("configurations differ on a whole left tail")
        wx, wy = x.window(lo, hi + rp), y.window(lo, hi + rp)
        diff = np.flatnonzero(wx != wy)
        return None if diff.size == 0 else int(lo + diff[0])
    raise ValueError("side must be 'left' or 'right'")


def front_trace(ca: CellularAutomaton, x: Configuration, y: Configuration, n: int, side: str = "right") -> FrontTrace:
    """Track the extreme disagreement of two orbits for ``n`` steps."""
    pos = []
    for t in range(n + 1):
        p = extreme_difference(x, y, side)
        if p is None:
            raise ValueError(f"orbits coincide at time {t}")
        pos.append(p)
        if t < n:
            x, y = step(ca, x), step(ca, y)
    return FrontTrace(side, tuple(pos))
