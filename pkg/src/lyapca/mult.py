"""Multiplication automata ``Mul_{p,pq}`` and their average exponent.

A configuration over the digits ``0..n-1`` encodes ``sum x[i] * n**(-i)``,
so cell 0 holds the units digit and cell 1 the first fractional digit.
``Mul_{p,pq}`` multiplies that number by ``p``; each output digit only
needs the digit at the same cell and the one to its right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analysis import ExponentReport, lambda_finite
from .core import (
    Alphabet,
    CapExceeded,
    CellularAutomaton,
    Configuration,
    all_words,
    from_table,
    iterate,
)


def _check_pq(p: int, q: int):
    if p < 2 or q < 2:
        raise ValueError("p and q must both be at least 2")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p={p} and q={q} must be coprime")


def make_mult_ca(p: int, n: int) -> CellularAutomaton:
    """``Mul_{p,n}`` with ``n = p*q``: ``mul(a1 q + a0, b1 q + b0) = a0 p + b1``."""
    if p < 2 or n < 2 or n % p:
        raise ValueError("need p, n >= 2 with p dividing n")
    q = n // p
    a = np.repeat(np.arange(n), n)
    b = np.tile(np.arange(n), n)
    table = (a % q) * p + b // q
    return from_table(Alphabet.digits(n), 0, 1, table, f"Mul_{p},{n}")


def mul_words(p: int, q: int, words: np.ndarray) -> np.ndarray:
    """Word-level multiplication; drops the last column."""
    w = np.asarray(words)
    return (w[..., :-1] % q) * p + w[..., 1:] // q


def mul_power(p: int, q: int, word, t: int) -> np.ndarray:
    w = np.asarray(word, dtype=np.int64)
    for _ in range(t):
        w = mul_words(p, q, w)
    return w


def integ(word, base: int) -> int:
    """The integer whose base-``base`` digits (most significant first) are ``word``."""
    v = 0
    for d in word:
        v = v * base + int(d)
    return v


def digits_of(value: int, base: int, length: int) -> tuple[int, ...]:
    if value < 0 or value >= base**length:
        raise ValueError(f"{value} does not fit in {length} digits")
    out = []
    for _ in range(length):
        value, d = divmod(value, base)
        out.append(d)
    return tuple(out[::-1])


def _terminates(den: int, n: int) -> bool:
    g = math.gcd(den, n)
    while g > 1:
        while den % g == 0:
            den //= g
        g = math.gcd(den, n)
    return den == 1


def config_of(xi: Fraction | int, n: int) -> Configuration:
    """The configuration of a non-negative real with a terminating base-``n`` expansion."""
    xi = Fraction(xi)
    if xi < 0:
        raise ValueError("only non-negative reals are encoded")
    if not _terminates(xi.denominator, n):
        raise ValueError(f"{xi} has no terminating base-{n} expansion")
    k = 0
    while (xi * n**k).denominator != 1:
        k += 1
    big = int(xi * n**k)
    if big == 0:
        return Configuration.uniform(0)
    digits = []
    while big:
        big, d = divmod(big, n)
        digits.append(d)
    digits.reverse()
    return Configuration((0,), tuple(digits), (0,), k - len(digits) + 1)


def real_of(x: Configuration, n: int) -> Fraction:
    """The real encoded by ``x``; the left tail must be zero."""
    if x.left != (0,):
        raise ValueError("left tail must be all zeros")
    total = sum(Fraction(d, 1) * Fraction(n) ** (-i) for i, d in zip(range(x.start, x.end), x.center))
    per = len(x.right)
    block = sum(Fraction(d) * Fraction(n) ** (-j) for j, d in enumerate(x.right))
    tail = Fraction(n) ** (-x.end) * block / (1 - Fraction(n) ** (-per))
    return total + tail


# ---------------------------------------------------------------- digit lemmas


@dataclass(frozen=True)
class DigitLemmaReport:
    p: int
    q: int
    k: int
    t: int
    words_checked: int
    counterexamples: dict

    @property
    def ok(self) -> bool:
        return all(not v for v in self.counterexamples.values())


def _integ_rows(rows: np.ndarray, base: int) -> np.ndarray:
    v = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        v = v * base + rows[:, j]
    return v


def check_digit_lemmas(p: int, q: int, k: int, t: int, cap: int = 10**7, limit: int = 5) -> DigitLemmaReport:
    """Check the single-step and ``t``-step digit statements on all words of length ``k``.

    Words are listed in lexicographic order, so the word at index ``i`` has
    integer value ``i``.  Checked statements:

    * ``step_small``: ``integ(w) < q^t`` implies ``integ(mul(w)) < q^(t-1)``
    * ``step_add``: adding ``q^t`` (mod ``(pq)^k``) adds ``q^(t-1)`` to the image mod ``(pq)^(k-1)``
    * ``power_zero``: ``integ(w) < q^t`` implies ``mul^t(w)`` is all zeros (needs ``k >= t+1``)
    * ``power_add``: adding ``q^t`` adds one to ``mul^t`` mod ``(pq)^(k-t)`` (needs ``k >= t+1``)
    * ``odometer``: ``integ(mul^t(w_i)) = floor(i / q^t) mod (pq)^(k-t)`` (needs ``k >= t+1``)
    """
    _check_pq(p, q)
    if t < 1:
        raise ValueError("t must be at least 1")
    if k < 2:
        raise ValueError("k must be at least 2")
    n = p * q
    total = n**k
    if total > cap:
        raise CapExceeded(f"{total} words exceed cap {cap}")
    words = all_words(n, k)
    idx = np.arange(total, dtype=np.int64)
    qt = q**t
    bad: dict[str, list] = {}

    def record(name, mask):
        hits = np.flatnonzero(mask)
        bad[name] = [tuple(int(d) for d in words[i]) for i in hits[:limit]]

    one = _integ_rows(mul_words(p, q, words), n)
    record("step_small", (idx < qt) & (one >= q ** (t - 1)))
    partner = (idx + qt) % total
    mod1 = n ** (k - 1)
    record("step_add", (one[partner] - one - q ** (t - 1)) % mod1 != 0)
    if k >= t + 1:
        img = words
        for _ in range(t):
            img = mul_words(p, q, img)
        many = _integ_rows(img, n)
        modt = n ** (k - t)
        record("power_zero", (idx < qt) & (many != 0))
        record("power_add", (many[partner] - many - 1) % modt != 0)
        record("odometer", many != (idx // qt) % modt)
    return DigitLemmaReport(p, q, k, t, total, bad)


# ---------------------------------------------------------------- witnesses


@dataclass(frozen=True)
class WitnessReport:
    p: int
    q: int
    n: int
    x: Configuration
    y: Configuration
    separated: tuple[bool, ...]
    differ_only_at_origin: bool
    lambda_left: int | None = None


def witness_pair(p: int, q: int, n: int, with_exponent: bool = False) -> WitnessReport:
    """The configurations of ``q^n - 1`` and ``q^n``.

    They differ only at the units digit, yet after ``i`` steps they still
    disagree at cell ``-i``, so a perturbation travels one cell left per step.
    With ``with_exponent`` the left exponent is evaluated at the translate
    that puts this units digit at cell ``n``; it then equals ``n``.
    """
    _check_pq(p, q)
    if n < 1:
        raise ValueError("n must be at least 1")
    base = p * q
    ca = make_mult_ca(p, base)
    x = config_of(q**n - 1, base)
    y = config_of(q**n, base)
    lo = min(x.start, y.start) - 1
    hi = max(x.end, y.end) + 1
    diff = [i for i in range(lo, hi) if x.at(i) != y.at(i)]
    xs, ys = iterate(ca, x, n), iterate(ca, y, n)
    separated = tuple(xs[i].at(-i) != ys[i].at(-i) for i in range(n + 1))
    lam = lambda_finite(ca, y.shifted(-n), n, "left").value if with_exponent else None
    return WitnessReport(p, q, n, x, y, separated, diff == [0], lam)


# ---------------------------------------------------------------- average exponent


def lambda_minus_word(p: int, q: int, n: int, word) -> int:
    """Left exponent of a word of length ``n+1`` read from cell 0, by suffix enumeration.

    The value is the largest ``i`` such that keeping the first ``i`` digits and
    changing the rest can alter the digit at cell 0 at some time ``t`` with
    ``i <= t <= n``.
    """
    _check_pq(p, q)
    w = tuple(int(d) for d in word)
    if len(w) != n + 1:
        raise ValueError("word must have length n+1")
    base = p * q
    for i in range(n, 0, -1):
        tails = all_words(base, n + 1 - i)
        rows = np.hstack([np.broadcast_to(np.asarray(w[:i]), (len(tails), i)), tails])
        cur = rows
        for t in range(1, n + 1):
            cur = mul_words(p, q, cur)
            if t >= i and np.any(cur[:, 0] != cur[0, 0]):
                return i
    return 0


def in_d_by_interval(p: int, q: int, n: int, prefix) -> bool:
    """Prefix test via the open interval ``J(u)`` containing a multiple of ``q^n``."""
    i = len(prefix)
    lo = integ(prefix, p * q) * (p * q) ** (n + 1 - i)
    hi = lo + (p * q) ** (n + 1 - i)
    first = (lo // q**n + 1) * q**n
    return first < hi


def lambda_minus_interval(p: int, q: int, n: int, word) -> int:
    w = tuple(word)
    return max(i for i in range(n + 1) if i == 0 or in_d_by_interval(p, q, n, w[:i]))


def kappa(p: int, q: int, n: int) -> int:
    """Largest integer ``k`` with ``(pq)^(n+1-k) > q^n``."""
    e = 0
    while (p * q) ** e <= q**n:
        e += 1
    return n + 1 - e


def d_closed_form(p: int, q: int, n: int, i: int) -> int:
    if not 0 <= i <= n:
        raise ValueError("need 0 <= i <= n")
    if (p * q) ** (n + 1 - i) > q**n:
        return (p * q) ** i
    return (p * q) * p**n - q * p**i


@dataclass(frozen=True)
class AvgBreakdown:
    """Counts of length-``n+1`` words by their left exponent.

    ``d[i]`` counts prefixes of length ``i`` that can still influence cell 0,
    ``pset[i] = (pq)^(n+1-i) d[i]`` counts words with exponent at least ``i``,
    and ``P[i]`` counts words with exponent exactly ``i``.
    """

    p: int
    q: int
    n: int
    d: tuple[int, ...]
    P: tuple[int, ...]

    @property
    def pset(self) -> tuple[int, ...]:
        b = self.p * self.q
        return tuple(b ** (self.n + 1 - i) * di for i, di in enumerate(self.d))

    @property
    def kappa(self) -> int:
        return kappa(self.p, self.q, self.n)

    @property
    def average(self) -> Fraction:
        return Fraction(sum(i * c for i, c in enumerate(self.P)), (self.p * self.q) ** (self.n + 1))

    @property
    def normalized(self) -> Fraction:
        return self.average / self.n

    @property
    def limit(self) -> float:
        return math.log(self.p) / math.log(self.p * self.q)

    def invariants(self) -> list[str]:
        errs = []
        b = self.p * self.q
        if sum(self.P) != b ** (self.n + 1):
            errs.append("P does not partition all words")
        ps = self.pset
        for i in range(self.n):
            if self.P[i] != ps[i] - ps[i + 1]:
                errs.append(f"P[{i}] != p[{i}] - p[{i + 1}]")
        if self.P[self.n] != ps[self.n]:
            errs.append("P[n] != p[n]")
        if any(self.P[i] for i in range(self.kappa)):
            errs.append("nonzero P below kappa")
        return errs


def avg_exponent_closed(p: int, q: int, n: int) -> AvgBreakdown:
    _check_pq(p, q)
    if n < 1:
        raise ValueError("n must be at least 1")
    b = p * q
    d = tuple(d_closed_form(p, q, n, i) for i in range(n + 1))
    ps = [b ** (n + 1 - i) * di for i, di in enumerate(d)]
    P = tuple(ps[i] - ps[i + 1] for i in range(n)) + (ps[n],)
    return AvgBreakdown(p, q, n, d, P)


def avg_exponent_formula(p: int, q: int, n: int) -> Fraction:
    """``kappa + sum_{i>kappa} (pq)^(n+1-i) d_n(i) / (pq)^(n+1)``."""
    k = kappa(p, q, n)
    b = p * q
    s = sum(b ** (n + 1 - i) * d_closed_form(p, q, n, i) for i in range(k + 1, n + 1))
    return k + Fraction(s, b ** (n + 1))


def partition_sizes_bruteforce(p: int, q: int, n: int, cap: int = 2 * 10**8, chunk: int = 2**20) -> AvgBreakdown:
    """Classify every word of length ``n+1`` by iterating ``Mul`` on it.

    The digit at cell 0 after ``t`` steps is a function of the word; a prefix
    of length ``i`` can influence cell 0 exactly when that function is
    non-constant, for some ``t``, on the block of words sharing the prefix.
    Words are processed in chunks sharing a common prefix of length ``c``.
    """
    _check_pq(p, q)
    if n < 1:
        raise ValueError("n must be at least 1")
    b = p * q
    L = n + 1
    total = b**L
    if total > cap:
        raise CapExceeded(f"{total} words exceed cap {cap}")
    c = 0
    while b ** (L - c) > chunk:
        c += 1
    csize = b ** (L - c)
    nchunks = b**c
    inner = L - c
    d = [0] * (n + 1)
    hist_inner = np.zeros(n + 1, dtype=np.int64)
    none_count = np.zeros(nchunks, dtype=np.int64)
    cmin = np.zeros((nchunks, n + 1), dtype=np.int64)
    cmax = np.zeros((nchunks, n + 1), dtype=np.int64)
    tails = all_words(b, inner).astype(np.int8)
    for ci in range(nchunks):
        prefix = np.asarray(all_words(b, c, ci, ci + 1)[0] if c else [], dtype=np.int8)
        cur = np.hstack([np.broadcast_to(prefix, (csize, c)), tails])
        cols = [cur[:, 0].copy()]
        for _ in range(n):
            cur = (cur[:, :-1] % q) * p + cur[:, 1:] // q
            cols.append(cur[:, 0].copy())
        vals = np.stack(cols)  # (n+1, csize)
        cmin[ci] = vals.min(axis=1)
        cmax[ci] = vals.max(axis=1)
        level = np.full(csize, -1, dtype=np.int64)
        for i in range(c, n + 1):
            bs = b ** (L - i)
            blocks = vals.reshape(n + 1, csize // bs, bs)
            nc = np.any(blocks.max(axis=2) != blocks.min(axis=2), axis=0)
            d[i] += int(nc.sum())
            level[np.repeat(nc, bs)] = i
        inside = level >= 0
        hist_inner += np.bincount(level[inside], minlength=n + 1)[: n + 1]
        none_count[ci] = int((~inside).sum())
    # levels whose blocks span several chunks
    outer_level = np.zeros(nchunks, dtype=np.int64)
    for i in range(c):
        group = b ** (c - i)
        gmin = cmin.reshape(-1, group, n + 1).min(axis=1)
        gmax = cmax.reshape(-1, group, n + 1).max(axis=1)
        nc = np.any(gmax != gmin, axis=1)
        d[i] += int(nc.sum())
        outer_level[np.repeat(nc, group)] = i
    P = hist_inner.copy()
    P += np.bincount(outer_level, weights=none_count, minlength=n + 1)[: n + 1].astype(np.int64)
    return AvgBreakdown(p, q, n, tuple(d), tuple(int(v) for v in P))


def avg_exponent_sampled(p: int, q: int, n: int, samples: int, rng: np.random.Generator) -> float:
    """Monte Carlo estimate of the average left exponent over words of length ``n+1``."""
    _check_pq(p, q)
    words = rng.integers(0, p * q, size=(samples, n + 1))
    return float(np.mean([lambda_minus_interval(p, q, n, w) for w in words]))


def mult_lambda_left(p: int, q: int, x: Configuration, n: int) -> ExponentReport:
    return lambda_finite(make_mult_ca(p, p * q), x, n, "left")
