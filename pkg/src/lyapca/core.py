"""One-dimensional cellular automata on a finite alphabet.

Symbols are stored as small integers indexing into an :class:`Alphabet`.
A local rule with memory ``m`` and anticipation ``a`` is a dense table
indexed by the mixed-radix code of the window ``x[i+m .. i+a]`` (first
symbol most significant), or a lazy function on batches of words for
automata whose tables are too large to materialize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np


class CapExceeded(RuntimeError):
    """Raised when a computation would exceed its configured size cap."""


class AlphabetMismatch(ValueError):
    """Raised when symbols or automata over different alphabets are mixed."""


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in alphabet {self.symbols}")
        for s in self.symbols:
            if not s or any(c.isspace() for c in s):
                raise ValueError(f"invalid symbol name {s!r}")

    @classmethod
    def of(cls, *names: str) -> "Alphabet":
        return cls(tuple(names))

    @classmethod
    def digits(cls, n: int) -> "Alphabet":
        return cls(tuple(str(i) for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, name: str) -> int:
        try:
            return self.symbols.index(name)
        except ValueError:
            raise ValueError(f"unknown symbol {name!r}") from None

    def encode(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.index(s) for s in names)

    def decode(self, word: Iterable[int]) -> list[str]:
        return [self.symbols[int(i)] for i in word]

    def product(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(tuple(f"({a},{b})" for a in self.symbols for b in other.symbols))

    def single_chars(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def parse_word(self, text: str) -> tuple[int, ...]:
        """Parse a word written either as characters or as separated tokens."""
        text = text.strip()
        if not text:
            return ()
        if any(c.isspace() or c == "," for c in text):
            toks = [t for t in text.replace(",", " ").split() if t]
            return self.encode(toks)
        if self.single_chars():
            return self.encode(text)
        return (self.index(text),)

    def format_word(self, word: Iterable[int]) -> str:
        names = self.decode(word)
        return "".join(names) if self.single_chars() else " ".join(names)


def pair_index(i: int, j: int, second: Alphabet | int) -> int:
    k = second if isinstance(second, int) else second.size
    return i * k + j


def _as_batch(words) -> np.ndarray:
    arr = np.asarray(words, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr[None, :]
    return arr


def window_codes(words: np.ndarray, k: int, width: int) -> np.ndarray:
    """Mixed-radix codes of all length-``width`` windows of each row."""
    n_out = words.shape[1] - width + 1
    code = np.zeros((words.shape[0], max(n_out, 0)), dtype=np.int64)
    if n_out <= 0:
        return code
    for j in range(width):
        code = code * k + words[:, j : j + n_out]
    return code


def all_words(k: int, length: int, lo: int = 0, hi: int | None = None) -> np.ndarray:
    """Rows ``lo .. hi-1`` of the lexicographic list of words of given length."""
    total = k**length
    hi = total if hi is None else min(hi, total)
    codes = np.arange(lo, hi, dtype=np.int64)
    out = np.empty((codes.size, length), dtype=np.int64)
    for j in range(length - 1, -1, -1):
        out[:, j] = codes % k
        codes = codes // k
    return out


@dataclass(frozen=True, eq=False)
class CellularAutomaton:
    """A sliding block map ``F(x)[i] = f(x[i+m], ..., x[i+a])``."""

    alphabet: Alphabet
    memory: int
    anticipation: int
    table: np.ndarray | None = None
    word_fn: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""
    parts: tuple["CellularAutomaton", ...] = ()
    certify: Mapping[str, Callable[[], object]] = field(default_factory=dict)

    def __post_init__(self):
        if self.memory > self.anticipation:
            raise ValueError("memory must not exceed anticipation")
        if (self.table is None) == (self.word_fn is None):
            raise ValueError("exactly one of table or word_fn must be given")
        if self.table is not None:
            t = np.asarray(self.table, dtype=np.int64)
            if t.shape != (self.alphabet.size**self.width,):
                raise ValueError(
                    f"table has shape {t.shape}, expected {(self.alphabet.size ** self.width,)}"
                )
            if t.size and (t.min() < 0 or t.max() >= self.alphabet.size):
                raise ValueError("table entries out of alphabet range")
            t = t.copy()
            t.flags.writeable = False
            object.__setattr__(self, "table", t)

    @property
    def width(self) -> int:
        return self.anticipation - self.memory + 1

    @property
    def lazy(self) -> bool:
        return self.table is None

    def apply_words(self, words) -> np.ndarray:
        """Apply the local rule to a batch of words (rows)."""
        arr = _as_batch(words)
        if arr.size and (arr.min() < 0 or arr.max() >= self.alphabet.size):
            raise AlphabetMismatch("word contains symbols outside the alphabet")
        if arr.shape[1] < self.width:
            return np.zeros((arr.shape[0], 0), dtype=np.int64)
        if self.table is not None:
            return self.table[window_codes(arr, self.alphabet.size, self.width)]
        return np.asarray(self.word_fn(arr), dtype=np.int64)

    def apply_word(self, word) -> np.ndarray:
        return self.apply_words(np.asarray(word, dtype=np.int64)[None, :])[0]

    def local(self, *window: int) -> int:
        if len(window) != self.width:
            raise ValueError(f"expected {self.width} symbols")
        return int(self.apply_word(window)[0])

    def __call__(self, x: "Configuration") -> "Configuration":
        return step(self, x)

    def __repr__(self) -> str:
        kind = "lazy" if self.lazy else "table"
        return (
            f"CellularAutomaton({self.name or '?'}, |A|={self.alphabet.size}, "
            f"m={self.memory}, a={self.anticipation}, {kind})"
        )


def from_table(alphabet: Alphabet, memory: int, anticipation: int, table, name: str = "") -> CellularAutomaton:
    return CellularAutomaton(alphabet, memory, anticipation, table=np.asarray(table), name=name)


def from_function(
    alphabet: Alphabet, memory: int, anticipation: int, f: Callable[..., int], name: str = ""
) -> CellularAutomaton:
    """Tabulate a Python local rule taking ``width`` integer arguments."""
    w = anticipation - memory + 1
    words = all_words(alphabet.size, w)
    table = np.fromiter((f(*map(int, row)) for row in words), dtype=np.int64, count=len(words))
    return from_table(alphabet, memory, anticipation, table, name)


def lazy_ca(
    alphabet: Alphabet,
    memory: int,
    anticipation: int,
    word_fn: Callable[[np.ndarray], np.ndarray],
    name: str = "",
    parts: tuple = (),
    certify: Mapping | None = None,
) -> CellularAutomaton:
    return CellularAutomaton(
        alphabet, memory, anticipation, word_fn=word_fn, name=name, parts=parts, certify=dict(certify or {})
    )


def identity(alphabet: Alphabet) -> CellularAutomaton:
    return from_table(alphabet, 0, 0, np.arange(alphabet.size), "id")


def shift(alphabet: Alphabet, k: int = 1) -> CellularAutomaton:
    """``x -> x[i+k]``; the default is the left shift."""
    if k == 1:
        # width-2 form with the output taken from the second cell
        return from_table(alphabet, 0, 1, np.tile(np.arange(alphabet.size), alphabet.size), "shift")
    return from_table(alphabet, k, k, np.arange(alphabet.size), f"shift^{k}")


def symbol_map(alphabet: Alphabet, mapping: Sequence[int], name: str = "") -> CellularAutomaton:
    return from_table(alphabet, 0, 0, np.asarray(mapping), name)


def _check_same(f: CellularAutomaton, g: CellularAutomaton):
    if f.alphabet != g.alphabet:
        raise AlphabetMismatch("automata are over different alphabets")


def _flat_parts(ca: CellularAutomaton) -> tuple[CellularAutomaton, ...]:
    if ca.parts and ca.name.startswith("compose"):
        return ca.parts
    return (ca,)


def compose(g: CellularAutomaton, f: CellularAutomaton, *, lazy: bool | None = None, cap: int = 10**7) -> CellularAutomaton:
    """The automaton ``g . f`` (apply ``f`` first)."""
    _check_same(f, g)
    m = g.memory + f.memory
    a = g.anticipation + f.anticipation
    k = f.alphabet.size
    size = k ** (a - m + 1)
    if lazy is None:
        lazy = f.lazy or g.lazy or size > cap
    if lazy:
        def fn(words, f=f, g=g):
            return g.apply_words(f.apply_words(words))

        return lazy_ca(f.alphabet, m, a, fn, name="compose", parts=_flat_parts(g) + _flat_parts(f))
    if size > cap:
        raise CapExceeded(f"composition table of size {size} exceeds cap {cap}")
    width = a - m + 1
    table = np.empty(size, dtype=np.int64)
    chunk = max(1, 2**20 // max(width, 1))
    for lo in range(0, size, chunk):
        words = all_words(k, width, lo, lo + chunk)
        table[lo : lo + len(words)] = g.apply_words(f.apply_words(words))[:, 0]
    return from_table(f.alphabet, m, a, table, name=f"{g.name}.{f.name}")


def power(ca: CellularAutomaton, t: int, cap: int = 10**7) -> CellularAutomaton:
    if t < 0:
        raise ValueError("negative powers need an inverse")
    result = identity(ca.alphabet)
    for _ in range(t):
        result = compose(ca, result, cap=cap)
        if not result.lazy:
            result = minimized(result)
    return result


def product(f: CellularAutomaton, g: CellularAutomaton, *, lazy: bool | None = None, cap: int = 10**6) -> CellularAutomaton:
    """Two-layer automaton acting by ``f`` on the first and ``g`` on the second layer."""
    alph = f.alphabet.product(g.alphabet)
    k2 = g.alphabet.size
    m = min(f.memory, g.memory)
    a = max(f.anticipation, g.anticipation)
    width = a - m + 1

    def fn(words):
        up, lo = words // k2, words % k2
        n_out = words.shape[1] - width + 1
        o1 = f.apply_words(up[:, f.memory - m : f.memory - m + n_out + f.width - 1])
        o2 = g.apply_words(lo[:, g.memory - m : g.memory - m + n_out + g.width - 1])
        return o1 * k2 + o2

    size = alph.size**width
    if lazy is None:
        lazy = f.lazy or g.lazy or size > cap
    name = f"({f.name}x{g.name})"
    if lazy:
        return lazy_ca(alph, m, a, fn, name=name, parts=())
    table = np.empty(size, dtype=np.int64)
    chunk = 2**18
    for lo in range(0, size, chunk):
        words = all_words(alph.size, width, lo, lo + chunk)
        table[lo : lo + len(words)] = fn(words)[:, 0]
    return from_table(alph, m, a, table, name)


def minimized(ca: CellularAutomaton) -> CellularAutomaton:
    """Drop window coordinates the rule does not depend on."""
    if ca.lazy:
        return ca
    k = ca.alphabet.size
    t = ca.table.reshape((k,) * ca.width)
    m, a = ca.memory, ca.anticipation
    while t.ndim > 1 and np.all(t == t[0:1]):
        t = t[0]
        m += 1
    while t.ndim > 1 and np.all(t == t[..., 0:1]):
        t = t[..., 0]
        a -= 1
    if t.ndim == 1 and np.all(t == t[0]):
        return from_table(ca.alphabet, 0, 0, t, ca.name)
    return from_table(ca.alphabet, m, a, t.reshape(-1), ca.name)


def same_action(f: CellularAutomaton, g: CellularAutomaton) -> bool:
    """Exact comparison of the global maps of two tabulated automata."""
    _check_same(f, g)
    if f.lazy or g.lazy:
        raise ValueError("exact comparison needs tabulated automata")
    f, g = minimized(f), minimized(g)
    return (f.memory, f.anticipation) == (g.memory, g.anticipation) and np.array_equal(f.table, g.table)


def mirror(ca: CellularAutomaton) -> CellularAutomaton:
    """Conjugate by the reflection ``x[i] -> x[-i]``."""
    if ca.lazy:
        def fn(words, ca=ca):
            return ca.apply_words(words[:, ::-1])[:, ::-1]

        return lazy_ca(ca.alphabet, -ca.anticipation, -ca.memory, fn, name=f"mirror({ca.name})")
    k = ca.alphabet.size
    t = ca.table.reshape((k,) * ca.width)
    t = np.transpose(t, tuple(range(ca.width - 1, -1, -1)))
    return from_table(ca.alphabet, -ca.anticipation, -ca.memory, t.reshape(-1), f"mirror({ca.name})")


def _primitive(w: tuple[int, ...]) -> tuple[int, ...]:
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w == w[:d] * (n // d):
            return w[:d]
    return w


@dataclass(frozen=True)
class Configuration:
    """An eventually periodic configuration ``...LLL C RRR...``.

    ``center`` occupies positions ``start .. start+len(center)-1``; the word
    ``left`` repeats to the left of ``start`` (its last symbol sits at
    ``start-1``) and ``right`` repeats from ``start+len(center)`` onward.
    The stored form is canonical, so equality is equality of configurations.
    """

    left: tuple[int, ...]
    center: tuple[int, ...]
    right: tuple[int, ...]
    start: int = 0

    def __post_init__(self):
        left = tuple(int(s) for s in self.left)
        center = tuple(int(s) for s in self.center)
        right = tuple(int(s) for s in self.right)
        if not left or not right:
            raise ValueError("periodic parts must be non-empty")
        for name, value in _normalize(left, center, right, int(self.start)).items():
            object.__setattr__(self, name, value)

    @classmethod
    def uniform(cls, s: int) -> "Configuration":
        return cls((s,), (), (s,), 0)

    @classmethod
    def periodic(cls, word: Sequence[int]) -> "Configuration":
        """``x[i] = word[i mod len(word)]``."""
        return cls(tuple(word), (), tuple(word), 0)

    @classmethod
    def finite(cls, word: Sequence[int], background: int = 0, start: int = 0) -> "Configuration":
        return cls((background,), tuple(word), (background,), start)

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet, start: int = 0) -> "Configuration":
        """Parse ``LEFT|CENTER|RIGHT`` with the center beginning at ``start``."""
        parts = text.split("|")
        if len(parts) != 3:
            raise ValueError("configuration must have the form LEFT|CENTER|RIGHT")
        left, center, right = (alphabet.parse_word(p) for p in parts)
        return cls(left, center, right, start)

    @property
    def end(self) -> int:
        return self.start + len(self.center)

    def at(self, i: int) -> int:
        if i < self.start:
            return self.left[(i - self.start) % len(self.left)]
        if i < self.end:
            return self.center[i - self.start]
        return self.right[(i - self.end) % len(self.right)]

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Symbols at positions ``lo .. hi-1``."""
        pos = np.arange(lo, hi, dtype=np.int64)
        out = np.empty(pos.size, dtype=np.int64)
        lp = np.asarray(self.left, dtype=np.int64)
        rp = np.asarray(self.right, dtype=np.int64)
        m_left = pos < self.start
        m_right = pos >= self.end
        m_mid = ~(m_left | m_right)
        out[m_left] = lp[(pos[m_left] - self.start) % lp.size]
        out[m_right] = rp[(pos[m_right] - self.end) % rp.size]
        if self.center:
            out[m_mid] = np.asarray(self.center, dtype=np.int64)[pos[m_mid] - self.start]
        return out

    def shifted(self, k: int) -> "Configuration":
        """The translate ``y[i] = x[i+k]``."""
        return Configuration(self.left, self.center, self.right, self.start - k)

    def reflected(self) -> "Configuration":
        """The reflection ``y[i] = x[-i]``."""
        return Configuration(self.right[::-1], self.center[::-1], self.left[::-1], -self.end + 1)

    def symbols_used(self) -> set[int]:
        return set(self.left) | set(self.center) | set(self.right)

    def format(self, alphabet: Alphabet) -> str:
        return "|".join(alphabet.format_word(p) for p in (self.left, self.center, self.right))

    def mapped(self, fn: Callable[[int], int]) -> "Configuration":
        return Configuration(
            tuple(map(fn, self.left)), tuple(map(fn, self.center)), tuple(map(fn, self.right)), self.start
        )


def _normalize(left, center, right, start) -> dict:
    lp, rp = _primitive(left), _primitive(right)
    pl, pr = len(lp), len(rp)
    end = start + len(center)

    def x(i):
        if i < start:
            return lp[(i - start) % pl]
        if i < end:
            return center[i - start]
        return rp[(i - end) % pr]

    def lext(i):
        return lp[(i - start) % pl]

    def rext(i):
        return rp[(i - end) % pr]

    span = pl * pr // math.gcd(pl, pr)
    first = next((i for i in range(start, end + span) if x(i) != lext(i)), None)
    last = next((i for i in range(end - 1, start - span - 1, -1) if x(i) != rext(i)), None)
    if first is None or last is None:
        word = tuple(lext(i) for i in range(pl))
        return dict(left=word, center=(), right=word, start=0)
    lo, hi = first, last + 1
    if hi < lo:
        lo = hi
    return dict(
        left=tuple(lext(lo - pl + r) for r in range(pl)),
        center=tuple(x(i) for i in range(lo, hi)),
        right=tuple(rext(hi + r) for r in range(pr)),
        start=lo,
    )


def step(ca: CellularAutomaton, x: Configuration) -> Configuration:
    """Apply the global map to an eventually periodic configuration."""
    used = x.symbols_used()
    if max(used) >= ca.alphabet.size:
        raise AlphabetMismatch("configuration uses symbols outside the automaton's alphabet")
    m, a = ca.memory, ca.anticipation
    pl, pr = len(x.left), len(x.right)
    lo = x.start - a - pl
    hi = x.end - m + pr
    out = ca.apply_word(x.window(lo + m, hi + a))
    return Configuration(
        tuple(out[:pl]), tuple(out[pl : len(out) - pr]), tuple(out[len(out) - pr :]), x.start - a
    )


def iterate(ca: CellularAutomaton, x: Configuration, n: int) -> list[Configuration]:
    """The orbit ``x, F(x), ..., F^n(x)``."""
    rows = [x]
    for _ in range(n):
        rows.append(step(ca, rows[-1]))
    return rows


@dataclass(frozen=True)
class SpaceTimeDiagram:
    rows: tuple[Configuration, ...]
    alphabet: Alphabet

    @classmethod
    def run(cls, ca: CellularAutomaton, x: Configuration, n: int) -> "SpaceTimeDiagram":
        return cls(tuple(iterate(ca, x, n)), ca.alphabet)

    def render(self, lo: int, hi: int, sep: str | None = None) -> str:
        if sep is None:
            sep = "" if self.alphabet.single_chars() else " "
        lines = []
        for t, row in enumerate(self.rows):
            cells = self.alphabet.decode(row.window(lo, hi))
            lines.append(f"{t:>4} " + sep.join(cells))
        return "\n".join(lines)
