"""Text formats for rule tables and tile sets.

Rule files::

    ca v1
    alphabet 0 1
    memory 0
    anticipation 1
    0 0 -> 0
    0 1 -> 1
    default 0

Tile files::

    tiles v1
    colors r g
    tile a r g r g

Blank lines and anything after ``#`` are ignored.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import Alphabet, CellularAutomaton, all_words, from_table
from .tiles import TileSet, WangTile


class FormatError(ValueError):
    """A malformed rule or tile file; the message names the offending line."""

    def __init__(self, lineno: int | None, msg: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _header(lines, expected: str) -> None:
    try:
        no, line = next(lines)
    except StopIteration:
        raise FormatError(None, "empty file") from None
    if line.split() != expected.split():
        raise FormatError(no, f"expected header {expected!r}, got {line!r}")


def parse_rule(text: str, name: str = "") -> CellularAutomaton:
    lines = _lines(text)
    _header(lines, "ca v1")
    alphabet = None
    fields: dict[str, int] = {}
    rules: list[tuple[int, list[str], str]] = []
    default = None
    for no, line in lines:
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if "->" in line:
            lhs, _, rhs = line.partition("->")
            rules.append((no, lhs.split(), rhs.strip()))
        elif key == "alphabet":
            try:
                alphabet = Alphabet(tuple(rest.split()))
            except ValueError as e:
                raise FormatError(no, str(e)) from None
        elif key in ("memory", "anticipation"):
            try:
                fields[key] = int(rest)
            except ValueError:
                raise FormatError(no, f"{key} must be an integer") from None
        elif key == "default":
            default = (no, rest)
        else:
            raise FormatError(no, f"unrecognized line {line!r}")
    if alphabet is None:
        raise FormatError(None, "missing alphabet line")
    for key in ("memory", "anticipation"):
        if key not in fields:
            raise FormatError(None, f"missing {key} line")
    m, a = fields["memory"], fields["anticipation"]
    if a < m:
        raise FormatError(None, "anticipation must be at least memory")
    k, w = alphabet.size, a - m + 1
    table = np.full(k**w, -1, dtype=np.int64)

    def sym(no, s):
        try:
            return alphabet.index(s)
        except ValueError as e:
            raise FormatError(no, str(e)) from None

    for no, lhs, rhs in rules:
        if len(lhs) != w:
            raise FormatError(no, f"rule needs {w} symbols on the left, got {len(lhs)}")
        code = 0
        for s in lhs:
            code = code * k + sym(no, s)
        if table[code] >= 0:
            raise FormatError(no, "duplicate rule")
        table[code] = sym(no, rhs)
    if default is not None:
        table[table < 0] = sym(*default)
    if np.any(table < 0):
        missing = alphabet.decode(all_words(k, w)[int(np.argmax(table < 0))])
        raise FormatError(None, f"rule table incomplete and no default, e.g. {' '.join(missing)}")
    return from_table(alphabet, m, a, table, name)


def format_rule(ca: CellularAutomaton) -> str:
    """Serialize every rule in lexicographic window order."""
    if ca.lazy:
        raise ValueError("lazy automata have no rule table to write")
    alph = ca.alphabet
    lines = [
        "ca v1",
        "alphabet " + " ".join(alph.symbols),
        f"memory {ca.memory}",
        f"anticipation {ca.anticipation}",
    ]
    words = all_words(alph.size, ca.width)
    for word, out in zip(words, ca.table):
        lines.append(" ".join(alph.decode(word)) + " -> " + alph.symbols[int(out)])
    return "\n".join(lines) + "\n"


def parse_tiles(text: str) -> TileSet:
    lines = _lines(text)
    _header(lines, "tiles v1")
    colors: tuple[str, ...] = ()
    tiles = []
    seen = set()
    for no, line in lines:
        parts = line.split()
        if parts[0] == "colors":
            colors = tuple(parts[1:])
        elif parts[0] == "tile":
            if len(parts) != 6:
                raise FormatError(no, "tile line needs: tile <id> <N> <E> <S> <W>")
            if parts[1] in seen:
                raise FormatError(no, f"duplicate tile id {parts[1]!r}")
            seen.add(parts[1])
            tiles.append(WangTile(*parts[1:]))
            if colors and not set(parts[2:]) <= set(colors):
                raise FormatError(no, "tile uses an undeclared color")
        else:
            raise FormatError(no, f"unrecognized line {line!r}")
    if not tiles:
        raise FormatError(None, "no tiles")
    return TileSet(tuple(tiles), colors)


def format_tiles(ts: TileSet) -> str:
    lines = ["tiles v1", "colors " + " ".join(ts.colors)]
    lines += [f"tile {t.id} {t.n} {t.e} {t.s} {t.w}" for t in ts.tiles]
    return "\n".join(lines) + "\n"


def read_rule(path: str | Path) -> CellularAutomaton:
    path = Path(path)
    return parse_rule(path.read_text(encoding="utf-8"), path.stem)


def read_tiles(path: str | Path) -> TileSet:
    return parse_tiles(Path(path).read_text(encoding="utf-8"))
