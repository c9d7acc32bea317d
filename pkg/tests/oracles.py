"""Slow reference implementations used to cross-check the library."""

from __future__ import annotations

import itertools


def step_cells(f, m: int, a: int, cells: dict[int, int], lo: int, hi: int) -> tuple[dict[int, int], int, int]:
    """One step on the finite segment ``[lo, hi)``; returns the segment where the result is determined."""
    out = {}
    for i in range(lo - m, hi - a):
        out[i] = f(*(cells[i + j] for j in range(m, a + 1)))
    return out, lo - m, hi - a


def lambda_plus(f, m: int, a: int, k: int, x, n: int) -> int:
    """Least ``s >= 0`` such that edits strictly left of ``-s`` leave cells ``>= 0`` unchanged for ``n`` steps.

    ``x`` maps positions to symbols over ``range(k)``.  Edits are tried on every assignment of
    the ``n * reach`` cells just left of ``-s``; cells further left cannot
    reach cell 0 within ``n`` steps.
    """
    reach = max(0, -m)
    span = max(abs(m), abs(a), 1)
    lo = -2 * n * reach - n * span - 2
    hi = 2 * n * span + 2
    base = {i: x(i) for i in range(lo, hi)}
    ref = [base]
    seg = (lo, hi)
    cur, clo, chi = base, lo, hi
    for _ in range(n):
        cur, clo, chi = step_cells(f, m, a, cur, clo, chi)
        ref.append(cur)
    for s in range(0, n * reach + 1):
        ok = True
        region = list(range(-s - n * reach, -s))
        for vals in itertools.product(range(k), repeat=len(region)):
            y = dict(base)
            y.update(zip(region, vals))
            cur, clo, chi = y, seg[0], seg[1]
            for t in range(1, n + 1):
                cur, clo, chi = step_cells(f, m, a, cur, clo, chi)
                if any(cur[i] != ref[t][i] for i in range(0, chi)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return s
    raise AssertionError("no radius found")


def lambda_minus(f, m: int, a: int, k: int, x, n: int) -> int:
    """Mirror image of :func:`lambda_plus`."""
    g = lambda *w: f(*reversed(w))  # noqa: E731
    return lambda_plus(g, -a, -m, k, lambda i: x(-i), n)
