"""Command-line front end.

Exit codes: 0 success, 1 a checked property is false, 2 undecided within
caps, 3 bad input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import mult, tiles
from .analysis import (
    ExponentReport,
    is_injective,
    is_surjective,
    lambda_bar_finite,
    lambda_finite,
    max_lambda_finite,
)
from .core import CapExceeded, CellularAutomaton, Configuration, SpaceTimeDiagram
from .io import FormatError, format_rule, format_tiles, read_rule, read_tiles

OK, FALSE, UNDECIDED, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def fmt_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator},{float(x):.6f}"


def _yes(verdict) -> str:
    return {True: "yes", False: "no", None: "undecided"}[verdict]


def _code(verdicts) -> int:
    if any(v is False for v in verdicts):
        return FALSE
    if any(v is None for v in verdicts):
        return UNDECIDED
    return OK


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(ca: CellularAutomaton, spec: str, start: int) -> Configuration:
    try:
        return Configuration.parse(spec, ca.alphabet, start)
    except ValueError as e:
        raise InputError(f"bad configuration {spec!r}: {e}") from None


def _bset(ca: CellularAutomaton, spec: str) -> frozenset[int]:
    toks = [t for t in spec.replace(",", " ").split() if t]
    try:
        return frozenset(ca.alphabet.index(t) for t in toks)
    except ValueError as e:
        raise InputError(str(e)) from None


def _word(w) -> str:
    return " ".join(str(int(s)) for s in w)


def _certificate(alph, cert) -> str:
    if cert is None:
        return ""
    if isinstance(cert, tuple) and cert and isinstance(cert[0], Configuration):
        return " vs ".join(c.format(alph) for c in cert)
    if isinstance(cert, Configuration):
        return cert.format(alph)
    if isinstance(cert, tuple) and all(isinstance(s, (int, np.integer)) for s in cert):
        return alph.format_word(cert)
    return str(cert)


# ---------------------------------------------------------------- commands


def cmd_check(args) -> int:
    ca = read_rule(args.rulefile)
    inj = is_injective(ca)
    sur = is_surjective(ca)
    rev = inj.verdict if inj.verdict is not True else sur.verdict
    rows = [
        ("injective", inj.verdict, _certificate(ca.alphabet, inj.certificate)),
        ("surjective", sur.verdict, _certificate(ca.alphabet, sur.certificate)),
        ("reversible", rev, ""),
    ]
    if args.csv:
        print("property,verdict,certificate")
        for name, v, cert in rows:
            print(f"{name},{_yes(v)},{cert}")
    else:
        for name, v, cert in rows:
            print(f"{name}: {_yes(v)}" + (f"  certificate: {cert}" if cert else ""))
    return _code([inj.verdict, sur.verdict])


def _lyap_avg(args) -> int:
    if args.p is None or args.q is None:
        raise InputError("--avg needs -p and -q")
    method = args.method or "closed"
    print("n,avg,avg_decimal,avg_over_n,avg_over_n_decimal")
    rng = np.random.default_rng(args.seed)
    for i in range(1, args.n + 1):
        if method == "closed":
            val = mult.avg_exponent_closed(args.p, args.q, i).average
        elif method == "brute":
            val = mult.partition_sizes_bruteforce(args.p, args.q, i).average
        elif method == "sample":
            val = Fraction(mult.avg_exponent_sampled(args.p, args.q, i, args.samples, rng)).limit_denominator(10**6)
        else:
            raise InputError(f"--avg does not support --method {method}")
        print(f"{i},{fmt_rational(val)},{fmt_rational(val / i)}")
    return OK


def cmd_lyap(args) -> int:
    if args.n < 1:
        raise InputError("-n must be at least 1")
    if args.mode == "avg":
        return _lyap_avg(args)
    if args.rulefile is None:
        raise InputError("a rule file is required")
    ca = read_rule(args.rulefile)
    method = {"brute": "brute", None: "propagate", "propagate": "propagate"}.get(args.method)
    if method is None:
        raise InputError(f"--method {args.method} only applies to --avg")
    if args.mode != "max":
        if args.config is None:
            raise InputError("a configuration LEFT|CENTER|RIGHT is required")
        x = _config(ca, args.config, args.start)
    print("n,lambda,lambda_decimal,lambda_over_n,lambda_over_n_decimal")
    status = OK
    for i in range(1, args.n + 1):
        try:
            if args.mode == "max":
                rep: ExponentReport = max_lambda_finite(ca, i, args.direction)
            elif args.mode == "bar":
                rep = lambda_bar_finite(ca, x, i, args.direction, method)
            else:
                rep = lambda_finite(ca, x, i, args.direction, method)
        except CapExceeded:
            print(f"{i},undecided,,,")
            status = UNDECIDED
            continue
        print(f"{i},{fmt_rational(rep.value)},{fmt_rational(rep.normalized)}")
    return status


def cmd_run(args) -> int:
    ca = read_rule(args.rulefile)
    x = _config(ca, args.config, args.start)
    lo = args.lo if args.lo is not None else x.start - 10
    hi = args.hi if args.hi is not None else x.end + 10
    print(SpaceTimeDiagram.run(ca, x, args.t).render(lo, hi))
    return OK


def cmd_mult(args) -> int:
    try:
        if args.action == "gen":
            p, n = args.ints
            _emit(format_rule(mult.make_mult_ca(p, n)), args.out)
            return OK
        if args.action == "lemmas":
            p, q = args.ints
            rep = mult.check_digit_lemmas(p, q, args.k, args.t)
            total = sum(len(v) for v in rep.counterexamples.values())
            print(f"words checked: {rep.words_checked}")
            for name, bad in rep.counterexamples.items():
                print(f"{name}: {len(bad)}" + (f"  e.g. {_word(bad[0])}" if bad else ""))
            print(f"counterexamples: {total}")
            return OK if rep.ok else FALSE
        if args.action == "witness":
            p, q, n = args.ints
            rep = mult.witness_pair(p, q, n, with_exponent=True)
            ok = all(rep.separated)
            digits = mult.make_mult_ca(p, p * q).alphabet
            print(f"x: {rep.x.format(digits)}")
            print(f"y: {rep.y.format(digits)}")
            print(f"differ only at 0: {_yes(rep.differ_only_at_origin)}")
            print(f"diverges at steps 0..{n}: {_yes(ok)}")
            print(f"left exponent at translate: {rep.lambda_left}")
            return OK if ok and rep.differ_only_at_origin else FALSE
        if args.action == "avg":
            p, q, n = args.ints
            br = mult.avg_exponent_closed(p, q, n)
            print("i,d,p,P")
            for i in range(n + 1):
                print(f"{i},{br.d[i]},{br.pset[i]},{br.P[i]}")
            print(f"\nkappa: {br.kappa}")
            print(f"average: {fmt_rational(br.average)}")
            print(f"average/n: {fmt_rational(br.normalized)}")
            print(f"limit log_pq(p): {br.limit:.6f}")
            return OK if not br.invariants() else FALSE
    except ValueError as e:
        raise InputError(str(e)) from None
    raise InputError(f"unknown action {args.action}")


def cmd_tiles(args) -> int:
    ts = read_tiles(args.tilefile)
    rep = tiles.check_determinism(ts)
    if args.action == "check":
        print(f"NE-deterministic: {_yes(rep.ne)}" + (f"  clash: {' '.join(rep.ne_violation)}" if rep.ne_violation else ""))
        print(f"SW-deterministic: {_yes(rep.sw)}" + (f"  clash: {' '.join(rep.sw_violation)}" if rep.sw_violation else ""))
        print(f"two-way deterministic: {_yes(rep.two_way)}")
        print(f"complete: {_yes(tiles.is_complete(ts))}")
        return OK if rep.two_way else FALSE
    if not rep.two_way:
        raise InputError("tile set is not two-way deterministic")
    full = tiles.complete(ts)
    if args.action == "complete":
        _emit(format_tiles(full), args.out)
    else:
        _emit(format_rule(tiles.ca_from_tileset(full)), args.out)
    return OK


def _reduction_target(name: str) -> str:
    return {"sofic": "sofic", "fullshift": "conveyor", "conveyor": "conveyor"}[name]


def cmd_reduce(args) -> int:
    from .reduction import build_conveyor_F, build_immortality_ca, build_sofic_F, speed_experiment
    from .tiles import search_local_immortality

    if args.action == "immortality":
        ts = read_tiles(args.file)
        if not tiles.check_determinism(ts).two_way:
            raise InputError("tile set is not two-way deterministic")
        bundle = build_immortality_ca(ts)
        if args.out:
            Path(args.out).write_text(format_rule(bundle.F), encoding="utf-8")
        print(f"alphabet size: {bundle.alphabet.size}")
        print(f"memory: {bundle.F.memory}  anticipation: {bundle.F.anticipation}")
        print(f"B: {' '.join(bundle.alphabet.symbols[b] for b in sorted(bundle.B))}")
        wit = search_local_immortality(bundle.F, bundle.B, 0, 1, period_cap=args.period_cap)
        print("witness: " + (wit.format(bundle.alphabet) if wit else "none found"))
        return OK

    G = read_rule(args.file)
    bset = _bset(G, args.B)
    target = _reduction_target(args.target)
    try:
        if args.action == "build":
            bundle = build_sofic_F(G, bset) if target == "sofic" else build_conveyor_F(G, bset)
            print("component,memory,anticipation,injective,surjective")
            verdicts = []
            for part in (bundle.F1, bundle.G2, bundle.F2):
                inj, sur = is_injective(part), is_surjective(part)
                verdicts += [inj.verdict, sur.verdict]
                print(f"{part.name},{part.memory},{part.anticipation},{_yes(inj.verdict)},{_yes(sur.verdict)}")
            print(f"F,{bundle.F.memory},{bundle.F.anticipation},{_yes(is_injective(bundle.F).verdict)},"
                  f"{_yes(is_surjective(bundle.F).verdict)}")
            return _code(verdicts)
        rep = speed_experiment(G, bset, args.n, target=target, tol=args.tol)
    except ValueError as e:
        raise InputError(str(e)) from None
    print("t,front")
    for t, p in enumerate(rep.positions):
        print(f"{t},{p}")
    print()
    print(f"slope: {fmt_rational(rep.slope)}")
    print(f"classification: {rep.classification}")
    return OK if rep.classification != "inconclusive" else UNDECIDED


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lyapca", description="Lyapunov exponents of one-dimensional cellular automata.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="injectivity and surjectivity of a rule")
    c.add_argument("rulefile")
    c.add_argument("--csv", action="store_true")
    c.set_defaults(func=cmd_check)

    ly = sub.add_parser("lyap", help="finite-time exponents for horizons 1..n")
    ly.add_argument("rulefile", nargs="?")
    ly.add_argument("config", nargs="?", help="LEFT|CENTER|RIGHT")
    ly.add_argument("-n", type=int, required=True)
    ly.add_argument("--direction", choices=("left", "right"), default="right")
    mode = ly.add_mutually_exclusive_group()
    mode.add_argument("--point", dest="mode", action="store_const", const="point")
    mode.add_argument("--bar", dest="mode", action="store_const", const="bar", help="maximum over translates")
    mode.add_argument("--max", dest="mode", action="store_const", const="max", help="maximum over configurations")
    mode.add_argument("--avg", dest="mode", action="store_const", const="avg", help="uniform average (mult rules)")
    ly.set_defaults(mode="point")
    ly.add_argument("--method", choices=("brute", "propagate", "closed", "sample"))
    ly.add_argument("-p", type=int)
    ly.add_argument("-q", type=int)
    ly.add_argument("--start", type=int, default=0, help="position of the first center cell")
    ly.add_argument("--samples", type=int, default=2000)
    ly.add_argument("--seed", type=int, default=0)
    ly.set_defaults(func=cmd_lyap)

    r = sub.add_parser("run", help="ASCII space-time diagram")
    r.add_argument("rulefile")
    r.add_argument("config")
    r.add_argument("-t", type=int, default=20)
    r.add_argument("--start", type=int, default=0)
    r.add_argument("--lo", type=int)
    r.add_argument("--hi", type=int)
    r.set_defaults(func=cmd_run)

    m = sub.add_parser("mult", help="multiplication automata")
    m.add_argument("action", choices=("gen", "lemmas", "witness", "avg"))
    m.add_argument("ints", type=int, nargs="+", help="gen P N | lemmas P Q | witness P Q N | avg P Q N")
    m.add_argument("--k", type=int, default=4)
    m.add_argument("--t", type=int, default=2)
    m.add_argument("-o", "--out")
    m.set_defaults(func=cmd_mult)

    t = sub.add_parser("tiles", help="Wang tile sets")
    t.add_argument("action", choices=("check", "complete", "toca"))
    t.add_argument("tilefile")
    t.add_argument("-o", "--out")
    t.set_defaults(func=cmd_tiles)

    rd = sub.add_parser("reduce", help="particle constructions and their front speed")
    rd.add_argument("action", choices=("build", "speed", "immortality"))
    rd.add_argument("file", help="inner rule file (build, speed) or tile file (immortality)")
    rd.add_argument("--B", default="", help="symbols of B, comma or space separated")
    rd.add_argument("--target", choices=("sofic", "fullshift", "conveyor"), default="fullshift")
    rd.add_argument("-n", type=int, default=60)
    rd.add_argument("--tol", type=float, default=0.1)
    rd.add_argument("--period-cap", type=int, default=2)
    rd.add_argument("-o", "--out")
    rd.set_defaults(func=cmd_reduce)
    return ap


_ARITY = {"gen": 2, "lemmas": 2, "witness": 3, "avg": 3}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "mult" and len(args.ints) != _ARITY[args.action]:
        print(f"lyapca: error: mult {args.action} takes {_ARITY[args.action]} integers", file=sys.stderr)
        return INPUT_ERROR
    try:
        return args.func(args)
    except (InputError, FormatError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except CapExceeded as e:
        print(f"undecided: {e}", file=sys.stderr)
        return UNDECIDED


if __name__ == "__main__":
    sys.exit(main())
