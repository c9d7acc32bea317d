"""Front slopes of a fast particle for several inner automata and sets B, on both targets."""

import argparse

from lyapca.core import Alphabet, compose, identity, shift, symbol_map
from lyapca.reduction import speed_experiment


def inner_cases():
    a3 = Alphabet.digits(3)
    yield "identity{b}", identity(Alphabet.of("b")), [{0}, set()]
    yield "shift3", shift(a3), [{0, 1, 2}, {0, 1}, {0}, set()]
    yield "rot3.shift3", compose(symbol_map(a3, [1, 2, 0]), shift(a3)), [{0, 1, 2}, {0, 1}, set()]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=60)
    args = ap.parse_args()
    print("inner,B,target,slope,classification")
    for name, G, bsets in inner_cases():
        for B in bsets:
            for target in ("sofic", "conveyor"):
                rep = speed_experiment(G, B, args.n, target=target)
                b = "".join(map(str, sorted(B))) or "-"
                print(f"{name},{b},{target},{float(rep.slope):.4f},{rep.classification}")


if __name__ == "__main__":
    main()
