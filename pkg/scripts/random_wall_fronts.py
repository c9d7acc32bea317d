"""Front slopes of a fast particle over random inner configurations and random walls."""

import argparse

import numpy as np

from lyapca.analysis import front_trace
from lyapca.core import Alphabet, Configuration, shift
from lyapca.reduction import build_sofic_F
from lyapca.reduction.experiment import classify
from lyapca.reduction.particle import EMPTY, FAST_R, WALL


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=60)
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--wall-density", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    G = shift(Alphabet.digits(3))
    print("sample,B,slope,classification")
    for B in ({0, 1, 2}, {0, 1}, {0}):
        bundle = build_sofic_F(G, B)
        for s in range(args.samples):
            width = 3 * args.n
            walls = np.where(rng.random(width) < args.wall_density, WALL, EMPTY)
            walls[width // 2] = EMPTY
            lower = Configuration((0,), tuple(int(v) for v in rng.integers(0, 3, 12 * args.n)), (0,), -6 * args.n)
            base = tuple(int(v) for v in walls)
            up_x = Configuration((EMPTY,), base, (EMPTY,), -width // 2)
            pert = list(base)
            pert[width // 2] = FAST_R
            up_y = Configuration((EMPTY,), tuple(pert), (EMPTY,), -width // 2)
            x, y = bundle.make_config(up_x, lower), bundle.make_config(up_y, lower)
            tr = front_trace(bundle.F, x, y, args.n, "right")
            b = "".join(map(str, sorted(B)))
            print(f"{s},{b},{float(tr.slope):.4f},{classify(tr.slope)}")


if __name__ == "__main__":
    main()
