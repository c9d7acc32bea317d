"""Space-time diagram of the pair q^n - 1, q^n under Mul_{p,pq} with the disagreement marked."""

import argparse

from lyapca.core import iterate
from lyapca.mult import make_mult_ca, witness_pair


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-p", type=int, default=2)
    ap.add_argument("-q", type=int, default=3)
    ap.add_argument("-n", type=int, default=12)
    args = ap.parse_args()
    p, q, n = args.p, args.q, args.n
    rep = witness_pair(p, q, n, with_exponent=True)
    ca = make_mult_ca(p, p * q)
    lo, hi = -n - 2, max(rep.x.end, rep.y.end) + 2
    for t, (a, b) in enumerate(zip(iterate(ca, rep.x, n), iterate(ca, rep.y, n))):
        row = "".join(str(a.at(i)) if a.at(i) == b.at(i) else "*" for i in range(lo, hi))
        print(f"{t:>3} {row}")
    print(f"separated at -t for every t: {all(rep.separated)}")
    print(f"left exponent at the translate: {rep.lambda_left} (n = {n})")


if __name__ == "__main__":
    main()
