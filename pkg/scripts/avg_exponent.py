"""Average left exponent of Mul_{p,pq} per horizon, exact and as a decimal, against log_pq(p)."""

import argparse
import math

from lyapca.mult import avg_exponent_closed, partition_sizes_bruteforce


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-p", type=int, default=2)
    ap.add_argument("-q", type=int, default=3)
    ap.add_argument("-n", type=int, default=60)
    ap.add_argument("--check-brute", type=int, default=0, help="cross-check horizons up to this value")
    args = ap.parse_args()
    lim = math.log(args.p) / math.log(args.p * args.q)
    print("n,kappa,avg,avg_over_n,gap,brute_agrees")
    for n in range(1, args.n + 1):
        br = avg_exponent_closed(args.p, args.q, n)
        agree = ""
        if n <= args.check_brute:
            agree = str(partition_sizes_bruteforce(args.p, args.q, n).P == br.P)
        r = float(br.normalized)
        print(f"{n},{br.kappa},{br.average.numerator}/{br.average.denominator},{r:.6f},{r - lim:+.6f},{agree}")


if __name__ == "__main__":
    main()
