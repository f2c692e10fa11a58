#!/usr/bin/env python3
"""Printed versus exact lotteryized values over a (q, N) grid, as CSV.

    python scripts/lotteryization_report.py --q 1/1000 1/100 1/10 1/2 --n-max 50 -o report.csv
"""
import argparse
import sys
from fractions import Fraction

from nonmono.prob import format_discrepancy, lotteryization_discrepancy, warrant_threshold


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", nargs="+", type=Fraction, default=[Fraction(1, 1000), Fraction(1, 100),
                                                              Fraction(1, 10), Fraction(1, 2)])
    ap.add_argument("--n-min", type=int, default=2)
    ap.add_argument("--n-max", type=int, default=50)
    ap.add_argument("-o", "--output", help="write CSV here instead of stdout")
    args = ap.parse_args(argv)

    rows = lotteryization_discrepancy(args.q, range(args.n_min, args.n_max + 1))
    text = format_discrepancy(rows)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    for q in args.q:
        printed, exact = warrant_threshold(q, "paper"), warrant_threshold(q, "exact")
        print(f"q={q}: printed form flips at N={printed.n} (bound {printed.printed_bound}), "
              f"exact form at N={exact.n}", file=sys.stderr)


if __name__ == "__main__":
    main()
