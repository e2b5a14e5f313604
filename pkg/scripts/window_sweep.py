#!/usr/bin/env python3
"""Rebuild the no-violation-vs-window-width reference sweep.

Chains of N senders with i.i.d. exponential transmission times of mean
0.5*tau; sweeps W/tau over 0..3 in steps of 0.25 with common random numbers,
so each curve is exactly comparable point to point.
"""

import argparse
import sys

from twisim.harness import FIG8_HEADER, reproduce_window_sweep, rows_to_csv


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--n", type=int, nargs="+", default=[2, 10], help="chain lengths")
    parser.add_argument("--out", help="CSV output path (default: stdout)")
    args = parser.parse_args()

    rows = reproduce_window_sweep(args.trials, args.seed, args.threads, n_values=args.n)
    text = rows_to_csv(FIG8_HEADER, rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
