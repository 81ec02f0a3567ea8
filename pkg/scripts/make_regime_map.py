#!/usr/bin/env python3
"""Emit the (mu1, mu2) regime grid for fixed smoothness constants as CSV.

Example:
    python3 scripts/make_regime_map.py --L1 2 --L2 1 --grid=-1:2:400 \
        --out regime_map.csv
"""
import argparse
import csv
import sys

from dcrates.regimes import GridSpec, regime_map


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L1", type=float, required=True)
    ap.add_argument("--L2", type=float, required=True)
    ap.add_argument("--grid", required=True, help="lo:hi:steps for both axes")
    ap.add_argument("--out", default="regime_map.csv")
    args = ap.parse_args(argv)

    rows = regime_map(args.L1, args.L2, GridSpec.parse(args.grid))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mu1", "mu2", "regime", "p"])
        w.writerows(rows)
    counts = {}
    for _, _, idx, _ in rows:
        counts[idx] = counts.get(idx, 0) + 1
    print("wrote %d rows to %s" % (len(rows), args.out))
    print("regime counts (0 = outside the valid set): %s"
          % dict(sorted(counts.items())))
    return 0


if __name__ == "__main__":
    sys.exit(main())
