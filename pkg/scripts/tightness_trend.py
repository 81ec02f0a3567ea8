#!/usr/bin/env python3
"""Probe worst-case ratios over increasing horizons and fit the slope.

For sublinear regimes the per-horizon worst-case ratio is expected to decay
like 1/(aN + b); this fits (a, b) and compares a against the conjectured
asymptotic constant.  The local search is a lower bound on the true
worst case, so the fitted slope is an overestimate of that constant.

Example:
    python3 scripts/tightness_trend.py --mu1 1 --L1 10 --mu2=-0.8 --L2 2 \
        --horizons 2,4,6,8,10 --budget 150000
"""
import argparse
import json
import sys

from dcrates.curvature import make_params
from dcrates.probe import ratio_trend


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu1", type=float, required=True)
    ap.add_argument("--L1", type=float, required=True)
    ap.add_argument("--mu2", type=float, required=True)
    ap.add_argument("--L2", type=float, required=True)
    ap.add_argument("--horizons", default="2,4,6,8,10")
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--budget", type=int, default=150000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--starts", type=int, default=16)
    ap.add_argument("--out", help="optional JSON output path")
    args = ap.parse_args(argv)

    params = make_params(args.mu1, args.L1, args.mu2, args.L2)
    horizons = tuple(int(v) for v in args.horizons.split(","))
    out = ratio_trend(params, horizons, d=args.d, budget=args.budget,
                      seed=args.seed, starts=args.starts)

    for N in horizons:
        r = out["results"][N]
        print("N=%2d  best ratio %.6f  certified %.6f  evals %d"
              % (N, r.best_ratio, r.certified_bound, r.evals))
    print("fit 1/ratio = a N + b:  a = %.6f  b = %.6f"
          % (out["a_fit"], out["b_fit"]))
    asym = out["asymptotic"]
    if asym is not None:
        print("conjectured asymptotic constants: p5_inf = %.6f, p6_inf = %.6f"
              % (asym.p5_inf, asym.p6_inf))
    if args.out:
        payload = {
            "params": params.to_json_dict(),
            "horizons": list(horizons),
            "ratios": {str(N): out["results"][N].best_ratio for N in horizons},
            "a_fit": out["a_fit"],
            "b_fit": out["b_fit"],
        }
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
        print("wrote %s" % args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
