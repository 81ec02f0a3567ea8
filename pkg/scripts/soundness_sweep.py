#!/usr/bin/env python3
"""Stress the one-step and N-step certificates on random quadratic instances.

Samples DC pairs inside randomly jittered parameter points near one anchor
per regime, runs DCA, and reports the worst observed certificate slack.

Example:
    python3 scripts/soundness_sweep.py --per-regime 200 --steps 25 --seed 1
"""
import argparse
import math
import sys

import numpy as np

from dcrates.certificates import check_one_step, check_rate
from dcrates.curvature import Curvature, make_params
from dcrates.engine import run_dca
from dcrates.oracles import FunctionSpec, Quadratic, analytic_infimum, make_instance
from dcrates.regimes import classify

ANCHORS = {
    1: make_params(0.5, 2.0, 0.0, 1.0),
    3: make_params(2.0, 4.0, -1.0, 3.0),
    5: make_params(2.0, 10.0, -1.0, 1.5),
    7: make_params(3.0, 10.0, 0.5, 1.2),
}


def jitter(anchor, target, rng, scale=0.03, tries=200):
    for _ in range(tries):
        vals = [v + rng.uniform(-scale, scale) * (abs(v) if v else 0.5)
                for v in (anchor.mu1, anchor.L1, anchor.mu2, anchor.L2)]
        try:
            p = make_params(*vals)
            if classify(p).index == target:
                return p
        except Exception:
            continue
    raise RuntimeError("no sample for regime %d" % target)


def random_instance(params, rng):
    d = int(rng.integers(1, 4))
    c1 = rng.uniform(max(params.mu1, 0.05 * params.L1), params.L1, d)
    c2 = rng.uniform(params.mu2, params.L2, d)
    f1 = FunctionSpec(Quadratic(tuple(c1), tuple(rng.normal(size=d))),
                      Curvature(params.mu1, params.L1))
    f2 = FunctionSpec(Quadratic(tuple(c2), tuple(rng.normal(size=d))),
                      Curvature(params.mu2, params.L2))
    return make_instance(f1, f2)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--per-regime", type=int, default=200)
    ap.add_argument("--steps", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    anchors = dict(ANCHORS)
    for i, p in ANCHORS.items():
        anchors[i + 1] = p.swapped()

    worst = math.inf
    rate_failures = 0
    total = 0
    for regime in sorted(anchors):
        for _ in range(args.per_regime):
            params = jitter(anchors[regime], regime, rng)
            inst = random_instance(params, rng)
            cert = classify(params)
            traj = run_dca(inst, rng.normal(size=inst.f1.dimension),
                           args.steps)
            total += 1
            for k in range(traj.n_steps):
                worst = min(worst, check_one_step(traj, k, regime=cert).slack)
            _, _, holds = check_rate(traj, fstar=analytic_infimum(inst))
            rate_failures += 0 if holds else 1
        print("regime %d: done (%d instances)" % (regime, args.per_regime))

    print("instances: %d, worst one-step slack: %.3e, rate failures: %d"
          % (total, worst, rate_failures))
    return 0 if (worst >= -1e-9 and rate_failures == 0) else 2


if __name__ == "__main__":
    sys.exit(main())
