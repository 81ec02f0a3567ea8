"""Command-line front end.

Exit codes: 0 success, 1 validation/usage error, 2 when a certificate check
fails (slack below tolerance) -- the CI-visible signal.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .curvature import DcParams, InvalidParams, make_params, validate
from .regimes import (GridSpec, NoRegime, one_step_certificate, regime_map,
                      thresholds)
from .oracles import instance_from_json
from .engine import (run_dca, trajectory_to_csv, trajectory_to_json,
                     trajectory_from_json)
from .certificates import certificate_report
from .interpolation import check_interpolation, triplets_from_json
from .curvature import Curvature
from .probe import probe as run_probe

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2


def _formula_revision() -> str:
    src = Path(__file__).with_name("regimes.py").read_bytes()
    return hashlib.sha256(src).hexdigest()[:12]


def _parse_ext(s: str) -> float:
    if s.lower() in ("inf", "infinity"):
        return math.inf
    return float(s)


def _params_from_args(args) -> DcParams:
    if getattr(args, "params", None):
        with open(args.params) as fh:
            return DcParams.from_json_dict(json.load(fh))
    missing = [k for k in ("mu1", "L1", "mu2", "L2")
               if getattr(args, k, None) is None]
    if missing:
        raise InvalidParams("missing parameters: %s (or use --params)"
                            % ", ".join(missing))
    return make_params(args.mu1, args.L1, args.mu2, args.L2)


def _emit(payload: dict, out: str | None):
    payload = dict(payload, formula_revision=_formula_revision())
    text = json.dumps(payload, indent=2, default=str)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_classify(args) -> int:
    params = _params_from_args(args)
    rep = validate(params)
    if not rep.ok:
        print("invalid parameters: " + "; ".join(rep.violations), file=sys.stderr)
        return EXIT_USAGE
    cert = one_step_certificate(params)
    thr = thresholds(params)
    print("regime %d (%s): sigma=%.12g sigma_plus=%.12g p=%.12g alpha=%.12g"
          % (cert.index, cert.label, cert.sigma, cert.sigma_plus,
             cert.p, cert.alpha))
    print("thresholds: S1=%g S2=%g" % (thr.S1, thr.S2))
    if args.out:
        _emit({"params": params.to_json_dict(),
               "certificate": cert.to_json_dict(),
               "S1": thr.S1, "S2": thr.S2}, args.out)
    return EXIT_OK


def cmd_regime_map(args) -> int:
    grid = GridSpec.parse(args.grid)
    rows = regime_map(args.L1, args.L2, grid)
    target = args.out or "regime_map.csv"
    with open(target, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mu1", "mu2", "regime", "p"])
        w.writerows(rows)
    counts = {}
    for _, _, idx, _ in rows:
        counts[idx] = counts.get(idx, 0) + 1
    print("wrote %d rows to %s; regime counts: %s"
          % (len(rows), target, dict(sorted(counts.items()))))
    return EXIT_OK


def _load_instance(path: str):
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def cmd_run(args) -> int:
    inst = _load_instance(args.instance)
    x0 = np.array([float(v) for v in args.x0.split(",")])
    traj = run_dca(inst, x0, args.N, tol=args.tol, policy=args.policy,
                   stop_on=args.stop_on)
    if args.out:
        payload = trajectory_to_json(traj)
        payload["tolerances"] = {"stop_tol": args.tol}
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    if args.csv:
        Path(args.csv).write_text(trajectory_to_csv(traj))
    print("ran %d step(s), stop_reason=%s, F: %.12g -> %.12g"
          % (traj.n_steps, traj.stop_reason,
             traj.points[0].F, traj.points[-1].F))
    if args.certify:
        report = certificate_report(traj, fstar=args.fstar, tol=args.check_tol)
        _emit(report, args.report_out)
        if not report["holds"]:
            return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_certify(args) -> int:
    with open(args.traj) as fh:
        payload = json.load(fh)
    traj = trajectory_from_json(payload)
    report = certificate_report(traj, fstar=args.fstar, tol=args.check_tol)
    _emit(report, args.out)
    return EXIT_OK if report["holds"] else EXIT_CHECK_FAILED


def cmd_interp_check(args) -> int:
    with open(args.triplets) as fh:
        triplets = triplets_from_json(json.load(fh))
    rep = check_interpolation(triplets, Curvature(args.mu, args.L), args.tol)
    _emit({"feasible": rep.feasible, "min_slack": rep.min_slack,
           "tol": rep.tol, "n_points": len(triplets)}, args.out)
    return EXIT_OK if rep.feasible else EXIT_CHECK_FAILED


def cmd_probe(args) -> int:
    params = _params_from_args(args)
    result = run_probe(params, N=args.N, d=args.d, budget=args.budget,
                       seed=args.seed, starts=args.starts,
                       warm=not args.cold)
    payload = {
        "params": params.to_json_dict(),
        "N": args.N, "d": args.d, "budget": args.budget, "seed": args.seed,
        "best_ratio": result.best_ratio,
        "certified_bound": result.certified_bound,
        "gap": result.gap,
        "budget_exhausted": result.budget_exhausted,
        "certificate_violation": result.certificate_violation,
        "evals": result.evals,
    }
    if result.witness is not None:
        w = result.witness
        payload["witness"] = {"x": w.x.tolist(), "g1": w.g1.tolist(),
                              "g2": w.g2.tolist(), "f1": w.f1.tolist(),
                              "f2": w.f2.tolist()}
    _emit(payload, args.out)
    return EXIT_CHECK_FAILED if result.certificate_violation else EXIT_OK


def cmd_report(args) -> int:
    inst = _load_instance(args.instance)
    x0 = np.array([float(v) for v in args.x0.split(",")])
    traj = run_dca(inst, x0, args.N, tol=args.tol, policy=args.policy)
    report = certificate_report(traj, fstar=args.fstar, tol=args.check_tol)
    cert = one_step_certificate(inst.params)
    payload = {
        "instance_params": inst.params.to_json_dict(),
        "regime": cert.to_json_dict(),
        "trajectory": {"n_steps": traj.n_steps,
                       "stop_reason": traj.stop_reason,
                       "F_first": traj.points[0].F,
                       "F_last": traj.points[-1].F,
                       "min_grad_gap_sq": traj.min_grad_gap_sq()},
        "certificates": report,
    }
    _emit(payload, args.out)
    return EXIT_OK if report["holds"] else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="dcrates",
        description="DCA rate certificates: classify, run, verify, probe.")
    top.add_argument("--version", action="version",
                     version="%(prog)s " + __version__
                     + " (formula revision " + _formula_revision() + ")")
    top.add_argument("--config", help="JSON file with flag defaults")
    sub = top.add_subparsers(dest="command", required=True)

    def add_params(p):
        p.add_argument("--params", help="JSON file with mu1/L1/mu2/L2")
        p.add_argument("--mu1", type=float)
        p.add_argument("--L1", type=_parse_ext)
        p.add_argument("--mu2", type=float)
        p.add_argument("--L2", type=_parse_ext)

    p = sub.add_parser("classify", help="regime and one-step coefficients")
    add_params(p)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("regime-map", help="grid classification as CSV")
    p.add_argument("--L1", type=_parse_ext, required=True)
    p.add_argument("--L2", type=_parse_ext, required=True)
    p.add_argument("--grid", required=True, help="lo:hi:steps")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_regime_map)

    p = sub.add_parser("run", help="run DCA on an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--x0", required=True, help="comma-separated start point")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--tol", type=float, default=0.0)
    p.add_argument("--policy", default="least_norm")
    p.add_argument("--stop-on", dest="stop_on", default="grad_gap",
                   choices=["grad_gap", "t_measure"])
    p.add_argument("--out", help="trajectory JSON")
    p.add_argument("--csv", help="trajectory CSV")
    p.add_argument("--certify", action="store_true")
    p.add_argument("--fstar", type=float)
    p.add_argument("--check-tol", dest="check_tol", type=float, default=1e-9)
    p.add_argument("--report-out", dest="report_out")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("certify", help="verify certificates on a saved trajectory")
    p.add_argument("--traj", required=True)
    p.add_argument("--fstar", type=float)
    p.add_argument("--check-tol", dest="check_tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("interp-check", help="pairwise interpolation feasibility")
    p.add_argument("--triplets", required=True, help="JSON list of {x,g,f}")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--L", type=_parse_ext, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_interp_check)

    p = sub.add_parser("probe", help="worst-case ratio search")
    add_params(p)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--budget", type=int, default=200000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--cold", action="store_true", help="random starts only")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_probe)

    p = sub.add_parser("report", help="run + classify + certify in one pass")
    p.add_argument("--instance", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--tol", type=float, default=0.0)
    p.add_argument("--policy", default="least_norm")
    p.add_argument("--fstar", type=float)
    p.add_argument("--check-tol", dest="check_tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_report)
    return top


def _merge_value_flags(argv):
    """Join '--grid -1:2:300' into '--grid=-1:2:300' so argparse does not
    mistake a leading-minus value for an option."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in ("--grid", "--x0") and i + 1 < len(argv):
            out.append(a + "=" + argv[i + 1])
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def _apply_config(parser, argv):
    argv = _merge_value_flags(argv)
    args = parser.parse_args(argv)
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        # precedence: explicit flags > config values > defaults
        stated = {a.split("=")[0].lstrip("-").replace("-", "_")
                  for a in argv if a.startswith("--")}
        for key, val in cfg.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and attr not in stated:
                setattr(args, attr, val)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, sys.argv[1:] if argv is None else argv)
        return args.fn(args)
    except (InvalidParams, NoRegime, FileNotFoundError,
            json.JSONDecodeError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
