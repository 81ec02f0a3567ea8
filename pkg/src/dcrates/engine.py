"""DCA driver: run the iteration and record everything the certificates read.

Each iteration linearizes f2 at the current point and minimizes
f1(w) - <g2, w> exactly; the optimality condition of that subproblem gives the
link identity g1^{k+1} = g2^k, recorded and asserted at every step.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curvature import InvalidParams
from .oracles import (DcInstance, Policy, Unbounded, evaluate,
                      solve_dca_subproblem)

LINK_TOL = 1e-12

STOP_MAX_ITERS = "max_iters"
STOP_CRITICALITY = "criticality_tol"
STOP_UNBOUNDED = "subproblem_unbounded"


@dataclass
class TrajectoryPoint:
    k: int
    x: np.ndarray
    f1: float
    f2: float
    F: float
    g1: np.ndarray
    g2: np.ndarray
    G_norm_sq: float
    T: Optional[float] = None
    dx_norm_sq: Optional[float] = None  # ||x^k - x^{k+1}||^2, set once known


@dataclass
class Trajectory:
    points: list
    instance: DcInstance
    stop_reason: str = STOP_MAX_ITERS

    def __len__(self):
        return len(self.points)

    @property
    def n_steps(self) -> int:
        return len(self.points) - 1

    def min_grad_gap_sq(self) -> float:
        return min(p.G_norm_sq for p in self.points)

    def min_t(self) -> float:
        """min T(x^k) over k = 0..N-1 (the points that took a step)."""
        return min(p.T for p in self.points[:-1])

    def min_dx_sq(self) -> float:
        return min(p.dx_norm_sq for p in self.points[:-1])


def t_measure(instance: DcInstance, x, x_plus, g1_plus) -> float:
    """Linearization gap f1(x) - f1(x+) - <g1+, x - x+> of a genuine step."""
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    xp = np.atleast_1d(np.asarray(x_plus, dtype=float))
    gp = np.atleast_1d(np.asarray(g1_plus, dtype=float))
    f1x = evaluate(instance.f1, xv).value
    f1p = evaluate(instance.f1, xp).value
    return f1x - f1p - float(gp @ (xv - xp))


def run_dca(instance: DcInstance, x0, N: int, tol: float = 0.0,
            policy: Policy = "least_norm", stop_on: str = "grad_gap") -> Trajectory:
    """Run at most N DCA iterations from x0.

    tol > 0 stops early on criticality: ||g1 - g2|| <= tol when
    stop_on="grad_gap", or T(x^k) <= tol when stop_on="t_measure".
    """
    if N < 1:
        raise InvalidParams("N must be >= 1")
    if stop_on not in ("grad_gap", "t_measure"):
        raise InvalidParams("stop_on must be 'grad_gap' or 't_measure'")
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    if x.shape != (instance.dimension,):
        raise InvalidParams("x0 has dimension %d, instance needs %d"
                            % (x.size, instance.dimension))

    a1 = evaluate(instance.f1, x, policy)
    a2 = evaluate(instance.f2, x, policy)
    pt = TrajectoryPoint(0, x, a1.value, a2.value, a1.value - a2.value,
                         a1.subgradient, a2.subgradient,
                         float(np.sum((a1.subgradient - a2.subgradient) ** 2)))
    points = [pt]
    stop = STOP_MAX_ITERS

    for k in range(N):
        cur = points[-1]
        try:
            x_new = solve_dca_subproblem(instance.f1, cur.g2)
        except Unbounded:
            stop = STOP_UNBOUNDED
            break
        # the subproblem optimality condition supplies g1 at the new point
        g1_new = cur.g2.copy()
        b1 = evaluate(instance.f1, x_new, policy)
        b2 = evaluate(instance.f2, x_new, policy)
        gap = float(np.linalg.norm(b1.subgradient - g1_new))
        link_scale = max(1.0, float(np.linalg.norm(g1_new)))
        lo_hi_ok = True
        if gap > LINK_TOL * link_scale:
            # nonsmooth f1: the oracle's policy pick may differ from the
            # link subgradient, but g2 must still lie in the subdifferential
            from .oracles import subgradient_interval
            if instance.dimension == 1:
                lo, hi = subgradient_interval(instance.f1, x_new)
                pad = LINK_TOL * link_scale
                lo_hi_ok = lo - pad <= float(g1_new[0]) <= hi + pad
            else:
                lo_hi_ok = False
        if not lo_hi_ok:
            raise AssertionError("link constraint g1^{k+1} = g2^k violated "
                                 "by %g at step %d" % (gap, k))
        t_val = cur.f1 - b1.value - float(g1_new @ (cur.x - x_new))
        cur.T = t_val
        cur.dx_norm_sq = float(np.sum((cur.x - x_new) ** 2))
        nxt = TrajectoryPoint(
            k + 1, x_new, b1.value, b2.value, b1.value - b2.value,
            g1_new, b2.subgradient,
            float(np.sum((g1_new - b2.subgradient) ** 2)))
        points.append(nxt)
        if tol > 0.0:
            crit = math.sqrt(nxt.G_norm_sq) if stop_on == "grad_gap" else t_val
            if crit <= tol:
                stop = STOP_CRITICALITY
                break
    return Trajectory(points, instance, stop)


# ---------------------------------------------------------------------------
# serialization

CSV_HEADER = ["k", "F", "G_norm_sq", "T", "dx_norm_sq"]


def trajectory_to_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_HEADER)
    for p in traj.points:
        w.writerow([p.k, repr(p.F), repr(p.G_norm_sq),
                    "" if p.T is None else repr(p.T),
                    "" if p.dx_norm_sq is None else repr(p.dx_norm_sq)])
    return buf.getvalue()


def trajectory_to_json(traj: Trajectory) -> dict:
    from .oracles import instance_to_json
    return {
        "instance": instance_to_json(traj.instance),
        "stop_reason": traj.stop_reason,
        "points": [{
            "k": p.k, "x": p.x.tolist(), "f1": p.f1, "f2": p.f2, "F": p.F,
            "g1": p.g1.tolist(), "g2": p.g2.tolist(),
            "G_norm_sq": p.G_norm_sq, "T": p.T, "dx_norm_sq": p.dx_norm_sq,
        } for p in traj.points],
    }


def trajectory_from_json(d: dict) -> Trajectory:
    from .oracles import instance_from_json
    pts = [TrajectoryPoint(q["k"], np.array(q["x"], dtype=float),
                           q["f1"], q["f2"], q["F"],
                           np.array(q["g1"], dtype=float),
                           np.array(q["g2"], dtype=float),
                           q["G_norm_sq"], q.get("T"), q.get("dx_norm_sq"))
           for q in d["points"]]
    return Trajectory(pts, instance_from_json(d["instance"]), d["stop_reason"])


def dumps(traj: Trajectory) -> str:
    return json.dumps(trajectory_to_json(traj))


def loads(s: str) -> Trajectory:
    return trajectory_from_json(json.loads(s))
