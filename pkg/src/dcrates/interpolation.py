"""Pairwise interpolation checks for the curvature classes.

A set of triplets (x, g, f) extends to some member of the class with lower
curvature mu and upper curvature L iff for every ordered pair (i, j)

    f_i - f_j - <g_j, x_i - x_j>
        >= 1/(2L) ||g_i - g_j||^2
         + mu/(2L(L-mu)) ||g_i - g_j - L (x_i - x_j)||^2,

with the L = inf limit   f_i - f_j - <g_j, x_i - x_j> >= mu/2 ||x_i - x_j||^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import Curvature, InvalidParams

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Triplet:
    x: np.ndarray
    g: np.ndarray
    f: float


def make_triplet(x, g, f) -> Triplet:
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    gv = np.atleast_1d(np.asarray(g, dtype=float))
    if not (np.all(np.isfinite(xv)) and np.all(np.isfinite(gv))
            and math.isfinite(float(f))):
        raise InvalidParams("triplet entries must be finite")
    return Triplet(xv, gv, float(f))


@dataclass(frozen=True)
class InterpReport:
    slack: np.ndarray       # slack[i, j] = LHS - RHS of the (i, j) inequality
    min_slack: float
    feasible: bool
    tol: float


def pair_lower_bound(cls: Curvature, dx: np.ndarray, dg: np.ndarray) -> float:
    """Right-hand side of the inequality for differences dx = x_i - x_j,
    dg = g_i - g_j."""
    mu, L = cls.mu, cls.L
    if math.isinf(L):
        return 0.5 * mu * float(dx @ dx)
    r = dg - L * dx
    return (float(dg @ dg) / (2.0 * L)
            + mu / (2.0 * L * (L - mu)) * float(r @ r))


def pair_slack(cls: Curvature, ti: Triplet, tj: Triplet) -> float:
    dx = ti.x - tj.x
    lhs = ti.f - tj.f - float(tj.g @ dx)
    return lhs - pair_lower_bound(cls, dx, ti.g - tj.g)


def check_interpolation(triplets, cls: Curvature, tol: float = DEFAULT_TOL,
                        scale_aware: bool = False) -> InterpReport:
    """Evaluate all n(n-1) ordered-pair inequalities.

    scale_aware divides each slack by max(1, magnitudes of the pair's data)
    before comparing against tol, for use on probe witnesses of wild scale.
    """
    n = len(triplets)
    S = np.zeros((n, n))
    min_eff = math.inf
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            s = pair_slack(cls, triplets[i], triplets[j])
            S[i, j] = s
            if scale_aware:
                ti, tj = triplets[i], triplets[j]
                scale = max(1.0, float((ti.g - tj.g) @ (ti.g - tj.g)),
                            float((ti.x - tj.x) @ (ti.x - tj.x)),
                            abs(ti.f), abs(tj.f))
                s = s / scale
            min_eff = min(min_eff, s)
    if n < 2:
        min_eff = 0.0
    return InterpReport(S, float(np.min(S)) if n > 1 else 0.0,
                        min_eff >= -tol, tol)


def sample_triplets(spec, xs, policy="least_norm") -> list:
    """Exact triplets of a function family at the given points."""
    from .oracles import evaluate
    out = []
    for x in xs:
        a = evaluate(spec, x, policy)
        out.append(make_triplet(x, a.subgradient, a.value))
    return out


def triplets_to_json(triplets) -> list:
    return [{"x": t.x.tolist(), "g": t.g.tolist(), "f": t.f} for t in triplets]


def triplets_from_json(rows) -> list:
    return [make_triplet(r["x"], r["g"], r["f"]) for r in rows]
