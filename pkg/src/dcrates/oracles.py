"""Concrete function families with exact first-order oracles.

Three families, chosen so both the oracle and the DCA subproblem
argmin_w { f1(w) - <g, w> } admit closed-form (or finite-enumeration) exact
solutions:

* quadratic        sum_i c_i/2 x_i^2 + b_i x_i     (separable, any dimension)
* max_quadratics   max_j c_j/2 x^2 + b_j x + a_j   (1D, possibly nonsmooth)
* abs_quadratic    a|x| + m/2 x^2 + b x            (1D, nonsmooth at 0)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .curvature import Curvature, DcParams, InvalidParams

KINK_TOL = 1e-12


class Unbounded(RuntimeError):
    """The DCA subproblem has no minimizer."""


# policy: how to pick a subgradient at a kink.  A float w in [0, 1] blends
# from the leftmost to the rightmost one-sided derivative.
Policy = Union[str, float]


@dataclass(frozen=True)
class Quadratic:
    c: tuple
    b: tuple

    family = "quadratic"

    @property
    def dimension(self):
        return len(self.c)

    def curvature_range(self):
        return min(self.c), max(self.c)


@dataclass(frozen=True)
class MaxOfQuadratics:
    pieces: tuple  # ((c, b, a), ...)

    family = "max_quadratics"
    dimension = 1

    def curvature_range(self):
        cs = [p[0] for p in self.pieces]
        if len(self.pieces) == 1:
            return cs[0], cs[0]
        return min(cs), math.inf


@dataclass(frozen=True)
class AbsPlusQuadratic:
    a: float
    m: float
    b: float

    family = "abs_quadratic"
    dimension = 1

    def curvature_range(self):
        if self.a == 0.0:
            return self.m, self.m
        return self.m, math.inf


Family = Union[Quadratic, MaxOfQuadratics, AbsPlusQuadratic]


@dataclass(frozen=True)
class FunctionSpec:
    family: Family
    declared: Curvature

    @property
    def dimension(self):
        return self.family.dimension

    def certify_declared(self) -> list:
        """Constraint violations of the declared (mu, L) membership claim."""
        lo, hi = self.family.curvature_range()
        out = []
        if self.declared.mu > lo + 1e-12:
            out.append("declared mu=%r exceeds actual lower curvature %r"
                       % (self.declared.mu, lo))
        if hi > self.declared.L + 1e-12:
            out.append("actual upper curvature %r exceeds declared L=%r"
                       % (hi, self.declared.L))
        return out


@dataclass(frozen=True)
class OracleAnswer:
    value: float
    subgradient: np.ndarray
    selection_tag: str


@dataclass(frozen=True)
class DcInstance:
    f1: FunctionSpec
    f2: FunctionSpec
    params: DcParams
    fstar: Optional[float] = None

    def __post_init__(self):
        if self.f1.dimension != self.f2.dimension:
            raise InvalidParams("f1 and f2 dimensions differ")

    @property
    def dimension(self):
        return self.f1.dimension

    def objective(self, x) -> float:
        return evaluate(self.f1, x).value - evaluate(self.f2, x).value


def make_instance(f1: FunctionSpec, f2: FunctionSpec, fstar=None) -> DcInstance:
    params = DcParams(f1.declared, f2.declared)
    return DcInstance(f1, f2, params, fstar)


# ---------------------------------------------------------------------------
# evaluation

def _as_vec(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def subgradient_interval(spec: FunctionSpec, x) -> tuple:
    """One-sided derivative range [lo, hi] at a 1D point."""
    fam = spec.family
    t = float(_as_vec(x)[0])
    if isinstance(fam, Quadratic):
        g = fam.c[0] * t + fam.b[0]
        return g, g
    if isinstance(fam, AbsPlusQuadratic):
        base = fam.m * t + fam.b
        if t == 0.0:
            return base - fam.a, base + fam.a
        return base + math.copysign(fam.a, t), base + math.copysign(fam.a, t)
    vals = [0.5 * c * t * t + b * t + a for c, b, a in fam.pieces]
    top = max(vals)
    scale = max(1.0, abs(top))
    grads = [c * t + b for (c, b, a), v in zip(fam.pieces, vals)
             if top - v <= KINK_TOL * scale]
    return min(grads), max(grads)


def _pick(lo: float, hi: float, policy: Policy) -> tuple:
    if lo == hi:
        return lo, "unique"
    if policy == "leftmost":
        return lo, "leftmost"
    if policy == "rightmost":
        return hi, "rightmost"
    if policy == "least_norm":
        return min(max(0.0, lo), hi), "least_norm"
    w = float(policy)
    if not 0.0 <= w <= 1.0:
        raise ValueError("subgradient weight must lie in [0, 1], got %r" % w)
    return lo + w * (hi - lo), "weight=%g" % w


def evaluate(spec: FunctionSpec, x, policy: Policy = "least_norm") -> OracleAnswer:
    """Exact value and one subgradient, chosen by the kink policy."""
    v = _as_vec(x)
    if not np.all(np.isfinite(v)):
        raise InvalidParams("oracle point must be finite")
    fam = spec.family
    if isinstance(fam, Quadratic):
        c = np.asarray(fam.c)
        b = np.asarray(fam.b)
        val = float(np.sum(0.5 * c * v * v + b * v))
        return OracleAnswer(val, c * v + b, "gradient")
    t = float(v[0])
    if isinstance(fam, AbsPlusQuadratic):
        val = fam.a * abs(t) + 0.5 * fam.m * t * t + fam.b * t
    else:
        val = max(0.5 * c * t * t + b * t + a for c, b, a in fam.pieces)
    lo, hi = subgradient_interval(spec, x)
    g, tag = _pick(lo, hi, policy)
    return OracleAnswer(val, np.array([g]), tag)


# ---------------------------------------------------------------------------
# exact DCA subproblem:  argmin_w f1(w) - <g, w>

def solve_dca_subproblem(spec: FunctionSpec, g) -> np.ndarray:
    gv = _as_vec(g)
    fam = spec.family
    if isinstance(fam, Quadratic):
        return _solve_quadratic(fam, gv)
    if isinstance(fam, AbsPlusQuadratic):
        return _solve_abs_quadratic(fam, float(gv[0]))
    return _solve_max_quadratics(spec, fam, float(gv[0]))


def _solve_quadratic(fam: Quadratic, g: np.ndarray) -> np.ndarray:
    c = np.asarray(fam.c)
    b = np.asarray(fam.b)
    if np.any(c < 0.0):
        raise Unbounded("quadratic subproblem with negative curvature")
    out = np.zeros_like(g)
    pos = c > 0.0
    out[pos] = (g[pos] - b[pos]) / c[pos]
    flat = ~pos
    if np.any(np.abs(g[flat] - b[flat]) > 0.0):
        raise Unbounded("flat coordinate with nonzero linear drift")
    return out


def _solve_abs_quadratic(fam: AbsPlusQuadratic, g: float) -> np.ndarray:
    s = g - fam.b
    if fam.m <= 0.0:
        if fam.m == 0.0 and abs(s) <= fam.a:
            return np.array([0.0])
        raise Unbounded("abs-plus-quadratic subproblem needs m > 0")
    w = math.copysign(max(abs(s) - fam.a, 0.0), s) / fam.m
    return np.array([w])


def _solve_max_quadratics(spec, fam: MaxOfQuadratics, g: float) -> np.ndarray:
    cs = [p[0] for p in fam.pieces]
    if max(cs) <= 0.0:
        raise Unbounded("max-of-quadratics subproblem needs a coercive piece")

    def h(w):
        return max(0.5 * c * w * w + b * w + a for c, b, a in fam.pieces) - g * w

    cands = []
    for c, b, a in fam.pieces:
        if c > 0.0:
            w = (g - b) / c
            vals = [0.5 * cc * w * w + bb * w + aa for cc, bb, aa in fam.pieces]
            mine = 0.5 * c * w * w + b * w + a
            if max(vals) - mine <= 1e-9 * max(1.0, abs(max(vals))):
                cands.append(w)
    pieces = fam.pieces
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            dc = pieces[i][0] - pieces[j][0]
            db = pieces[i][1] - pieces[j][1]
            da = pieces[i][2] - pieces[j][2]
            if dc == 0.0:
                roots = [-da / db] if db != 0.0 else []
            else:
                disc = db * db - 2.0 * dc * da
                if disc < 0.0:
                    continue
                r = math.sqrt(disc)
                roots = [(-db - r) / dc, (-db + r) / dc]
            for w in roots:
                lo, hi = subgradient_interval(spec, w)
                if lo - 1e-9 <= g <= hi + 1e-9:
                    cands.append(w)
    if not cands:
        raise Unbounded("no stationary candidate found")
    best = min(cands, key=h)
    lo, hi = subgradient_interval(spec, best)
    scale = max(1.0, abs(g))
    if not (lo - 1e-9 * scale <= g <= hi + 1e-9 * scale):
        raise Unbounded("candidate fails the optimality inclusion")
    return np.array([best])


# ---------------------------------------------------------------------------
# analytic infimum of F = f1 - f2 (when available)

def analytic_infimum(instance: DcInstance) -> Optional[float]:
    """Closed-form inf F for quadratic-quadratic and abs-abs pairs, else None."""
    a1, a2 = instance.f1.family, instance.f2.family
    if isinstance(a1, Quadratic) and isinstance(a2, Quadratic):
        dc = np.asarray(a1.c) - np.asarray(a2.c)
        db = np.asarray(a1.b) - np.asarray(a2.b)
        if np.any(dc < 0.0):
            return None
        if np.any((dc == 0.0) & (db != 0.0)):
            return None
        pos = dc > 0.0
        return float(-np.sum(db[pos] * db[pos] / (2.0 * dc[pos])))
    if isinstance(a1, AbsPlusQuadratic) and isinstance(a2, AbsPlusQuadratic):
        da, dm, db = a1.a - a2.a, a1.m - a2.m, a1.b - a2.b
        # F(x) = da|x| + dm/2 x^2 + db x
        if dm < 0.0 or (dm == 0.0 and abs(db) > da):
            return None
        best = 0.0
        if dm > 0.0:
            xp = -(da + db) / dm     # stationary point on x > 0
            if xp > 0.0:
                best = min(best, da * xp + 0.5 * dm * xp * xp + db * xp)
            xn = (da - db) / dm      # stationary point on x < 0
            if xn < 0.0:
                best = min(best, -da * xn + 0.5 * dm * xn * xn + db * xn)
        return float(best)
    return None


# ---------------------------------------------------------------------------
# demo-only inexact inner solver (never used on the certified path)

def solve_subproblem_inexact(spec: FunctionSpec, g, tol: float = 1e-10,
                             max_iters: int = 100000) -> np.ndarray:
    """Gradient descent on the strongly convex subproblem; flagged inexact."""
    if spec.declared.mu <= 0.0:
        raise Unbounded("inexact solver requires a strongly convex f1")
    L = spec.declared.L if math.isfinite(spec.declared.L) else spec.declared.mu + 10.0
    step = 1.0 / L
    gv = _as_vec(g)
    w = np.zeros(spec.dimension)
    for _ in range(max_iters):
        grad = evaluate(spec, w, "least_norm").subgradient - gv
        if float(np.linalg.norm(grad)) <= tol:
            break
        w = w - step * grad
    return w


# ---------------------------------------------------------------------------
# JSON instance format

def family_to_json(fam: Family) -> dict:
    if isinstance(fam, Quadratic):
        return {"family": "quadratic", "c": list(fam.c), "b": list(fam.b)}
    if isinstance(fam, MaxOfQuadratics):
        return {"family": "max_quadratics", "pieces": [list(p) for p in fam.pieces]}
    return {"family": "abs_quadratic", "a": fam.a, "m": fam.m, "b": fam.b}


def family_from_json(d: dict) -> Family:
    kind = d["family"]
    if kind == "quadratic":
        return Quadratic(tuple(d["c"]), tuple(d["b"]))
    if kind == "max_quadratics":
        return MaxOfQuadratics(tuple(tuple(p) for p in d["pieces"]))
    if kind == "abs_quadratic":
        return AbsPlusQuadratic(d["a"], d["m"], d["b"])
    raise InvalidParams("unknown function family %r" % kind)


def instance_to_json(inst: DcInstance) -> dict:
    enc = lambda v: "inf" if math.isinf(v) else v
    spec_json = lambda s: dict(family_to_json(s.family),
                               mu=s.declared.mu, L=enc(s.declared.L))
    return {
        "f1": spec_json(inst.f1),
        "f2": spec_json(inst.f2),
        "declared": inst.params.to_json_dict(),
        "Fstar": inst.fstar,
    }


def instance_from_json(d: dict) -> DcInstance:
    dec = lambda v: math.inf if v in ("inf", "Infinity") else float(v)
    f1 = FunctionSpec(family_from_json(d["f1"]),
                      Curvature(float(d["f1"]["mu"]), dec(d["f1"]["L"])))
    f2 = FunctionSpec(family_from_json(d["f2"]),
                      Curvature(float(d["f2"]["mu"]), dec(d["f2"]["L"])))
    params = DcParams.from_json_dict(d["declared"])
    return DcInstance(f1, f2, params, d.get("Fstar"))
