"""Verify the one-step and N-step decrease guarantees on trajectories.

One-step:   F(x) - F(x+) >= sigma/2 ||G||^2 + sigma_plus/2 ||G+||^2
N-step:     1/2 min_k ||G^k||^2 <= (F(x^0) - F(x^N)) / (p N)
            and, when F* is known and L1 > mu2,
            <= (F(x^0) - F*) / (p N + 1/(L1 - mu2)).
Nonsmooth (both L infinite): per-step and N-step bounds on the linearization
gap T(x) with branches by the sign of mu2.

All slacks are computed as lhs - rhs in a single arithmetic order so equality
detection is reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .curvature import InvalidParams, validate
from .engine import Trajectory
from .interpolation import pair_lower_bound
from .regimes import (PreconditionViolated, RegimeCertificate,
                      one_step_certificate)

SLACK_TOL = 1e-9
EQ_TOL = 1e-7


class MissingFstar(RuntimeError):
    """An F*-dependent bound was requested without a lower-bound value."""


def _require_precondition(params):
    rep = validate(params)
    if not rep.ok:
        raise InvalidParams("; ".join(rep.violations))
    if not rep.decrease_precondition:
        raise PreconditionViolated(
            "bounds need mu1 + mu2 > 0 or mu1 = mu2 = 0 "
            "(got mu1=%r, mu2=%r)" % (params.mu1, params.mu2))


@dataclass(frozen=True)
class OneStepCheck:
    regime: RegimeCertificate
    lhs: float
    rhs: float
    slack: float
    equality_hit: bool
    holds: bool


def check_one_step(traj: Trajectory, k: int = 0,
                   regime: Optional[RegimeCertificate] = None,
                   tol: float = SLACK_TOL, eq_tol: float = EQ_TOL) -> OneStepCheck:
    """Check the decrease certificate on the step k -> k+1."""
    params = traj.instance.params
    _require_precondition(params)
    if k + 1 >= len(traj.points):
        raise InvalidParams("trajectory has no step %d" % k)
    if regime is None:
        regime = one_step_certificate(params)
    a, b = traj.points[k], traj.points[k + 1]
    lhs = a.F - b.F
    rhs = regime.sigma * 0.5 * a.G_norm_sq + regime.sigma_plus * 0.5 * b.G_norm_sq
    slack = lhs - rhs
    scale = max(1.0, abs(lhs), abs(rhs))
    return OneStepCheck(regime, lhs, rhs, slack,
                        abs(slack) <= eq_tol * scale, slack >= -tol)


def replay_proof_combination(traj: Trajectory, k: int = 0,
                             regime: Optional[RegimeCertificate] = None,
                             alpha: Optional[float] = None) -> float:
    """Slack of the alpha-weighted intermediate inequality behind the regime.

    For odd regimes the combination reads, with B1/B2 the pairwise lower
    bounds of f1 on (x, x+) and f2 on (x+, x),

        dF >= B1(G) + (1 + 2 alpha) B2(G+) - alpha <G+, dx>,

    and the even regimes mirror it with the roles of the terms exchanged.
    Returns lhs - rhs; a valid certificate gives a nonnegative value.
    """
    params = traj.instance.params
    _require_precondition(params)
    if regime is None:
        regime = one_step_certificate(params)
    if alpha is None:
        alpha = regime.alpha
    a, b = traj.points[k], traj.points[k + 1]
    dx = a.x - b.x
    G = a.g1 - a.g2
    Gp = b.g1 - b.g2
    B1 = pair_lower_bound(params.f1, dx, G)
    B2 = pair_lower_bound(params.f2, -dx, -Gp)
    if regime.index % 2 == 1:
        rhs = B1 + (1.0 + 2.0 * alpha) * B2 - alpha * float(Gp @ dx)
    else:
        rhs = B2 + (1.0 + 2.0 * alpha) * B1 - alpha * float(G @ dx)
    return (a.F - b.F) - rhs


@dataclass(frozen=True)
class RatePrediction:
    bound_no_fstar: float
    bound_with_fstar: Optional[float]
    p_used: float
    N: int
    linear_regime_warning: bool  # regimes 7/8 admit linear rates; this
    # sublinear form is valid but loose there


def check_rate(traj: Trajectory, fstar: Optional[float] = None,
               require_fstar: bool = False,
               tol: float = SLACK_TOL) -> Tuple[RatePrediction, float, bool]:
    """N-step certificate: (prediction, observed half min grad gap, holds)."""
    params = traj.instance.params
    _require_precondition(params)
    regime = one_step_certificate(params)
    N = traj.n_steps
    if N < 1:
        raise InvalidParams("need at least one completed step")
    F0 = traj.points[0].F
    FN = traj.points[-1].F
    p = regime.p
    bound = (F0 - FN) / (p * N)
    if fstar is None:
        fstar = traj.instance.fstar
    bound_star = None
    if fstar is not None and params.L1 > params.mu2:
        extra = 0.0 if math.isinf(params.L1) else 1.0 / (params.L1 - params.mu2)
        bound_star = (F0 - fstar) / (p * N + extra)
    elif require_fstar and fstar is None:
        raise MissingFstar("no lower bound supplied for the F* variant")
    pred = RatePrediction(bound, bound_star, p, N, regime.index in (7, 8))
    observed = 0.5 * traj.min_grad_gap_sq()
    holds = observed <= bound + tol
    if bound_star is not None:
        holds = holds and observed <= bound_star + tol
    return pred, observed, holds


@dataclass(frozen=True)
class NonsmoothCheck:
    per_step_slacks: tuple       # per-step T-measure decrease slack
    n_step_bound: float
    n_step_observed: float
    holds: bool
    branch: str                  # "mu2_nonneg" or "mu2_neg"


def check_nonsmooth_rate(traj: Trajectory, fstar: Optional[float] = None,
                         tol: float = SLACK_TOL) -> NonsmoothCheck:
    """Per-step and N-step bounds via T(x) when both terms are nonsmooth."""
    params = traj.instance.params
    if math.isfinite(params.L1) or math.isfinite(params.L2):
        raise InvalidParams("nonsmooth analysis needs L1 = L2 = inf")
    _require_precondition(params)
    if fstar is None:
        fstar = traj.instance.fstar
    if fstar is None:
        raise MissingFstar("the N-step bound is stated against F*")
    m1, m2 = params.mu1, params.mu2
    N = traj.n_steps
    slacks = []
    for a, b in zip(traj.points, traj.points[1:]):
        dF = a.F - b.F
        if m2 >= 0.0:
            lhs = m2 * 0.5 * a.dx_norm_sq + a.T
        else:
            lhs = (m1 + m2) / m1 * a.T
        slacks.append(dF - lhs)
    if m2 >= 0.0:
        observed = traj.min_t() + 0.5 * m2 * traj.min_dx_sq()
        bound = (traj.points[0].F - fstar) / N
        branch = "mu2_nonneg"
    else:
        observed = traj.min_t()
        bound = m1 / (m1 + m2) * (traj.points[0].F - fstar) / N
        branch = "mu2_neg"
    holds = all(s >= -tol for s in slacks) and observed <= bound + tol
    return NonsmoothCheck(tuple(slacks), bound, observed, holds, branch)


def certificate_report(traj: Trajectory, fstar: Optional[float] = None,
                       tol: float = SLACK_TOL) -> dict:
    """JSON-ready summary: regime, per-step slacks, rate bounds, pass/fail."""
    params = traj.instance.params
    nonsmooth = not (math.isfinite(params.L1) or math.isfinite(params.L2))
    out = {"tol": tol, "n_steps": traj.n_steps, "stop_reason": traj.stop_reason}
    if nonsmooth:
        c = check_nonsmooth_rate(traj, fstar, tol)
        out.update(mode="nonsmooth", branch=c.branch,
                   per_step_slacks=list(c.per_step_slacks),
                   n_step_bound=c.n_step_bound,
                   n_step_observed=c.n_step_observed, holds=c.holds)
        return out
    regime = one_step_certificate(params)
    checks = [check_one_step(traj, k, regime, tol)
              for k in range(traj.n_steps)]
    pred, observed, rate_ok = check_rate(traj, fstar, tol=tol)
    out.update(
        mode="smooth", regime=regime.to_json_dict(),
        per_step_slacks=[c.slack for c in checks],
        equality_hits=[c.equality_hit for c in checks],
        rate={"bound_no_fstar": pred.bound_no_fstar,
              "bound_with_fstar": pred.bound_with_fstar,
              "p": pred.p_used, "N": pred.N,
              "linear_regime_warning": pred.linear_regime_warning,
              "observed": observed},
        holds=all(c.holds for c in checks) and rate_ok)
    return out
