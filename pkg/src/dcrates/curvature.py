"""Extended-real curvature arithmetic and DC parameter validation.

Curvature parameters live on the extended reals: upper curvatures L in
(0, +inf], lower curvatures mu finite.  +inf is represented by the float
infinity, with the reciprocal conventions 1/inf = 0 and 1/0 = +inf so that
the regime formulas can be evaluated uniformly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

INF = math.inf


def recip(x: float) -> float:
    """Reciprocal with the conventions 1/0 = +inf and 1/inf = 0."""
    if x == 0.0:
        return INF
    if x == INF:
        return 0.0
    return 1.0 / x


class InvalidParams(ValueError):
    """Raised when an operation requires parameters that fail validation."""


@dataclass(frozen=True)
class Curvature:
    """Membership class: lower curvature mu, upper curvature L (possibly inf)."""

    mu: float
    L: float

    def violations(self, tag: str = "f") -> list:
        out = []
        if math.isnan(self.mu) or math.isnan(self.L):
            out.append("%s: NaN curvature parameter" % tag)
            return out
        if not self.L > 0.0:
            out.append("%s: L must be positive (got %r)" % (tag, self.L))
        if math.isinf(self.mu):
            out.append("%s: mu must be finite (got %r)" % (tag, self.mu))
        if not self.mu < self.L:
            out.append("%s: mu < L must hold strictly (mu=%r, L=%r)" % (tag, self.mu, self.L))
        return out

    @property
    def smooth(self) -> bool:
        return self.L < INF

    @property
    def kind(self) -> str:
        if self.mu < 0.0:
            return "hypoconvex"
        if self.mu == 0.0:
            return "convex"
        return "strongly_convex"


@dataclass(frozen=True)
class DcParams:
    """Curvature parameters (mu1, L1, mu2, L2) of a split F = f1 - f2."""

    f1: Curvature
    f2: Curvature

    @property
    def mu1(self) -> float:
        return self.f1.mu

    @property
    def L1(self) -> float:
        return self.f1.L

    @property
    def mu2(self) -> float:
        return self.f2.mu

    @property
    def L2(self) -> float:
        return self.f2.L

    def implied_objective_class(self):
        """Curvature interval of F itself: (mu1 - L2, L1 - mu2).

        The lower end is -inf when f2 is nonsmooth; returned as plain floats
        since F's class is only reported, never used as a Curvature.
        """
        return (self.mu1 - self.L2, self.L1 - self.mu2)

    def swapped(self) -> "DcParams":
        return DcParams(self.f2, self.f1)

    def to_json_dict(self) -> dict:
        enc = lambda v: "inf" if v == INF else v
        return {"mu1": self.mu1, "L1": enc(self.L1), "mu2": self.mu2, "L2": enc(self.L2)}

    @staticmethod
    def from_json_dict(d: dict) -> "DcParams":
        dec = lambda v: INF if v in ("inf", "Infinity") else float(v)
        return DcParams(
            Curvature(float(d["mu1"]), dec(d["L1"])),
            Curvature(float(d["mu2"]), dec(d["L2"])),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def loads(s: str) -> "DcParams":
        return DcParams.from_json_dict(json.loads(s))


def make_params(mu1: float, L1: float, mu2: float, L2: float) -> DcParams:
    return DcParams(Curvature(mu1, L1), Curvature(mu2, L2))


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple
    decrease_precondition: bool
    objective_nonconvex: bool
    objective_nonconcave: bool

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(params: DcParams) -> ValidationReport:
    """Check Assumption-style constraints and report the derived flags.

    Report-valued: never raises.  The decrease precondition is
    mu1 + mu2 > 0 or mu1 = mu2 = 0, under which the one-step and N-step
    certificates are claimed.
    """
    viol = params.f1.violations("f1") + params.f2.violations("f2")
    m1, m2 = params.mu1, params.mu2
    if any(math.isnan(v) for v in (m1, m2)):
        precond = False
        nonconvex = False
        nonconcave = False
    else:
        precond = (m1 + m2 > 0.0) or (m1 == 0.0 and m2 == 0.0)
        nonconvex = params.L2 > m1
        nonconcave = params.L1 > m2
    return ValidationReport(tuple(viol), precond, nonconvex, nonconcave)


def require_valid(params: DcParams) -> ValidationReport:
    rep = validate(params)
    if not rep.ok:
        raise InvalidParams("; ".join(rep.violations))
    return rep


def shift_curvature(params: DcParams, rho: float) -> DcParams:
    """Move rho/2 ||x||^2 worth of curvature into both terms simultaneously.

    Leaves the implied class of F unchanged; L = inf stays inf.
    """
    if not math.isfinite(rho):
        raise InvalidParams("shift amount must be a finite real, got %r" % rho)
    return DcParams(
        Curvature(params.mu1 + rho, params.L1 + rho),
        Curvature(params.mu2 + rho, params.L2 + rho),
    )
