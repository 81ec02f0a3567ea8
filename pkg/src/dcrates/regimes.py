"""Eight-regime classification of DC parameters and exact one-step coefficients.

Each regime i carries coefficients (sigma_i, sigma_i^+, alpha_i) such that one
DCA step decreases the objective by at least
sigma_i/2 ||G||^2 + sigma_i^+/2 ||G^+||^2, with G, G^+ the subgradient gaps at
the current and next iterate.  Regimes with even index mirror the odd ones
under the swap (L1, mu1) <-> (L2, mu2), sigma <-> sigma^+.

All formulas are evaluated in extended-real arithmetic (1/0 = inf, 1/inf = 0)
so that the one-nonsmooth-term rows arise as exact limits of the smooth rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import INF, DcParams, InvalidParams, recip, require_valid, validate

DOMAIN_TOL = 1e-12      # closure slack for strict domain inequalities
BOUNDARY_AGREE_TOL = 1e-9


class NoRegime(RuntimeError):
    """No regime domain matched: a gap in the parameter validation logic."""


class InconsistentBoundary(RuntimeError):
    """Two regimes matched but their coefficients disagree."""


class PreconditionViolated(RuntimeError):
    """The decrease precondition mu1 + mu2 > 0 (or both zero) fails."""


class BothSmooth(ValueError):
    pass


class BothNonsmooth(ValueError):
    pass


class DenominatorZero(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class RegimeCertificate:
    index: int
    label: str
    sigma: float
    sigma_plus: float
    p: float
    alpha: float
    domain_trace: tuple
    boundary_margin: float

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "label": self.label,
            "sigma": self.sigma,
            "sigma_plus": self.sigma_plus,
            "p": self.p,
            "alpha": self.alpha,
            "domain_trace": [[n, bool(v)] for n, v in self.domain_trace],
            "boundary_margin": self.boundary_margin,
        }


@dataclass(frozen=True)
class ThresholdValues:
    S1: float
    S2: float


@dataclass(frozen=True)
class AsymptoticConstants:
    p5_inf: float
    p6_inf: float


# ---------------------------------------------------------------------------
# scalar helpers

def _le(a: float, b: float, tol: float = DOMAIN_TOL) -> bool:
    """a <= b up to relative closure slack; exact for infinite operands."""
    if a <= b:
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return a - b <= tol * max(1.0, abs(a), abs(b))


def _ge(a: float, b: float, tol: float = DOMAIN_TOL) -> bool:
    return _le(b, a, tol)


def _lim_ratio(a: float, b: float) -> float:
    """a/b, taking the joint limit 1 when both grow to +inf together."""
    if math.isinf(b):
        return 1.0 if math.isinf(a) else 0.0
    return a / b


def _threshold(L_other: float, L_here: float, mu: float) -> float:
    """(1/L_other) * (2 + L_here/mu); only meaningful for mu < 0."""
    r = recip(L_other)
    if r == 0.0:
        return 0.0
    t = L_here * recip(mu) if not math.isinf(L_here) else math.copysign(INF, mu)
    return r * (2.0 + t)


def _s_value(mu_a: float, mu_b: float, L: float) -> float:
    return recip(mu_a) + recip(mu_b) + recip(L)


# ---------------------------------------------------------------------------
# smooth-regime coefficients, odd regimes (evens by the parameter swap)

def _coeffs_p1(L1, L2, m1, m2):
    sigma = recip(L2) * _lim_ratio(L2 - m1, L1 - m1)
    den = recip(m1) - recip(L1)
    corr = 0.0 if math.isinf(den) else (recip(L2) - recip(L1)) / den
    sigma_plus = recip(L2) * (1.0 + corr)
    alpha = m1 * recip(L2) * _lim_ratio(L1 - L2, L1 - m1)
    return sigma, sigma_plus, alpha


def _coeffs_p3(L1, L2, m1, m2):
    s1 = _s_value(m1, m2, L2)
    rl1 = recip(L1)
    sigma = 0.0 if rl1 == 0.0 else rl1 * s1 / (s1 - rl1)
    sigma_plus = recip(L2 + m2)
    alpha = -m2 * recip(L2 + m2)
    return sigma, sigma_plus, alpha


def _coeffs_p5(L1, L2, m1, m2):
    sigma_plus = (m1 + m2) / (m2 * m2)
    alpha = (m1 + m2) / (-m2)
    return 0.0, sigma_plus, alpha


def _coeffs_p7(L1, L2, m1, m2):
    sigma_plus = (L2 + m1) / (L2 * L2)
    alpha = m1 / L2
    return 0.0, sigma_plus, alpha


_ODD_COEFFS = {1: _coeffs_p1, 3: _coeffs_p3, 5: _coeffs_p5, 7: _coeffs_p7}


def regime_coefficients(index: int, params: DcParams):
    """(sigma, sigma_plus, alpha) of a smooth regime at the given parameters."""
    L1, L2, m1, m2 = params.L1, params.L2, params.mu1, params.mu2
    if index % 2 == 1:
        return _ODD_COEFFS[index](L1, L2, m1, m2)
    s, sp, a = _ODD_COEFFS[index - 1](L2, L1, m2, m1)
    return sp, s, a


# ---------------------------------------------------------------------------
# smooth-regime domains, odd regimes

def _domain_p1(L1, L2, m1, m2, tol):
    conds = [
        ("L1>=L2", _le(L2, L1, tol)),
        ("L2>mu1", _le(m1, L2, tol)),
        ("mu1>=0", _ge(m1, 0.0, tol)),
    ]
    if m2 >= 0.0:
        conds.append(("mu2>=0", True))
    else:
        s1 = _s_value(m1, m2, L2)
        thr = _threshold(L1, L2, m2)
        conds.append(("mu1>-mu2", _ge(m1 + m2, 0.0, tol)))
        conds.append(("S1<=thr1", _le(s1, thr, tol)))
    return conds


def _domain_p3(L1, L2, m1, m2, tol):
    s1 = _s_value(m1, m2, L2)
    thr = _threshold(L1, L2, m2)
    return [
        ("mu2<0", m2 < 0.0),
        ("mu1>-mu2", _ge(m1 + m2, 0.0, tol)),
        ("L2>mu1", _le(m1, L2, tol)),
        ("L1>mu2", _le(m2, L1, tol)),
        ("thr1<=S1", _le(thr, s1, tol)),
        ("S1<=0", _le(s1, 0.0, tol)),
    ]


def _domain_p5(L1, L2, m1, m2, tol):
    # the published domain uses S1 > max{thr1, 0}; the decrease argument only needs S1 > 0 once
    # mu1 >= L2, which closes the sliver left between the p1 and p7 rows.
    s1 = _s_value(m1, m2, L2)
    thr = _threshold(L1, L2, m2)
    return [
        ("mu2<0", m2 < 0.0),
        ("mu1>-mu2", _ge(m1 + m2, 0.0, tol)),
        ("S1>=0", _ge(s1, 0.0, tol)),
        ("S1>=thr1 or mu1>=L2", _ge(s1, thr, tol) or _ge(m1, L2, tol)),
    ]


def _domain_p7(L1, L2, m1, m2, tol):
    if m2 == 0.0:
        sgn = 1.0
    else:
        # mu2 * S1, expanded so mu2 -> 0 stays finite
        sgn = 1.0 + m2 * recip(m1) + m2 * recip(L2)
    return [
        ("mu1>=L2", _ge(m1, L2, tol)),
        ("L2 finite", not math.isinf(L2)),
        ("mu1>=0", _ge(m1, 0.0, tol)),
        ("mu2*S1>=0", _ge(sgn, 0.0, tol)),
    ]


_ODD_DOMAINS = {1: _domain_p1, 3: _domain_p3, 5: _domain_p5, 7: _domain_p7}
_SWAP_NAMES = str.maketrans("12", "21")


def regime_domain(index: int, params: DcParams, tol: float = DOMAIN_TOL):
    """Evaluate the domain predicates of one regime; list of (name, bool)."""
    L1, L2, m1, m2 = params.L1, params.L2, params.mu1, params.mu2
    if index % 2 == 1:
        return _ODD_DOMAINS[index](L1, L2, m1, m2, tol)
    conds = _ODD_DOMAINS[index - 1](L2, L1, m2, m1, tol)
    return [(name.translate(_SWAP_NAMES), ok) for name, ok in conds]


def _check_precondition(params: DcParams) -> None:
    m1, m2 = params.mu1, params.mu2
    if not ((m1 + m2 > 0.0) or (m1 == 0.0 and m2 == 0.0)):
        raise PreconditionViolated(
            "decrease precondition needs mu1+mu2 > 0 or mu1 = mu2 = 0 "
            "(got mu1=%r, mu2=%r)" % (m1, m2)
        )


def _coeffs_agree(a, b, tol=BOUNDARY_AGREE_TOL) -> bool:
    scale = max(1.0, abs(a[0]), abs(a[1]), abs(b[0]), abs(b[1]))
    return abs(a[0] - b[0]) <= tol * scale and abs(a[1] - b[1]) <= tol * scale


def _build_certificate(index, label, params, trace):
    s, sp, a = regime_coefficients(index, params)
    return RegimeCertificate(
        index=index,
        label=label,
        sigma=s,
        sigma_plus=sp,
        p=s + sp,
        alpha=a,
        domain_trace=tuple(trace),
        boundary_margin=_boundary_margin(params),
    )


def _boundary_margin(params: DcParams) -> float:
    """Distance-like margin to the nearest regime boundary surface."""
    L1, L2, m1, m2 = params.L1, params.L2, params.mu1, params.mu2
    cands = [abs(m1), abs(m2)]
    if not math.isinf(L1) and not math.isinf(L2):
        cands.append(abs(L1 - L2))
    if not math.isinf(L2):
        cands.append(abs(m1 - L2))
    if not math.isinf(L1):
        cands.append(abs(m2 - L1))
    if m1 != 0.0 and m2 != 0.0:
        s1 = _s_value(m1, m2, L2)
        s2 = _s_value(m1, m2, L1)
        if math.isfinite(s1):
            cands.append(abs(s1))
        if math.isfinite(s2):
            cands.append(abs(s2))
    return min(cands)


def classify(params: DcParams, tol: float = DOMAIN_TOL) -> RegimeCertificate:
    """Find the unique smooth regime containing the parameters.

    On a boundary where several regime closures meet the lowest index wins,
    after asserting that all matched rows produce the same coefficients.
    """
    require_valid(params)
    _check_precondition(params)
    if math.isinf(params.L1) and math.isinf(params.L2):
        raise BothNonsmooth("both terms nonsmooth: use the T-measure analysis")

    matched = []
    trace = []
    for i in range(1, 9):
        conds = regime_domain(i, params, tol)
        ok = all(v for _, v in conds)
        trace.append(("p%d" % i, ok))
        if ok:
            matched.append((i, conds))

    if not matched:
        raise NoRegime("no regime domain matched for %s" % (params.to_json_dict(),))

    first, first_conds = matched[0]
    coeffs = regime_coefficients(first, params)
    for other, _ in matched[1:]:
        oc = regime_coefficients(other, params)
        if not _coeffs_agree(coeffs, oc):
            raise InconsistentBoundary(
                "regimes p%d and p%d both match at %s but disagree: %r vs %r"
                % (first, other, params.to_json_dict(), coeffs[:2], oc[:2])
            )
    detail = [("p%d:%s" % (first, name), v) for name, v in first_conds]
    return _build_certificate(first, "p%d" % first, params, trace + detail)


# ---------------------------------------------------------------------------
# one nonsmooth term

_NONSMOOTH_LABELS = {1: "p17", 2: "p28", 3: "p3", 4: "p4", 5: "p5", 6: "p6"}


def classify_nonsmooth(params: DcParams, tol: float = DOMAIN_TOL) -> RegimeCertificate:
    """Classify when exactly one of L1, L2 is infinite.

    The coefficients coincide with the extended-real limits of the smooth
    regimes; the p7/p8 rows condense into p1/p2.
    """
    require_valid(params)
    _check_precondition(params)
    inf1, inf2 = math.isinf(params.L1), math.isinf(params.L2)
    if inf1 and inf2:
        raise BothNonsmooth("both L1 and L2 are infinite")
    if not inf1 and not inf2:
        raise BothSmooth("both terms smooth: use classify")

    if inf1:
        index = _nonsmooth_row_f1_inf(params, tol)
    else:
        index = _nonsmooth_row_f1_inf(params.swapped(), tol)
        index = {1: 2, 4: 3, 5: 6}[index]

    label = _NONSMOOTH_LABELS[index]
    # rows p_{1,7}/p_{2,8} take the L-independent p7/p8 formulas, which are
    # also the exact L -> inf limits of the p1/p2 rows
    s, sp, a = regime_coefficients({1: 7, 2: 8}.get(index, index), params)
    trace = (("L1=inf", inf1), ("L2=inf", inf2), ("row", True))
    return RegimeCertificate(index, label, s, sp, s + sp, a,
                             trace, _boundary_margin(params))


def _nonsmooth_row_f1_inf(params: DcParams, tol: float) -> int:
    """Row selection for L1 = inf: one of p_{1,7} (1), p4 (4), p5 (5)."""
    m1, m2, L2 = params.mu1, params.mu2, params.L2
    if m1 < 0.0:
        return 4
    if m2 == 0.0:
        sgn = 1.0
    else:
        sgn = 1.0 + m2 * recip(m1) + m2 * recip(L2)
    if _ge(sgn, 0.0, tol):
        return 1
    return 5


def one_step_certificate(params: DcParams) -> RegimeCertificate:
    """Dispatch to classify / classify_nonsmooth by finiteness of L1, L2."""
    n_inf = int(math.isinf(params.L1)) + int(math.isinf(params.L2))
    if n_inf == 0:
        return classify(params)
    if n_inf == 1:
        return classify_nonsmooth(params)
    raise BothNonsmooth("both terms nonsmooth: no decrease certificate")


# ---------------------------------------------------------------------------
# thresholds and conjectured asymptotic constants

def thresholds(params: DcParams) -> ThresholdValues:
    return ThresholdValues(
        S1=_s_value(params.mu1, params.mu2, params.L2),
        S2=_s_value(params.mu1, params.mu2, params.L1),
    )


def asymptotic_constants(params: DcParams) -> AsymptoticConstants:
    """Conjectured leading constants of the regime-5/6 asymptotic rates."""
    L1, L2, m1, m2 = params.L1, params.L2, params.mu1, params.mu2
    if m1 == 0.0 or L2 + m2 == 0.0:
        raise DenominatorZero("p5_inf undefined: (L2+mu2)*mu1^2 vanishes")
    if m2 == 0.0 or L1 + m1 == 0.0:
        raise DenominatorZero("p6_inf undefined: (L1+mu1)*mu2^2 vanishes")
    if math.isinf(L2):
        p5 = (m1 + m2) / (m1 * m1)
    else:
        p5 = (L2 + m1) * (m1 + m2) / ((L2 + m2) * m1 * m1)
    if math.isinf(L1):
        p6 = (m1 + m2) / (m2 * m2)
    else:
        p6 = (L1 + m2) * (m1 + m2) / ((L1 + m1) * m2 * m2)
    return AsymptoticConstants(p5_inf=p5, p6_inf=p6)


# ---------------------------------------------------------------------------
# vectorized grid classification (for regime maps and partition testing)

def _v_le(a, b, tol=DOMAIN_TOL):
    with np.errstate(invalid="ignore"):
        base = a <= b
        both = np.isfinite(a) & np.isfinite(b)
        scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
        near = both & (a - b <= tol * scale)
    return base | near


def _v_recip(a):
    with np.errstate(divide="ignore"):
        return np.where(a == 0.0, INF, 1.0 / np.where(a == 0.0, 1.0, a))


def grid_classify(L1: float, L2: float, mu1, mu2, tol: float = DOMAIN_TOL):
    """Classify a whole (mu1, mu2) grid at fixed finite L1, L2.

    Returns (index, p, sigma, sigma_plus, n_matched); index 0 marks nodes
    outside the valid set (assumption or decrease precondition violated).
    Matches the scalar classify on every valid node.
    """
    if math.isinf(L1) or math.isinf(L2):
        raise InvalidParams("grid_classify requires finite L1, L2")
    M1 = np.asarray(mu1, dtype=float)
    M2 = np.asarray(mu2, dtype=float)
    r1, r2 = _v_recip(M1), _v_recip(M2)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        s1 = r1 + r2 + 1.0 / L2
        s2 = r1 + r2 + 1.0 / L1
        thr1 = (2.0 + L2 * r2) / L1
        thr2 = (2.0 + L1 * r1) / L2

        valid = (M1 < L1) & (M2 < L2) & (
            (M1 + M2 > 0.0) | ((M1 == 0.0) & (M2 == 0.0))
        )

        hyp1 = (M2 < 0.0) & _v_le(-M2, M1, tol) & _v_le(s1, thr1, tol)
        d1 = (L1 >= L2) & _v_le(M1, L2, tol) & _v_le(0.0, M1, tol) & ((M2 >= 0.0) | hyp1)
        hyp2 = (M1 < 0.0) & _v_le(-M1, M2, tol) & _v_le(s2, thr2, tol)
        d2 = (L2 >= L1) & _v_le(M2, L1, tol) & _v_le(0.0, M2, tol) & ((M1 >= 0.0) | hyp2)

        d3 = ((M2 < 0.0) & _v_le(-M2, M1, tol) & _v_le(M1, L2, tol)
              & _v_le(thr1, s1, tol) & _v_le(s1, 0.0, tol))
        d4 = ((M1 < 0.0) & _v_le(-M1, M2, tol) & _v_le(M2, L1, tol)
              & _v_le(thr2, s2, tol) & _v_le(s2, 0.0, tol))

        d5 = ((M2 < 0.0) & _v_le(-M2, M1, tol) & _v_le(0.0, s1, tol)
              & (_v_le(thr1, s1, tol) | _v_le(L2, M1, tol)))
        d6 = ((M1 < 0.0) & _v_le(-M1, M2, tol) & _v_le(0.0, s2, tol)
              & (_v_le(thr2, s2, tol) | _v_le(L1, M2, tol)))

        e7 = np.where(M2 == 0.0, 1.0, 1.0 + M2 * r1 + M2 / L2)
        d7 = _v_le(L2, M1, tol) & _v_le(0.0, M1, tol) & _v_le(0.0, e7, tol)
        e8 = np.where(M1 == 0.0, 1.0, 1.0 + M1 * r2 + M1 / L1)
        d8 = _v_le(L1, M2, tol) & _v_le(0.0, M2, tol) & _v_le(0.0, e8, tol)

        masks = [d & valid for d in (d1, d2, d3, d4, d5, d6, d7, d8)]

        sig1 = (1.0 / L2) * (L2 - M1) / (L1 - M1)
        sp1 = (1.0 / L2) * (1.0 + (1.0 / L2 - 1.0 / L1) / (r1 - 1.0 / L1))
        sig2 = (1.0 / L1) * (1.0 + (1.0 / L1 - 1.0 / L2) / (r2 - 1.0 / L2))
        sp2 = (1.0 / L1) * (L1 - M2) / (L2 - M2)
        sig3 = (1.0 / L1) * s1 / (s1 - 1.0 / L1)
        sp3 = np.full_like(M1, np.nan) if L2 == 0 else 1.0 / (L2 + M2)
        sig4 = 1.0 / (L1 + M1)
        sp4 = (1.0 / L2) * s2 / (s2 - 1.0 / L2)
        sig5 = np.zeros_like(M1)
        sp5 = (M1 + M2) / (M2 * M2)
        sig6 = (M1 + M2) / (M1 * M1)
        sp6 = np.zeros_like(M1)
        sig7 = np.zeros_like(M1)
        sp7 = (L2 + M1) / (L2 * L2)
        sig8 = (L1 + M2) / (L1 * L1)
        sp8 = np.zeros_like(M1)

    sigmas = [sig1, sig2, sig3, sig4, sig5, sig6, sig7, sig8]
    sigma_ps = [sp1, sp2, sp3, sp4, sp5, sp6, sp7, sp8]

    index = np.select(masks, list(range(1, 9)), default=0)
    sigma = np.select(masks, sigmas, default=np.nan)
    sigma_plus = np.select(masks, sigma_ps, default=np.nan)
    n_matched = np.sum(np.stack(masks), axis=0)
    p = sigma + sigma_plus
    return index, p, sigma, sigma_plus, n_matched


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    steps: int

    @staticmethod
    def parse(text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("grid spec must look like lo:hi:steps, got %r" % text)
        return GridSpec(float(parts[0]), float(parts[1]), int(parts[2]))

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


def regime_map(L1: float, L2: float, grid: GridSpec):
    """Figure-1-style data: rows (mu1, mu2, regime index, p) over the grid."""
    pts = grid.points()
    M1, M2 = np.meshgrid(pts, pts, indexing="ij")
    index, p, _, _, _ = grid_classify(L1, L2, M1, M2)
    rows = []
    for i in range(M1.shape[0]):
        for j in range(M1.shape[1]):
            rows.append((M1[i, j], M2[i, j], int(index[i, j]),
                         float(p[i, j]) if index[i, j] else float("nan")))
    return rows
