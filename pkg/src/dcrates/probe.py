"""Worst-case search over algorithm-consistent, interpolation-feasible data.

The search space is the discrete data of N steps: points x^k, subgradients
g1^k and g2^k with the link g1^{k+1} = g2^k enforced by substitution
(g1 is stored only at k = 0).  Function values are eliminated exactly: the
interpolation inequalities are difference constraints f^i - f^j >= c_ij, so
the minimal feasible decrease f^0 - f^N equals the longest-path weight from
0 to N in the constraint graph (max-plus Floyd-Warshall; a positive cycle
means the (x, g) data is infeasible for the class).  The search therefore
maximizes

    ratio(x, g) = (1/2) min_k ||g1^k - g2^k||^2 / D(x, g),

with D the minimal feasible F(x^0) - F(x^N), by multi-start Nelder-Mead on a
penalized objective.  Witness f-values are recovered from the longest-path
potentials, making every reported witness exactly feasible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .curvature import Curvature, DcParams, require_valid
from .interpolation import InterpReport, check_interpolation, make_triplet
from .regimes import one_step_certificate

FEAS_TOL = 1e-7
_CYCLE_TOL = 1e-11
_D_FLOOR = 1e-13


class InfeasibleConstruction(RuntimeError):
    """No interpolation-feasible f-values exist for the equality system."""


@dataclass(frozen=True)
class PepVariables:
    x: np.ndarray       # (N+1, d)
    g1: np.ndarray      # (N+1, d), rows 1..N equal g2 rows 0..N-1
    g2: np.ndarray      # (N+1, d)
    f1: np.ndarray      # (N+1,)
    f2: np.ndarray      # (N+1,)

    @property
    def N(self) -> int:
        return self.x.shape[0] - 1

    def gaps_sq(self) -> np.ndarray:
        return np.sum((self.g1 - self.g2) ** 2, axis=1)

    def decrease(self) -> float:
        F = self.f1 - self.f2
        return float(F[0] - F[-1])

    def triplets(self, which: int) -> list:
        g = self.g1 if which == 1 else self.g2
        f = self.f1 if which == 1 else self.f2
        return [make_triplet(self.x[i], g[i], float(f[i]))
                for i in range(self.x.shape[0])]


@dataclass(frozen=True)
class ProbeResult:
    best_ratio: float
    certified_bound: float
    gap: float
    witness: Optional[PepVariables]
    feasibility: Optional[tuple]   # (InterpReport for f1, for f2)
    budget_exhausted: bool
    certificate_violation: bool
    evals: int


# ---------------------------------------------------------------------------
# pairwise constraint matrices and longest paths

def _pair_matrix(X: np.ndarray, G: np.ndarray, cls: Curvature) -> np.ndarray:
    """c[i, j]: minimal feasible f^i - f^j given the (x, g) data."""
    dX = X[:, None, :] - X[None, :, :]
    dG = G[:, None, :] - G[None, :, :]
    lin = np.einsum("jd,ijd->ij", G, dX)
    mu, L = cls.mu, cls.L
    if math.isinf(L):
        quad = 0.5 * mu * np.sum(dX * dX, axis=2)
    else:
        r = dG - L * dX
        quad = (np.sum(dG * dG, axis=2) / (2.0 * L)
                + mu / (2.0 * L * (L - mu)) * np.sum(r * r, axis=2))
    c = lin + quad
    np.fill_diagonal(c, 0.0)
    return c


def _longest_paths(c: np.ndarray) -> np.ndarray:
    d = c.copy()
    n = d.shape[0]
    for k in range(n):
        np.maximum(d, d[:, k:k + 1] + d[k:k + 1, :], out=d)
    return d


# ---------------------------------------------------------------------------
# extremal one-step witnesses from the equality conditions

def _quad_bound(cls: Curvature, gamma: float) -> float:
    """Pair lower bound with dx = 1, dg = gamma."""
    mu, L = cls.mu, cls.L
    if math.isinf(L):
        return 0.5 * mu
    return (gamma * gamma / (2.0 * L)
            + mu * (gamma - L) ** 2 / (2.0 * L * (L - mu)))


def _gamma_candidates(regime_index: int, params: DcParams) -> list:
    L1, L2, m1, m2 = params.L1, params.L2, params.mu1, params.mu2
    if regime_index == 1:
        return [(L2, L2)]
    if regime_index == 2:
        return [(L1, L1)]
    if regime_index == 3:
        g3 = L1 + L2 * m2 * (L1 - m1) / (m1 * (L2 + m2))
        return [(g3, m2), (g3, L2)]
    if regime_index == 4:
        g4 = L2 + L1 * m1 * (L2 - m2) / (m2 * (L1 + m1))
        return [(m1, g4), (L1, g4)]
    if regime_index in (5, 6):
        return [(m1, m2)]
    if regime_index == 7:
        return [(m1, L2)]
    if regime_index == 8:
        return [(L1, m2)]
    raise ValueError("regime index must lie in 1..8, got %r" % regime_index)


def _assemble_one_step(params: DcParams, gamma: float, gamma_plus: float) -> PepVariables:
    # x0 = 1, x1 = 0, g2^0 = 0 (so g1^1 = 0), G = gamma, G+ = gamma_plus
    x = np.array([[1.0], [0.0]])
    g1 = np.array([[gamma], [0.0]])
    g2 = np.array([[0.0], [-gamma_plus]])
    r1 = _quad_bound(params.f1, gamma)
    r2 = _quad_bound(params.f2, gamma_plus)
    f1 = np.array([r1, 0.0])
    f2 = np.array([-r2, 0.0])
    return PepVariables(x, g1, g2, f1, f2)


def extremal_instance(regime_index: int, params: DcParams,
                      tol: float = FEAS_TOL) -> PepVariables:
    """One-step data hitting the decrease bound with equality.

    The per-regime equality conditions fix G and G+ as multiples of the step
    dx = 1; the two binding pairwise inequalities then pin the f-values.
    """
    require_valid(params)
    cert = one_step_certificate(params)
    last_bad = None
    for gamma, gamma_plus in _gamma_candidates(regime_index, params):
        w = _assemble_one_step(params, gamma, gamma_plus)
        rep1 = check_interpolation(w.triplets(1), params.f1, tol)
        rep2 = check_interpolation(w.triplets(2), params.f2, tol)
        bound = (cert.sigma * 0.5 * gamma ** 2
                 + cert.sigma_plus * 0.5 * gamma_plus ** 2)
        slack = w.decrease() - bound
        scale = max(1.0, abs(bound))
        if rep1.feasible and rep2.feasible and abs(slack) <= tol * scale:
            return w
        last_bad = ("f1" if not rep1.feasible else
                    "f2" if not rep2.feasible else "slack=%g" % slack)
    raise InfeasibleConstruction(
        "no equality witness for regime %d at %s (last failure: %s)"
        % (regime_index, params.to_json_dict(), last_bad))


# ---------------------------------------------------------------------------
# the search itself

class _Objective:
    def __init__(self, params: DcParams, N: int, d: int):
        self.params = params
        self.N = N
        self.d = d
        self.evals = 0

    def unpack(self, z: np.ndarray):
        n, d = self.N + 1, self.d
        x = z[:n * d].reshape(n, d)
        g1_0 = z[n * d:(n + 1) * d]
        g2 = z[(n + 1) * d:].reshape(n, d)
        g1 = np.vstack([g1_0, g2[:-1]])
        return x, g1, g2

    def parts(self, z: np.ndarray):
        x, g1, g2 = self.unpack(z)
        c1 = _pair_matrix(x, g1, self.params.f1)
        c2 = _pair_matrix(x, g2, self.params.f2)
        d1 = _longest_paths(c1)
        d2 = _longest_paths(c2)
        cyc = max(float(np.max(np.diag(d1))), float(np.max(np.diag(d2))))
        D = float(d1[0, -1] + d2[-1, 0])
        num = 0.5 * float(np.min(np.sum((g1 - g2) ** 2, axis=1)))
        return num, D, cyc, (d1, d2, x, g1, g2)

    def ratio(self, z: np.ndarray) -> float:
        self.evals += 1
        num, D, cyc, _ = self.parts(z)
        if cyc > _CYCLE_TOL:
            return -1e3 * (1.0 + cyc)
        if D < _D_FLOOR:
            return -1.0
        return num / D

    def neg_smooth(self, z: np.ndarray) -> float:
        """Continuous merit for the local search: the hard feasibility wall
        is replaced by a linear penalty so the simplex can slide along it."""
        self.evals += 1
        num, D, cyc, _ = self.parts(z)
        val = num / D if D >= _D_FLOOR else D - _D_FLOOR
        return -(val - 1e3 * max(cyc, 0.0))

    def witness(self, z: np.ndarray) -> Optional[PepVariables]:
        num, D, cyc, (d1, d2, x, g1, g2) = self.parts(z)
        if cyc > _CYCLE_TOL or D < _D_FLOOR:
            return None
        s = 1.0 / math.sqrt(D)   # ratio is invariant; normalize D to 1
        x, g1, g2 = s * x, s * g1, s * g2
        d1 = _longest_paths(_pair_matrix(x, g1, self.params.f1))
        d2 = _longest_paths(_pair_matrix(x, g2, self.params.f2))
        f1 = -d1[0, :]           # potentials: f^j = -dist(0, j)
        f2 = -d2[-1, :]
        return PepVariables(x, g1, g2, f1, f2)


def _chain_start(params: DcParams, regime_index: int, N: int, d: int) -> np.ndarray:
    """Repeat the one-step equality pattern: constant gradient gap gamma."""
    gamma, _ = _gamma_candidates(regime_index, params)[0]
    ks = np.arange(N + 1, dtype=float)
    x = np.zeros((N + 1, d))
    x[:, 0] = N - ks
    g2 = np.zeros((N + 1, d))
    g2[:, 0] = -ks * gamma
    g1_0 = np.zeros(d)
    g1_0[0] = gamma
    return np.concatenate([x.ravel(), g1_0, g2.ravel()])


def _pack_witness(w: PepVariables, d: Optional[int] = None) -> np.ndarray:
    """Flatten a witness to a search vector, zero-padding to dimension d."""
    x, g1, g2 = w.x, w.g1, w.g2
    if d is not None and d > x.shape[1]:
        pad = ((0, 0), (0, d - x.shape[1]))
        x = np.pad(x, pad)
        g1 = np.pad(g1, pad)
        g2 = np.pad(g2, pad)
    return np.concatenate([x.ravel(), g1[0], g2.ravel()])


def _resample_chain(z_prev: np.ndarray, N_prev: int, N: int, d: int) -> np.ndarray:
    """Stretch a previous witness onto a finer iteration grid (warm start)."""
    n_prev = N_prev + 1
    x = z_prev[:n_prev * d].reshape(n_prev, d)
    g1_0 = z_prev[n_prev * d:(n_prev + 1) * d]
    g2 = z_prev[(n_prev + 1) * d:].reshape(n_prev, d)
    t_old = np.linspace(0.0, 1.0, n_prev)
    t_new = np.linspace(0.0, 1.0, N + 1)
    xi = np.column_stack([np.interp(t_new, t_old, x[:, j]) for j in range(d)])
    gi = np.column_stack([np.interp(t_new, t_old, g2[:, j]) for j in range(d)])
    return np.concatenate([xi.ravel(), g1_0, gi.ravel()])


def probe(params: DcParams, N: int = 1, d: int = 1, budget: int = 200000,
          seed: int = 0, starts: int = 32, warm: bool = True,
          init: Optional[np.ndarray] = None) -> ProbeResult:
    """Multi-start local maximization of the worst-case ratio.

    warm=False runs cold (random starts only).  init adds one caller-supplied
    start vector.  Deterministic for fixed (seed, budget, starts).
    """
    require_valid(params)
    if N < 1 or N > 10 or d < 1 or d > 3:
        raise ValueError("desk scale only: 1 <= N <= 10, 1 <= d <= 3")
    cert = one_step_certificate(params)
    certified = 1.0 / (cert.p * N)
    obj = _Objective(params, N, d)
    rng = np.random.default_rng(seed)
    nz = (N + 1) * d + d + (N + 1) * d

    inits = []
    if init is not None:
        inits.append(np.asarray(init, dtype=float))
    if warm:
        inits.append(_chain_start(params, cert.index, N, d))
        try:
            ez = _pack_witness(extremal_instance(cert.index, params), d)
            inits.append(ez if N == 1 else _resample_chain(ez, 1, N, d))
        except InfeasibleConstruction:
            pass
    while len(inits) < starts:
        z = rng.normal(size=nz)
        scale = 10.0 ** rng.uniform(-1, 1)
        inits.append(scale * z)

    restarts = 4
    per_chunk = max(0, budget // (max(1, len(inits)) * restarts))
    best = (-math.inf, -1, None)     # (ratio, start index, z)
    exhausted = False
    for idx, z0 in enumerate(inits):
        z = z0.copy()
        r = obj.ratio(z)
        if r > best[0]:
            best = (r, idx, z.copy())
        for _ in range(restarts):
            if per_chunk == 0 or obj.evals >= budget:
                break
            res = minimize(obj.neg_smooth, z, method="Nelder-Mead",
                           options={"maxfev": min(per_chunk,
                                                  budget - obj.evals),
                                    "xatol": 1e-13, "fatol": 1e-15,
                                    "adaptive": True})
            z = res.x
        r = obj.ratio(z)
        if r > best[0]:
            best = (r, idx, z.copy())
        if obj.evals >= budget:
            exhausted = True
            break
    # polish the champion with whatever budget remains
    while best[2] is not None and obj.evals < budget and per_chunk > 0:
        res = minimize(obj.neg_smooth, best[2], method="Nelder-Mead",
                       options={"maxfev": min(per_chunk, budget - obj.evals),
                                "xatol": 1e-13, "fatol": 1e-15,
                                "adaptive": True})
        r = obj.ratio(res.x)
        if r <= best[0]:
            break
        best = (r, best[1], res.x.copy())

    ratio = max(best[0], 0.0) if best[0] > -1.0 else 0.0
    witness = obj.witness(best[2]) if best[2] is not None else None
    feas = None
    if witness is not None:
        feas = (check_interpolation(witness.triplets(1), params.f1,
                                    FEAS_TOL, scale_aware=True),
                check_interpolation(witness.triplets(2), params.f2,
                                    FEAS_TOL, scale_aware=True))
        if not (feas[0].feasible and feas[1].feasible):
            witness, feas, ratio = None, None, 0.0
    violation = ratio > certified + 1e-6
    return ProbeResult(ratio, certified, certified - ratio, witness, feas,
                       exhausted, violation, obj.evals)


def ratio_trend(params: DcParams, Ns, d: int = 1, budget: int = 200000,
                seed: int = 0, starts: int = 16) -> dict:
    """Probe a sequence of horizons, warm-starting each from the last.

    Fits 1/ratio = a N + b by least squares and reports (a, b) together with
    the asymptotic constants, as trend evidence only.
    """
    from .regimes import asymptotic_constants
    results = {}
    prev = None
    for N in Ns:
        init = None
        if prev is not None:
            z_prev, N_prev = prev
            init = _resample_chain(z_prev, N_prev, N, d)
        r = probe(params, N, d, budget, seed, starts, warm=True, init=init)
        results[N] = r
        if r.witness is not None:
            prev = (_pack_witness(r.witness), N)
    xs = np.array([N for N in Ns if results[N].best_ratio > 0.0], dtype=float)
    ys = np.array([1.0 / results[N].best_ratio for N in xs.astype(int)])
    a, b = (np.polyfit(xs, ys, 1) if xs.size >= 2 else (math.nan, math.nan))
    out = {"results": results, "a_fit": float(a), "b_fit": float(b)}
    try:
        out["asymptotic"] = asymptotic_constants(params)
    except Exception:
        out["asymptotic"] = None
    return out
