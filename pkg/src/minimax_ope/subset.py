"""Optimal plug-in subset for the Switch estimator.

The subset is the support of the minimizer ``v*`` of

    min_v  sqrt( sum_a (pi_t(a) - v(a))^2 / pi_b(a) / (8 n) ) + 1/2 * sum_a |v(a)|

Stationarity gives ``v*(a) = pi_t(a) - c * pi_b(a)`` on the support and
``v*(a) = 0`` off it, with ``c = sqrt(2 n Q(v*))``.  Because ``v*(a) > 0``
exactly when ``rho(a) > c``, the support is a suffix of the actions sorted by
likelihood ratio, and for a fixed suffix ``S`` the threshold has the closed
form ``c = sqrt(2 n T2(S) / (1 - 2 n pi_b(S)))``.  :func:`solve_optimal_subset`
enumerates those suffixes and keeps the best objective.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bandit import Policy, as_mask, likelihood_ratio
from .errors import DimensionMismatch, TooLarge

BRUTE_FORCE_K_LIMIT = 15


@dataclass(frozen=True, eq=False)
class SwitchSolution:
    s_star: np.ndarray  # sorted action indices
    c: float
    v_star: np.ndarray
    dual_value: float
    t1: float
    t2: float
    epsilon: float
    n: float
    rho: np.ndarray

    @property
    def mask(self) -> np.ndarray:
        return as_mask(self.s_star, self.v_star.shape[0])

    def kkt_residuals(self, target: Policy, behavior: Policy) -> dict[str, float]:
        """Relative violations of the optimality conditions at this solution.

        ``sign``: threshold separation of ``rho`` around ``c``;
        ``stationarity``: ``c^2 = 2n (T1 + T2)``;
        ``t1_t2``: ``eps * T1 = (1 - eps) * T2``;
        ``dual``: optimal value equals ``pi_t(S*)/2 + sqrt(T2 * eps / (8n))``
        (this follows from ``T1 + T2 = T2 / eps`` and ``1 - 2n pi_b(S*) = eps``).
        """
        mask = self.mask
        finite = np.isfinite(self.rho)
        scale = max(self.c, 1e-300)
        inside = mask & finite
        sign = 0.0
        if inside.any():
            sign = max(sign, float(np.max(np.maximum(0.0, self.c - self.rho[inside]))) / scale)
        if (~mask).any():
            sign = max(sign, float(np.max(np.maximum(0.0, self.rho[~mask] - self.c))) / scale)
        q = self.t1 + self.t2
        stationarity = abs(self.c**2 - 2 * self.n * q) / max(self.c**2, 2 * self.n * q, 1e-300)
        t1_t2 = abs(self.epsilon * self.t1 - (1 - self.epsilon) * self.t2) / max(
            self.t1, self.t2, 1e-300)
        pt_s = target.mass(mask)
        dual_formula = 0.5 * pt_s + math.sqrt(self.t2 * self.epsilon / (8 * self.n))
        dual = abs(self.dual_value - dual_formula) / max(abs(self.dual_value), 1e-300)
        return {"sign": sign, "stationarity": stationarity, "t1_t2": t1_t2, "dual": dual}


def convex_objective(target: Policy, behavior: Policy, n: float, v) -> float:
    """Objective of the subset program at ``v`` (``0/0`` terms count as 0)."""
    pt, pb = target.weights, behavior.weights
    v = np.asarray(v, dtype=float)
    diff = pt - v
    quad = np.zeros_like(diff)
    pos = pb > 0
    quad[pos] = diff[pos] ** 2 / pb[pos]
    if np.any(diff[~pos] != 0):
        return math.inf
    return math.sqrt(math.fsum(quad) / (8 * n)) + 0.5 * math.fsum(np.abs(v))


def _check(target: Policy, behavior: Policy, n: float):
    if target.k != behavior.k:
        raise DimensionMismatch(f"target has k={target.k}, behavior has k={behavior.k}")
    if not n >= 1:
        raise ValueError("n must be at least 1")


def solve_optimal_subset(target: Policy, behavior: Policy, n: float) -> SwitchSolution:
    """Exact minimizer of the subset program by suffix enumeration.

    Actions with zero target mass never enter the subset; actions the
    behavior policy never plays (infinite ratio) always do, with
    ``v*(a) = pi_t(a)``.  Ties ``rho(a) == c`` are left out of the subset.
    """
    _check(target, behavior, n)
    pt, pb = target.weights, behavior.weights
    k = target.k
    rho = likelihood_ratio(target, behavior)
    forced = np.isinf(rho)
    free = np.flatnonzero((pt > 0) & (pb > 0))
    order = free[np.lexsort((free, rho[free]))]  # ascending rho, ties by index
    m_free = order.shape[0]

    # suffix sums: pb_suffix[m] = pi_b of the last m sorted actions
    pb_sorted = pb[order]
    w_sorted = pt[order] ** 2 / pb_sorted  # pi_b * rho^2
    pb_suffix = np.concatenate(([0.0], np.cumsum(pb_sorted[::-1])))
    w_prefix = np.concatenate(([0.0], np.cumsum(w_sorted)))

    v_base = np.where(forced, pt, 0.0)
    candidates = []  # (objective, kkt_ok, m, c, v)

    def consider(m: int, c: float, v: np.ndarray):
        obj = convex_objective(target, behavior, n, v)
        inside = order[m_free - m:]
        outside = order[:m_free - m]
        ok = bool(np.all(rho[inside] > c) and np.all(rho[outside] <= c))
        candidates.append((obj, ok, m, c, v))

    for m in range(m_free + 1):
        # m = 0 is the v = 0 endpoint on the free actions
        pb_s = pb_suffix[m]
        slack = 1.0 - 2.0 * n * pb_s
        if slack <= 0:
            break  # pb_suffix only grows with m
        t2 = w_prefix[m_free - m]
        c = math.sqrt(2.0 * n * t2 / slack)
        v = v_base.copy()
        inside = order[m_free - m:]
        v[inside] = pt[inside] - c * pb[inside]
        consider(m, c, v)
    # v = pi_t endpoint, which may lie beyond the break above
    consider(m_free, 0.0, np.where(pt > 0, pt, 0.0))

    best_obj = min(cand[0] for cand in candidates)
    tol = 1e-12 * max(best_obj, 1e-300)
    near = [cand for cand in candidates if cand[0] <= best_obj + tol]
    near.sort(key=lambda cand: (not cand[1], cand[2]))
    obj, _, m, c, v = near[0]

    s_mask = v != 0
    s_star = np.flatnonzero(s_mask)
    pos = pb > 0
    t1 = math.fsum((pt[s_mask & pos] - v[s_mask & pos]) ** 2 / pb[s_mask & pos])
    t2 = math.fsum(pt[~s_mask & pos] ** 2 / pb[~s_mask & pos])
    epsilon = min(1.0, max(0.0, 1.0 - 2.0 * n * float(np.sum(pb[s_mask]))))
    v.setflags(write=False)
    rho.setflags(write=False)
    return SwitchSolution(s_star, float(c), v, float(obj), t1, t2, epsilon, float(n), rho)


def switch_objective(target: Policy, behavior: Policy, n: float, s) -> float:
    """``pi_t(S)^2 + sum_{a not in S} pi_b(a) rho(a)^2 / n`` (infinite if an
    infinite-ratio action is left outside ``S``)."""
    mask = as_mask(s, target.k)
    rho = likelihood_ratio(target, behavior)
    out = ~mask
    if np.any(np.isinf(rho[out])):
        return math.inf
    pt_s = math.fsum(target.weights[mask])
    pb, r = behavior.weights[out], rho[out]
    return pt_s**2 + math.fsum(pb * r * r) / n


def brute_force_subset(target: Policy, behavior: Policy, n: float,
                       k_limit: int = BRUTE_FORCE_K_LIMIT) -> tuple[np.ndarray, float]:
    """Exhaustive minimization of :func:`switch_objective` over all subsets."""
    _check(target, behavior, n)
    k = target.k
    if k > k_limit:
        raise TooLarge(f"k={k} exceeds brute-force limit {k_limit}")
    rho = likelihood_ratio(target, behavior)
    forced = np.isinf(rho)
    w = np.where(forced, 0.0, behavior.weights * np.where(forced, 0.0, rho) ** 2)
    masks = np.array(list(itertools.product((False, True), repeat=k)), dtype=bool)[:, ::-1]
    obj = (masks @ target.weights) ** 2 + ((~masks) @ w) / n
    obj[(~masks[:, forced]).any(axis=1)] = math.inf
    best = int(np.argmin(obj))
    return np.flatnonzero(masks[best]), float(obj[best])


@dataclass(frozen=True)
class RiskSurrogate:
    value: float
    pi_t_sstar: float
    t2_over_n: float


def minimax_risk_surrogate(target: Policy, behavior: Policy, n: float,
                           r_max: float = 1.0) -> RiskSurrogate:
    """Order of the minimax risk: ``r_max^2 (pi_t(S*)^2 + T2 / n)``."""
    sol = solve_optimal_subset(target, behavior, n)
    pt_s = target.mass(sol.mask)
    t2n = sol.t2 / n
    return RiskSurrogate(r_max**2 * (pt_s**2 + t2n), pt_s, t2n)


def switch_mse_upper_bound(target: Policy, behavior: Policy, n: float, r_max: float,
                           s) -> float:
    """Worst-case MSE bound ``3 r_max^2 (pi_t(S)^2 + sum_{a not in S} pi_b rho^2 / n)``.

    Returns ``inf`` when an action with infinite likelihood ratio lies
    outside ``s``.
    """
    return 3.0 * r_max**2 * switch_objective(target, behavior, n, s)
