"""Chebyshev bias-corrected plug-in estimator.

The estimator reweights the empirical mean of action ``a`` by ``g(n(a))``
where

    g(j) = a_j j! / n^j + 1   for j <= L,    g(j) = 1   for j > L,

and ``a_0 .. a_L`` are the monomial coefficients of

    P(x) = -Q_L((2x - r - l) / (r - l)) / Q_L((-r - l) / (r - l)),

``Q_L`` being the degree-``L`` Chebyshev polynomial of the first kind.
Under Poisson sampling the bias is ``sum_a pi_t(a) r(a) exp(-n pi_b(a)) P(pi_b(a))``
and ``P`` is the polynomial with ``P(0) = -1`` that is smallest in sup norm
on ``[l, r]``.

Coefficients alternate in sign and grow like ``(4/r)^j``; the expansion in
the shifted basis cancels catastrophically in floating point, so the whole
recurrence runs on exact rationals and is rounded once per table entry.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bandit import BanditInstance, Dataset, Policy
from .errors import DegenerateInterval, DimensionMismatch
from .estimators import empirical_means

DEFAULT_C0 = 0.2
DEFAULT_C1 = 4.0


class ModelMismatchWarning(UserWarning):
    """Chebyshev weights applied to multinomial rather than Poisson data."""


@dataclass(frozen=True)
class ChebyshevConfig:
    nu: float
    r: float
    degree_L: int
    n: float
    c0: float = DEFAULT_C0
    c1: float = DEFAULT_C1

    @property
    def ell(self) -> float:
        return self.nu

    def __post_init__(self):
        if self.degree_L < 1:
            raise ValueError("degree_L must be at least 1")
        if not (0 < self.ell and self.r <= 1):
            raise ValueError(f"need 0 < ell and r <= 1, got ell={self.ell}, r={self.r}")
        if self.r <= self.ell:
            raise DegenerateInterval(f"r={self.r} must exceed ell={self.ell}")
        if not self.n > 0:
            raise ValueError("n must be positive")

    @classmethod
    def from_constants(cls, nu: float, k: int, n: float, c0: float = DEFAULT_C0,
                       c1: float = DEFAULT_C1) -> "ChebyshevConfig | None":
        """``L = max(1, ceil(c0 log k))``, ``r = min(1, c1 log k / n)``, ``l = nu``.

        Returns ``None`` when ``nu >= r``: the behavior policy already explores
        enough for the plain plug-in estimator.
        """
        log_k = math.log(k) if k > 1 else 0.0
        degree = max(1, math.ceil(c0 * log_k))
        r = min(1.0, c1 * log_k / n)
        if nu >= r:
            return None
        return cls(nu=nu, r=r, degree_L=degree, n=n, c0=c0, c1=c1)


@dataclass(frozen=True, eq=False)
class ChebyshevWeights:
    """Exact coefficients ``a_0..a_L`` and the float table ``g(0..L)``.

    ``coeff_signs`` / ``coeff_log_abs`` give each coefficient as a sign and a
    natural-log magnitude, usable where the float value would overflow.
    """

    coeffs: tuple[Fraction, ...]
    g_table: np.ndarray
    normalizer: Fraction
    n: float
    config: ChebyshevConfig | None = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coeff_signs(self) -> np.ndarray:
        return np.array([(a > 0) - (a < 0) for a in self.coeffs])

    @property
    def coeff_log_abs(self) -> np.ndarray:
        return np.array([_log_abs(a) for a in self.coeffs])

    @property
    def is_plug_in(self) -> bool:
        return self.degree == 0

    def g(self, counts) -> np.ndarray:
        counts = np.asarray(counts)
        out = np.ones(counts.shape)
        low = counts <= self.degree
        out[low] = self.g_table[counts[low]]
        return out

    def polynomial(self, x: float) -> float:
        """``P_L(x)`` by exact Horner evaluation, rounded once."""
        return float(_horner(self.coeffs, Fraction(x)))


def _log_abs(q: Fraction) -> float:
    if q == 0:
        return -math.inf
    return math.log(abs(q.numerator)) - math.log(q.denominator)


def _horner(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def shifted_chebyshev_poly(L: int, ell, r) -> list[Fraction]:
    """Monomial coefficients of ``Q_L((2x - r - l)/(r - l))`` in exact arithmetic."""
    ell, r = Fraction(ell), Fraction(r)
    alpha = 2 / (r - ell)
    beta = -(r + ell) / (r - ell)
    prev = [Fraction(1)]
    cur = [beta, alpha]
    if L == 0:
        return prev
    for _ in range(L - 1):
        # Q_{m+1} = 2 (alpha x + beta) Q_m - Q_{m-1}
        nxt = [Fraction(0)] * (len(cur) + 1)
        for d, q in enumerate(cur):
            nxt[d] += 2 * beta * q
            nxt[d + 1] += 2 * alpha * q
        for d, q in enumerate(prev):
            nxt[d] -= q
        prev, cur = cur, nxt
    return cur


def _g_entry(a: Fraction, j: int, n: Fraction) -> float:
    term = a * math.factorial(j) / n**j
    try:
        return float(term) + 1.0
    except OverflowError:
        # sign/log route; |term| beyond double range
        return math.copysign(math.exp(_log_abs(term)), term)


def chebyshev_coefficients(config: ChebyshevConfig) -> ChebyshevWeights:
    q = shifted_chebyshev_poly(config.degree_L, config.ell, config.r)
    normalizer = q[0]  # Q_L evaluated at x = 0
    coeffs = tuple(-c / normalizer for c in q)
    n = Fraction(config.n)
    g = np.array([_g_entry(a, j, n) for j, a in enumerate(coeffs)])
    g[0] = 0.0  # a_0 = -1 exactly
    g.setflags(write=False)
    return ChebyshevWeights(coeffs, g, normalizer, config.n, config)


def plug_in_weights(n: float) -> ChebyshevWeights:
    """Degree-0 weights: ``g(0) = 0`` and ``g(j) = 1`` otherwise (the plug-in rule)."""
    g = np.zeros(1)
    g.setflags(write=False)
    return ChebyshevWeights((Fraction(-1),), g, Fraction(1), n, None)


def weights_for(nu: float, k: int, n: float, c0: float = DEFAULT_C0,
                c1: float = DEFAULT_C1) -> ChebyshevWeights:
    """Weights from the default constants, or plug-in weights when ``nu >= r``."""
    config = ChebyshevConfig.from_constants(nu, k, n, c0, c1)
    if config is None:
        return plug_in_weights(n)
    return chebyshev_coefficients(config)


def chebyshev_estimate(dataset: Dataset, target: Policy, weights: ChebyshevWeights,
                       warn: bool = True) -> float:
    """``sum_a pi_t(a) rhat(a) g(n(a))``.

    The weights are designed for Poisson-sampled data; on multinomial data a
    :class:`ModelMismatchWarning` is emitted unless ``warn`` is false.
    """
    if target.k != dataset.k:
        raise DimensionMismatch(f"policy has k={target.k}, dataset has k={dataset.k}")
    if warn and dataset.mode != "poisson" and not weights.is_plug_in:
        warnings.warn("Chebyshev weights assume Poisson sampling", ModelMismatchWarning,
                      stacklevel=2)
    return chebyshev_from_stats(target.weights, weights, dataset.counts, dataset.reward_sums)


def chebyshev_from_stats(pt: np.ndarray, weights: ChebyshevWeights, counts: np.ndarray,
                         sums: np.ndarray) -> float:
    return math.fsum(pt * empirical_means(counts, sums) * weights.g(counts))


def chebyshev_bias_oracle(instance: BanditInstance, weights: ChebyshevWeights,
                          n: float | None = None) -> float:
    """Exact Poisson-model bias ``sum_a pi_t(a) r(a) exp(-n pi_b(a)) P(pi_b(a))``."""
    n = weights.n if n is None else n
    pt, pb, r = instance.target.weights, instance.behavior.weights, instance.mean_rewards
    terms = [
        pt[a] * r[a] * math.exp(-n * pb[a]) * weights.polynomial(pb[a])
        for a in range(instance.k) if pt[a] * r[a] != 0
    ]
    return math.fsum(terms)


def target_delocalization(target: Policy) -> float:
    """``gamma`` with ``sum_a pi_t(a)^2 = k^-gamma``."""
    k = target.k
    if k < 2:
        return 0.0
    return -math.log(float(np.sum(target.weights**2))) / math.log(k)


def theory_conditions(config: ChebyshevConfig, target: Policy) -> dict[str, object]:
    """Report whether the constants meet the conditions of the risk guarantee."""
    gamma = target_delocalization(target)
    return {
        "gamma": gamma,
        "c0_le_gamma_over_7": config.c0 <= gamma / 7,
        "c1_sq_ge_32_c0_sq": config.c1**2 >= 32 * config.c0**2,
    }
