"""Growth rates of balls and conjugacy classes, and the gap thresholds built from them."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .conjugacy import ConjClass
from .groups import FinGenGroup, ball_count, spheres
from .quotients import QuotientTower

SUBEXPONENTIAL_THRESHOLD = 1e-3


@dataclass(frozen=True)
class GrowthFit:
    rate: float
    raw_rate: float
    residual: float
    subexponential: bool
    window: tuple[int, int]


def estimate_growth_rate(
    counts: Sequence[tuple[int, int]], threshold: float = SUBEXPONENTIAL_THRESHOLD
) -> GrowthFit:
    """Exponential growth rate of a counting function from (n, count) samples.

    Least squares of log(count) on [n, log n, 1, 1/n]: the coefficient of n is
    the rate, the remaining columns absorb polynomial prefactors so that
    polynomial growth reads as rate 0 rather than as a slope of order d/n.
    With fewer than 5 points the 1/n and then the log n columns are dropped.
    """
    if len(counts) < 3:
        raise ValueError("need at least 3 (n, count) points")
    pts = sorted(counts)
    n = np.array([p[0] for p in pts], dtype=float)
    c = np.array([p[1] for p in pts], dtype=float)
    if np.any(c <= 0):
        raise ValueError("counts must be positive")
    if np.any(np.diff(c) < 0):
        raise ValueError("counts must be nondecreasing")
    window = (int(n[0]), int(n[-1]))
    y = np.log(c)
    if np.ptp(y) == 0.0:
        return GrowthFit(0.0, 0.0, 0.0, True, window)
    cols = [n, np.ones_like(n)]
    if len(n) >= 4 and n[0] > 0:
        cols.append(np.log(n))
    if len(n) >= 5 and n[0] > 0:
        cols.append(1.0 / n)
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    raw = float(coef[0])
    sub = raw < threshold
    return GrowthFit(0.0 if sub else raw, raw, residual, bool(sub), window)


def class_ball_count(group: FinGenGroup, cls: ConjClass, n: int) -> int:
    return sum(1 for s in spheres(group, n) for g in s if cls.member(g))


def growth_rate(group: FinGenGroup, window: tuple[int, int] = (4, 12)) -> GrowthFit:
    lo, hi = window
    return estimate_growth_rate([(k, ball_count(group, k)) for k in range(lo, hi + 1)])


def class_growth_rate(group: FinGenGroup, cls: ConjClass, window: tuple[int, int] = (4, 12)) -> GrowthFit:
    lo, hi = window
    counts = [(k, class_ball_count(group, cls, k)) for k in range(lo, hi + 1)]
    counts = [(k, c) for k, c in counts if c > 0]
    if len(counts) < 3:
        return GrowthFit(0.0, 0.0, 0.0, True, window)
    return estimate_growth_rate(counts)


def uniform_class_growth_rate(tower: QuotientTower, alpha, window: tuple[int, int] = (1, 8)) -> GrowthFit:
    """K_u: growth of #{w in <pi_i(alpha)> : l_i(w) <= n}, uniformly over the tower.

    Quotient word length is the BFS distance for the image generating set,
    which equals the minimum length over preimages. The pointwise maximum
    over the tower is fitted.
    """
    lo, hi = window
    best = np.zeros(hi - lo + 1, dtype=int)
    for q in tower:
        cls = q.class_of(q.pi(alpha))
        lengths = sorted(q.quotient_length(u) for u in cls)
        counts = np.searchsorted(lengths, np.arange(lo, hi + 1), side="right")
        best = np.maximum(best, counts)
    pts = [(lo + i, int(c)) for i, c in enumerate(best) if c > 0]
    if len(pts) < 3:
        return GrowthFit(0.0, 0.0, 0.0, True, window)
    return estimate_growth_rate(pts)


def sigma_constants(K_Gamma: float, K_u: float, R: float, theta0: float) -> tuple[float, float, float]:
    """(sigma_Gamma, sigma_u, sigma_R) = (2K/theta0, 2K_u/theta0, 2 sqrt(K R)/theta0)."""
    if theta0 <= 0:
        raise ValueError("theta0 must be positive")
    if min(K_Gamma, K_u, R) < 0:
        raise ValueError("growth constants and rates must be nonnegative")
    return 2 * K_Gamma / theta0, 2 * K_u / theta0, 2 * math.sqrt(K_Gamma * R) / theta0


@dataclass(frozen=True)
class GrowthConstants:
    K_Gamma: float
    K_class: float
    K_u: float
    theta0: float
    theta1: float
    c0: float
    c1: float
    sigma_Gamma: float
    sigma_u: float
    sigma_R: float
    fit_window: tuple[int, int]

    def __post_init__(self):
        if not 0 < self.theta0 <= self.theta1:
            raise ValueError("need 0 < theta0 <= theta1")

    @classmethod
    def build(
        cls,
        K_Gamma: float,
        K_class: float = 0.0,
        K_u: float = 0.0,
        R: float = 0.0,
        theta0: float = 1.0,
        theta1: float = 1.0,
        c0: float = 0.0,
        c1: float = 0.0,
        fit_window: tuple[int, int] = (4, 12),
    ) -> GrowthConstants:
        sg, su, sr = sigma_constants(K_Gamma, K_u, R, theta0)
        return cls(K_Gamma, K_class, K_u, theta0, theta1, c0, c1, sg, su, sr, fit_window)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fit_window"] = list(self.fit_window)
        return d
