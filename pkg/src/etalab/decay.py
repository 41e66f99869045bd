"""Empirical dominating functions for delocalized traces and kernels.

Three shapes are fitted to sampled data:

* large t:  |tr_<a>(t)| <= c5 t^{-m} exp(-eps^2 t^2)          (t >= 1)
* small t:  |tr_<a>(t)| <= c6 t^{-m1} exp(-eps1 / t^2)        (t <= 1, a != 0)
* off-diagonal, per t:  |tr K_t(x, x + a)| <= C_t (1 + |a|)^{n1} exp(-a^2 / (4 mu t^2))

Rates (eps, m, eps1, m1) come from least squares on the log of a monotone
envelope of the samples; the prefactor is then the smallest constant that
dominates every sample. Each sample is compared within its own numerical
resolution (roundoff of the spectral sum and of the computed eigenvalues),
which is reported with the margin.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .eta import TraceIntegrand
from .spectral import BlochRule, CoverSpec, ModelOperator, heat_kernel, line_gap, modes_for

ROUNDOFF = 1e-15


class DecayError(RuntimeError):
    pass


@dataclass
class Sample:
    kind: str
    t: float
    a: int
    value: float
    resolution: float
    bound: float = 0.0

    @property
    def margin(self) -> float:
        return self.bound + self.resolution - self.value


@dataclass
class DecayFit:
    c5: float
    m: float
    eps: float
    c6: float
    m1: float
    eps1: float
    mu: float
    n1: float
    offdiag: list[dict]
    gap: float
    min_margin: float
    samples: list[Sample] = field(repr=False, default_factory=list)
    all_zero: bool = False

    @property
    def violations(self) -> list[Sample]:
        return [s for s in self.samples if s.margin < 0]

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "samples"}
        d["n_samples"] = len(self.samples)
        d["violations"] = [asdict(s) for s in self.violations]
        return d


def _fit_rate(t: np.ndarray, env: np.ndarray, shape: str) -> tuple[float, float]:
    """(power, rate) from log env = log c - power log t - rate * g(t), g = t^2 or t^-2."""
    keep = env > 0
    t, env = t[keep], env[keep]
    if len(t) < 3:
        return 0.0, 0.0
    g = t * t if shape == "large" else 1.0 / (t * t)
    A = np.column_stack([np.ones_like(t), -np.log(t), -g])
    coef = np.linalg.lstsq(A, np.log(env), rcond=None)[0]
    return float(coef[1]), max(float(coef[2]), 0.0)


def _dominate(samples: list[Sample], shape_fn) -> float:
    """Smallest c with c * shape(t) >= value - resolution on every sample."""
    c = 0.0
    for s in samples:
        need = s.value - s.resolution
        if need > 0:
            c = max(c, need / shape_fn(s.t))
    return c * (1 + 1e-9)


def decay_check(
    op: ModelOperator,
    cover: CoverSpec,
    t_grid: Sequence[float] | None = None,
    a_grid: Sequence[int] = (1, 2, 3),
    mu: float = 1.5,
    n1: float = 1.0,
    x: float = 0.25,
    kernel_t: Sequence[float] = (0.25, 0.5, 1.0),
    raise_on_violation: bool = True,
) -> DecayFit:
    if mu <= 1:
        raise ValueError("mu must exceed 1")
    if t_grid is None:
        t_grid = np.concatenate([np.geomspace(0.1, 1.0, 10), np.linspace(1.25, 4.0, 12)])
    t_grid = np.array(sorted(set(float(t) for t in t_grid)))
    a_grid = list(a_grid)
    if len(t_grid) == 0 or not a_grid:
        raise ValueError("grids must be nonempty")
    K = modes_for(op, float(t_grid.min()))
    rule = BlochRule.for_cover(op, cover)
    if cover.is_line:
        gap = line_gap(op)
    else:
        gap = TraceIntegrand(op, cover, 0, K, rule).gap

    samples: list[Sample] = []
    traces = {}
    for a in a_grid:
        integ = TraceIntegrand(op, cover, a, K, rule)
        vals = np.abs(integ(t_grid))
        res = np.array([max(integ.roundoff(t, ROUNDOFF), ROUNDOFF) for t in t_grid])
        traces[a] = (vals, res)

    # large t
    large = t_grid >= 1.0
    tl = t_grid[large]
    pooled = np.max([traces[a][0][large] for a in a_grid], axis=0)
    env = np.maximum.accumulate(pooled[::-1])[::-1]
    all_zero = bool(np.all(pooled <= np.max([traces[a][1][large] for a in a_grid], axis=0)))
    if all_zero or len(tl) < 3:
        m, eps2 = 0.0, gap * gap
    else:
        m, eps2 = _fit_rate(tl, env, "large")
    eps = math.sqrt(eps2)
    big = [Sample("large-t", float(t), a, float(traces[a][0][i]), float(traces[a][1][i])) for a in a_grid for i, t in enumerate(t_grid) if t >= 1.0]
    c5 = _dominate(big, lambda t: t ** (-m) * math.exp(-eps2 * t * t))
    for s in big:
        s.bound = c5 * s.t ** (-m) * math.exp(-eps2 * s.t * s.t)

    # small t, non-identity classes
    small_mask = t_grid <= 1.0
    ts = t_grid[small_mask]
    nonid = [a for a in a_grid if cover.is_line and a != 0 or not cover.is_line and a % cover.n != 0]
    m1, eps1 = 0.0, 0.0
    little: list[Sample] = []
    if nonid and len(ts) >= 3:
        pooled = np.max([traces[a][0][small_mask] for a in nonid], axis=0)
        resol = np.max([traces[a][1][small_mask] for a in nonid], axis=0)
        # fit only where the signal clears the roundoff floor
        env = np.maximum.accumulate(np.where(pooled > 10 * resol, pooled, 0.0))
        m1, eps1 = _fit_rate(ts, env, "small")
        little = [Sample("small-t", float(t), a, float(traces[a][0][i]), float(traces[a][1][i])) for a in nonid for i, t in enumerate(t_grid) if t <= 1.0]
    c6 = _dominate(little, lambda t: t ** (-m1) * math.exp(-eps1 / (t * t)))
    for s in little:
        s.bound = c6 * s.t ** (-m1) * math.exp(-eps1 / (s.t * s.t))

    # off-diagonal Gaussian, per t
    rows = []
    kern: list[Sample] = []
    for t in kernel_t:
        pts = []
        for a in a_grid:
            k = heat_kernel(op, cover, float(t), x, x + a)
            pts.append(Sample("offdiag", float(t), a, abs(complex(np.trace(k.value))), max(k.error_bound, ROUNDOFF)))
        shape = lambda a, t=t: (1 + abs(a)) ** n1 * math.exp(-a * a / (4 * mu * t * t))  # noqa: E731
        C = 0.0
        for s in pts:
            need = s.value - s.resolution
            if need > 0:
                C = max(C, need / shape(s.a))
        C *= 1 + 1e-9
        for s in pts:
            s.bound = C * shape(s.a)
        rows.append({"t": float(t), "mu": mu, "C_t": C, "n1": n1})
        kern.extend(pts)

    samples = big + little + kern
    fit = DecayFit(c5, m, eps, c6, m1, eps1, mu, n1, rows, float(gap), min(s.margin for s in samples), samples, all_zero)
    if raise_on_violation and fit.violations:
        v = fit.violations[0]
        raise DecayError(f"negative margin at {v.kind} t={v.t} a={v.a}: value {v.value:.3e} > bound {v.bound:.3e}")
    return fit
