"""Separation of a conjugacy class by finite quotients: injective radii,
distinguishing indices, separation rates, and delocalized traces on the
group algebra together with their push-forwards to quotients.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Callable, Hashable, Iterable

import numpy as np

from .conjugacy import ConjClass
from .groups import FinGenGroup, GroupElement, spheres
from .quotients import FiniteQuotient, QuotientTower


@dataclass(frozen=True)
class AtLeast:
    """Lower bound marker: no violator up to the search cap."""

    value: int

    def __str__(self) -> str:
        return f"≥ {self.value}"


def _radius_value(r) -> int:
    return r.value if isinstance(r, AtLeast) else r


def injective_radius(
    q: FiniteQuotient,
    cls: ConjClass,
    cap: int,
    restrict: Callable[[GroupElement], bool] | None = None,
) -> int | AtLeast:
    """Largest n <= cap such that no gamma with l(gamma) <= n, gamma outside
    the class, maps into the class of pi(alpha).

    ``restrict`` limits the candidate violators (for instance to finite-order
    elements); by default every group element is examined.
    """
    group = q.parent
    target = q.class_of(q.pi(cls.representative))
    for n, sphere in enumerate(spheres(group, cap)):
        for g in sphere:
            if restrict is not None and not restrict(g):
                continue
            if q.pi(g) in target and not cls.member(g):
                return n - 1
    return AtLeast(cap)


def first_violator(q: FiniteQuotient, cls: ConjClass, cap: int) -> GroupElement | None:
    target = q.class_of(q.pi(cls.representative))
    for sphere in spheres(q.parent, cap):
        for g in sphere:
            if q.pi(g) in target and not cls.member(g):
                return g
    return None


def _separates(q: FiniteQuotient, cls: ConjClass, F: Iterable[GroupElement]) -> bool:
    target = q.class_of(q.pi(cls.representative))
    return all(cls.member(b) or q.pi(b) not in target for b in F)


def distinguishes(tower: QuotientTower, cls: ConjClass, F: Iterable[GroupElement]) -> int | None:
    """Smallest k such that every quotient from index k on separates F from the class.

    Returns None when even the last quotient fails. This is evidence on the
    finite tower given, not a proof about the infinite sequence.
    """
    F = list(F)
    ok = [_separates(q, cls, F) for q in tower]
    k = len(ok)
    while k > 0 and ok[k - 1]:
        k -= 1
    return k if k < len(ok) else None


@dataclass
class SeparationRate:
    rows: list[dict]
    rate: float
    lower_bound_only: bool
    bounded_classes: bool


def separation_rate(tower: QuotientTower, cls: ConjClass, cap: int) -> SeparationRate:
    """Fit |<pi_i(alpha)>| <= C exp(R r_i) along the tower.

    Rows are (index, injective radius, quotient class size). The rate is the
    least-squares slope of log class size on radius; bounded class sizes give
    0. Capped radii enter the fit at the cap value, so the slope is then an
    upper estimate of R under a lower bound on r.
    """
    rows = []
    for i, q in enumerate(tower):
        r = injective_radius(q, cls, cap)
        size = len(q.class_of(q.pi(cls.representative)))
        rows.append(
            {"index": i, "quotient": str(q), "radius": _radius_value(r), "radius_capped": isinstance(r, AtLeast), "class_size": size}
        )
    sizes = np.array([row["class_size"] for row in rows], dtype=float)
    radii = np.array([row["radius"] for row in rows], dtype=float)
    lower_only = all(row["radius_capped"] for row in rows)
    bounded = len(rows) < 2 or np.ptp(sizes) == 0 or np.ptp(radii) == 0
    if bounded:
        rate = 0.0
    else:
        slope = np.polyfit(radii, np.log(sizes), 1)[0]
        rate = max(float(slope), 0.0)
    return SeparationRate(rows, rate, lower_only, bool(bounded))


# --- group algebra ------------------------------------------------------------


@dataclass
class GroupAlgebraElement:
    """Finitely supported sum of group elements with exact coefficients.

    Keys are canonical values; a representative element (with a word) is kept
    for each key so that quotient maps can be evaluated.
    """

    coeffs: dict[Hashable, Number] = field(default_factory=dict)
    reps: dict[Hashable, GroupElement] = field(default_factory=dict)

    def __post_init__(self):
        for k in [k for k, v in self.coeffs.items() if v == 0]:
            del self.coeffs[k]
            self.reps.pop(k, None)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Number, GroupElement]]) -> GroupAlgebraElement:
        coeffs: dict = defaultdict(int)
        reps = {}
        for a, g in terms:
            coeffs[g.value] += a
            reps.setdefault(g.value, g)
        return cls(dict(coeffs), reps)

    def terms(self):
        return [(self.coeffs[k], self.reps[k]) for k in self.coeffs]

    def __add__(self, other: GroupAlgebraElement) -> GroupAlgebraElement:
        return GroupAlgebraElement.from_terms(self.terms() + other.terms())

    def scale(self, c: Number) -> GroupAlgebraElement:
        return GroupAlgebraElement.from_terms([(c * a, g) for a, g in self.terms()])

    def total(self) -> Number:
        return sum(self.coeffs.values(), 0)

    def support_radius(self) -> int:
        return max((len(g.word) for g in self.reps.values()), default=0)


def algebra_trace(f: GroupAlgebraElement, cls: ConjClass) -> Number:
    """Sum of the coefficients of f over its support inside the class."""
    return sum((a for a, g in f.terms() if cls.member(g)), 0)


@dataclass
class QuotientAlgebraElement:
    quotient: FiniteQuotient
    coeffs: dict[Hashable, Number]

    def total(self) -> Number:
        return sum(self.coeffs.values(), 0)

    def trace(self, u: Hashable) -> Number:
        """tr over the quotient class of u."""
        cls = self.quotient.class_of(u)
        return sum((a for v, a in self.coeffs.items() if v in cls), 0)


def pushforward(f: GroupAlgebraElement, q: FiniteQuotient) -> QuotientAlgebraElement:
    coeffs: dict = defaultdict(int)
    for a, g in f.terms():
        coeffs[q.pi(g)] += a
    return QuotientAlgebraElement(q, {k: v for k, v in coeffs.items() if v != 0})


@dataclass
class Stabilization:
    pushed_traces: list[Number]
    target: Number
    index: int | None


def stabilization_index(f: GroupAlgebraElement, tower: QuotientTower, cls: ConjClass) -> Stabilization:
    """First tower index after which tr_<pi_i(alpha)>(pi_i f) equals tr_<alpha>(f)."""
    target = algebra_trace(f, cls)
    pushed = [pushforward(f, q).trace(q.pi(cls.representative)) for q in tower]
    k = len(pushed)
    while k > 0 and pushed[k - 1] == target:
        k -= 1
    return Stabilization(pushed, target, k if k < len(pushed) else None)


def random_algebra_element(group: FinGenGroup, radius: int, rng: np.random.Generator, size: int = 6) -> GroupAlgebraElement:
    elems = [g for s in spheres(group, radius) for g in s]
    idx = rng.choice(len(elems), size=min(size, len(elems)), replace=False)
    terms = [(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))), elems[i]) for i in idx]
    return GroupAlgebraElement.from_terms(terms)
