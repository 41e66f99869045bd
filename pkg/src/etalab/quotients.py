"""Finite quotients of finitely generated groups and conjugacy inside them.

A quotient is described by the images of the generators in an explicit
finite target group; the quotient group itself is the subgroup those images
generate. Conjugacy classes in the quotient are orbits under conjugation by
the generator images, which is the same as conjugation by the whole image.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

from .conjugacy import ConjClass
from .groups import PSI_IMAGES, BudgetExceeded, FinGenGroup, GroupElement

DEFAULT_ORDER_BUDGET = 1_000_000


class CyclicTarget:
    def __init__(self, k: int):
        self.k = k
        self.identity = 0
        self.name = f"Z/{k}"

    def mul(self, a, b):
        return (a + b) % self.k

    def inv(self, a):
        return (-a) % self.k


class VectorModTarget:
    """(Z/k)^d"""

    def __init__(self, k: int, d: int):
        self.k, self.d = k, d
        self.identity = (0,) * d
        self.name = f"(Z/{k})^{d}" if d > 1 else f"Z/{k}"

    def mul(self, a, b):
        return tuple((x + y) % self.k for x, y in zip(a, b))

    def inv(self, a):
        return tuple((-x) % self.k for x in a)


class MatrixModTarget:
    """2x2 integer matrices modulo N, stored row-major as 4-tuples."""

    def __init__(self, modulus: int):
        self.N = modulus
        self.identity = (1 % modulus, 0, 0, 1 % modulus)
        self.name = f"SL2(Z/{modulus})"

    def mul(self, u, v):
        a, b, c, d = u
        e, f, g, h = v
        N = self.N
        return ((a * e + b * g) % N, (a * f + b * h) % N, (c * e + d * g) % N, (c * f + d * h) % N)

    def inv(self, u):
        a, b, c, d = u
        N = self.N
        return (d % N, (-b) % N, (-c) % N, a % N)

    def reduce(self, u):
        return tuple(x % self.N for x in u)


class PermutationTarget:
    def __init__(self, degree: int):
        self.degree = degree
        self.identity = tuple(range(degree))
        self.name = f"S{degree}"

    def mul(self, a, b):
        # apply a first, then b
        return tuple(b[i] for i in a)

    def inv(self, a):
        out = [0] * len(a)
        for i, j in enumerate(a):
            out[j] = i
        return tuple(out)


class ProductTarget:
    def __init__(self, *factors):
        self.factors = factors
        self.identity = tuple(f.identity for f in factors)
        self.name = " x ".join(f.name for f in factors)

    def mul(self, a, b):
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def inv(self, a):
        return tuple(f.inv(x) for f, x in zip(self.factors, a))


@dataclass(eq=False)
class FiniteQuotient:
    parent: FinGenGroup
    target: object
    images: dict[str, Hashable]
    label: str = ""
    budget: int = DEFAULT_ORDER_BUDGET
    _elements: frozenset | None = field(default=None, repr=False)
    _classes: dict = field(default_factory=dict, repr=False)
    _lengths: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        missing = set(self.parent.generators) - set(self.images)
        if missing:
            raise ValueError(f"no image for generators {sorted(missing)}")
        t = self.target
        for s, s_inv in self.parent.inverse_symbol.items():
            if t.mul(self.images[s], self.images[s_inv]) != t.identity:
                raise ValueError(f"images of {s!r} and {s_inv!r} are not inverse in {t.name}")

    def __str__(self) -> str:
        return self.label or f"{self.parent.name} -> {self.target.name}"

    def pi(self, g: GroupElement | Sequence[str]) -> Hashable:
        word = g.word if isinstance(g, GroupElement) else g
        t = self.target
        out = t.identity
        for s in word:
            out = t.mul(out, self.images[s])
        return out

    @property
    def generator_images(self) -> list:
        seen, out = set(), []
        for s in self.parent.generators:
            u = self.images[s]
            if u not in seen:
                seen.add(u)
                out.append(u)
        return out

    def _closure(self) -> dict:
        """Word lengths in the quotient w.r.t. the image generating set (BFS)."""
        if self._lengths is None:
            t = self.target
            gens = self.generator_images
            lengths = {t.identity: 0}
            frontier = [t.identity]
            r = 0
            while frontier:
                r += 1
                nxt = []
                for u in frontier:
                    for g in gens:
                        w = t.mul(u, g)
                        if w not in lengths:
                            lengths[w] = r
                            nxt.append(w)
                if len(lengths) > self.budget:
                    raise BudgetExceeded(f"quotient {self} exceeds order budget {self.budget}")
                frontier = nxt
            self._lengths = lengths
            self._elements = frozenset(lengths)
        return self._lengths

    @property
    def order(self) -> int:
        return len(self._closure())

    @property
    def elements(self) -> frozenset:
        self._closure()
        return self._elements

    def quotient_length(self, u: Hashable) -> int:
        return self._closure()[u]

    def class_of(self, u: Hashable) -> frozenset:
        """Conjugacy class of u in the quotient, memoized per class."""
        cached = self._classes.get(u)
        if cached is not None:
            return cached
        t = self.target
        gens = self.generator_images
        ginv = [t.inv(g) for g in gens]
        orbit = {u}
        frontier = [u]
        while frontier:
            nxt = []
            for v in frontier:
                for g, gi in zip(gens, ginv):
                    w = t.mul(t.mul(g, v), gi)
                    if w not in orbit:
                        orbit.add(w)
                        nxt.append(w)
            if len(orbit) > self.budget:
                raise BudgetExceeded(f"conjugacy class in {self} exceeds budget {self.budget}")
            frontier = nxt
        orbit = frozenset(orbit)
        for v in orbit:
            self._classes[v] = orbit
        return orbit

    def conj_class(self, g: GroupElement | Hashable) -> ConjClass:
        u = self.pi(g) if isinstance(g, GroupElement) else g
        orbit = self.class_of(u)
        return ConjClass(self, u, orbit.__contains__, f"<pi({g})> in {self}")

    def conjugacy_classes(self) -> list[frozenset]:
        seen, out = set(), []
        for u in sorted(self.elements, key=repr):
            if u not in seen:
                c = self.class_of(u)
                seen.update(c)
                out.append(c)
        return out


def is_conjugate_in_quotient(q: FiniteQuotient, g: GroupElement, h: GroupElement) -> bool:
    if q.order > q.budget:
        raise BudgetExceeded(f"quotient {q} exceeds order budget")
    return q.pi(h) in q.class_of(q.pi(g))


@dataclass
class QuotientTower:
    quotients: list[FiniteQuotient]
    label: str = ""

    def __post_init__(self):
        parents = {id(q.parent) for q in self.quotients}
        if len(parents) > 1:
            raise ValueError("all quotients in a tower must share the parent group")

    def __iter__(self):
        return iter(self.quotients)

    def __len__(self) -> int:
        return len(self.quotients)

    def __getitem__(self, i):
        return self.quotients[i]


# --- standard quotient families ----------------------------------------------


def lattice_mod(group: FinGenGroup, k: int) -> FiniteQuotient:
    """Z^d -> (Z/k)^d, i.e. the quotient by the subgroup kZ^d."""
    d = len(group.identity_value)
    t = VectorModTarget(k, d)
    images = {s: tuple(x % k for x in v) for s, v in group.gen_values.items()}
    return FiniteQuotient(group, t, images, label=f"{group.name}/{k}{group.name}")


def cyclic_mod(group: FinGenGroup, k: int) -> FiniteQuotient:
    """C_n -> C_k for k | n (k = n gives the quotient by the trivial subgroup)."""
    n, u = 1, group.gen_values["g"]
    while u != group.identity_value:
        u, n = group._mul(u, group.gen_values["g"]), n + 1
    if n % k:
        raise ValueError(f"Z/{k} is not a quotient of {group.name}")
    t = CyclicTarget(k)
    return FiniteQuotient(group, t, {"g": 1 % k, "G": (k - 1) % k}, label=f"{group.name}->Z/{k}")


def psi_quotient(group: FinGenGroup) -> FiniteQuotient:
    """SL_2(Z) -> Z/12 with x -> 3, y -> 2."""
    return FiniteQuotient(group, CyclicTarget(12), dict(PSI_IMAGES), label="SL2Z/ker(psi)")


def congruence_quotient(group: FinGenGroup, N: int, with_psi: bool = False) -> FiniteQuotient:
    """Reduction mod N, optionally paired with psi (the quotient by Gamma(N) ∩ ker psi)."""
    m = MatrixModTarget(N)
    if not with_psi:
        images = {s: m.reduce(v) for s, v in group.gen_values.items()}
        return FiniteQuotient(group, m, images, label=f"SL2Z/Gamma({N})")
    t = ProductTarget(m, CyclicTarget(12))
    images = {s: (m.reduce(v), PSI_IMAGES[s]) for s, v in group.gen_values.items()}
    return FiniteQuotient(group, t, images, label=f"SL2Z/(Gamma({N}) ∩ ker psi)")
