"""Finitely generated groups given by explicit multiplication on normal forms.

Every group here is a concrete model: elements carry a word over a symmetric
generating set together with a hashable canonical value, and equality is
decided on the canonical value only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Sequence

import numpy as np


@dataclass(frozen=True)
class GroupElement:
    word: tuple[str, ...] = field(compare=False)
    value: Hashable

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return "".join(self.word) or "e"


class FinGenGroup:
    """A group with a symmetric generating set and a total multiplication.

    ``generators`` maps each symbol to its canonical value; ``inverse_symbol``
    pairs each symbol with the symbol of its inverse.
    """

    def __init__(
        self,
        name: str,
        generators: dict[str, Hashable],
        inverse_symbol: dict[str, str],
        mul: Callable[[Any, Any], Any],
        inv: Callable[[Any], Any],
        identity: Hashable,
        kind: str,
        matrix_rep: Callable[[Any], np.ndarray] | None = None,
    ):
        if set(inverse_symbol) != set(generators):
            raise ValueError("inverse_symbol must cover every generator")
        for s, t in inverse_symbol.items():
            if inverse_symbol[t] != s:
                raise ValueError(f"generating set not symmetric at {s!r}")
            if mul(generators[s], generators[t]) != identity:
                raise ValueError(f"{s!r} and {t!r} are not inverse")
        self.name = name
        self.generators = tuple(generators)
        self.gen_values = dict(generators)
        self.inverse_symbol = dict(inverse_symbol)
        self._mul = mul
        self._inv = inv
        self.identity_value = identity
        self.kind = kind
        self.matrix_rep = matrix_rep
        self._spheres: list[list[GroupElement]] | None = None
        self._lengths: dict[Hashable, int] = {}

    def __repr__(self) -> str:
        return f"FinGenGroup({self.name!r})"

    @property
    def identity(self) -> GroupElement:
        return GroupElement((), self.identity_value)

    def element(self, word: str | Sequence[str]) -> GroupElement:
        """Evaluate a word; a string is split into single-character symbols."""
        word = tuple(word)
        value = self.identity_value
        for s in word:
            try:
                value = self._mul(value, self.gen_values[s])
            except KeyError:
                raise ValueError(f"unknown generator {s!r} in {self.name}") from None
        return GroupElement(word, value)

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return GroupElement(g.word + h.word, self._mul(g.value, h.value))

    def invert(self, g: GroupElement) -> GroupElement:
        word = tuple(self.inverse_symbol[s] for s in reversed(g.word))
        return GroupElement(word, self._inv(g.value))

    def conjugate(self, h: GroupElement, g: GroupElement) -> GroupElement:
        """h g h^-1"""
        return self.multiply(self.multiply(h, g), self.invert(h))

    def canonical_form(self, g: GroupElement) -> Hashable:
        return g.value

    def power(self, g: GroupElement, k: int) -> GroupElement:
        if k < 0:
            g, k = self.invert(g), -k
        out = self.identity
        for _ in range(k):
            out = self.multiply(out, g)
        return out


# --- built-in instances -------------------------------------------------------

_LATTICE_SYMBOLS = "abcd"


def integer_lattice(d: int) -> FinGenGroup:
    """Z^d with the standard generators a, b, c, d (inverses upper case)."""
    if not 1 <= d <= 4:
        raise ValueError("Z^d supported for 1 <= d <= 4")
    gens, inv = {}, {}
    for i, s in enumerate(_LATTICE_SYMBOLS[:d]):
        e = [0] * d
        e[i] = 1
        gens[s] = tuple(e)
        e[i] = -1
        gens[s.upper()] = tuple(e)
        inv[s], inv[s.upper()] = s.upper(), s
    return FinGenGroup(
        name="Z" if d == 1 else f"Z^{d}",
        generators=gens,
        inverse_symbol=inv,
        mul=lambda u, v: tuple(a + b for a, b in zip(u, v)),
        inv=lambda u: tuple(-a for a in u),
        identity=(0,) * d,
        kind="abelian",
    )


def _free_reduce_mul(inverse_symbol):
    def mul(u, v):
        out = list(u)
        for s in v:
            if out and out[-1] == inverse_symbol[s]:
                out.pop()
            else:
                out.append(s)
        return tuple(out)

    return mul


def free_group(rank: int = 2) -> FinGenGroup:
    if not 1 <= rank <= 4:
        raise ValueError("free group rank must be in 1..4")
    syms = _LATTICE_SYMBOLS[:rank]
    inv = {}
    for s in syms:
        inv[s], inv[s.upper()] = s.upper(), s
    mul = _free_reduce_mul(inv)
    return FinGenGroup(
        name=f"F{rank}",
        generators={s: (s,) for s in inv},
        inverse_symbol=inv,
        mul=mul,
        inv=lambda u: tuple(inv[s] for s in reversed(u)),
        identity=(),
        kind="free",
    )


def cyclic(k: int) -> FinGenGroup:
    if k < 1:
        raise ValueError("cyclic group order must be positive")
    return FinGenGroup(
        name=f"C{k}",
        generators={"g": 1 % k, "G": (k - 1) % k},
        inverse_symbol={"g": "G", "G": "g"},
        mul=lambda u, v: (u + v) % k,
        inv=lambda u: (-u) % k,
        identity=0,
        kind="abelian",
    )


def heisenberg3() -> FinGenGroup:
    """Integer Heisenberg group; (a, b, c) stands for x^a y^b z^c with z = [x, y]."""

    def mul(u, v):
        return (u[0] + v[0], u[1] + v[1], u[2] + v[2] + u[0] * v[1])

    def inv(u):
        return (-u[0], -u[1], -u[2] + u[0] * u[1])

    return FinGenGroup(
        name="H3",
        generators={"x": (1, 0, 0), "X": (-1, 0, 0), "y": (0, 1, 0), "Y": (0, -1, 0)},
        inverse_symbol={"x": "X", "X": "x", "y": "Y", "Y": "y"},
        mul=mul,
        inv=inv,
        identity=(0, 0, 0),
        kind="heisenberg",
    )


SL2Z_X = ((0, -1), (1, 0))
SL2Z_Y = ((0, -1), (1, 1))
PSI_IMAGES = {"x": 3, "X": 9, "y": 2, "Y": 10}


def _mat_mul(u, v):
    a, b, c, d = u
    e, f, g, h = v
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _mat_inv(u):
    a, b, c, d = u
    return (d, -b, -c, a)


def sl2z() -> FinGenGroup:
    """SL_2(Z) = <x, y | x^4 = 1, x^2 = y^3> with its defining matrix forms."""
    x = (0, -1, 1, 0)
    y = (0, -1, 1, 1)
    return FinGenGroup(
        name="SL2Z",
        generators={"x": x, "X": _mat_inv(x), "y": y, "Y": _mat_inv(y)},
        inverse_symbol={"x": "X", "X": "x", "y": "Y", "Y": "y"},
        mul=_mat_mul,
        inv=_mat_inv,
        identity=(1, 0, 0, 1),
        kind="sl2z",
        matrix_rep=lambda u: np.array(u, dtype=np.int64).reshape(2, 2),
    )


def psi(g: GroupElement) -> int:
    """The homomorphism SL_2(Z) -> Z/12 with x -> 3, y -> 2, evaluated on the word."""
    return sum(PSI_IMAGES[s] for s in g.word) % 12


def trace(g: GroupElement) -> int:
    a, _, _, d = g.value
    return a + d


# --- Cayley balls -------------------------------------------------------------


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, reached_radius: int | None = None):
        super().__init__(message)
        self.reached_radius = reached_radius


@dataclass(frozen=True)
class ExceedsCap:
    """Word length larger than the BFS radius cap."""

    cap: int

    def __str__(self) -> str:
        return f"> {self.cap}"


DEFAULT_RADIUS_CAP = 12
DEFAULT_BALL_BUDGET = 2_000_000


def spheres(group: FinGenGroup, radius: int, budget: int = DEFAULT_BALL_BUDGET) -> list[list[GroupElement]]:
    """Spheres S_0, ..., S_radius of the Cayley graph, each element with a geodesic word.

    Results are cached on the group and extended lazily. Sphere order is
    deterministic (generator order, then discovery order).
    """
    if group._spheres is None:
        group._spheres = [[group.identity]]
        group._lengths = {group.identity_value: 0}
    sph = group._spheres
    total = sum(len(s) for s in sph)
    while len(sph) <= radius:
        r = len(sph)
        frontier = []
        for g in sph[-1]:
            for s in group.generators:
                h = GroupElement(g.word + (s,), group._mul(g.value, group.gen_values[s]))
                if h.value not in group._lengths:
                    group._lengths[h.value] = r
                    frontier.append(h)
        total += len(frontier)
        if total > budget:
            group._lengths = {k: v for k, v in group._lengths.items() if v < r}
            raise BudgetExceeded(
                f"ball of radius {r} in {group.name} exceeds budget {budget}", reached_radius=r - 1
            )
        sph.append(frontier)
    return sph[: radius + 1]


def ball(group: FinGenGroup, radius: int, budget: int = DEFAULT_BALL_BUDGET) -> list[GroupElement]:
    return [g for s in spheres(group, radius, budget) for g in s]


def word_length(group: FinGenGroup, g: GroupElement, cap: int = DEFAULT_RADIUS_CAP) -> int | ExceedsCap:
    if g.value == group.identity_value:
        return 0
    known = group._lengths.get(g.value)
    if known is not None and known <= cap:
        return known
    if len(group._spheres or ()) > cap:
        return ExceedsCap(cap)
    spheres(group, cap)
    known = group._lengths.get(g.value)
    return known if known is not None else ExceedsCap(cap)


def ball_count(group: FinGenGroup, n: int, budget: int = DEFAULT_BALL_BUDGET) -> int:
    return sum(len(s) for s in spheres(group, n, budget))


def sphere_counts(group: FinGenGroup, n: int) -> list[int]:
    return [len(s) for s in spheres(group, n)]
