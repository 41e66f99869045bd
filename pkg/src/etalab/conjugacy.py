"""Conjugacy classes of the built-in groups, as membership oracles."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Any, Callable

from .groups import FinGenGroup, GroupElement, psi, trace


@dataclass(frozen=True)
class ConjClass:
    ambient: Any
    representative: Any
    member: Callable[[Any], bool]
    label: str = ""

    def __contains__(self, g) -> bool:
        return self.member(g)

    def __str__(self) -> str:
        return self.label or f"<{self.representative}>"


def _cyclic_reduce(word: tuple[str, ...], inverse_symbol: dict[str, str]) -> tuple[str, ...]:
    w = word
    while len(w) >= 2 and w[0] == inverse_symbol[w[-1]]:
        w = w[1:-1]
    return w


def _is_rotation(u: tuple, v: tuple) -> bool:
    if len(u) != len(v):
        return False
    if not u:
        return True
    doubled = u + u
    return any(doubled[i : i + len(v)] == v for i in range(len(u)))


def sl2z_is_torsion(g: GroupElement) -> bool:
    """Finite order in SL_2(Z): |trace| <= 1, or +-I."""
    return abs(trace(g)) <= 1 or g.value in ((1, 0, 0, 1), (-1, 0, 0, -1))


def conj_class(group: FinGenGroup, rep: GroupElement | str) -> ConjClass:
    """The conjugacy class of ``rep`` in ``group``.

    SL_2(Z) is supported for finite-order representatives only: two torsion
    elements are conjugate iff they share the trace and the value of psi.
    """
    if isinstance(rep, str):
        rep = group.element(rep)
    label = f"<{rep}>"
    if group.kind == "abelian":
        return ConjClass(group, rep, lambda g, v=rep.value: g.value == v, label)
    if group.kind == "free":
        inv = group.inverse_symbol
        target = _cyclic_reduce(rep.value, inv)
        return ConjClass(group, rep, lambda g: _is_rotation(_cyclic_reduce(g.value, inv), target), label)
    if group.kind == "heisenberg":
        a, b, c = rep.value
        if a == 0 and b == 0:
            return ConjClass(group, rep, lambda g, v=rep.value: g.value == v, label)
        d = gcd(a, b)
        return ConjClass(
            group, rep, lambda g: g.value[:2] == (a, b) and (g.value[2] - c) % d == 0, label
        )
    if group.kind == "sl2z":
        if not sl2z_is_torsion(rep):
            raise NotImplementedError("SL2Z conjugacy oracle covers finite-order classes only")
        if rep.value in ((1, 0, 0, 1), (-1, 0, 0, -1)):
            return ConjClass(group, rep, lambda g, v=rep.value: g.value == v, label)
        tr, p = trace(rep), psi(rep)
        return ConjClass(group, rep, lambda g: trace(g) == tr and psi(g) == p, label)
    raise NotImplementedError(f"no conjugacy oracle for {group.name}")


def conjugation_orbit(group: FinGenGroup, rep: GroupElement, conjugators) -> set:
    """Canonical values of h rep h^-1 over the given conjugators (brute force)."""
    return {group.conjugate(h, rep).value for h in conjugators}
