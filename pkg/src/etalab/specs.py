"""Parsing of the textual group, tower, class, operator and cover specifications."""

from __future__ import annotations

import re

from .groups import FinGenGroup, GroupElement, cyclic, free_group, heisenberg3, integer_lattice, sl2z
from .quotients import QuotientTower, congruence_quotient, cyclic_mod, lattice_mod, psi_quotient
from .spectral import CoverSpec, ModelOperator


class SpecError(ValueError):
    """Malformed specification string."""


def parse_group(spec: str) -> FinGenGroup:
    """"z2", "z:2", "f2", "free:2", "cyclic:6", "heis", "sl2z"."""
    s = spec.strip().lower()
    m = re.fullmatch(r"z:?([1-4])?", s)
    if m:
        return integer_lattice(int(m.group(1) or 1))
    m = re.fullmatch(r"(?:f|free:?)(2)", s)
    if m:
        return free_group(2)
    m = re.fullmatch(r"(?:cyclic|c):?(\d+)", s)
    if m and int(m.group(1)) >= 1:
        return cyclic(int(m.group(1)))
    if s in ("heis", "heisenberg", "heisenberg3", "h3"):
        return heisenberg3()
    if s in ("sl2z", "sl2(z)"):
        return sl2z()
    raise SpecError(f"unknown group spec {spec!r}")


def parse_element(group: FinGenGroup, spec: str) -> GroupElement:
    """A word in the generator symbols ("x", "aB", "e" for the identity).

    For Z^d a comma-separated integer vector is also accepted ("2,-1").
    """
    s = spec.strip()
    if s in ("e", ""):
        return group.element(())
    if group.kind == "abelian" and re.fullmatch(r"-?\d+(,-?\d+)*", s):
        coords = [int(x) for x in s.split(",")]
        syms = list(group.generators)
        pos = [g for g in syms if g.islower()]
        if len(coords) != len(pos):
            raise SpecError(f"expected {len(pos)} coordinates, got {len(coords)}")
        word: list[str] = []
        for g, k in zip(pos, coords):
            word += [g if k > 0 else group.inverse_symbol[g]] * abs(k)
        return group.element(tuple(word))
    bad = [ch for ch in s if ch not in group.generators]
    if bad:
        raise SpecError(f"symbols {bad} are not generators of {group.name}")
    return group.element(tuple(s))


def _int_list(s: str) -> list[int]:
    m = re.fullmatch(r"(\d+)\.\.(\d+)", s)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise SpecError(f"empty range {s!r}")
        return list(range(lo, hi + 1))
    try:
        out = [int(x) for x in s.split(",") if x]
    except ValueError as exc:
        raise SpecError(f"bad integer list {s!r}") from exc
    if not out:
        raise SpecError("empty list")
    return out


def parse_tower(group: FinGenGroup, spec: str) -> QuotientTower:
    """"psi", "tower:iZ:2,4,8", "tower:congruence:2..20", "tower:congruence+psi:2..16", "tower:cyclic:2,3,6"."""
    s = spec.strip()
    if s == "psi":
        if group.kind != "sl2z":
            raise SpecError("psi quotient is defined for sl2z only")
        return QuotientTower([psi_quotient(group)], "psi")
    m = re.fullmatch(r"tower:([A-Za-z+]+):(.+)", s)
    if not m:
        raise SpecError(f"unknown tower spec {spec!r}")
    kind, rest = m.group(1).lower(), m.group(2)
    ks = _int_list(rest)
    if any(k < 1 for k in ks):
        raise SpecError("moduli must be positive")
    if kind == "iz":
        if group.kind != "abelian" or group.name.startswith("C"):
            raise SpecError("iZ towers need a lattice group")
        qs = [lattice_mod(group, k) for k in ks]
    elif kind in ("congruence", "congruence+psi"):
        if group.kind != "sl2z":
            raise SpecError("congruence towers need sl2z")
        qs = [congruence_quotient(group, k, with_psi=kind.endswith("psi")) for k in ks]
    elif kind == "cyclic":
        try:
            qs = [cyclic_mod(group, k) for k in ks]
        except (KeyError, ValueError) as exc:
            raise SpecError(str(exc)) from exc
    else:
        raise SpecError(f"unknown tower family {kind!r}")
    return QuotientTower(qs, s)


_TERM = re.compile(r"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(cos|sin)(\d+)")


def _potential_terms(text: str) -> tuple[list, list]:
    cos_t, sin_t = [], []
    for piece in re.split(r"\+(?=\d|\.)", text):
        piece = piece.strip()
        if not piece or piece == "0":
            continue
        m = _TERM.fullmatch(piece)
        if not m:
            raise SpecError(f"bad potential term {piece!r}")
        amp, kind, j = float(m.group(1)), m.group(2), int(m.group(3))
        (cos_t if kind == "cos" else sin_t).append((j, amp))
    return cos_t, sin_t


def parse_operator(spec: str) -> ModelOperator:
    """"comp=2,m=1.0,c=0.3,theta=0.25,v=0.2cos1" (extra v terms after a comma or '+')."""
    fields: dict[str, str] = {}
    cos_t: list = []
    sin_t: list = []
    last = None
    for tok in spec.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "=" not in tok:
            if last != "v":
                raise SpecError(f"token {tok!r} without a key")
            c, s = _potential_terms(tok)
            cos_t += c
            sin_t += s
            continue
        key, val = (x.strip() for x in tok.split("=", 1))
        key = key.lower()
        if key == "v":
            c, s = _potential_terms(val)
            cos_t += c
            sin_t += s
        elif key in ("comp", "m", "c", "theta"):
            if key in fields:
                raise SpecError(f"duplicate key {key!r}")
            fields[key] = val
        else:
            raise SpecError(f"unknown operator key {key!r}")
        last = key
    try:
        comp = int(fields.get("comp", "2"))
        m = float(fields.get("m", "0"))
        c = float(fields.get("c", "0"))
        theta = float(fields.get("theta", "0"))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    try:
        return ModelOperator(comp, m, c, theta, tuple(cos_t), tuple(sin_t))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def parse_cover(spec: str) -> CoverSpec:
    s = spec.strip().lower()
    if s == "line":
        return CoverSpec.line()
    m = re.fullmatch(r"n=(\d+)", s)
    if m and int(m.group(1)) >= 1:
        return CoverSpec.finite(int(m.group(1)))
    raise SpecError(f"bad cover spec {spec!r}")
