"""Parsing of group-element literals.

Accepted forms: ``"(3,-1)"`` or ``"3,-1"`` for Z^d, ``"a^2 b^-1 c^3"`` or
``"(2,-1,3)"`` for H3, and for products a parenthesised list of the factor
literals separated by ``;`` (``"(a b; (1))"``).
"""
from __future__ import annotations

import re

from . import groups as G
from .errors import InputError
from .groups import GroupElement, GroupId

_H3_TOKEN = re.compile(r"\s*([abc])(?:\^\s*(-?\d+))?")


def _parse_ints(text: str) -> tuple[int, ...]:
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    try:
        return tuple(int(p) for p in t.split(",") if p.strip() != "")
    except ValueError:
        raise InputError(f"bad integer tuple {text!r}") from None


def _parse_h3_word(text: str) -> GroupElement:
    t = text.strip()
    if t in ("e", "1", ""):
        return G.identity(G.H3)
    out = G.identity(G.H3)
    pos = 0
    gens = dict(zip("abc", G.generators(G.H3)))
    t = t.replace("*", " ")
    while pos < len(t):
        if t[pos].isspace():
            pos += 1
            continue
        m = _H3_TOKEN.match(t, pos)
        if not m:
            raise InputError(f"bad H3 literal {text!r}")
        out = out * G.power(gens[m.group(1)], int(m.group(2) or 1))
        pos = m.end()
    return out


def _parse_factor(group: GroupId, text: str) -> GroupElement:
    t = text.strip()
    if group.kind == G.HEIS:
        if any(ch in t for ch in "abce") and not re.search(r"\d\s*,", t):
            return _parse_h3_word(t)
        coords = _parse_ints(t)
        if len(coords) != 3:
            raise InputError(f"H3 literal needs three coordinates: {text!r}")
        return G.h3(*coords)
    coords = _parse_ints(t)
    if len(coords) != group.rank:
        raise InputError(f"expected {group.rank} coordinates for {group}: {text!r}")
    return GroupElement(group, coords)


def parse_element(group: GroupId, text: str) -> GroupElement:
    if group.kind != G.PROD:
        return _parse_factor(group, text)
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise InputError(f"product literal must be parenthesised: {text!r}")
    parts = _split_top(t[1:-1])
    if len(parts) != len(group.factors):
        raise InputError(f"{group} needs {len(group.factors)} components: {text!r}")
    return GroupElement(group, tuple(_parse_factor(f, p).coords
                                     for f, p in zip(group.factors, parts)))


def _split_top(s: str) -> list[str]:
    """Split on ``;`` (or ``,`` between parenthesised groups) at depth zero."""
    sep = ";" if ";" in s else ","
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [p.strip() for p in out]
