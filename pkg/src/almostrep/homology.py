"""Bar-complex chains and cochains with exact rational coefficients."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import groups as G
from .errors import GroupMismatch, InputError, NotACycle, SupportError
from .groups import GroupElement, GroupId

Cell = tuple  # tuple of GroupElement


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise InputError("chain coefficients must be exact")
    return Fraction(x)


@dataclass(frozen=True)
class Chain:
    group: GroupId
    degree: int
    terms: Mapping[Cell, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for cell, c in dict(self.terms).items():
            cell = tuple(cell)
            if len(cell) != self.degree:
                raise InputError(f"cell {cell} does not have length {self.degree}")
            for g in cell:
                if g.group != self.group:
                    raise GroupMismatch(f"cell entry from {g.group} in a chain over {self.group}")
            c = _frac(c)
            if c:
                clean[cell] = clean.get(cell, Fraction(0)) + c
                if not clean[cell]:
                    del clean[cell]
        object.__setattr__(self, "terms", clean)

    @staticmethod
    def cell(*elems: GroupElement, coeff=1) -> "Chain":
        if not elems:
            raise InputError("a cell needs at least one entry")
        return Chain(elems[0].group, len(elems), {tuple(elems): coeff})

    @staticmethod
    def zero(group: GroupId, degree: int) -> "Chain":
        return Chain(group, degree, {})

    def _check(self, other: "Chain") -> None:
        if other.group != self.group or other.degree != self.degree:
            raise GroupMismatch("chains over different groups or degrees")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Chain(self.group, self.degree, out)

    def __neg__(self) -> "Chain":
        return Chain(self.group, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __rmul__(self, s) -> "Chain":
        s = _frac(s)
        return Chain(self.group, self.degree, {k: s * v for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[Cell, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: tuple(g.coords for g in kv[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for cell, c in self.sorted_terms():
            body = "[" + "|".join(G.format_element(g) for g in cell) + "]"
            parts.append(f"{c}*{body}" if c != 1 else body)
        return " + ".join(parts)

    def to_json(self) -> list[dict]:
        return [{"cells": [G.format_element(g) for g in cell],
                 "coeff": f"{c.numerator}/{c.denominator}"}
                for cell, c in self.sorted_terms()]

    @staticmethod
    def from_json(group: GroupId, data: list[dict]) -> "Chain":
        from .literals import parse_element
        if not data:
            raise InputError("empty chain JSON has no degree; use Chain.zero")
        terms: dict = {}
        degree = len(data[0]["cells"])
        for item in data:
            cell = tuple(parse_element(group, s) for s in item["cells"])
            terms[cell] = terms.get(cell, Fraction(0)) + Fraction(item["coeff"])
        return Chain(group, degree, terms)


def boundary1(c: Chain) -> Chain:
    """``d[a] = 0`` in the bar complex with trivial coefficients."""
    return Chain.zero(c.group, 0)


def boundary2(c: Chain) -> Chain:
    if c.degree != 2:
        raise InputError("boundary2 expects a 2-chain")
    out: dict = {}
    for (a, b), k in c.terms.items():
        for cell, s in (((a,), 1), ((a * b,), -1), ((b,), 1)):
            out[cell] = out.get(cell, Fraction(0)) + s * k
    return Chain(c.group, 1, out)


def boundary3(c: Chain) -> Chain:
    if c.degree != 3:
        raise InputError("boundary3 expects a 3-chain")
    out: dict = {}
    for (a, b, d), k in c.terms.items():
        for cell, s in (((b, d), 1), ((a * b, d), -1), ((a, b * d), 1), ((a, b), -1)):
            out[cell] = out.get(cell, Fraction(0)) + s * k
    return Chain(c.group, 2, out)


def boundary(c: Chain) -> Chain:
    if c.degree == 1:
        return boundary1(c)
    if c.degree == 2:
        return boundary2(c)
    if c.degree == 3:
        return boundary3(c)
    raise InputError(f"no boundary implemented in degree {c.degree}")


def is_cycle(c: Chain) -> bool:
    if c.degree not in (1, 2, 3):
        raise InputError("is_cycle supports degrees 1 to 3")
    return boundary(c).is_zero()


# --- cochains -------------------------------------------------------------------

@dataclass(frozen=True)
class Cochain:
    """A k-cochain, either closed form (``fn``) or tabulated (``table``).

    Tabulated cochains raise :class:`SupportError` outside their table.
    """

    group: GroupId
    degree: int
    fn: Callable | None = None
    table: Mapping[Cell, Fraction] | None = None
    name: str = ""

    def __post_init__(self):
        if (self.fn is None) == (self.table is None):
            raise InputError("give exactly one of fn or table")

    def __call__(self, *cell: GroupElement):
        if len(cell) != self.degree:
            raise InputError(f"{self.name or 'cochain'} takes {self.degree} arguments")
        for g in cell:
            if g.group != self.group:
                raise GroupMismatch(f"{g.group} element passed to a cochain over {self.group}")
        if self.table is not None:
            try:
                return self.table[tuple(cell)]
            except KeyError:
                raise SupportError(f"{self.name or 'cochain'} has no value at "
                                   + "[" + "|".join(map(str, cell)) + "]") from None
        return self.fn(*cell)

    @staticmethod
    def tabulate(f: "Cochain", cells: Iterable[Cell], name: str = "") -> "Cochain":
        return Cochain(f.group, f.degree, table={tuple(c): f(*c) for c in cells},
                       name=name or f.name)

    def __add__(self, other: "Cochain") -> "Cochain":
        if other.group != self.group or other.degree != self.degree:
            raise GroupMismatch("cochains over different groups or degrees")
        return Cochain(self.group, self.degree, fn=lambda *c: self(*c) + other(*c))

    def __neg__(self) -> "Cochain":
        return Cochain(self.group, self.degree, fn=lambda *c: -self(*c))

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)


def coboundary1(f: Cochain) -> Cochain:
    """``(df)(x, y) = f(x) - f(xy) + f(y)``."""
    if f.degree != 1:
        raise InputError("coboundary1 expects a 1-cochain")
    return Cochain(f.group, 2, fn=lambda x, y: f(x) - f(x * y) + f(y),
                   name=f"d({f.name})" if f.name else "")


def coboundary2(f: Cochain) -> Cochain:
    if f.degree != 2:
        raise InputError("coboundary2 expects a 2-cochain")
    return Cochain(f.group, 3, fn=lambda a, b, c: f(b, c) - f(a * b, c) + f(a, b * c) - f(a, b),
                   name=f"d({f.name})" if f.name else "")


def cup(f: Cochain, g: Cochain) -> Cochain:
    """Cup product ``(f u g)(x1..x_{p+q}) = f(x1..xp) g(x_{p+1}..)``."""
    if f.group != g.group:
        raise GroupMismatch("cup of cochains over different groups")
    p = f.degree
    return Cochain(f.group, p + g.degree, fn=lambda *c: f(*c[:p]) * g(*c[p:]))


def kronecker(f: Cochain, c: Chain) -> Fraction:
    if f.group != c.group or f.degree != c.degree:
        raise GroupMismatch(f"cannot pair a degree {f.degree} cochain over {f.group} "
                            f"with a degree {c.degree} chain over {c.group}")
    total = Fraction(0)
    for cell, k in c.sorted_terms():
        total += k * _frac(f(*cell))
    return total


def cocycle_residual(f: Cochain, triples: Iterable[tuple]) -> Fraction:
    """Exact max of ``|f(b,c) - f(ab,c) + f(a,bc) - f(a,b)|`` over ``triples``."""
    if f.degree != 2:
        raise InputError("cocycle_residual expects a 2-cochain")
    worst = Fraction(0)
    for a, b, c in triples:
        r = abs(_frac(f(b, c)) - _frac(f(a * b, c)) + _frac(f(a, b * c)) - _frac(f(a, b)))
        if r > worst:
            worst = r
    return worst


def box_triples(group: GroupId, radius: int = 3):
    elems = list(G.box(group, radius))
    for a in elems:
        for b in elems:
            for c in elems:
                yield a, b, c


def normalize_cocycle(f: Cochain) -> Cochain:
    """Add the coboundary of ``g(a) = -f(e, a)`` so both identity slots vanish."""
    if f.degree != 2:
        raise InputError("normalize_cocycle expects a 2-cochain")
    e = G.identity(f.group)
    g = Cochain(f.group, 1, fn=lambda a: -_frac(f(e, a)))
    dg = coboundary1(g)
    return Cochain(f.group, 2, fn=lambda x, y: _frac(f(x, y)) + dg(x, y),
                   name=f.name)


# --- Hopf words -----------------------------------------------------------------

Word = tuple  # tuple of (generator name, exponent)

_LETTER = re.compile(r"([A-Za-z])(?:\^(-?\d+))?")


def parse_word(text: str) -> Word:
    """Parse ``"x y^-1 z"`` (or ``"xy^-1z"``) into a letter word."""
    text = text.replace("*", " ").strip()
    if text in ("", "e", "1"):
        return ()
    out = []
    for tok in text.split():
        pos = 0
        while pos < len(tok):
            m = _LETTER.match(tok, pos)
            if not m:
                raise InputError(f"cannot parse word {text!r}")
            out.append((m.group(1), int(m.group(2) or 1)))
            pos = m.end()
    return tuple(out)


@dataclass(frozen=True)
class HopfWord:
    """A product of commutators ``prod [a_i, b_i]`` of words in free letters."""

    group: GroupId
    pairs: tuple
    eval_map: Mapping[str, GroupElement]

    def __post_init__(self):
        pairs = tuple((tuple(a), tuple(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "eval_map", dict(self.eval_map))
        for g in self.eval_map.values():
            if g.group != self.group:
                raise GroupMismatch("letter image from the wrong group")
        total = G.identity(self.group)
        for a, b in pairs:
            total = total * G.commutator(self.evaluate(a), self.evaluate(b))
        if not G.is_identity(total):
            raise InputError(f"commutator product evaluates to {total}, not the identity")

    def evaluate(self, word: Word) -> GroupElement:
        out = G.identity(self.group)
        for letter, e in word:
            if letter not in self.eval_map:
                raise InputError(f"letter {letter!r} has no image")
            out = out * G.power(self.eval_map[letter], e)
        return out


def hopf_to_bar(r: HopfWord) -> Chain:
    """Bar 2-cycle representing the Hopf word.

    Term ``i`` is ``[I|a] + [Ia|b] - [I a b a^-1|a] - [I'|b]`` with ``I`` the
    product of the first ``i-1`` commutators and ``I' = I[a, b]``; its
    boundary telescopes to ``[I] - [I']``.
    """
    out = Chain.zero(r.group, 2)
    acc = G.identity(r.group)
    for wa, wb in r.pairs:
        a, b = r.evaluate(wa), r.evaluate(wb)
        nxt = acc * G.commutator(a, b)
        out = (out + Chain.cell(acc, a) + Chain.cell(acc * a, b)
               - Chain.cell(acc * a * b * G.inv(a), a) - Chain.cell(nxt, b))
        acc = nxt
    return out


def require_cycle(c: Chain) -> None:
    if not is_cycle(c):
        raise NotACycle(f"boundary is {boundary(c)}")


# --- Heisenberg fixtures --------------------------------------------------------

def _x(g: GroupElement) -> tuple:
    return g.coords


def beta1_value(x: Sequence[int], y: Sequence[int]) -> Fraction:
    v = Fraction(x[2] * y[0]) + Fraction(x[1] * y[0] * (y[0] - 1), 2)
    assert v.denominator == 1, "beta1 must be integral on integer input"
    return v


def beta1_array(x, y):
    """beta1 on coordinate triples whose entries are integer arrays (or ints)."""
    return x[2] * y[0] + x[1] * (y[0] * (y[0] - 1) // 2)


def beta2_array(x, y):
    return (x[0] * x[1] - x[2]) * y[1] + x[0] * (y[1] * (y[1] - 1) // 2)


def _h3_mul_array(x, y):
    return (x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[1] * y[0])


def h3_box_residual(name, radius: int = 3) -> int:
    """Exact max cocycle residual of ``beta1``/``beta2`` over all triples in the H3 box.

    ``name`` may also be any callable with the same signature.  Both
    cochains are integer polynomials; at radius <= 10 every intermediate
    value stays far below 2^31, so int32 arithmetic is exact.
    """
    if radius > 10:
        raise InputError("box radius above 10 would overflow int32")
    f = {"beta1": beta1_array, "beta2": beta2_array}.get(name, name)
    r = range(-radius, radius + 1)
    X = np.array([(i, j, k) for i in r for j in r for k in r], dtype=np.int32).T
    A = tuple(x[:, None] for x in X)
    B = tuple(x[None, :] for x in X)
    AB = tuple(np.ascontiguousarray(v) for v in
               (np.broadcast_to(t, (X.shape[1],) * 2) for t in _h3_mul_array(A, B)))
    fab = f(A, B)
    worst = 0
    for c in X.T.tolist():
        BC = tuple(v[None, :] for v in _h3_mul_array(tuple(X), c))
        res = f(tuple(X), c)[None, :] - f(AB, c) + f(A, BC) - fab
        worst = max(worst, int(np.abs(res).max()))
    return worst


def beta2_value(x: Sequence[int], y: Sequence[int]) -> Fraction:
    v = Fraction((x[0] * x[1] - x[2]) * y[1]) + Fraction(x[0] * y[1] * (y[1] - 1), 2)
    assert v.denominator == 1, "beta2 must be integral on integer input"
    return v


@dataclass(frozen=True)
class H3Fixtures:
    alpha1: Cochain
    alpha2: Cochain
    beta1: Cochain
    beta2: Cochain
    gamma: Cochain
    gamma11: Cochain
    gamma21: Cochain
    gamma22: Cochain
    A1: Chain
    A2: Chain
    B1: Chain
    B2: Chain
    C: Chain

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in FIXTURE_NAMES}


FIXTURE_NAMES = ("alpha1", "alpha2", "beta1", "beta2", "gamma",
                 "gamma11", "gamma21", "gamma22", "A1", "A2", "B1", "B2", "C")

# C copied term by term; each entry is (sign, three H3 coordinate triples)
_C_TERMS = [
    (1, ((0, 0, -1), (0, 1, 1), (1, -1, -1))),
    (1, ((0, 1, 1), (1, -1, -1), (-1, 1, -1))),
    (1, ((1, -1, -1), (-1, 1, -1), (1, 0, 1))),
    (1, ((-1, 1, -1), (1, 0, 1), (0, 0, -1))),
    (-1, ((1, 0, 1), (-1, 1, -1), (1, -1, -1))),
    (-1, ((-1, 1, -1), (1, -1, -1), (0, 1, 1))),
]

_FIXTURES: H3Fixtures | None = None


def h3_fixtures() -> H3Fixtures:
    global _FIXTURES
    if _FIXTURES is not None:
        return _FIXTURES
    H = G.H3
    a, b, c = G.generators(H)
    al1 = Cochain(H, 1, fn=lambda x: Fraction(x.coords[0]), name="alpha1")
    al2 = Cochain(H, 1, fn=lambda x: Fraction(x.coords[1]), name="alpha2")
    be1 = Cochain(H, 2, fn=lambda x, y: beta1_value(x.coords, y.coords), name="beta1")
    be2 = Cochain(H, 2, fn=lambda x, y: beta2_value(x.coords, y.coords), name="beta2")

    def prod(beta, al, name):
        return Cochain(H, 3, fn=lambda x, y, z: beta(x, y) * al(z), name=name)

    C = Chain.zero(H, 3)
    for s, cell in _C_TERMS:
        C = C + Chain.cell(*(G.h3(*t) for t in cell), coeff=s)

    _FIXTURES = H3Fixtures(
        alpha1=al1, alpha2=al2, beta1=be1, beta2=be2,
        gamma=prod(be1, al2, "gamma"),
        gamma11=prod(be1, al1, "gamma11"),
        gamma21=prod(be2, al1, "gamma21"),
        gamma22=prod(be2, al2, "gamma22"),
        A1=Chain.cell(a),
        A2=Chain.cell(b),
        B1=Chain.cell(c, a) - Chain.cell(a, c),
        B2=Chain.cell(b, c) - Chain.cell(c, b),
        C=C,
    )
    return _FIXTURES
