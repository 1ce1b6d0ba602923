"""Normal forms for Z^d, the discrete Heisenberg group H3 and their products.

H3 elements are triples ``(x1, x2, x3)`` standing for ``a^x1 b^x2 c^x3`` with
``ba = abc`` and ``c`` central, so

    (x1, x2, x3) * (y1, y2, y3) = (x1 + y1, x2 + y2, x3 + y3 + x2*y1).

Product groups are flattened to a single level.  Coordinates are Python ints,
so there is no overflow to guard against.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import GroupMismatch, InputError, RelationViolation

FREE = "free"
HEIS = "heisenberg"
PROD = "product"


@dataclass(frozen=True)
class GroupId:
    kind: str
    rank: int = 0
    factors: tuple["GroupId", ...] = ()

    def __post_init__(self):
        if self.kind == FREE and self.rank < 1:
            raise InputError("free abelian rank must be positive")
        if self.kind == PROD:
            if len(self.factors) < 2:
                raise InputError("a product needs at least two factors")
            if any(f.kind == PROD for f in self.factors):
                raise InputError("products must be flattened")

    @property
    def ncoords(self) -> int:
        if self.kind == FREE:
            return self.rank
        if self.kind == HEIS:
            return 3
        return sum(f.ncoords for f in self.factors)

    def __str__(self) -> str:
        if self.kind == FREE:
            return "Z" if self.rank == 1 else f"Z{self.rank}"
        if self.kind == HEIS:
            return "H3"
        return "x".join(str(f) for f in self.factors)

    def to_json(self) -> str:
        return str(self)


def free_abelian(d: int) -> GroupId:
    return GroupId(FREE, rank=d)


def heisenberg() -> GroupId:
    return GroupId(HEIS)


def product(*factors: GroupId) -> GroupId:
    flat = []
    for f in factors:
        flat.extend(f.factors if f.kind == PROD else (f,))
    return GroupId(PROD, factors=tuple(flat))


Z = free_abelian(1)
Z2 = free_abelian(2)
H3 = heisenberg()


def parse_group(text: str) -> GroupId:
    """Inverse of ``str(GroupId)``: ``"Z4"``, ``"H3"``, ``"H3xZ"``, ..."""
    parts = text.strip().split("x")
    ids = []
    for p in parts:
        p = p.strip()
        if p == "H3":
            ids.append(H3)
        elif p == "Z":
            ids.append(Z)
        elif p.startswith("Z") and p[1:].isdigit():
            ids.append(free_abelian(int(p[1:])))
        else:
            raise InputError(f"unknown group {text!r}")
    return ids[0] if len(ids) == 1 else product(*ids)


@dataclass(frozen=True, order=True)
class GroupElement:
    group: GroupId = field(compare=False)
    coords: tuple

    def __post_init__(self):
        _check_coords(self.group, self.coords)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, other)

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"<{self.group} {format_element(self)}>"

    def __hash__(self):
        return hash(self.coords)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.coords == other.coords and self.group == other.group


def _check_coords(group: GroupId, coords) -> None:
    if group.kind == PROD:
        if not isinstance(coords, tuple) or len(coords) != len(group.factors):
            raise InputError(f"bad product coordinates {coords!r} for {group}")
        for g, c in zip(group.factors, coords):
            _check_coords(g, c)
        return
    n = group.rank if group.kind == FREE else 3
    if not isinstance(coords, tuple) or len(coords) != n:
        raise InputError(f"expected {n} integer coordinates for {group}, got {coords!r}")
    if not all(isinstance(c, int) for c in coords):
        raise InputError(f"coordinates must be integers: {coords!r}")


def element(group: GroupId, coords) -> GroupElement:
    if group.kind == PROD:
        coords = tuple(tuple(int(x) for x in c) for c in coords)
    else:
        coords = tuple(int(x) for x in coords)
    return GroupElement(group, coords)


def identity(group: GroupId) -> GroupElement:
    if group.kind == PROD:
        return GroupElement(group, tuple(identity(f).coords for f in group.factors))
    return GroupElement(group, (0,) * (group.rank if group.kind == FREE else 3))


def h3(x1: int, x2: int, x3: int) -> GroupElement:
    return GroupElement(H3, (x1, x2, x3))


def zd(*coords: int) -> GroupElement:
    return GroupElement(free_abelian(len(coords)), tuple(coords))


def _mul(group: GroupId, x, y):
    if group.kind == FREE:
        return tuple(a + b for a, b in zip(x, y))
    if group.kind == HEIS:
        return (x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[1] * y[0])
    return tuple(_mul(f, a, b) for f, a, b in zip(group.factors, x, y))


def _inv(group: GroupId, x):
    if group.kind == FREE:
        return tuple(-a for a in x)
    if group.kind == HEIS:
        # (x1,x2,x3)^-1 = (-x1, -x2, -x3 + x1*x2)
        return (-x[0], -x[1], -x[2] + x[0] * x[1])
    return tuple(_inv(f, a) for f, a in zip(group.factors, x))


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.group != h.group:
        raise GroupMismatch(f"cannot multiply {g.group} by {h.group}")
    return GroupElement(g.group, _mul(g.group, g.coords, h.coords))


def inv(g: GroupElement) -> GroupElement:
    return GroupElement(g.group, _inv(g.group, g.coords))


def power(g: GroupElement, k: int) -> GroupElement:
    base = g if k >= 0 else inv(g)
    out = identity(g.group)
    for _ in range(abs(k)):
        out = mul(out, base)
    return out


def commutator(g: GroupElement, h: GroupElement) -> GroupElement:
    """``[g, h] = g h g^-1 h^-1``."""
    return mul(mul(g, h), mul(inv(g), inv(h)))


def is_identity(g: GroupElement) -> bool:
    return g == identity(g.group)


def generators(group: GroupId) -> list[GroupElement]:
    if group.kind == FREE:
        return [GroupElement(group, tuple(int(i == j) for j in range(group.rank)))
                for i in range(group.rank)]
    if group.kind == HEIS:
        return [h3(1, 0, 0), h3(0, 1, 0), h3(0, 0, 1)]
    out = []
    for k, f in enumerate(group.factors):
        for g in generators(f):
            out.append(embed(group, k, g))
    return out


def embed(group: GroupId, k: int, g: GroupElement) -> GroupElement:
    """Inclusion of factor ``k`` into a product group."""
    coords = [identity(f).coords for f in group.factors]
    coords[k] = g.coords
    return GroupElement(group, tuple(coords))


def box(group: GroupId, radius: int) -> Iterator[GroupElement]:
    """All elements whose coordinates lie in ``{-radius..radius}``."""
    rng = range(-radius, radius + 1)
    if group.kind != PROD:
        for c in itertools.product(rng, repeat=group.ncoords):
            yield GroupElement(group, c)
        return
    sizes = [f.ncoords for f in group.factors]
    for c in itertools.product(rng, repeat=group.ncoords):
        parts, i = [], 0
        for s in sizes:
            parts.append(tuple(c[i:i + s]))
            i += s
        yield GroupElement(group, tuple(parts))


# --- literals -------------------------------------------------------------

def _fmt_h3(x) -> str:
    parts = []
    for letter, e in zip("abc", x):
        if e == 1:
            parts.append(letter)
        elif e:
            parts.append(f"{letter}^{e}")
    return " ".join(parts) or "e"


def _fmt(group: GroupId, x) -> str:
    if group.kind == FREE:
        return "(" + ",".join(str(a) for a in x) + ")"
    if group.kind == HEIS:
        return _fmt_h3(x)
    return "(" + ", ".join(_fmt(f, a) for f, a in zip(group.factors, x)) + ")"


def format_element(g: GroupElement) -> str:
    return _fmt(g.group, g.coords)


# --- homomorphisms ----------------------------------------------------------

MATRIX = "matrix"
PROJECTION = "projection"
ALPHA1 = "alpha1"
ALPHA2 = "alpha2"
ETA = "eta"
H3_LINEAR = "h3_linear"
TUPLE = "tuple"
COMPOSE = "compose"


@dataclass(frozen=True)
class GroupHom:
    """A homomorphism between shipped groups.

    ``kind`` selects the formula; ``data`` holds its parameters:

    * ``matrix``: integer matrix (tuple of rows), Z^d -> Z^e, x -> M x
    * ``projection``: factor index of a product
    * ``alpha1`` / ``alpha2``: H3 -> Z coordinate maps
    * ``eta``: the H3 automorphism (x1,x2,x3) -> (x2, x1, x1*x2 - x3)
    * ``h3_linear``: images of a, b, c in Z^e applied coordinatewise; only a
      homomorphism when c goes to 0 (``hom_check`` catches the rest)
    * ``tuple``: homs with a common source into free abelian targets,
      concatenated into Z^(sum of ranks)
    * ``compose``: homs applied left to right
    """

    source: GroupId
    target: GroupId
    kind: str
    data: tuple = ()

    def __call__(self, g: GroupElement) -> GroupElement:
        return hom_apply(self, g)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "source": str(self.source), "target": str(self.target)}
        if self.kind in (TUPLE, COMPOSE):
            out["maps"] = [f.to_json() for f in self.data]
        elif self.kind == PROJECTION:
            out["index"] = self.data[0]
        elif self.kind in (MATRIX, H3_LINEAR):
            out["matrix"] = [list(r) for r in self.data]
        return out

    @staticmethod
    def from_json(obj: dict) -> "GroupHom":
        kind = obj["kind"]
        src = parse_group(obj["source"])
        if kind == MATRIX:
            return matrix_hom(obj["matrix"], src.rank)
        if kind == PROJECTION:
            return projection(src, obj["index"])
        if kind == ALPHA1:
            return alpha(1)
        if kind == ALPHA2:
            return alpha(2)
        if kind == ETA:
            return eta_auto()
        if kind == H3_LINEAR:
            return h3_linear(*obj["matrix"])
        if kind == TUPLE:
            return tuple_hom([GroupHom.from_json(m) for m in obj["maps"]])
        if kind == COMPOSE:
            return compose(*[GroupHom.from_json(m) for m in obj["maps"]])
        raise InputError(f"unknown homomorphism kind {kind!r}")


def matrix_hom(rows: Sequence[Sequence[int]], source_rank: int | None = None) -> GroupHom:
    rows = tuple(tuple(int(a) for a in r) for r in rows)
    d = source_rank if source_rank is not None else len(rows[0])
    if any(len(r) != d for r in rows):
        raise InputError("matrix rows must match the source rank")
    return GroupHom(free_abelian(d), free_abelian(len(rows)), MATRIX, rows)


def coordinate_projection(d: int, indices: Sequence[int]) -> GroupHom:
    """Z^d -> Z^k keeping the listed (0-based) coordinates."""
    return matrix_hom([[int(j == i) for j in range(d)] for i in indices], d)


def projection(group: GroupId, index: int) -> GroupHom:
    if group.kind != PROD or not 0 <= index < len(group.factors):
        raise InputError(f"no factor {index} in {group}")
    return GroupHom(group, group.factors[index], PROJECTION, (index,))


def alpha(k: int) -> GroupHom:
    if k not in (1, 2):
        raise InputError("alpha index must be 1 or 2")
    return GroupHom(H3, Z, ALPHA1 if k == 1 else ALPHA2)


def eta_auto() -> GroupHom:
    return GroupHom(H3, H3, ETA)


def h3_linear(img_a: Sequence[int], img_b: Sequence[int], img_c: Sequence[int]) -> GroupHom:
    rows = (tuple(img_a), tuple(img_b), tuple(img_c))
    if len({len(r) for r in rows}) != 1:
        raise InputError("generator images must have equal length")
    return GroupHom(H3, free_abelian(len(img_a)), H3_LINEAR, rows)


def tuple_hom(maps: Sequence[GroupHom]) -> GroupHom:
    maps = tuple(maps)
    if len({m.source for m in maps}) != 1:
        raise InputError("tuple components need a common source")
    if any(m.target.kind != FREE for m in maps):
        raise InputError("tuple components must land in free abelian groups")
    rank = sum(m.target.rank for m in maps)
    return GroupHom(maps[0].source, free_abelian(rank), TUPLE, maps)


def compose(*maps: GroupHom) -> GroupHom:
    """``compose(f, g)`` applies ``f`` first, then ``g``."""
    for f, g in zip(maps, maps[1:]):
        if f.target != g.source:
            raise GroupMismatch(f"cannot compose {f.target} -> {g.source}")
    return GroupHom(maps[0].source, maps[-1].target, COMPOSE, tuple(maps))


def hom_apply(f: GroupHom, g: GroupElement) -> GroupElement:
    if g.group != f.source:
        raise GroupMismatch(f"{f.kind} expects {f.source}, got {g.group}")
    x = g.coords
    if f.kind == MATRIX:
        return GroupElement(f.target, tuple(sum(a * b for a, b in zip(r, x)) for r in f.data))
    if f.kind == PROJECTION:
        return GroupElement(f.target, x[f.data[0]])
    if f.kind == ALPHA1:
        return GroupElement(Z, (x[0],))
    if f.kind == ALPHA2:
        return GroupElement(Z, (x[1],))
    if f.kind == ETA:
        return GroupElement(H3, (x[1], x[0], x[0] * x[1] - x[2]))
    if f.kind == H3_LINEAR:
        ia, ib, ic = f.data
        return GroupElement(f.target, tuple(x[0] * p + x[1] * q + x[2] * r
                                            for p, q, r in zip(ia, ib, ic)))
    if f.kind == TUPLE:
        out: tuple = ()
        for m in f.data:
            out += hom_apply(m, g).coords
        return GroupElement(f.target, out)
    if f.kind == COMPOSE:
        for m in f.data:
            g = hom_apply(m, g)
        return g
    raise InputError(f"unknown homomorphism kind {f.kind!r}")


def relations(group: GroupId) -> list[tuple[list[tuple[int, int]], list[tuple[int, int]]]]:
    """Defining relations as pairs of words in ``generators(group)``.

    Each word is a list of (generator index, exponent); a relation reads
    ``lhs == rhs``.
    """
    gens = generators(group)
    rels = []
    if group.kind == HEIS:
        a, b, c = 0, 1, 2
        rels = [([(b, 1), (a, 1)], [(a, 1), (b, 1), (c, 1)]),
                ([(c, 1), (a, 1)], [(a, 1), (c, 1)]),
                ([(c, 1), (b, 1)], [(b, 1), (c, 1)])]
        return rels
    # commuting generators, plus factor relations for products
    if group.kind == FREE:
        idx = range(len(gens))
        return [([(i, 1), (j, 1)], [(j, 1), (i, 1)]) for i in idx for j in idx if i < j]
    offset = 0
    owner = []
    for k, f in enumerate(group.factors):
        for r in relations(f):
            rels.append(([(i + offset, e) for i, e in r[0]], [(i + offset, e) for i, e in r[1]]))
        n = len(generators(f))
        owner.extend([k] * n)
        offset += n
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if owner[i] != owner[j]:
                rels.append(([(i, 1), (j, 1)], [(j, 1), (i, 1)]))
    return rels


def _eval_word(images: list[GroupElement], target: GroupId, word) -> GroupElement:
    out = identity(target)
    for i, e in word:
        out = mul(out, power(images[i], e))
    return out


def hom_check(f: GroupHom, radius: int | None = None, raise_on_failure: bool = False) -> bool:
    """Check that ``f`` is a homomorphism.

    Generator images must satisfy every defining relation of the source, and
    ``f(gh) == f(g) f(h)`` must hold on the coordinate box.  The default box
    radius is 3 for groups with at most three coordinates and 1 otherwise.
    """
    images = [hom_apply(f, g) for g in generators(f.source)]
    for lhs, rhs in relations(f.source):
        if _eval_word(images, f.target, lhs) != _eval_word(images, f.target, rhs):
            if raise_on_failure:
                raise RelationViolation(f"relation {lhs} = {rhs} fails under {f.kind}")
            return False
    if radius is None:
        radius = 3 if f.source.ncoords <= 3 else 1
    elems = list(box(f.source, radius))
    fx = {g: hom_apply(f, g) for g in elems}
    for g in elems:
        for h in elems:
            if hom_apply(f, mul(g, h)) != mul(fx[g], fx[h]):
                if raise_on_failure:
                    raise RelationViolation(f"{f.kind} not multiplicative at {g}, {h}")
                return False
    return True


def elements_from(group: GroupId, coords_list: Iterable) -> list[GroupElement]:
    return [element(group, c) for c in coords_list]
