"""Expression trees describing (almost) representations.

Leaves are concrete unitary families; nodes combine them by direct sum,
tensor product, entrywise conjugation, pullback along a homomorphism and
r-fold amplification.  Evaluation lives in :mod:`almostrep.reps`, Chern
characters in :mod:`almostrep.cohring`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import groups as G
from .errors import GroupMismatch, InputError
from .groups import GroupHom, GroupId


@dataclass(frozen=True)
class Voiculescu:
    """``(x, y) -> u^x v^y`` with ``u`` the cyclic shift and ``v`` the diagonal of roots of unity."""
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InputError("Voiculescu needs n >= 1")

    @property
    def group(self) -> GroupId:
        return G.Z2

    @property
    def dim(self) -> int:
        return self.n


@dataclass(frozen=True)
class ESSRho:
    n: int

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise InputError(f"{type(self).__name__} needs odd n >= 3, got {self.n}")

    @property
    def group(self) -> GroupId:
        return G.H3

    @property
    def dim(self) -> int:
        return self.n


@dataclass(frozen=True)
class ESSRhoTilde(ESSRho):
    """``ESSRho`` precomposed with the automorphism ``eta``."""


@dataclass(frozen=True)
class Trivial:
    k: int
    group: GroupId = G.Z2

    def __post_init__(self):
        if self.k < 1:
            raise InputError("Trivial needs k >= 1")

    @property
    def dim(self) -> int:
        return self.k


@dataclass(frozen=True)
class Character:
    """One-dimensional genuine representation ``x -> exp(i <theta, x>)`` of Z^d."""
    thetas: tuple

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        if not self.thetas:
            raise InputError("Character needs at least one angle")

    @property
    def group(self) -> GroupId:
        return G.free_abelian(len(self.thetas))

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class LieExp:
    """``(x, y) -> exp(i (x H1 + y H2))`` for fixed seeded Hermitian ``H1, H2``.

    ``scale`` is the operator norm of each generator.  The map is unital and
    its defect is of order ``scale**2 * |x| * |y|``; its trace-log cocycle
    vanishes identically, so its bundle class is trivial.
    """
    dim_: int
    scale: float
    seed: int = 0

    @property
    def group(self) -> GroupId:
        return G.Z2

    @property
    def dim(self) -> int:
        return self.dim_


@dataclass(frozen=True)
class Sum:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        _same_group(self.children)

    @property
    def group(self) -> GroupId:
        return self.children[0].group

    @property
    def dim(self) -> int:
        return sum(c.dim for c in self.children)


@dataclass(frozen=True)
class Tensor:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        _same_group(self.children)

    @property
    def group(self) -> GroupId:
        return self.children[0].group

    @property
    def dim(self) -> int:
        d = 1
        for c in self.children:
            d *= c.dim
        return d


@dataclass(frozen=True)
class Conj:
    child: "RepExpr"

    @property
    def group(self) -> GroupId:
        return self.child.group

    @property
    def dim(self) -> int:
        return self.child.dim


@dataclass(frozen=True)
class Pullback:
    hom: GroupHom
    child: "RepExpr"

    def __post_init__(self):
        if self.hom.target != self.child.group:
            raise GroupMismatch(f"pullback along a map into {self.hom.target} "
                                f"of a representation of {self.child.group}")

    @property
    def group(self) -> GroupId:
        return self.hom.source

    @property
    def dim(self) -> int:
        return self.child.dim


@dataclass(frozen=True)
class Amplify:
    r: int
    child: "RepExpr"

    def __post_init__(self):
        if self.r < 1:
            raise InputError("Amplify needs r >= 1")

    @property
    def group(self) -> GroupId:
        return self.child.group

    @property
    def dim(self) -> int:
        return self.r * self.child.dim


RepExpr = Union[Voiculescu, ESSRho, ESSRhoTilde, Trivial, Character, LieExp,
                Sum, Tensor, Conj, Pullback, Amplify]


def _same_group(children) -> None:
    if not children:
        raise InputError("combinator needs at least one child")
    g = children[0].group
    for c in children[1:]:
        if c.group != g:
            raise GroupMismatch(f"children over {g} and {c.group}")


def direct_sum(*children) -> Sum:
    return Sum(tuple(children))


def tensor(*children) -> Tensor:
    return Tensor(tuple(children))


def count_nodes(e) -> int:
    if isinstance(e, (Sum, Tensor)):
        return 1 + sum(count_nodes(c) for c in e.children)
    if isinstance(e, (Conj, Pullback, Amplify)):
        return 1 + count_nodes(e.child)
    return 1


def leaves(e):
    if isinstance(e, (Sum, Tensor)):
        for c in e.children:
            yield from leaves(c)
    elif isinstance(e, (Conj, Pullback, Amplify)):
        yield from leaves(e.child)
    else:
        yield e


# --- JSON ---------------------------------------------------------------------

def to_json(e) -> dict:
    if isinstance(e, Voiculescu):
        return {"type": "voiculescu", "n": e.n}
    if isinstance(e, ESSRhoTilde):
        return {"type": "ess-rho-tilde", "n": e.n}
    if isinstance(e, ESSRho):
        return {"type": "ess-rho", "n": e.n}
    if isinstance(e, Trivial):
        return {"type": "trivial", "k": e.k, "group": str(e.group)}
    if isinstance(e, Character):
        return {"type": "character", "thetas": list(e.thetas)}
    if isinstance(e, LieExp):
        return {"type": "lie-exp", "dim": e.dim_, "scale": e.scale, "seed": e.seed}
    if isinstance(e, Sum):
        return {"type": "sum", "children": [to_json(c) for c in e.children]}
    if isinstance(e, Tensor):
        return {"type": "tensor", "children": [to_json(c) for c in e.children]}
    if isinstance(e, Conj):
        return {"type": "conj", "child": to_json(e.child)}
    if isinstance(e, Pullback):
        return {"type": "pullback", "hom": e.hom.to_json(), "child": to_json(e.child)}
    if isinstance(e, Amplify):
        return {"type": "amplify", "r": e.r, "child": to_json(e.child)}
    raise InputError(f"not a representation expression: {e!r}")


def from_json(obj: dict):
    t = obj.get("type")
    if t == "voiculescu":
        return Voiculescu(int(obj["n"]))
    if t == "ess-rho":
        return ESSRho(int(obj["n"]))
    if t == "ess-rho-tilde":
        return ESSRhoTilde(int(obj["n"]))
    if t == "trivial":
        return Trivial(int(obj["k"]), G.parse_group(obj.get("group", "Z2")))
    if t == "character":
        return Character(tuple(obj["thetas"]))
    if t == "lie-exp":
        return LieExp(int(obj["dim"]), float(obj["scale"]), int(obj.get("seed", 0)))
    if t == "sum":
        return Sum(tuple(from_json(c) for c in obj["children"]))
    if t == "tensor":
        return Tensor(tuple(from_json(c) for c in obj["children"]))
    if t == "conj":
        return Conj(from_json(obj["child"]))
    if t == "pullback":
        return Pullback(GroupHom.from_json(obj["hom"]), from_json(obj["child"]))
    if t == "amplify":
        return Amplify(int(obj["r"]), from_json(obj["child"]))
    raise InputError(f"unknown expression type {t!r}")
