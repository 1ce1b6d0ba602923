"""Exact graded-commutative cohomology rings and a symbolic Chern character.

Rings are given by a basis with degrees and a structure-constant table.
Shipped rings: the exterior algebra of Z^d, the integral cohomology ring of
H3 on the basis {1; alpha1, alpha2; beta1, beta2; gamma}, and Kunneth
products of these with the sign rule

    (a (x) b)(a' (x) b') = (-1)^(|b||a'|) aa' (x) bb'.

Products are cup products: ``e1 e2`` is represented by ``[g|h] -> g_1 h_2``.
The Voiculescu pair on Z^2 has trace-log cocycle ``[g|h] -> g_2 h_1``, whose
class is ``-e1 e2``; that fixes its first Chern class and pairs to -1 with
the fundamental cycle ``[x|y] - [y|x]``.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import groups as G
from . import repexpr as R
from .errors import InputError, RingError
from .groups import GroupHom, GroupId


class GradedRing:
    """A finite-dimensional graded-commutative ring over Q.

    ``table[(i, j)]`` is a dict ``k -> coefficient``.  ``gen_words[k]`` writes
    basis element ``k`` as an ordered product of generator indices, which lets
    pullbacks be defined on generators alone.
    """

    def __init__(self, names: Sequence[str], degrees: Sequence[int],
                 table: Mapping[tuple[int, int], Mapping[int, Fraction]],
                 generators: Sequence[int], gen_words: Sequence[Sequence[int]],
                 label: str = "", check: bool = True):
        self.names = tuple(names)
        self.degrees = tuple(int(d) for d in degrees)
        self.label = label
        self.index = {n: i for i, n in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise RingError("basis names must be unique")
        self.top_degree = max(self.degrees)
        self.table = {k: {m: Fraction(c) for m, c in v.items() if c}
                      for k, v in table.items()}
        self.table = {k: v for k, v in self.table.items() if v}
        self.generators = tuple(generators)
        self.gen_words = tuple(tuple(w) for w in gen_words)
        if self.degrees[0] != 0 or self.names[0] != "1":
            raise RingError("basis element 0 must be the unit")
        if check:
            self._check()

    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"GradedRing({self.label or len(self)})"

    def dense(self) -> np.ndarray:
        n = len(self)
        T = np.zeros((n, n, n))
        for (i, j), v in self.table.items():
            for k, c in v.items():
                T[i, j, k] = float(c)
        return T

    def _integral(self) -> bool:
        return all(c.denominator == 1 and abs(c) < 2**40
                   for v in self.table.values() for c in v.values())

    def _check(self) -> None:
        n = len(self)
        for i in range(n):
            if self.table.get((0, i)) != {i: 1} or self.table.get((i, 0)) != {i: 1}:
                raise RingError(f"unit fails on {self.names[i]}")
        for (i, j), v in self.table.items():
            for k in v:
                if self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    raise RingError(f"{self.names[i]}*{self.names[j]} is not homogeneous")
            sign = -1 if self.degrees[i] * self.degrees[j] % 2 else 1
            w = self.table.get((j, i), {})
            if {k: sign * c for k, c in v.items()} != w:
                raise RingError(f"graded commutativity fails for {self.names[i]}, {self.names[j]}")
        for (j, i) in self.table:
            if (i, j) not in self.table:
                raise RingError(f"graded commutativity fails for {self.names[i]}, {self.names[j]}")
        if self._integral():
            # exact in float64: small integer entries and integer sums
            T = self.dense()
            rows = T.reshape(n, n * n)
            pairs = T.reshape(n * n, n)
            for i in range(n):
                left = T[i] @ rows    # (e_i e_j) e_k, indexed [j, (k, l)]
                right = pairs @ T[i]  # e_i (e_j e_k), indexed [(j, k), l]
                if not np.array_equal(left.reshape(n, n, n), right.reshape(n, n, n)):
                    raise RingError(f"associativity fails with left factor {self.names[i]}")
        else:
            for i, j, k in itertools.product(range(n), repeat=3):
                a = self._mul_basis_elem(self._mul_basis(i, j), k)
                b = self._mul_elem_basis(i, self._mul_basis(j, k))
                if a != b:
                    raise RingError("associativity fails")

    def _mul_basis(self, i: int, j: int) -> dict:
        return dict(self.table.get((i, j), {}))

    def _mul_basis_elem(self, x: dict, k: int) -> dict:
        out: dict = {}
        for i, c in x.items():
            for m, d in self.table.get((i, k), {}).items():
                out[m] = out.get(m, 0) + c * d
        return {m: c for m, c in out.items() if c}

    def _mul_elem_basis(self, i: int, x: dict) -> dict:
        out: dict = {}
        for k, c in x.items():
            for m, d in self.table.get((i, k), {}).items():
                out[m] = out.get(m, 0) + c * d
        return {m: c for m, c in out.items() if c}

    # element constructors
    def zero(self) -> "RingElem":
        return RingElem(self, {})

    def one(self) -> "RingElem":
        return RingElem(self, {0: Fraction(1)})

    def scalar(self, c) -> "RingElem":
        return RingElem(self, {0: Fraction(c)})

    def basis(self, name: str) -> "RingElem":
        if name not in self.index:
            raise RingError(f"{name!r} is not a basis element of {self!r}")
        return RingElem(self, {self.index[name]: Fraction(1)})

    def __getitem__(self, name: str) -> "RingElem":
        return self.basis(name)

    def elem(self, coeffs: Mapping[str, object]) -> "RingElem":
        return RingElem(self, {self.index[k]: Fraction(v) for k, v in coeffs.items()})


class RingElem:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: GradedRing, coeffs: Mapping[int, Fraction]):
        self.ring = ring
        self.coeffs = {k: Fraction(v) for k, v in coeffs.items() if v}

    def _other(self, other) -> "RingElem":
        if isinstance(other, RingElem):
            if other.ring is not self.ring:
                raise RingError("elements of different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return RingElem(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return RingElem(self.ring, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RingElem(self.ring, {k: v * other for k, v in self.coeffs.items()})
        other = self._other(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        table = self.ring.table
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                for k, c in table.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return RingElem(self.ring, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        return other.ring is self.ring and other.coeffs == self.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def component(self, degree: int) -> "RingElem":
        return RingElem(self.ring, {k: v for k, v in self.coeffs.items()
                                    if self.ring.degrees[k] == degree})

    def degrees(self) -> set[int]:
        return {self.ring.degrees[k] for k in self.coeffs}

    def scalar_part(self) -> Fraction:
        return self.coeffs.get(0, Fraction(0))

    def to_json(self) -> dict:
        return {self.ring.names[k]: f"{v.numerator}/{v.denominator}"
                for k, v in sorted(self.coeffs.items())}

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, v in sorted(self.coeffs.items()):
            name = self.ring.names[k]
            if k == 0:
                parts.append(str(v))
            elif v == 1:
                parts.append(name)
            elif v == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"{v}*{name}")
        return " + ".join(parts).replace("+ -", "- ")


# --- shipped rings --------------------------------------------------------------

def _gen_name(d: int, i: int) -> str:
    return "t" if d == 1 else f"e{i + 1}"


@lru_cache(maxsize=None)
def exterior(d: int) -> GradedRing:
    """Exterior algebra on ``e1..ed`` (a single generator is called ``t``)."""
    subsets = sorted((s for r in range(d + 1) for s in itertools.combinations(range(d), r)),
                     key=lambda s: (len(s), s))
    index = {s: k for k, s in enumerate(subsets)}
    names = ["1" if not s else "".join(_gen_name(d, i) for i in s) for s in subsets]
    table = {}
    for s in subsets:
        for t in subsets:
            if set(s) & set(t):
                continue
            seq = list(s) + list(t)
            # parity of the sorting permutation
            inv = sum(1 for x, y in itertools.combinations(seq, 2) if x > y)
            table[(index[s], index[t])] = {index[tuple(sorted(seq))]: (-1) ** inv}
    gens = [index[(i,)] for i in range(d)]
    words = [[index[(i,)] for i in s] for s in subsets]
    return GradedRing(names, [len(s) for s in subsets], table, gens, words,
                      label=f"H*(Z{d if d > 1 else ''})")


@lru_cache(maxsize=None)
def h3_ring() -> GradedRing:
    names = ["1", "alpha1", "alpha2", "beta1", "beta2", "gamma"]
    degrees = [0, 1, 1, 2, 2, 3]
    one, a1, a2, b1, b2, g = range(6)
    table: dict = {}
    for i in range(6):
        table[(one, i)] = {i: 1}
        table[(i, one)] = {i: 1}
    # beta_i alpha_j = (1 - delta_ij) gamma, alpha_j beta_i equal (even degree)
    for b, a in ((b1, a2), (b2, a1)):
        table[(b, a)] = {g: 1}
        table[(a, b)] = {g: 1}
    words = [[], [a1], [a2], [b1], [b2], [b1, a2]]
    return GradedRing(names, degrees, table, [a1, a2, b1, b2], words, label="H*(H3)")


@lru_cache(maxsize=None)
def kunneth(rings: tuple) -> GradedRing:
    rings = tuple(rings)
    if len(rings) == 1:
        return rings[0]
    tuples = list(itertools.product(*[range(len(r)) for r in rings]))
    tuples.sort(key=lambda t: (sum(r.degrees[i] for r, i in zip(rings, t)), t))
    index = {t: k for k, t in enumerate(tuples)}

    def name(t):
        return "⊗".join(r.names[i] for r, i in zip(rings, t))

    names = [name(t) for t in tuples]
    names[0] = "1"
    degrees = [sum(r.degrees[i] for r, i in zip(rings, t)) for t in tuples]
    table = {}
    for s in tuples:
        for t in tuples:
            # sign (-1)^(sum_{i>j} |s_i| |t_j|)
            e = 0
            for i in range(len(rings)):
                for j in range(i):
                    e += rings[i].degrees[s[i]] * rings[j].degrees[t[j]]
            sign = -1 if e % 2 else 1
            prods = [r.table.get((a, b), {}) for r, a, b in zip(rings, s, t)]
            if any(not p for p in prods):
                continue
            out: dict = {}
            for combo in itertools.product(*[list(p.items()) for p in prods]):
                key = index[tuple(k for k, _ in combo)]
                c = Fraction(sign)
                for _, v in combo:
                    c *= v
                out[key] = out.get(key, 0) + c
            table[(index[s], index[t])] = out
    gens, words = [], [None] * len(tuples)
    placed = {}
    for f, r in enumerate(rings):
        for gidx in r.generators:
            t = tuple(gidx if q == f else 0 for q in range(len(rings)))
            placed[(f, gidx)] = index[t]
            gens.append(index[t])
    for t in tuples:
        w = []
        for f, r in enumerate(rings):
            w.extend(placed[(f, gidx)] for gidx in r.gen_words[t[f]])
        words[index[t]] = w
    return GradedRing(names, degrees, table, gens, words,
                      label=" x ".join(r.label for r in rings))


def ring_for_group(group: GroupId) -> GradedRing:
    if group.kind == G.FREE:
        return exterior(group.rank)
    if group.kind == G.HEIS:
        return h3_ring()
    return kunneth(tuple(ring_for_group(f) for f in group.factors))


def placement(group: GroupId, k: int, x: RingElem) -> RingElem:
    """Image of a factor class under the projection pullback ``pi_k^*``."""
    ring = ring_for_group(group)
    rings = [ring_for_group(f) for f in group.factors]
    if x.ring is not rings[k]:
        raise RingError("class does not live on that factor")
    out = {}
    for i, c in x.coeffs.items():
        t = tuple(i if q == k else 0 for q in range(len(rings)))
        out[_tuple_index(ring, rings, t)] = c
    return RingElem(ring, out)


def _tuple_index(ring: GradedRing, rings, t) -> int:
    name = "⊗".join(r.names[i] for r, i in zip(rings, t))
    return 0 if all(i == 0 for i in t) else ring.index[name]


def monomial(ring: GradedRing, *names: str) -> RingElem:
    out = ring.one()
    for n in names:
        out = out * ring.basis(n)
    return out


# --- pullbacks ------------------------------------------------------------------

def degree_one_class(group: GroupId, values: Sequence[int]) -> RingElem:
    """Class of the homomorphism ``group -> Z`` with the given generator values."""
    ring = ring_for_group(group)
    if group.kind == G.FREE:
        gens = [ring.basis(_gen_name(group.rank, i)) for i in range(group.rank)]
        return sum((v * g for v, g in zip(values, gens)), ring.zero())
    if group.kind == G.HEIS:
        if values[2]:
            raise RingError("a homomorphism H3 -> Z kills c")
        return values[0] * ring["alpha1"] + values[1] * ring["alpha2"]
    out = ring.zero()
    pos = 0
    for k, f in enumerate(group.factors):
        n = len(G.generators(f))
        out = out + placement(group, k, degree_one_class(f, values[pos:pos + n]))
        pos += n
    return out


def _generator_images(f: GroupHom) -> dict[int, RingElem]:
    """Ring generators of the target mapped to classes on the source."""
    tgt = ring_for_group(f.target)
    src = ring_for_group(f.source)  # noqa: F841 (built for its cache side effect)
    if f.kind == G.COMPOSE:
        maps = list(f.data)
        img = {g: RingElem(tgt, {g: 1}) for g in tgt.generators}
        for m in reversed(maps):
            img = {g: pullback_elem(m, x) for g, x in img.items()}
        return img
    if f.target.kind == G.FREE:
        src_gens = G.generators(f.source)
        cols = [G.hom_apply(f, g).coords for g in src_gens]
        return {g: degree_one_class(f.source, [c[i] for c in cols])
                for i, g in enumerate(tgt.generators)}
    if f.kind == G.PROJECTION:
        k = f.data[0]
        return {g: placement(f.source, k, RingElem(tgt, {g: 1})) for g in tgt.generators}
    if f.kind == G.ETA:
        swap = {"alpha1": "alpha2", "alpha2": "alpha1", "beta1": "beta2", "beta2": "beta1"}
        return {g: src[swap[tgt.names[g]]] for g in tgt.generators}
    raise RingError(f"no cohomology pullback implemented for {f.kind} into {f.target}")


_PULLBACK_CACHE: dict = {}


def pullback_map(f: GroupHom) -> list[RingElem]:
    """Images of every target basis element, via generator words."""
    if f in _PULLBACK_CACHE:
        return _PULLBACK_CACHE[f]
    tgt = ring_for_group(f.target)
    src = ring_for_group(f.source)
    img = _generator_images(f)
    out = []
    for w in tgt.gen_words:
        x = src.one()
        for g in w:
            x = x * img[g]
        out.append(x)
    _PULLBACK_CACHE[f] = out
    return out


def pullback_elem(f: GroupHom, x: RingElem) -> RingElem:
    if x.ring is not ring_for_group(f.target):
        raise RingError("class does not live on the target group")
    images = pullback_map(f)
    out = ring_for_group(f.source).zero()
    for k, c in x.coeffs.items():
        out = out + images[k] * c
    return out


# --- Chern character calculus ---------------------------------------------------

def exp_deg2(x: RingElem) -> RingElem:
    if x.degrees() - {2}:
        raise RingError("exp_deg2 needs a homogeneous degree-2 class")
    ring = x.ring
    out = ring.one()
    term = ring.one()
    k = 1
    while 2 * k <= ring.top_degree:
        term = term * x * Fraction(1, k)
        if term.is_zero():
            break
        out = out + term
        k += 1
    return out


def conj_sign(x: RingElem) -> RingElem:
    """``ch_k`` of the conjugate picks up ``(-1)^k`` in degree ``2k``."""
    return RingElem(x.ring, {i: (-v if x.ring.degrees[i] % 4 == 2 else v)
                             for i, v in x.coeffs.items()})


def leaf_class(leaf) -> RingElem:
    """The ring class ``c1`` of a scalar-cocycle leaf (0 for genuine representations)."""
    ring = ring_for_group(leaf.group)
    if isinstance(leaf, R.Voiculescu):
        return -ring["e1e2"]
    if isinstance(leaf, R.ESSRhoTilde):
        return ring["beta2"]
    if isinstance(leaf, R.ESSRho):
        return ring["beta1"]
    if isinstance(leaf, (R.Trivial, R.Character, R.LieExp)):
        return ring.zero()
    raise RingError(f"no registered class for {type(leaf).__name__}")


def ch_of_expr(e, ring: GradedRing | None = None) -> RingElem:
    target = ring_for_group(e.group)
    if ring is not None and ring is not target:
        raise RingError(f"expression lives on {e.group}, not on {ring!r}")
    if isinstance(e, R.Sum):
        return sum((ch_of_expr(c) for c in e.children[1:]), ch_of_expr(e.children[0]))
    if isinstance(e, R.Tensor):
        out = ch_of_expr(e.children[0])
        for c in e.children[1:]:
            out = out * ch_of_expr(c)
        return out
    if isinstance(e, R.Conj):
        return conj_sign(ch_of_expr(e.child))
    if isinstance(e, R.Amplify):
        return ch_of_expr(e.child) * e.r
    if isinstance(e, R.Pullback):
        return pullback_elem(e.hom, ch_of_expr(e.child))
    n = e.dim
    c1 = leaf_class(e)
    return exp_deg2(c1 * Fraction(1, n)) * n


def ch_components(x: RingElem) -> list[RingElem]:
    return [x.component(2 * k) for k in range(x.ring.top_degree // 2 + 1)]


def chern_from_ch(x: RingElem) -> list[RingElem]:
    """Chern classes ``[c1, ..., c_K]`` from a Chern character via Newton's identities.

    With power sums ``p_k = k! ch_k``: ``k c_k = sum_i (-1)^(i-1) c_(k-i) p_i``.
    """
    rank = x.scalar_part()
    if rank <= 0 or rank.denominator != 1:
        raise RingError(f"rank must be a positive integer, got {rank}")
    K = x.ring.top_degree // 2
    ch = ch_components(x)
    p = [None] + [ch[k] * math.factorial(k) for k in range(1, K + 1)]
    c = [x.ring.one()]
    for k in range(1, K + 1):
        acc = x.ring.zero()
        for i in range(1, k + 1):
            term = c[k - i] * p[i]
            acc = acc + (term if i % 2 else -term)
        c.append(acc * Fraction(1, k))
    return c[1:]


def ch_from_chern(rank: int, cs: Sequence[RingElem]) -> RingElem:
    """Inverse of :func:`chern_from_ch` (power sums from elementary classes)."""
    ring = cs[0].ring
    K = ring.top_degree // 2
    c = [ring.one()] + list(cs) + [ring.zero()] * (K - len(cs))
    p = [None]
    for k in range(1, K + 1):
        acc = c[k] * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            acc = acc + c[k - i] * p[i] * ((-1) ** (k - 1 - i))
        p.append(acc)
    out = ring.scalar(rank)
    for k in range(1, K + 1):
        out = out + p[k] * Fraction(1, math.factorial(k))
    return out


# --- Z^d realization planner ----------------------------------------------------

def _pair_leaf(d: int, n: int, l: int, m: int):
    """Voiculescu pulled back along ``e_m -> x, e_l -> y`` (1-based); ch = n + e_l e_m."""
    return R.Pullback(G.coordinate_projection(d, [m - 1, l - 1]), R.Voiculescu(n))


def plan_zd_monomial(S: Iterable[tuple[int, int]], d: int, n: int):
    """A representation expression with ch = prod_{(i,j) in S} e_i e_j + (3n)^|S|.

    Uses only nonnegative multiplicities.  The step from S to S + {(l, m)}
    combines ``L (x) P(S)``, ``n P(S')`` and ``(3n)^|S| conj(L)`` where ``S'``
    reverses one pair of ``S`` (flipping the sign of the product).
    """
    S = [tuple(p) for p in S]
    if n < 1:
        raise InputError("n must be positive")
    used: set = set()
    for l, m in S:
        if not (1 <= l <= d and 1 <= m <= d) or l == m:
            raise InputError(f"pair {(l, m)} is not inside 1..{d}")
        if {l, m} & used:
            raise InputError("pairs must be disjoint")
        used |= {l, m}
    return _plan(tuple(S), d, n)


def _plan(S: tuple, d: int, n: int):
    group = G.free_abelian(d)
    if not S:
        return R.Trivial(2, group)
    (l, m), rest = S[-1], S[:-1]
    leaf = _pair_leaf(d, n, l, m)
    if not rest:
        return R.Sum((leaf, R.Trivial(2 * n, group)))
    s = len(rest)
    flipped = ((rest[0][1], rest[0][0]),) + rest[1:]
    return R.Sum((
        R.Tensor((leaf, _plan(rest, d, n))),
        R.Amplify(n, _plan(flipped, d, n)),
        R.Amplify((3 * n) ** s, R.Conj(leaf)),
    ))


def multiplicities_nonnegative(e) -> bool:
    if isinstance(e, R.Amplify):
        return e.r >= 1 and multiplicities_nonnegative(e.child)
    if isinstance(e, (R.Sum, R.Tensor)):
        return all(multiplicities_nonnegative(c) for c in e.children)
    if isinstance(e, (R.Conj, R.Pullback)):
        return multiplicities_nonnegative(e.child)
    if isinstance(e, R.Trivial):
        return e.k >= 1
    return True
