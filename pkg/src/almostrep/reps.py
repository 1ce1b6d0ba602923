"""Evaluate representation expressions to unitary matrices and measure defects."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as sla

from . import groups as G
from . import matkit as M
from . import repexpr as R
from .errors import GroupMismatch, InputError
from .groups import GroupElement
from .parallel import pmap


def ess_phase(n: int, x: Sequence[int], j: int) -> int:
    """Integer numerator (mod n) of the phase at basis index ``j``: ``x3 j + x2 j(j-1)/2``."""
    return (x[2] * j + x[1] * (j * (j - 1) // 2)) % n


def _ess_matrix(n: int, x: Sequence[int]) -> np.ndarray:
    U = np.zeros((n, n), dtype=complex)
    for j in range(1, n + 1):
        row = (j - 1 + x[0]) % n
        U[row, j - 1] = np.exp(2j * np.pi * ess_phase(n, x, j) / n)
    return U


def _voiculescu(n: int, x: int, y: int) -> np.ndarray:
    # u e_j = e_{j+1} cyclically; v = diag(exp(2 pi i j / n)), j = 1..n
    j = np.arange(1, n + 1)
    v_y = np.exp(2j * np.pi * ((j * y) % n) / n)
    u_x = np.roll(np.eye(n, dtype=complex), x, axis=0)
    return u_x * v_y[None, :]


@lru_cache(maxsize=64)
def _lie_generators(dim: int, scale: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    return M.random_hermitian(dim, rng, scale), M.random_hermitian(dim, rng, scale)


def _eval(e, g: GroupElement) -> np.ndarray:
    if isinstance(e, R.Voiculescu):
        x, y = g.coords
        return _voiculescu(e.n, x, y)
    if isinstance(e, R.ESSRhoTilde):
        return _ess_matrix(e.n, G.hom_apply(G.eta_auto(), g).coords)
    if isinstance(e, R.ESSRho):
        return _ess_matrix(e.n, g.coords)
    if isinstance(e, R.Trivial):
        return M.identity(e.k)
    if isinstance(e, R.Character):
        return np.array([[np.exp(1j * float(np.dot(e.thetas, g.coords)))]])
    if isinstance(e, R.LieExp):
        H1, H2 = _lie_generators(e.dim_, e.scale, e.seed)
        x, y = g.coords
        return sla.expm(1j * (x * H1 + y * H2))
    if isinstance(e, R.Sum):
        return M.dirsum(*[evaluate(c, g) for c in e.children])
    if isinstance(e, R.Tensor):
        return M.kron(*[evaluate(c, g) for c in e.children])
    if isinstance(e, R.Conj):
        return evaluate(e.child, g).conj()
    if isinstance(e, R.Pullback):
        return evaluate(e.child, G.hom_apply(e.hom, g))
    if isinstance(e, R.Amplify):
        return np.kron(M.identity(e.r), evaluate(e.child, g))
    raise InputError(f"cannot evaluate {e!r}")


@lru_cache(maxsize=8192)
def _cached(e, g: GroupElement) -> np.ndarray:
    U = _eval(e, g)
    U.setflags(write=False)
    return U


def evaluate(e, g: GroupElement) -> np.ndarray:
    """Unitary matrix of ``e`` at ``g`` (read-only, cached)."""
    if g.group != e.group:
        raise GroupMismatch(f"{type(e).__name__} lives on {e.group}, got an element of {g.group}")
    return _cached(e, g)


def clear_cache() -> None:
    _cached.cache_clear()


# --- defects --------------------------------------------------------------------

@dataclass
class DefectReport:
    description: str
    max_defect: float
    argmax: tuple | None
    table: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "defect"])
        for a, b, d in self.table:
            w.writerow([G.format_element(a), G.format_element(b), f"{d:.17g}"])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"set": self.description, "max_defect": self.max_defect,
                "argmax": None if self.argmax is None
                else [G.format_element(g) for g in self.argmax]}


def _key(pair) -> tuple:
    return tuple(G.format_element(g) for g in pair)


def pair_defect(e, a: GroupElement, b: GroupElement) -> float:
    return M.op_norm(evaluate(e, a * b) - evaluate(e, a) @ evaluate(e, b))


def defect(e, S: Iterable[GroupElement], description: str = "") -> DefectReport:
    S = list(S)
    if not S:
        raise InputError("defect needs a nonempty set")
    pairs = sorted(((a, b) for a in S for b in S), key=_key)
    values = pmap(lambda p: pair_defect(e, *p), pairs)
    best, arg = -1.0, None
    for p, d in zip(pairs, values):
        if d > best:
            best, arg = d, p
    return DefectReport(description or f"{len(S)} elements", best, arg,
                        [(a, b, d) for (a, b), d in zip(pairs, values)])


def generating_set(group: G.GroupId) -> list[GroupElement]:
    """Generators and their inverses."""
    gens = G.generators(group)
    return gens + [G.inv(g) for g in gens]


# --- projectivity ----------------------------------------------------------------

@dataclass(frozen=True)
class PhaseResult:
    a: GroupElement
    b: GroupElement
    scalar: bool
    phase: float | None  # in (-1/2, 1/2], units of full turns


def projectivity_check(e, pairs: Iterable[tuple], atol: float = 1e-8) -> list[PhaseResult]:
    out = []
    for a, b in pairs:
        W = evaluate(e, a) @ evaluate(e, b) @ M.adjoint(evaluate(e, a * b))
        lam = np.trace(W) / W.shape[0]
        scalar = (abs(abs(lam) - 1) <= atol
                  and M.op_norm(W - lam * M.identity(W.shape[0])) <= atol)
        phase = None
        if scalar:
            phase = float(np.angle(lam) / (2 * np.pi))
            if phase <= -0.5:
                phase += 1.0
        out.append(PhaseResult(a, b, scalar, phase))
    return out
