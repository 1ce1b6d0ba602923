"""Numerical invariants of almost representations.

``omega(a, b) = (1/2 pi i) Tr log(rho(a) rho(b) rho(ab)^-1)`` is the local
2-cocycle; it is paired with bar 2-cycles, compared with the trace-log of a
commutator product (Hopf side) and with the winding number of
``t -> det((1-t) I + t M)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import groups as G
from . import homology as Hm
from . import matkit as M
from . import reps
from .errors import AlmostRepError, NotACycle, NumericalError
from .groups import GroupElement
from .matkit import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class PairingResult:
    raw: float
    snapped: int | None
    residual: float
    method: str

    def to_json(self) -> dict:
        return {"raw": self.raw, "snapped": self.snapped,
                "residual": self.residual, "method": self.method}


def snap(raw: float, method: str, tol: Tolerances = DEFAULT_TOL) -> PairingResult:
    k = round(raw)
    res = abs(raw - k)
    return PairingResult(float(raw), int(k) if res < tol.integer_snap else None, float(res), method)


def defect_unitary(e, a: GroupElement, b: GroupElement) -> np.ndarray:
    """``rho(a) rho(b) rho(ab)^*``."""
    return reps.evaluate(e, a) @ reps.evaluate(e, b) @ M.adjoint(reps.evaluate(e, a * b))


def omega_value(e, a: GroupElement, b: GroupElement, tol: Tolerances = DEFAULT_TOL) -> float:
    z = M.tr_log_unitary(defect_unitary(e, a, b), tol) / (2j * math.pi)
    if abs(z.imag) > 1e-9:
        raise NumericalError(f"omega({a}, {b}) has imaginary part {z.imag:.2e}")
    return float(z.real)


def omega(e, pairs: Iterable[tuple], tol: Tolerances = DEFAULT_TOL) -> Hm.Cochain:
    """The trace-log cocycle tabulated on ``pairs``."""
    table = {}
    for a, b in pairs:
        table[(a, b)] = omega_value(e, a, b, tol)
    return Hm.Cochain(e.group, 2, table=table, name="omega")


def pair_cochain_float(f: Hm.Cochain, c: Hm.Chain) -> float:
    """``sum k f(cell)`` in sorted cell order (reproducible floats)."""
    total = 0.0
    for cell, k in c.sorted_terms():
        total += float(k) * float(f(*cell))
    return total


def pair_bar(e, c: Hm.Chain, tol: Tolerances = DEFAULT_TOL, snap_result: bool = True) -> PairingResult:
    if c.group != e.group:
        raise G.GroupMismatch(f"cycle over {c.group}, representation of {e.group}")
    if c.degree != 2:
        raise NotACycle("pair_bar expects a 2-chain")
    if snap_result and not Hm.is_cycle(c):
        raise NotACycle(f"boundary is {Hm.boundary2(c)}")
    w = omega(e, c.terms.keys(), tol)
    raw = pair_cochain_float(w, c)
    if not snap_result:
        return PairingResult(raw, None, abs(raw - round(raw)), "bar")
    return snap(raw, "bar", tol)


def commutator_product(e, r: Hm.HopfWord) -> np.ndarray:
    """``prod [rho(a_i), rho(b_i)]`` with ``[X, Y] = X Y X^* Y^*``."""
    out = M.identity(e.dim)
    for wa, wb in r.pairs:
        X = reps.evaluate(e, r.evaluate(wa))
        Y = reps.evaluate(e, r.evaluate(wb))
        out = out @ (X @ Y @ M.adjoint(X) @ M.adjoint(Y))
    return out


def pair_hopf(e, r: Hm.HopfWord, tol: Tolerances = DEFAULT_TOL) -> PairingResult:
    if r.group != e.group:
        raise G.GroupMismatch(f"word over {r.group}, representation of {e.group}")
    z = M.tr_log_unitary(commutator_product(e, r), tol) / (2j * math.pi)
    return snap(float(z.real), "hopf", tol)


MAX_SAMPLES = 2 ** 20


def winding_of_det_path(Mx: np.ndarray, initial: int = 64) -> int:
    """Winding number of ``t -> det((1-t) I + t M)`` on ``[0, 1]``.

    The loop is closed because ``det M = 1``.  The determinant is evaluated as
    the product of ``1 - t + t lambda`` over the eigenvalues of ``M``; steps
    are bisected until each phase increment is below pi/2.
    """
    d1 = M.det(Mx)
    if abs(d1 - 1) > 1e-6:
        raise NumericalError(f"det of the commutator product is {d1:.6g}, not 1")
    lam = np.linalg.eigvals(Mx)

    def f(t: np.ndarray) -> np.ndarray:
        return np.prod(1 - t[:, None] + t[:, None] * lam[None, :], axis=1)

    ts = np.linspace(0.0, 1.0, initial + 1)
    vals = f(ts)
    while True:
        if np.min(np.abs(vals)) < 1e-8:
            raise NumericalError("determinant path passes within 1e-8 of zero")
        steps = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(steps) >= math.pi / 2
        if not bad.any():
            break
        if len(ts) + int(bad.sum()) > MAX_SAMPLES:
            raise NumericalError("winding sampler hit the sample cap")
        mids = (ts[:-1][bad] + ts[1:][bad]) / 2
        ts = np.sort(np.concatenate([ts, mids]))
        vals = f(ts)
    total = float(np.sum(steps)) / (2 * math.pi)
    k = round(total)
    if abs(total - k) > 1e-6:
        raise NumericalError(f"winding {total} is not an integer")
    return int(k)


def winding_det(e, r: Hm.HopfWord) -> int:
    if r.group != e.group:
        raise G.GroupMismatch(f"word over {r.group}, representation of {e.group}")
    return winding_of_det_path(commutator_product(e, r))


def valid_triple(e, a, b, c, radius: float = 0.5) -> bool:
    """All four defect unitaries used by the cocycle identity lie within ``radius`` of 1."""
    I = M.identity(e.dim)
    for x, y in ((a, b), (a * b, c), (a, b * c), (b, c)):
        if M.op_norm(defect_unitary(e, x, y) - I) > radius:
            return False
    return True


def cocycle_residual_numeric(e, triples: Iterable[tuple], tol: Tolerances = DEFAULT_TOL,
                             only_valid: bool = True) -> tuple[float, int]:
    """Max of ``|w(a,b) + w(ab,c) - w(a,bc) - w(b,c)|`` and the number of triples used."""
    worst, used = 0.0, 0
    cache: dict = {}

    def w(x, y):
        key = (x, y)
        if key not in cache:
            cache[key] = omega_value(e, x, y, tol)
        return cache[key]

    for a, b, c in triples:
        if only_valid and not valid_triple(e, a, b, c):
            continue
        r = abs(w(a, b) + w(a * b, c) - w(a, b * c) - w(b, c))
        worst = max(worst, r)
        used += 1
    return worst, used


def pairing_triangle(e, r: Hm.HopfWord, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Winding number, Hopf pairing and bar pairing of the converted cycle."""
    try:
        wn = winding_det(e, r)
    except AlmostRepError as exc:
        wn = None
        err = str(exc)
    else:
        err = None
    hopf = pair_hopf(e, r, tol)
    bar = pair_bar(e, Hm.hopf_to_bar(r), tol)
    return {"winding": wn, "hopf": hopf, "bar": bar, "error": err,
            "agree": wn is not None and wn == hopf.snapped == bar.snapped}
