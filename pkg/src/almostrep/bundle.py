"""Almost flat bundles over the 2-torus from almost representations of Z^2.

The torus R^2/Z^2 is covered by products of arcs.  Each arc has a fixed lift
to R.  The Mishchenko bundle is the balanced product in which
``(x + g, v) ~ (x, g v)``, so on an overlap the transition from chart j to
chart i is the deck translation ``s_ij = L_j - L_i`` between the lifts.  Pushing the Mishchenko projection
``sum chi_i chi_j s_ij (x) e_ij`` through ``rho`` gives the almost projection

    h(x) = sum_ij chi_i(x) chi_j(x) rho(s_ij(x)) (x) e_ij

laid out as an m x m block matrix (chart index outer).  Its spectral
projection defines a vector bundle whose first Chern number is computed from
link determinants of orthonormal frames on a periodic grid.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import groups as G
from . import matkit as M
from . import reps
from .errors import GroupMismatch, HypothesisViolation, InputError, SingularError, SpectralGapError
from .matkit import DEFAULT_TOL, Tolerances

A1_SLACK = 1e-12


@dataclass(frozen=True)
class TorusCover:
    """Product cover of the torus by ``arcs x arcs`` charts.

    Arc ``k`` (0-based) of a circle is ``(k/arcs - margin, (k+1)/arcs + margin)``
    mod 1, lifted to exactly that interval of R.  With three arcs every
    pairwise intersection is connected; with two arcs the two intersections
    are disconnected and transitions are constant per component.
    """

    arcs: int = 3
    margin: float = 0.1

    def __post_init__(self):
        if self.arcs < 2:
            raise InputError("need at least two arcs per circle")
        if not 0 < self.margin < 0.5 / self.arcs + 0.25:
            raise InputError("margin out of range")

    @property
    def m(self) -> int:
        return self.arcs * self.arcs

    def chart_label(self, i: int) -> tuple[int, int]:
        return divmod(i, self.arcs)

    # circle pieces, vectorised over t in [0, 1)
    def circle_bumps(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float) % 1.0
        a = self.arcs
        raw = np.empty((a, t.size))
        for k in range(a):
            lo, hi = k / a, (k + 1) / a
            # circular distance from t to the core [lo, hi]
            d = np.min([np.maximum.reduce([lo - (t + s), np.zeros_like(t), (t + s) - hi])
                        for s in (-1.0, 0.0, 1.0)], axis=0)
            raw[k] = np.where(d < self.margin, np.cos(0.5 * math.pi * d / self.margin), 0.0)
        return raw / np.sqrt(np.sum(raw ** 2, axis=0))

    def circle_offsets(self, t: np.ndarray) -> np.ndarray:
        """Integer ``j`` with ``t + j`` in the lift of each arc (valid where the bump is positive)."""
        t = np.asarray(t, dtype=float) % 1.0
        a = self.arcs
        out = np.empty((a, t.size), dtype=np.int64)
        for k in range(a):
            lo = k / a - self.margin
            out[k] = np.floor(lo - t).astype(np.int64) + 1
        return out

    def charts_at(self, x: float, y: float) -> tuple[np.ndarray, np.ndarray]:
        """Bumps ``chi`` (length m) and lift offsets (m x 2) at one point."""
        bx, by = self.circle_bumps(np.array([x]))[:, 0], self.circle_bumps(np.array([y]))[:, 0]
        ox, oy = self.circle_offsets(np.array([x]))[:, 0], self.circle_offsets(np.array([y]))[:, 0]
        chi = np.outer(bx, by).ravel()
        offs = np.stack([np.repeat(ox, self.arcs), np.tile(oy, self.arcs)], axis=1)
        return chi, offs


def transitions(offs: np.ndarray, i: int, j: int) -> tuple[int, int]:
    """``s_ij = L_j - L_i`` from the lift offsets of charts i and j."""
    s = offs[j] - offs[i]
    return int(s[0]), int(s[1])


def _check_group(expr) -> None:
    if expr.group != G.Z2:
        raise GroupMismatch(f"bundles are built from representations of Z2, not {expr.group}")


def v_block(expr, offs: np.ndarray, i: int, j: int) -> np.ndarray:
    """``rho(s_ij)`` for ``i <= j`` and ``rho(s_ji)^*`` below the diagonal, so ``v_ji = v_ij^*``."""
    if i <= j:
        return reps.evaluate(expr, G.zd(*transitions(offs, i, j)))
    return M.adjoint(reps.evaluate(expr, G.zd(*transitions(offs, j, i))))


def h_at(expr, cover: TorusCover, x: float, y: float) -> np.ndarray:
    chi, offs = cover.charts_at(x, y)
    d = expr.dim
    m = cover.m
    H = np.zeros((m * d, m * d), dtype=complex)
    live = np.nonzero(chi > 0)[0]
    for i in live:
        for j in live:
            H[i * d:(i + 1) * d, j * d:(j + 1) * d] = chi[i] * chi[j] * v_block(expr, offs, i, j)
    return H


def build_h_row(expr, cover: TorusCover, xs: float, ys: np.ndarray) -> np.ndarray:
    """``h`` at the points ``(xs, y)`` for each ``y`` in ``ys``; shape ``(len(ys), md, md)``."""
    _check_group(expr)
    d, m, a = expr.dim, cover.m, cover.arcs
    bx = cover.circle_bumps(np.array([xs]))[:, 0]
    ox = cover.circle_offsets(np.array([xs]))[:, 0]
    by = cover.circle_bumps(ys)          # (a, B)
    oy = cover.circle_offsets(ys)        # (a, B)
    B = len(ys)
    chi = (bx[:, None, None] * by[None, :, :]).reshape(m, B)
    offx = np.repeat(ox, a)
    offy = np.repeat(oy[None, :, :], a, axis=0).reshape(m, B)
    H = np.zeros((B, m * d, m * d), dtype=complex)
    # upper blocks from rho(s_ij); the lower ones are their adjoints
    for i in range(m):
        for j in range(i, m):
            w = chi[i] * chi[j]
            live = w > 0
            if not live.any():
                continue
            sx = int(offx[j] - offx[i])
            sy_all = offy[j] - offy[i]
            for sy in np.unique(sy_all[live]):
                sel = live & (sy_all == sy)
                R = reps.evaluate(expr, G.zd(sx, int(sy)))
                H[sel, i * d:(i + 1) * d, j * d:(j + 1) * d] = w[sel, None, None] * R
    mask = np.kron(np.tril(np.ones((m, m)), -1), np.ones((d, d))).astype(bool)
    H[:, mask] = np.conj(np.swapaxes(H, 1, 2))[:, mask]
    return H


@dataclass(frozen=True)
class HReport:
    grid: int
    size: int
    max_h2_minus_h: float
    max_hermitian_error: float
    m2_delta: float

    def to_json(self) -> dict:
        return dict(vars(self))


def build_h(expr, cover: TorusCover, grid: int, defect_limit: float = 2 / 9) -> HReport:
    """Sample ``h`` on the grid and report ``max ||h^2 - h||`` against ``m^2 delta``."""
    _check_group(expr)
    ys = np.arange(grid) / grid
    worst = herm = 0.0
    for i in range(grid):
        H = build_h_row(expr, cover, i / grid, ys)
        herm = max(herm, float(np.abs(H - np.conj(np.swapaxes(H, 1, 2))).max()))
        worst = max(worst, float(M.op_norm_batch(H @ H - H).max()))
    if worst >= defect_limit:
        raise SpectralGapError(f"||h^2 - h|| = {worst:.3f} >= {defect_limit:.4g}")
    return HReport(grid, cover.m * expr.dim, worst, herm, h_defect_bound(expr, cover))


@dataclass
class ProjField:
    grid: int
    rank: int
    dim: int
    m: int
    defect: np.ndarray          # ||h^2 - h|| per grid point
    dist: np.ndarray            # ||p - h|| per grid point
    frames: np.ndarray = field(repr=False)  # (N, N, m*dim, rank)
    min_gap: float = 0.0

    @property
    def max_defect(self) -> float:
        return float(self.defect.max())

    def a1_holds(self) -> bool:
        return bool(np.all(self.dist <= 1.5 * self.defect + A1_SLACK))

    def summary(self) -> dict:
        return {"grid": self.grid, "rank": self.rank, "charts": self.m,
                "max_h2_minus_h": self.max_defect,
                "max_p_minus_h": float(self.dist.max()),
                "bound_a1_holds": self.a1_holds(),
                "min_gap_at_half": self.min_gap}


def project_field(expr, cover: TorusCover, grid: int, tol: Tolerances = DEFAULT_TOL,
                  defect_limit: float = 2 / 9) -> ProjField:
    """Spectral projections of ``h`` on the ``grid x grid`` points ``(i/N, j/N)``.

    ``defect_limit`` caps ``||h^2 - h||``; values up to 1/4 still leave a
    spectral gap at 1/2, but the ``||p - h|| < 3/2 ||h^2 - h||`` estimate is
    only guaranteed below 2/9.
    """
    _check_group(expr)
    if not 0 < defect_limit <= 0.25:
        raise InputError("defect_limit must lie in (0, 1/4]")
    N = grid
    D = cover.m * expr.dim
    rank = expr.dim
    ys = np.arange(N) / N
    frames = np.empty((N, N, D, rank), dtype=complex)
    defect = np.empty((N, N))
    dist = np.empty((N, N))
    min_gap = np.inf
    for i in range(N):
        H = build_h_row(expr, cover, i / N, ys)
        w, V = np.linalg.eigh(H)
        eps = np.max(np.abs(w * w - w), axis=1)
        if eps.max() >= defect_limit:
            j = int(np.argmax(eps))
            raise SpectralGapError(f"||h^2 - h|| = {eps[j]:.3f} >= {defect_limit:.4g} "
                                   f"at grid point ({i}, {j})")
        gap = np.min(np.abs(w - 0.5), axis=1)
        if gap.min() < tol.spectral_gap:
            j = int(np.argmin(gap))
            raise SpectralGapError(f"eigenvalue within {gap[j]:.2e} of 1/2 at grid point ({i}, {j})")
        min_gap = min(min_gap, float(gap.min()))
        ranks = np.sum(w > 0.5, axis=1)
        if np.any(ranks != rank):
            j = int(np.argmax(ranks != rank))
            raise SpectralGapError(f"rank {ranks[j]} instead of {rank} at grid point ({i}, {j})")
        F = V[:, :, D - rank:]
        gram = np.conj(np.swapaxes(F, 1, 2)) @ F - np.eye(rank)
        if np.abs(gram).max() > 1e-10:
            raise SpectralGapError(f"frame at row {i} is not orthonormal")
        P = F @ np.conj(np.swapaxes(F, 1, 2))
        frames[i] = F
        defect[i] = eps
        dist[i] = np.max(np.abs(np.linalg.eigvalsh(P - H)), axis=1)
    return ProjField(N, rank, expr.dim, cover.m, defect, dist, frames, float(min_gap))


def _links(frames: np.ndarray, axis: int) -> np.ndarray:
    nxt = np.roll(frames, -1, axis=axis)
    overlap = np.einsum("ijar,ijas->ijrs", frames.conj(), nxt)
    return np.linalg.det(overlap)


def plaquette_phases(field_: ProjField) -> np.ndarray:
    """Per-plaquette curvature ``arg(U_x(n) U_y(n+x) / (U_x(n+y) U_y(n)))``."""
    Ux = _links(field_.frames, 0)
    Uy = _links(field_.frames, 1)
    small = min(np.abs(Ux).min(), np.abs(Uy).min())
    if small < 1e-8:
        raise SingularError(f"frame overlap determinant {small:.2e}; refine the grid")
    plaq = Ux * np.roll(Uy, -1, axis=0) / (np.roll(Ux, -1, axis=1) * Uy)
    return np.angle(plaq)


def chern_number(field_: ProjField) -> int:
    """``(1/2 pi i) int Tr(p dp ^ dp)``, i.e. ``(1/2 pi) * sum of plaquette phases``.

    This is the operator-algebra normalisation; it is the negative of
    ``(i/2 pi) Tr F`` (under which the tautological line on CP^1 has degree -1).
    """
    total = float(np.sum(plaquette_phases(field_))) / (2 * math.pi)
    k = round(total)
    if abs(total - k) > 1e-6:
        raise SingularError(f"plaquette sum {total} is not an integer; refine the grid")
    return int(k)


def curvature_csv(field_: ProjField) -> str:
    F = plaquette_phases(field_)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "phase"])
    N = field_.grid
    for i in range(N):
        for j in range(N):
            w.writerow([i, j, f"{F[i, j]:.17g}"])
    return buf.getvalue()


def bundle_chern(expr, grid: int = 48, cover: TorusCover | None = None,
                 tol: Tolerances = DEFAULT_TOL, defect_limit: float = 2 / 9) -> tuple[int, ProjField]:
    cover = cover or TorusCover()
    f = project_field(expr, cover, grid, tol, defect_limit)
    return chern_number(f), f


def chern_stable(expr, grid: int = 48, cover: TorusCover | None = None,
                 tol: Tolerances = DEFAULT_TOL, defect_limit: float = 2 / 9,
                 max_grid: int = 384) -> tuple[int, list[tuple[int, int]]]:
    """Chern number once two consecutive grid doublings agree."""
    history: list[tuple[int, int]] = []
    N = grid
    while N <= max_grid:
        try:
            c, _ = bundle_chern(expr, N, cover, tol, defect_limit)
        except SingularError:
            c = None
        if c is not None:
            history.append((N, c))
            if len(history) >= 2 and history[-2][1] == c:
                return c, history
        N *= 2
    raise SingularError(f"Chern number not stable up to grid {max_grid}: {history}")


def h_defect_bound(expr, cover: TorusCover) -> float:
    """``m^2 delta`` with ``delta`` the defect of ``rho`` on the transitions (and their sums)."""
    S = [G.zd(x, y) for x in (-1, 0, 1) for y in (-1, 0, 1)]
    return cover.m ** 2 * reps.defect(expr, S).max_defect


# --- near-cocycle correction ----------------------------------------------------

@dataclass
class NearCocycleReport:
    m: int
    points: int
    delta: float
    hypothesis: float
    max_u_minus_v: float
    bound: float
    cocycle_residual: float
    max_p_minus_h: float
    max_h2_minus_h: float
    max_u_minus_w: float
    max_isometry_error: float

    def to_json(self) -> dict:
        return dict(vars(self))

    @property
    def within_bound(self) -> bool:
        return self.max_u_minus_v < self.bound


def near_cocycle(expr, cover: TorusCover, grid: int = 24, tol: Tolerances = DEFAULT_TOL,
                 enforce: bool = True) -> NearCocycleReport:
    """Correct ``v_ij = rho(s_ij)`` to an exact cocycle ``u_ij = u_i^* u_j`` pointwise.

    ``v_i = sum_r chi_r v_ri (x) e_r``, ``w_i = p v_i``, ``u_i = w_i (w_i^* w_i)^(-1/2)``.
    """
    _check_group(expr)
    d, m = expr.dim, cover.m
    I = M.identity(d)
    pts = [(i / grid, j / grid) for i in range(grid) for j in range(grid)]

    delta = 0.0
    for x, y in pts:
        chi, offs = cover.charts_at(x, y)
        live = np.nonzero(chi > 0)[0]
        for i in live:
            for j in live:
                vij = v_block(expr, offs, i, j)
                for k in live:
                    delta = max(delta, M.op_norm(vij @ v_block(expr, offs, j, k)
                                                 - v_block(expr, offs, i, k)))
    hyp = 1 / (40 * m * m)
    if enforce and not delta < hyp:
        raise HypothesisViolation(f"delta = {delta:.3e} is not below 1/(40 m^2) = {hyp:.3e}")

    max_uv = max_res = max_ph = max_h2 = max_uw = max_iso = 0.0
    for x, y in pts:
        chi, offs = cover.charts_at(x, y)
        live = np.nonzero(chi > 0)[0]
        H = h_at(expr, cover, x, y)
        P = M.herm_spectral_projection(H, tol)
        max_h2 = max(max_h2, M.op_norm(H @ H - H))
        max_ph = max(max_ph, M.op_norm(P - H))
        U = {}
        for i in live:
            Vi = np.zeros((m * d, d), dtype=complex)
            for r in live:
                Vi[r * d:(r + 1) * d] = chi[r] * v_block(expr, offs, r, i)
            Wi = P @ Vi
            Ui = M.polar_isometry(Wi)
            max_uw = max(max_uw, M.op_norm(Ui - Wi))
            max_iso = max(max_iso, M.op_norm(M.adjoint(Ui) @ Ui - I))
            U[i] = Ui
        uij = {(i, j): M.adjoint(U[i]) @ U[j] for i in live for j in live}
        for i in live:
            for j in live:
                max_uv = max(max_uv, M.op_norm(uij[i, j] - v_block(expr, offs, i, j)))
                for k in live:
                    max_res = max(max_res, M.op_norm(uij[i, j] @ uij[j, k] - uij[i, k]))
    return NearCocycleReport(m=m, points=len(pts), delta=delta, hypothesis=hyp,
                             max_u_minus_v=max_uv, bound=66 * m * m * delta,
                             cocycle_residual=max_res, max_p_minus_h=max_ph,
                             max_h2_minus_h=max_h2, max_u_minus_w=max_uw,
                             max_isometry_error=max_iso)
