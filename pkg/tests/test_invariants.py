from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from almostrep import catalog as C
from almostrep import groups as G
from almostrep import homology as Hm
from almostrep import invariants as I
from almostrep import matkit as M
from almostrep import repexpr as R
from almostrep.errors import GroupMismatch, NotACycle, NumericalError, SupportError


def test_voiculescu_omega_values():
    x, y = G.zd(1, 0), G.zd(0, 1)
    for n in (3, 5, 11):
        e = R.Voiculescu(n)
        assert I.omega_value(e, y, x) == pytest.approx(1, abs=1e-12)
        assert I.omega_value(e, x, y) == pytest.approx(0, abs=1e-12)


def test_trivial_omega_zero():
    e = R.Trivial(3)
    S = list(G.box(G.Z2, 1))
    w = I.omega(e, [(a, b) for a in S for b in S])
    assert all(v == 0 for v in w.table.values())


def test_omega_support_is_declared():
    w = I.omega(R.Voiculescu(5), [(G.zd(1, 0), G.zd(0, 1))])
    with pytest.raises(SupportError):
        w(G.zd(0, 1), G.zd(1, 0))


def test_omega_equals_beta1_inside_the_half_window():
    # omega is the principal log, so it equals beta1 when |beta1| < n/2 and agrees mod n always
    box = list(G.box(G.H3, 2))
    for n in (5, 7, 9):
        e = R.ESSRho(n)
        for a in box[::4]:
            for b in box[::3]:
                w = I.omega_value(e, a, b)
                beta = int(Hm.beta1_value(a.coords, b.coords))
                assert abs(w - round(w)) < 1e-9
                assert (round(w) - beta) % n == 0
                if abs(beta) < n / 2:
                    assert abs(w - beta) < 1e-9


@pytest.mark.parametrize("n", [3, 4, 7, 20])
def test_voiculescu_torus_pairing(n):
    res = I.pair_bar(R.Voiculescu(n), C.torus_cycle())
    assert res.snapped == -1 and res.residual < 1e-9
    assert I.pair_bar(R.Conj(R.Voiculescu(n)), C.torus_cycle()).snapped == 1


@pytest.mark.parametrize("n", [3, 5, 7, 19])
def test_ess_pairings_with_b1_b2(n):
    fx = Hm.h3_fixtures()
    assert I.pair_bar(R.ESSRho(n), fx.B1).snapped == 1
    assert I.pair_bar(R.ESSRho(n), fx.B2).snapped == 0
    assert I.pair_bar(R.ESSRhoTilde(n), fx.B1).snapped == 0
    assert I.pair_bar(R.ESSRhoTilde(n), fx.B2).snapped == 1


def test_pair_bar_rejects_non_cycles_unless_unsnapped():
    c = Hm.Chain.cell(G.zd(1, 0), G.zd(0, 1))
    with pytest.raises(NotACycle):
        I.pair_bar(R.Voiculescu(5), c)
    res = I.pair_bar(R.Voiculescu(5), c, snap_result=False)
    assert res.snapped is None
    with pytest.raises(GroupMismatch):
        I.pair_bar(R.ESSRho(5), C.torus_cycle())


def test_homologous_cycles_pair_equally():
    e = R.Voiculescu(9)
    x, y = G.zd(1, 0), G.zd(0, 1)
    base = I.pair_bar(e, C.torus_cycle()).raw
    for a, b, c in [(x, y, x), (y, x, G.zd(1, 1)), (x, x, y)]:
        shifted = C.torus_cycle() + Hm.boundary3(Hm.Chain.cell(a, b, c))
        assert abs(I.pair_bar(e, shifted).raw - base) < 1e-8


def test_pairing_additive_over_sums():
    a, b = R.Voiculescu(6), R.Conj(R.Voiculescu(9))
    c = C.torus_cycle()
    s = I.pair_bar(R.Sum((a, b, a)), c).raw
    assert abs(s - (2 * I.pair_bar(a, c).raw + I.pair_bar(b, c).raw)) < 1e-8


def test_hopf_examples():
    e = R.Voiculescu(8)
    assert I.pair_hopf(e, C.hopf_word(G.Z2, "")).snapped == 0
    assert I.pair_hopf(e, C.hopf_word(G.Z2, "[x,y]")).snapped == -1
    assert I.winding_det(e, C.hopf_word(G.Z2, "[x,y]")) == -1
    assert I.winding_det(e, C.hopf_word(G.Z2, "[x,y][y,x]")) == 0
    assert I.winding_det(R.Trivial(3), C.hopf_word(G.Z2, "[x,y]")) == 0


@pytest.mark.parametrize("word,value", list(zip(C.H3_WORDS, (1, 0, -1, 0))))
@pytest.mark.parametrize("n", [3, 5, 19])
def test_h3_triangle(word, value, n):
    tri = I.pairing_triangle(R.ESSRho(n), C.hopf_word(G.H3, word))
    assert tri["agree"], tri
    assert tri["winding"] == value
    assert abs(tri["hopf"].raw - tri["bar"].raw) < 1e-8


def test_winding_rejects_non_unimodular():
    with pytest.raises(NumericalError):
        I.winding_of_det_path(np.diag([1.0, 2.0]).astype(complex))
    with pytest.raises(NumericalError):
        I.winding_of_det_path(-np.eye(2, dtype=complex))  # path passes through 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_winding_of_diagonal_unitaries(seed, n):
    # each factor 1 - t + t exp(i theta) sweeps exactly the principal angle theta
    rng = np.random.default_rng(seed)
    th = rng.uniform(-np.pi + 0.05, np.pi - 0.05, size=n)
    th[-1] = -np.sum(th[:-1])
    th[-1] = (th[-1] + np.pi) % (2 * np.pi) - np.pi
    D = np.diag(np.exp(1j * th))
    if abs(np.linalg.det(D) - 1) > 1e-9 or np.min(np.abs(np.abs(th) - np.pi)) < 1e-3:
        return
    wn = I.winding_of_det_path(D)
    assert wn == round(np.sum(th) / (2 * np.pi))
    U = M.random_unitary(n, rng)
    assert I.winding_of_det_path(U @ D @ U.conj().T) == wn


def test_cocycle_residuals():
    x, y = G.zd(1, 0), G.zd(0, 1)
    S = [x, y, G.inv(x), G.inv(y), x * y]
    triples = [(a, b, c) for a in S for b in S for c in S]
    worst, used = I.cocycle_residual_numeric(R.Voiculescu(9), triples)
    assert used > 0 and worst < 1e-9
    box = list(G.box(G.H3, 1))
    worst, used = I.cocycle_residual_numeric(
        R.ESSRho(7), [(a, b, c) for a in box[::3] for b in box[::4] for c in box[::5]])
    assert used > 0 and worst < 1e-9
    worst, _ = I.cocycle_residual_numeric(R.Trivial(2), triples)
    assert worst == 0


def test_pairing_json():
    js = I.pair_bar(R.Voiculescu(5), C.torus_cycle()).to_json()
    assert set(js) == {"raw", "snapped", "residual", "method"}
