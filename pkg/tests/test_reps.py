from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from almostrep import catalog as C
from almostrep import groups as G
from almostrep import homology as Hm
from almostrep import matkit as M
from almostrep import repexpr as R
from almostrep import reps
from almostrep.errors import GroupMismatch, InputError

small = st.integers(-2, 2)
h3_elem = st.tuples(small, small, small).map(lambda t: G.h3(*t))


def test_voiculescu_shift_and_commutation():
    U = reps.evaluate(R.Voiculescu(3), G.zd(1, 0))
    assert np.array_equal(U, np.roll(np.eye(3), 1, axis=0))
    for n in (3, 5, 8):
        u = reps.evaluate(R.Voiculescu(n), G.zd(1, 0))
        v = reps.evaluate(R.Voiculescu(n), G.zd(0, 1))
        assert np.allclose(u @ v, np.exp(-2j * np.pi / n) * v @ u)


def test_voiculescu_negative_powers_are_adjoints():
    e = R.Voiculescu(7)
    for x in range(1, 4):
        assert np.allclose(reps.evaluate(e, G.zd(-x, 0)), reps.evaluate(e, G.zd(x, 0)).conj().T)


def test_ess_at_c_is_diagonal():
    n = 5
    U = reps.evaluate(R.ESSRho(n), G.h3(0, 0, 1))
    assert np.allclose(U, np.diag(np.exp(2j * np.pi * np.arange(1, n + 1) / n)))


def test_ess_requires_odd():
    with pytest.raises(InputError):
        R.ESSRho(4)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_ess_index_representative_is_irrelevant(n):
    # phases at j and j + n agree when n is odd
    for x in G.box(G.H3, 2):
        for j in range(1, n + 1):
            assert reps.ess_phase(n, x.coords, j) == reps.ess_phase(n, x.coords, j + n)


def test_identity_and_unitarity():
    exprs = [R.Voiculescu(4), R.ESSRho(5), R.ESSRhoTilde(3), C.z4_phi(2), C.h3z_eta(3),
             R.LieExp(3, 0.2, 1), R.Character((0.2, 0.4))]
    for e in exprs:
        I = reps.evaluate(e, G.identity(e.group))
        assert M.op_norm(I - np.eye(e.dim)) < 1e-12
        for g in list(G.box(e.group, 1))[::5]:
            assert M.unitarity_error(reps.evaluate(e, g)) < 1e-10


def test_dims():
    v, t = R.Voiculescu(3), R.Trivial(2)
    assert R.Sum((v, t)).dim == 5
    assert R.Tensor((v, t, v)).dim == 18
    assert R.Amplify(4, v).dim == 12
    assert C.z6_phi(2).dim == 7 * 8
    assert C.h3h3_eta(3).dim == 7 * 27


def test_evaluate_group_mismatch():
    with pytest.raises(GroupMismatch):
        reps.evaluate(R.Voiculescu(3), G.h3(1, 0, 0))


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_voiculescu_defect_on_generators(n):
    rep = reps.defect(R.Voiculescu(n), reps.generating_set(G.Z2))
    assert rep.max_defect == pytest.approx(2 * math.sin(math.pi / n), abs=1e-12)


def test_trivial_defect_is_zero():
    assert reps.defect(R.Trivial(3), list(G.box(G.Z2, 2))).max_defect == 0


def test_conj_and_pullback_defects():
    S = list(G.box(G.Z2, 1))
    e = R.Voiculescu(6)
    assert abs(reps.defect(R.Conj(e), S).max_defect - reps.defect(e, S).max_defect) < 1e-12
    f = G.coordinate_projection(4, [1, 3])
    S4 = [G.zd(a, b, c, d) for a in (0, 1) for b in (-1, 0, 1) for c in (0, 1) for d in (-1, 0, 1)]
    img = sorted({f(g) for g in S4}, key=lambda g: g.coords)
    assert abs(reps.defect(R.Pullback(f, e), S4).max_defect - reps.defect(e, img).max_defect) < 1e-12


def test_defect_report_outputs():
    rep = reps.defect(R.Voiculescu(5), reps.generating_set(G.Z2))
    assert rep.to_csv().splitlines()[0] == "a,b,defect"
    assert len(rep.to_csv().splitlines()) == 17
    js = rep.to_json()
    assert js["max_defect"] == rep.max_defect and len(js["argmax"]) == 2
    with pytest.raises(InputError):
        reps.defect(R.Voiculescu(5), [])


@pytest.mark.parametrize("n", [3, 5, 9])
def test_ess_projective_phase_is_beta1_over_n(n):
    box = list(G.box(G.H3, 2))[::3]
    pairs = [(a, b) for a in box for b in box]
    for (a, b), res in zip(pairs, reps.projectivity_check(R.ESSRho(n), pairs)):
        assert res.scalar
        want = (Hm.beta1_value(a.coords, b.coords) / n) % 1
        got = res.phase % 1
        assert min(abs(got - want), 1 - abs(got - want)) < 1e-9


def test_projectivity_examples():
    a, b = G.zd(1, 0), G.zd(0, 1)
    triv = reps.projectivity_check(R.Trivial(3), [(a, b), (b, a)])
    assert all(r.scalar and r.phase == 0 for r in triv)
    mixed = reps.projectivity_check(R.Sum((R.Voiculescu(3), R.Trivial(3))), [(a, b), (b, a)])
    assert [r.scalar for r in mixed] == [True, False]


@settings(max_examples=30)
@given(h3_elem, h3_elem)
def test_ess_tilde_is_pullback_along_eta(x, y):
    n = 5
    lhs = reps.evaluate(R.ESSRhoTilde(n), x)
    rhs = reps.evaluate(R.Pullback(G.eta_auto(), R.ESSRho(n)), x)
    assert np.allclose(lhs, rhs)


def test_json_roundtrip():
    for e in (C.z4_phi(2), C.h3h3_eta(3), R.LieExp(2, 0.1, 4), R.Amplify(2, R.Character((1.0,)))):
        assert R.from_json(R.to_json(e)) == e
