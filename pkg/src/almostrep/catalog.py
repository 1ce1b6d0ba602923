"""Named constructions: the Z^4, Z^6, H3xZ and H3xH3 examples, standard words and cycles."""
from __future__ import annotations

from . import groups as G
from . import homology as Hm
from . import repexpr as R
from .errors import InputError
from .groups import GroupId


def z4_phi(n: int):
    """``(a (x) b) + (1_n (x) conj a) + (1_n (x) conj b)`` on Z^4, dimension 3n^2."""
    Z4 = G.free_abelian(4)
    a = R.Pullback(G.coordinate_projection(4, [0, 1]), R.Voiculescu(n))
    b = R.Pullback(G.coordinate_projection(4, [2, 3]), R.Voiculescu(n))
    one = R.Trivial(n, Z4)
    return R.Sum((R.Tensor((a, b)),
                  R.Tensor((one, R.Conj(a))),
                  R.Tensor((one, R.Conj(b)))))


def z6_phi(n: int):
    """Seven-term construction on Z^6, dimension 7n^3."""
    Z6 = G.free_abelian(6)
    a, b, c = (R.Pullback(G.coordinate_projection(6, [2 * k, 2 * k + 1]), R.Voiculescu(n))
               for k in range(3))
    one, one2 = R.Trivial(n, Z6), R.Trivial(n * n, Z6)
    return R.Sum((
        R.Tensor((a, b, c)),
        R.Tensor((one, R.Conj(a), b)),
        R.Tensor((one, R.Conj(b), c)),
        R.Tensor((one, R.Conj(c), a)),
        R.Tensor((one2, R.Conj(a))),
        R.Tensor((one2, R.Conj(b))),
        R.Tensor((one2, R.Conj(c))),
    ))


def h3z_eta(n: int):
    """``(rho pi1)(x)conj(phi psi) + conj(rho pi1)(x)1 + (phi psi)(x)1`` on H3 x Z."""
    grp = G.product(G.H3, G.Z)
    p1, p2 = G.projection(grp, 0), G.projection(grp, 1)
    psi = G.tuple_hom([G.compose(p1, G.alpha(2)), p2])
    rho = R.Pullback(p1, R.ESSRho(n))
    phi = R.Pullback(psi, R.Voiculescu(n))
    one = R.Trivial(n, grp)
    return R.Sum((R.Tensor((rho, R.Conj(phi))),
                  R.Tensor((R.Conj(rho), one)),
                  R.Tensor((phi, one))))


def h3h3_eta(n: int):
    """Seven-term construction on H3 x H3, dimension 7n^3."""
    grp = G.product(G.H3, G.H3)
    p1, p2 = G.projection(grp, 0), G.projection(grp, 1)
    psi = G.tuple_hom([G.compose(p2, G.alpha(2)), G.compose(p1, G.alpha(2))])
    r1 = R.Pullback(p1, R.ESSRho(n))
    r2 = R.Pullback(p2, R.ESSRho(n))
    phi = R.Pullback(psi, R.Voiculescu(n))
    one, one2 = R.Trivial(n, grp), R.Trivial(n * n, grp)
    return R.Sum((
        R.Tensor((r1, phi, r2)),
        R.Tensor((R.Conj(r1), phi, one)),
        R.Tensor((R.Conj(phi), r2, one)),
        R.Tensor((r1, R.Conj(r2), one)),
        R.Tensor((R.Conj(r1), one2)),
        R.Tensor((R.Conj(phi), one2)),
        R.Tensor((R.Conj(r2), one2)),
    ))


def make_rep(name: str, n: int | None = None):
    """Expression by CLI name."""
    needs_n = {"voiculescu", "ess-rho", "ess-rho-tilde", "trivial", "z4-phi", "z6-phi",
               "h3z-eta", "h3h3-eta"}
    if name in needs_n and n is None:
        raise InputError(f"--rep {name} needs --n")
    if name == "voiculescu":
        return R.Voiculescu(n)
    if name == "ess-rho":
        return R.ESSRho(n)
    if name == "ess-rho-tilde":
        return R.ESSRhoTilde(n)
    if name == "trivial":
        return R.Trivial(n)
    if name == "conj-voiculescu":
        return R.Conj(R.Voiculescu(n))
    if name == "z4-phi":
        return z4_phi(n)
    if name == "z6-phi":
        return z6_phi(n)
    if name == "h3z-eta":
        return h3z_eta(n)
    if name == "h3h3-eta":
        return h3h3_eta(n)
    raise InputError(f"unknown representation {name!r}")


REP_NAMES = ("voiculescu", "ess-rho", "ess-rho-tilde", "trivial", "conj-voiculescu",
             "z4-phi", "z6-phi", "h3z-eta", "h3h3-eta")


# --- cycles and words -----------------------------------------------------------

def torus_cycle() -> Hm.Chain:
    """``[x|y] - [y|x]``, the oriented fundamental class of Z^2."""
    x, y = G.zd(1, 0), G.zd(0, 1)
    return Hm.Chain.cell(x, y) - Hm.Chain.cell(y, x)


def named_cycle(name: str) -> Hm.Chain:
    if name == "torus":
        return torus_cycle()
    fx = Hm.h3_fixtures()
    if name in ("B1", "B2"):
        return getattr(fx, name)
    raise InputError(f"unknown cycle {name!r} (choose torus, B1, B2)")


def hopf_word(group: GroupId, text: str, images: dict | None = None) -> Hm.HopfWord:
    """Parse ``"[x,y][y,x]"``-style commutator products.

    Letters default to the group generators: ``x, y`` for Z^2 and ``a, b, c``
    for H3.
    """
    if images is None:
        if group == G.Z2:
            images = dict(zip("xy", G.generators(G.Z2)))
        elif group == G.H3:
            images = dict(zip("abc", G.generators(G.H3)))
        else:
            raise InputError(f"no default letters for {group}")
    t = text.replace(" ", "")
    if not t:
        return Hm.HopfWord(group, (), images)
    if not (t.startswith("[") and t.endswith("]")):
        raise InputError(f"word must be a product of [u,v] commutators: {text!r}")
    pairs = []
    for chunk in t[1:-1].split("]["):
        if chunk.count(",") != 1:
            raise InputError(f"bad commutator [{chunk}]")
        u, v = chunk.split(",")
        pairs.append((Hm.parse_word(u), Hm.parse_word(v)))
    return Hm.HopfWord(group, tuple(pairs), images)


Z2_WORDS = ("[x,y]", "[x,y][y,x]")
H3_WORDS = ("[c,a]", "[b,c]", "[ab,c]", "[a,b][a,b^-1]")
