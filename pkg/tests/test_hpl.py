from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from mirrorcurve.hpl import (AInfinityStructure, Contraction, NotNilpotent, NotSquareZero,
                             Operator, basis_vector, dg_structure, perturb_contraction,
                             transfer_ainfinity, verify_ainfinity)
from mirrorcurve.novikov import NovikovElement, T

PREC = F(6)


def one():
    return NovikovElement.constant(1, PREC)


def op(cols):
    return Operator({k: {r: (x if isinstance(x, NovikovElement) else NovikovElement.constant(x, PREC))
                         for r, x in v.items()} for k, v in cols.items()}, PREC)


def rank_one_toy(extra=()):
    """K = span(x, y, *extra), d x = y, h y = x; L = extra with zero differential."""
    K = ["x", "y", *extra]
    deg = {"x": 0, "y": 1, **{z: 0 for z in extra}}
    d = op({"x": {"y": 1}})
    h = op({"y": {"x": 1}})
    i = op({z: {z: 1} for z in extra})
    p = op({z: {z: 1} for z in extra})
    return Contraction(K, list(extra), deg, {z: 0 for z in extra}, d, op({}), i, p, h, PREC)


def test_toy_side_conditions():
    c = rank_one_toy(("z",))
    assert c.sound()


def test_zero_perturbation_is_identity():
    c = rank_one_toy(("z",))
    c2 = perturb_contraction(c, op({}))
    for name in ("dK", "i", "p", "h"):
        a, b = getattr(c, name), getattr(c2, name)
        assert (a - b).is_zero()
    assert c2.dL.is_zero()


def test_rank_one_scaled_perturbation():
    c = rank_one_toy()
    delta = op({"x": {"y": T(1, 1, PREC)}})
    c2 = perturb_contraction(c, delta)
    assert c2.sound()
    assert c2.dL.is_zero()
    # h~ y = x - T x + T^2 x - ... = x/(1+T)
    hy = c2.h(basis_vector("y"))["x"]
    assert (hy * (one() + T(1, 1, PREC))).truncate(PREC) == one()


@given(st.integers(-3, 3).filter(bool), st.integers(-3, 3), st.integers(1, 3), st.integers(1, 3))
def test_perturbation_side_conditions_property(c1, c2, a, b):
    c = rank_one_toy(("z",))
    delta = op({"z": {"y": T(a, c1, PREC)}, "x": {"y": T(b, c2, PREC)}})
    c2_ = perturb_contraction(c, delta)
    sides = c2_.side_conditions()
    assert all(v is None or v >= PREC for v in sides.values()), sides
    assert c2_.dL.is_zero()


def test_not_nilpotent():
    c = rank_one_toy()
    with pytest.raises(NotNilpotent):
        perturb_contraction(c, op({"x": {"y": T(-1, 1, PREC)}}))


def test_not_square_zero():
    c = rank_one_toy(("z",))
    # delta z = T x, then (d + delta)^2 z = T y != 0
    with pytest.raises(NotSquareZero):
        perturb_contraction(c, op({"z": {"x": T(1, 1, PREC)}}))


# A DG algebra with a nontrivial Massey product: d u = x^2,
# u x = T v, x u = T^2 w; H spanned by 1, x, v, w.
DEG = {"1": 0, "x": 1, "u": 1, "s": 2, "v": 2, "w": 2}
BASIS = list(DEG)


def dga_product(a, b):
    if a == "1":
        return basis_vector(b, PREC)
    if b == "1":
        return basis_vector(a, PREC)
    table = {("x", "x"): {"s": one()}, ("u", "x"): {"v": T(1, 1, PREC)},
             ("x", "u"): {"w": T(2, 1, PREC)}}
    return dict(table.get((a, b), {}))


def dga(product=dga_product):
    d = op({"u": {"s": 1}})
    return dg_structure(BASIS, DEG, d, product, PREC), d


def massey_contraction(d):
    L = ["1", "x", "v", "w"]
    i = op({k: {k: 1} for k in L})
    p = op({k: {k: 1} for k in L})
    h = op({"s": {"u": 1}})
    return Contraction(BASIS, L, DEG, {k: DEG[k] for k in L}, d, op({}), i, p, h, PREC)


def test_dga_relations():
    mu, _ = dga()
    assert verify_ainfinity(mu, 4)["pass"]


def test_dga_negative_control():
    def broken(a, b):
        out = dga_product(a, b)
        if (a, b) == ("x", "1"):
            # d(x 1) = T^(1/2) s breaks the Leibniz rule
            out = {"x": one(), "u": T(F(1, 2), 1, PREC)}
        return out
    mu, _ = dga(broken)
    rep = verify_ainfinity(mu, 3)
    assert not rep["pass"] and rep["min_defect_valuation"] == F(1, 2)


def test_massey_transfer():
    mu, d = dga()
    c = massey_contraction(d)
    assert c.sound()
    muL, lam = transfer_ainfinity(c, mu, 4)
    rep = verify_ainfinity(muL, 4)
    assert rep["pass"], rep
    m3 = muL.mu(3, ("x", "x", "x"))
    assert set(m3) == {"v", "w"}
    # by hand: lambda^2(x, x) = -h mu^2(x, x) = u, then p(mu^2(x, u) + mu^2(u, x))
    assert m3 == {"v": T(1, -1, PREC), "w": T(2, -1, PREC)}
    # with h = 0 on products of classes, mu_L^2 is p mu^2 (i, i)
    assert muL.mu(2, ("x", "1")) == mu.mu(2, ("x", "1"))
    # strict unit up to arity 3
    for a in ("x", "v"):
        for b in ("x", "w"):
            assert muL.mu(3, ("1", a, b)) == {} and muL.mu(3, (a, "1", b)) == {}


def test_massey_transfer_negative_control():
    mu, d = dga()
    muL, _ = transfer_ainfinity(massey_contraction(d), mu, 3)
    ops = dict(muL.ops)
    real = ops[3]
    # a non-unital mu^3 term: the arity-4 relation on (1, 1, x, x) sees it three times
    ops[3] = lambda labs: ({"v": T(3, 1, PREC)} if labs == ("1", "x", "x") else real(labs))
    bad = AInfinityStructure(muL.basis, muL.deg, ops, PREC)
    rep = verify_ainfinity(bad, 4)
    assert not rep["pass"] and rep["min_defect_valuation"] == 3
    assert verify_ainfinity(muL, 4)["pass"]
