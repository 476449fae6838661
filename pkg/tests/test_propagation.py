from fractions import Fraction as F
from itertools import permutations

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from mirrorcurve.graph import CHART_MATRICES, LABELS, MobiusMap
from mirrorcurve.propagation import (NonDefaultChart, PropagationTable, SameMarkedPoint,
                                     SingularExpansion, K_coefficient, check_propagation_identities,
                                     closed_form_coefficient, expand_inverse_power, identities_pass,
                                     partial_fraction_constant, prop_table_csv)

z, s = sp.symbols("z s")


def chart_expr(label):
    a, b, c, d = CHART_MATRICES[label]
    return (a * z + b) / (c * z + d)


def sympy_expansion(lab_in, lab_out, k, N):
    # solve t_out = s for z, substitute, expand
    zs = sp.solve(sp.Eq(chart_expr(lab_out), s), z)[0]
    f = sp.simplify(chart_expr(lab_in).subs(z, zs)) ** (-k)
    ser = sp.series(f, s, 0, N + 1).removeO()
    return [F(str(ser.coeff(s, i))) for i in range(N + 1)]


def sympy_K(lab1, lab2, k1, k2):
    # solve t1^-k1 t2^-k2 = K + sum x_b t1^-b + sum y_a t2^-a as a rational identity in z
    t1, t2 = chart_expr(lab1), chart_expr(lab2)
    K = sp.Symbol("K")
    xs = sp.symbols("x1:%d" % (k1 + 1))
    ys = sp.symbols("y1:%d" % (k2 + 1))
    rhs = K + sum(x * t1 ** (-b) for b, x in enumerate(xs, 1)) \
        + sum(y * t2 ** (-a) for a, y in enumerate(ys, 1))
    num = sp.numer(sp.together(t1 ** (-k1) * t2 ** (-k2) - rhs))
    sol = sp.solve(sp.Poly(sp.expand(num), z).coeffs(), [K, *xs, *ys], dict=True)[0]
    return F(str(sol[K]))


def test_paper_examples():
    assert expand_inverse_power("0", "1", 1, 4).coeffs == [1, -1, 0, 0, 0]
    assert expand_inverse_power("0", "inf", 1, 4).coeffs == [0, -1, -1, -1, -1]
    assert expand_inverse_power("0", "1", 2, 4).coeffs == [1, -2, 1, 0, 0]


def test_singular():
    with pytest.raises(SingularExpansion):
        expand_inverse_power("0", "0", 1, 3)


@pytest.mark.parametrize("pair", list(permutations(LABELS, 2)))
def test_expansion_matches_sympy(pair):
    for k in (1, 2, 3):
        assert expand_inverse_power(pair[0], pair[1], k, 6).coeffs == sympy_expansion(*pair, k, 6)


def test_closed_form_examples():
    assert closed_form_coefficient(("0", "1"), 1, 1) == -1
    assert closed_form_coefficient(("0", "inf"), 1, 0) == 0
    assert closed_form_coefficient(("1", "0"), 1, 0) == 0
    with pytest.raises(NonDefaultChart):
        closed_form_coefficient(("0", "0"), 1, 0)


@pytest.mark.parametrize("pair", list(permutations(LABELS, 2)))
def test_closed_form_against_expansion(pair):
    for k in range(1, 13):
        ser = expand_inverse_power(pair[0], pair[1], k, 12)
        assert [closed_form_coefficient(pair, k, l) for l in range(13)] == ser.coeffs


def test_K_examples():
    assert partial_fraction_constant("0", "1", 1, 1) == -1
    assert partial_fraction_constant("1", "0", 1, 1) == -1
    with pytest.raises(SameMarkedPoint):
        partial_fraction_constant("0", "0", 1, 1)


@pytest.mark.parametrize("pair", list(permutations(LABELS, 2)))
def test_K_against_sympy_solve(pair):
    for k1 in (1, 2, 3):
        for k2 in (1, 2):
            assert K_coefficient(*pair, k1, k2) == sympy_K(*pair, k1, k2)


def test_K_symmetric():
    for l1, l2 in permutations(LABELS, 2):
        for k1 in range(1, 6):
            for k2 in range(1, 6):
                assert K_coefficient(l1, l2, k1, k2) == K_coefficient(l2, l1, k2, k1)


def test_identities_default_labels():
    rep = check_propagation_identities(None, 6)
    assert identities_pass(rep)
    assert set(rep) == {"backwards", "forward", "output_bounce", "tripod"}
    assert all(r["checked"] > 0 for r in rep.values())


def test_tripod_hand_value():
    # k1 = k2 = 1, k3 = 0 at labels (0, 1, inf)
    lhs = (closed_form_coefficient(("0", "1"), 1, 0) * closed_form_coefficient(("1", "inf"), 1, 0)
           + closed_form_coefficient(("1", "0"), 1, 0) * closed_form_coefficient(("0", "inf"), 0, 0)
           + K_coefficient("0", "1", 1, 1))
    assert lhs == 0


def test_identities_detect_a_wrong_K(monkeypatch):
    import mirrorcurve.propagation as prop
    real = prop.K_coefficient
    monkeypatch.setattr(prop, "K_coefficient", lambda a, b, k1, k2: real(a, b, k1, k2) + 1)
    rep = prop.check_identities_for_labels("0", "1", "inf", 3)
    assert rep["backwards"]["failures"] and rep["tripod"]["failures"]


def test_table_and_csv(theta):
    tab = PropagationTable(theta, theta.vertices[0], 4)
    for (e1, e2), mat in tab.C.items():
        pair = (theta.label(e1, tab.vertex), theta.label(e2, tab.vertex))
        assert mat[2][1] == closed_form_coefficient(pair, 2, 1)
        assert all(x.denominator == 1 for row in mat for x in row)
    e1, e2 = tab.edges[:2]
    assert tab.k(e1, e2, 2, 3) == tab.k(e2, e1, 3, 2)
    text = prop_table_csv(theta, 2)
    lines = text.strip().split("\n")
    assert lines[0] == "vertex,e_in,e_out,k,l,value"
    assert len(lines) == 1 + 2 * 6 * 2 * 3


def mobius():
    small = st.integers(-3, 3)
    return st.tuples(small, small, small, small).filter(lambda m: m[0] * m[3] - m[1] * m[2] != 0)


@given(mobius(), mobius(), st.integers(1, 4), st.integers(1, 3))
def test_multiplicativity(m1, m2, k, a):
    t_in, t_out = MobiusMap(*map(F, m1)), MobiusMap(*map(F, m2))
    try:
        whole = expand_inverse_power(t_in, t_out, k + a, 6)
    except SingularExpansion:
        return
    prod = expand_inverse_power(t_in, t_out, k, 6) * expand_inverse_power(t_in, t_out, a, 6)
    assert prod == whole


@settings(max_examples=25)
@given(mobius(), mobius(), st.integers(1, 3), st.integers(1, 3))
def test_partial_fraction_reconstructs(m1, m2, k1, k2):
    # t1^{-k1} t2^{-k2} minus both principal parts is the constant K everywhere
    t1, t2 = MobiusMap(*map(F, m1)), MobiusMap(*map(F, m2))
    try:
        K = partial_fraction_constant(t1, t2, k1, k2)
        c21 = expand_inverse_power(t2, t1, k2, k1)
        c12 = expand_inverse_power(t1, t2, k1, k2)
    except (SameMarkedPoint, SingularExpansion):
        return
    for x in (F(5, 3), F(-7, 2), F(11, 13)):
        try:
            x1, x2 = t1(x), t2(x)
            val = x1 ** (-k1) * x2 ** (-k2)
        except (ZeroDivisionError, TypeError):
            continue
        rest = val - sum(c21[b] * x1 ** (b - k1) for b in range(k1)) \
            - sum(c12[j] * x2 ** (j - k2) for j in range(k2))
        assert rest == K
