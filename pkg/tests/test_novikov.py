from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from mirrorcurve.novikov import (NovikovElement, NovikovMatrix, T, dense_divide, dense_mul,
                                 from_dense, nov_add, nov_divide, nov_invert, nov_mul, to_dense,
                                 valuation_rank)


def N(terms, prec=None):
    return NovikovElement(terms, prec)


def test_add_examples():
    assert nov_add(T(F(1, 2)), -T(F(1, 2))).is_zero()
    s = nov_add(N([(0, 1), (1, 1)], 2), N([(1, 2), (2, 1)], 2))
    assert s.terms == ((0, 1), (1, 3))
    s = T(F(1, 3)) + T(F(1, 2))
    assert [a for a, _ in s.terms] == [F(1, 3), F(1, 2)]


def test_mul_examples():
    p = nov_mul(N([(F(1, 2), 2), (1, 1)], 2), N([(F(1, 2), 3)], 2))
    assert p.terms == ((1, 6), (F(3, 2), 3))
    x = N([(F(1, 3), 5), (2, -1)])
    assert x * NovikovElement.constant(1) == x
    assert nov_mul(T(F(3, 2), prec=2), T(F(3, 4), prec=2)).is_zero()


def test_invert_examples():
    inv = nov_invert(N([(0, 1), (1, -1)], 3))
    assert inv.terms == ((0, 1), (1, 1), (2, 1))
    assert nov_invert(T(1)).terms == ((-1, 1),)
    assert nov_invert(NovikovElement.constant(2)).terms == ((0, F(1, 2)),)
    with pytest.raises(ZeroDivisionError):
        nov_invert(NovikovElement.zero(3))


def test_invert_precision_drops_by_twice_the_valuation():
    a = N([(F(1, 2), 1), (1, 1)], 4)
    b = nov_invert(a)
    assert b.prec == 3
    assert (a * b - 1).truncate(4 - 2 * F(1, 2)).is_zero()


def test_rank_examples():
    one, z = NovikovElement.constant(1), NovikovElement.zero()
    eye = NovikovMatrix([[one, z, z], [z, one, z], [z, z, one]], 5)
    assert tuple(valuation_rank(eye)) == (3, (0, 0, 0))
    # det = T*T - 1*T^2 = 0 exactly, so the rank is 1
    m = NovikovMatrix([[T(1), 1], [T(2), T(1)]], 3)
    rank, vals = valuation_rank(m)
    assert rank == 1 and vals == (0,)
    assert valuation_rank(NovikovMatrix.zeros(2, 3, 2)).rank == 0


def test_rank_ignores_entries_beyond_precision():
    m = NovikovMatrix([[1, 0], [0, T(3)]], 2)
    assert valuation_rank(m).rank == 1


def test_json_round_trip():
    x = N([(F(-1, 2), F(3, 7)), (2, -5)])
    assert x.to_json() == [["-1/2", "3/7"], ["2", "-5"]]
    assert NovikovElement.from_json(x.to_json()) == x


def test_divide_exact_polynomials():
    num = N([(0, 1), (1, 2)])
    den = N([(0, 1), (1, -1)])
    q = nov_divide(num, den, 4)
    # (1 + 2T)/(1 - T) = 1 + 3T + 3T^2 + 3T^3 + ...
    assert q.terms == ((0, 1), (1, 3), (2, 3), (3, 3))


def test_dense_helpers_match_novikov():
    x = N([(0, 1), (F(1, 2), -2), (F(3, 2), 1)])
    y = N([(F(1, 4), 3), (1, 1)])
    den, n = 4, 12
    prod = from_dense(dense_mul(to_dense(x, den, n), to_dense(y, den, n)), den, F(n, den))
    assert prod == (x * y).truncate(3)
    shift, q = dense_divide(to_dense(x, den, n), to_dense(y, den, n), n)
    # x/y has valuation -1/4 and n grid terms, so it is known below T^(3 - 1/4)
    back = from_dense(q, den, None, shift) * y
    assert (back - x).truncate(3).is_zero()


# -- properties ------------------------------------------------------------------

exps = st.fractions(min_value=0, max_value=3, max_denominator=4)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=3).filter(lambda c: c != 0)
elements = st.lists(st.tuples(exps, coeffs), max_size=5).map(lambda ts: NovikovElement(ts, 3))


@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(elements, elements)
def test_valuations(a, b):
    if a.terms and b.terms and a.valuation() + b.valuation() < 3:
        assert (a * b).valuation() == a.valuation() + b.valuation()
    s = a + b
    if s.terms:
        assert s.valuation() >= min(x.valuation() for x in (a, b) if x.terms)


@given(elements)
def test_inverse_two_sided(a):
    if not a.terms:
        return
    b = nov_invert(a)
    p = 3 - 2 * a.valuation()
    assert (a * b - 1).truncate(p).is_zero()
    assert (b * a - 1).truncate(p).is_zero()


@given(st.lists(st.lists(elements, min_size=3, max_size=3), min_size=2, max_size=3),
       st.permutations(range(3)), coeffs)
def test_rank_invariances(rows, perm, unit):
    m = NovikovMatrix(rows, 3)
    r = valuation_rank(m).rank
    cols = NovikovMatrix([[row[j] for j in perm] for row in rows], 3)
    assert valuation_rank(cols).rank == r
    flipped = NovikovMatrix(list(reversed(rows)), 3)
    assert valuation_rank(flipped).rank == r
    u = NovikovElement([(0, unit), (F(1, 2), 1)], 3)
    scaled = NovikovMatrix([[u * x for x in rows[0]]] + rows[1:], 3)
    assert valuation_rank(scaled).rank == r
