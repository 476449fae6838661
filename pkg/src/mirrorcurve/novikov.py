"""Truncated Novikov series and valuation-pivoted linear algebra.

An element is a finite sum ``c_1 T^{a_1} + ... + c_n T^{a_n}`` with rational
exponents and coefficients, known modulo ``T^prec``.  ``prec=None`` marks an
exact (untruncated) element.

    >>> T = NovikovElement.monomial
    >>> x = T(1, 2, prec=2) + T(1)
    >>> x
    3*T^1
    >>> x.to_json()
    [['1', '3']]
"""

from fractions import Fraction
from math import gcd
import json


def as_fraction(x):
    """Parse ints, Fractions and "p/q" strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError("expected a rational, got %r" % (x,))


def frac_str(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class NovikovElement:
    """An element of the Novikov field modulo ``T^prec``.

    Terms are stored as a tuple of ``(exponent, coefficient)`` pairs with
    strictly increasing exponents, no zero coefficients and every exponent
    below ``prec``.  Equality means equality modulo the smaller of the two
    precisions.
    """

    __slots__ = ("terms", "prec")

    def __init__(self, terms=(), prec=None):
        if prec is not None:
            prec = as_fraction(prec)
        acc = {}
        for a, c in terms:
            a = as_fraction(a)
            if prec is not None and a >= prec:
                continue
            acc[a] = acc.get(a, 0) + as_fraction(c)
        self.terms = tuple(sorted((a, c) for a, c in acc.items() if c != 0))
        self.prec = prec

    @classmethod
    def _raw(cls, terms, prec):
        # trusted constructor: terms already canonical
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.prec = prec
        return obj

    @classmethod
    def monomial(cls, exponent, coeff=1, prec=None):
        return cls(((exponent, coeff),), prec)

    @classmethod
    def constant(cls, c, prec=None):
        return cls(((0, c),), prec)

    @classmethod
    def zero(cls, prec=None):
        return cls((), prec)

    @classmethod
    def coerce(cls, x, prec=None):
        if isinstance(x, NovikovElement):
            return x
        return cls.constant(as_fraction(x), prec)

    # -- inspection -------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def valuation(self):
        """Smallest exponent; ``None`` for zero."""
        return self.terms[0][0] if self.terms else None

    val = valuation

    def leading(self):
        return self.terms[0] if self.terms else None

    def coefficient(self, exponent):
        exponent = as_fraction(exponent)
        for a, c in self.terms:
            if a == exponent:
                return c
        return Fraction(0)

    def is_monomial(self):
        return len(self.terms) == 1

    def is_unit(self):
        """Valuation zero (a unit of the valuation ring)."""
        return bool(self.terms) and self.terms[0][0] == 0

    def canonical(self):
        return self.terms

    def truncate(self, prec):
        prec = _min_prec(self.prec, as_fraction(prec) if prec is not None else None)
        if prec is None:
            return self
        return NovikovElement._raw(tuple(t for t in self.terms if t[0] < prec), prec)

    def with_prec(self, prec):
        return self.truncate(prec)

    def shift(self, a, coeff=1):
        """Multiply by ``coeff * T^a``; an exact monomial, so prec shifts too."""
        a = as_fraction(a)
        coeff = as_fraction(coeff)
        if coeff == 0:
            return NovikovElement.zero(self.prec)
        p = None if self.prec is None else self.prec + a
        return NovikovElement._raw(tuple((e + a, c * coeff) for e, c in self.terms), p)

    # -- arithmetic -------------------------------------------------------

    def _other(self, other):
        if isinstance(other, NovikovElement):
            return other
        if isinstance(other, (int, Fraction)):
            return NovikovElement.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return nov_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return NovikovElement._raw(tuple((a, -c) for a, c in self.terms), self.prec)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return nov_add(self, -other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return nov_add(other, -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return NovikovElement.zero(self.prec)
            return NovikovElement._raw(tuple((a, c * other) for a, c in self.terms), self.prec)
        if not isinstance(other, NovikovElement):
            return NotImplemented
        return nov_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if not isinstance(other, NovikovElement):
            return NotImplemented
        return nov_mul(self, nov_invert(other, prec=_min_prec(self.prec, other.prec)))

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return nov_invert(self) ** (-n)
        result = NovikovElement.constant(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return nov_add(self, -other).is_zero()

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for a, c in self.terms:
            if a == 0:
                parts.append(frac_str(c))
            elif c == 1:
                parts.append("T^%s" % frac_str(a))
            else:
                parts.append("%s*T^%s" % (frac_str(c), frac_str(a)))
        return " + ".join(parts)

    # -- serialization ----------------------------------------------------

    def to_json(self):
        return [[frac_str(a), frac_str(c)] for a, c in self.terms]

    @classmethod
    def from_json(cls, data, prec=None):
        if isinstance(data, str):
            data = json.loads(data)
        return cls(((as_fraction(a), as_fraction(c)) for a, c in data), prec)


def nov_add(a, b):
    prec = _min_prec(a.prec, b.prec)
    if not b.terms:
        return a.truncate(prec) if prec != a.prec else a
    if not a.terms:
        return b.truncate(prec) if prec != b.prec else b
    acc = dict(a.terms)
    for e, c in b.terms:
        acc[e] = acc.get(e, 0) + c
    terms = tuple(sorted((e, c) for e, c in acc.items()
                         if c != 0 and (prec is None or e < prec)))
    return NovikovElement._raw(terms, prec)


def nov_mul(a, b):
    """Product truncated at the smaller precision."""
    prec = _min_prec(a.prec, b.prec)
    if not a.terms or not b.terms:
        return NovikovElement.zero(prec)
    acc = {}
    for e1, c1 in a.terms:
        if prec is not None and e1 + b.terms[0][0] >= prec:
            break
        for e2, c2 in b.terms:
            e = e1 + e2
            if prec is not None and e >= prec:
                break
            acc[e] = acc.get(e, 0) + c1 * c2
    terms = tuple(sorted((e, c) for e, c in acc.items() if c != 0))
    return NovikovElement._raw(terms, prec)


def nov_invert(a, prec=None):
    """Inverse of ``a``.

    ``a`` is regarded as known modulo ``T^P`` where ``P = prec`` if given and
    ``a.prec`` otherwise.  Writing ``a = c T^v (1 + u)``, the result is
    ``c^{-1} T^{-v} (1 - u + u^2 - ...)`` and is reported modulo
    ``T^{P - 2v}``, the precision to which it is determined.  Exact
    monomials invert exactly.
    """
    if not a.terms:
        raise ZeroDivisionError("inverting an element that is 0 mod T^%s" % a.prec)
    v, c = a.terms[0]
    P = a.prec if prec is None else _min_prec(a.prec, as_fraction(prec))
    if len(a.terms) == 1:
        out_prec = None if P is None else P - 2 * v
        return NovikovElement._raw(((-v, 1 / c),), out_prec)
    if P is None:
        raise ValueError("inverting an exact non-monomial needs an explicit precision")
    unit_prec = P - v
    # u = a / (c T^v) - 1, valuation > 0
    u = NovikovElement._raw(tuple((e - v, x / c) for e, x in a.terms[1:]), unit_prec)
    w = NovikovElement.constant(1, unit_prec)
    power = NovikovElement.constant(1, unit_prec)
    while True:
        power = -(power * u)
        if power.is_zero():
            break
        w = w + power
    return NovikovElement._raw(tuple((e - v, x / c) for e, x in w.terms), P - 2 * v)


def nov_divide(num, den, prec):
    """``num / den`` modulo ``T^prec`` for exactly known ``num`` and ``den``."""
    prec = as_fraction(prec)
    den = NovikovElement._raw(den.terms, None)
    num = NovikovElement._raw(num.terms, None)
    if not den.terms:
        raise ZeroDivisionError("division by an exact zero")
    if not num.terms:
        return NovikovElement.zero(prec)
    v, c = den.terms[0]
    need = prec - num.terms[0][0] + v  # precision of the unit inverse
    unit = NovikovElement._raw(tuple((e - v, x / c) for e, x in den.terms), None)
    if need <= 0:
        return NovikovElement.zero(prec)
    inv = nov_invert(unit.truncate(need), need) if len(unit.terms) > 1 else unit
    inv = NovikovElement._raw(tuple(t for t in inv.terms if t[0] < need), None)
    q = nov_mul(num, inv)
    out = NovikovElement._raw(tuple((e - v, x / c) for e, x in q.terms), None)
    return out.truncate(prec)


def T(exponent, coeff=1, prec=None):
    return NovikovElement.monomial(exponent, coeff, prec)


class NovikovMatrix:
    """A rectangular matrix of Novikov elements sharing one precision."""

    def __init__(self, rows, prec=None):
        rows = [list(r) for r in rows]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        self.prec = as_fraction(prec) if prec is not None else None
        self.entries = [[NovikovElement.coerce(x).truncate(self.prec) for x in r] for r in rows]
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0

    @classmethod
    def zeros(cls, nrows, ncols, prec=None):
        z = NovikovElement.zero(prec)
        return cls([[z] * ncols for _ in range(nrows)], prec)

    @classmethod
    def identity(cls, n, prec=None):
        one = NovikovElement.constant(1, prec)
        z = NovikovElement.zero(prec)
        return cls([[one if i == j else z for j in range(n)] for i in range(n)], prec)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __setitem__(self, ij, value):
        i, j = ij
        self.entries[i][j] = NovikovElement.coerce(value).truncate(self.prec)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        prec = _min_prec(self.prec, other.prec)
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = NovikovElement.zero(prec)
                for k in range(self.ncols):
                    a = self.entries[i][k]
                    if a.terms:
                        b = other.entries[k][j]
                        if b.terms:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return NovikovMatrix(out, prec)

    def __add__(self, other):
        return NovikovMatrix([[a + b for a, b in zip(r, s)]
                              for r, s in zip(self.entries, other.entries)],
                             _min_prec(self.prec, other.prec))

    def __sub__(self, other):
        return NovikovMatrix([[a - b for a, b in zip(r, s)]
                              for r, s in zip(self.entries, other.entries)],
                             _min_prec(self.prec, other.prec))

    def is_zero(self):
        return all(x.is_zero() for r in self.entries for x in r)

    def min_valuation(self):
        vals = [x.valuation() for r in self.entries for x in r if x.terms]
        return min(vals) if vals else None

    def __repr__(self):
        return "NovikovMatrix(%r)" % (self.entries,)


class RankRecord:
    """Outcome of valuation-pivoted elimination."""

    def __init__(self, rank, pivot_valuations, pivots):
        self.rank = rank
        self.pivot_valuations = pivot_valuations
        self.pivots = pivots

    def __iter__(self):
        return iter((self.rank, self.pivot_valuations))

    def __repr__(self):
        return "RankRecord(rank=%d, pivot_valuations=%r)" % (self.rank, self.pivot_valuations)


def valuation_rank(m):
    """Rank of ``m`` mod ``T^prec`` by Gaussian elimination on minimal-valuation pivots."""
    rows = [list(r) for r in m.entries]
    live_rows = set(range(m.nrows))
    live_cols = set(range(m.ncols))
    pivots, vals = [], []
    while live_rows and live_cols:
        best = None
        for i in live_rows:
            for j in live_cols:
                x = rows[i][j]
                if x.terms and (best is None or x.terms[0][0] < best[0]):
                    best = (x.terms[0][0], i, j)
        if best is None:
            break
        v, i, j = best
        if m.prec is not None and v >= m.prec:
            break
        pivots.append((i, j))
        vals.append(v)
        inv = nov_invert(rows[i][j], prec=m.prec if m.prec is not None else _exact_prec(rows))
        live_rows.discard(i)
        live_cols.discard(j)
        for r in live_rows:
            x = rows[r][j]
            if not x.terms:
                continue
            f = x * inv
            rows[r] = [a - f * b if b.terms else a for a, b in zip(rows[r], rows[i])]
    return RankRecord(len(pivots), tuple(vals), tuple(pivots))


def _exact_prec(rows):
    # exact input: any finite working precision above all exponents suffices
    tops = [x.terms[-1][0] for r in rows for x in r if x.terms]
    return (max(tops) + 1) * 4 if tops else Fraction(1)


# -- dense series on a fixed exponent grid -------------------------------------------
#
# Hot loops (long Moebius products, path sums) work with lists of
# coefficients of T^{i/den}, i = 0 .. n-1, which avoids rational exponent
# bookkeeping.  Only elements with nonnegative exponents are representable.

def grid_denominator(*values):
    den = 1
    for x in values:
        if isinstance(x, NovikovElement):
            for e, _ in x.terms:
                den = den * e.denominator // gcd(den, e.denominator)
        else:
            d = as_fraction(x).denominator
            den = den * d // gcd(den, d)
    return den


def to_dense(x, den, n):
    out = [0] * n
    for e, c in NovikovElement.coerce(x).terms:
        if e < 0:
            raise ValueError("negative exponent %s on a dense grid" % e)
        i = e * den
        if i.denominator != 1:
            raise ValueError("exponent %s is off the grid 1/%d" % (e, den))
        if i < n:
            out[int(i)] = c.numerator if c.denominator == 1 else c
    return out


def from_dense(arr, den, prec=None, shift=0):
    terms = tuple((Fraction(i + shift, den), Fraction(c)) for i, c in enumerate(arr) if c)
    if prec is not None:
        terms = tuple(t for t in terms if t[0] < prec)
    return NovikovElement._raw(terms, prec)


def dense_mul(p, q, n=None):
    n = len(p) if n is None else n
    out = [0] * n
    for i, x in enumerate(p[:n]):
        if x:
            for j in range(min(len(q), n - i)):
                y = q[j]
                if y:
                    out[i + j] += x * y
    return out


def dense_valuation(p):
    for i, x in enumerate(p):
        if x:
            return i
    return None


def dense_divide(num, den_, n):
    """``num / den_`` as a Laurent series: ``(shift, coefficients)`` with ``n`` terms.

    The result is ``T^{shift/den} * sum c_i T^{i/den}``; both inputs are
    treated as exact.
    """
    v = dense_valuation(den_)
    if v is None:
        raise ZeroDivisionError("dense division by zero")
    u = den_[v:]
    lead = u[0]
    unit = lead in (1, -1)
    inv = [0] * n
    for i in range(n):
        acc = int(i == 0)
        for j in range(1, min(i, len(u) - 1) + 1):
            if u[j]:
                acc -= u[j] * inv[i - j]
        if unit:
            inv[i] = acc * lead
        else:
            q = Fraction(acc) / lead
            inv[i] = q.numerator if q.denominator == 1 else q
    w = dense_valuation(num)
    if w is None:
        return 0, [0] * n
    return w - v, dense_mul(num[w:], inv, n)
