"""Propagation coefficients and partial-fraction constants at a vertex.

``C^{v;e,e'}_{k,l}`` is the coefficient of ``t_{e'}^l`` in the expansion of
``t_e^{-k}`` as a power series in ``t_{e'}``; ``K^{v;e1,e2}_{k1,k2}`` is the
constant term of the partial-fraction decomposition of ``t1^{-k1} t2^{-k2}``::

    t1^{-k1} t2^{-k2} = K + sum_{b<k1} C^{e2,e1}_{k2,b} t1^{b-k1}
                          + sum_{a<k2} C^{e1,e2}_{k1,a} t2^{a-k2}

For the default charts (labels "0", "1", "inf") everything is an integer.
"""

from fractions import Fraction
from functools import lru_cache
from math import comb
import csv
import io

from .graph import MobiusMap, LABELS


class SingularExpansion(ValueError):
    pass


class SameMarkedPoint(ValueError):
    pass


class NonDefaultChart(ValueError):
    pass


class PowerSeries:
    """Truncated power series ``c_0 + c_1 t + ... + c_N t^N`` over Q."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = [Fraction(c) for c in coeffs]

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __mul__(self, other):
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[:n + 1]):
            if a:
                for j, b in enumerate(other.coeffs[:n + 1 - i]):
                    out[i + j] += a * b
        return PowerSeries(out)

    def __pow__(self, k):
        out = PowerSeries([1] + [0] * self.order)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        n = min(self.order, other.order)
        return all(self[i] == other[i] for i in range(n + 1))

    def __repr__(self):
        return "PowerSeries(%s)" % [str(c) for c in self.coeffs]


def _as_map(t):
    if isinstance(t, MobiusMap):
        return t
    return MobiusMap.chart(t)


def relative_map(t_in, t_out):
    """``t_in`` as a Moebius function of ``t_out``."""
    return _as_map(t_in) @ _as_map(t_out).adjugate()


def expand_inverse_power(t_in, t_out, k, N):
    """Taylor coefficients ``0..N`` of ``t_in^{-k}`` in the variable ``t_out``."""
    m = relative_map(t_in, t_out)
    al, be, ga, de = (Fraction(x) for x in m.entries())
    if be == 0:
        raise SingularExpansion("t_in vanishes where t_out does")
    # 1/t_in = (de + ga t)/(be + al t) = (de + ga t)/be * sum (-al t/be)^n
    geo = PowerSeries([(-al / be) ** n for n in range(N + 1)])
    base = PowerSeries([de / be, ga / be] + [0] * (N - 1)) if N >= 1 else PowerSeries([de / be])
    return (base * geo) ** k if k > 0 else PowerSeries([1] + [0] * N)


# which orientation class each ordered label pair belongs to
_CLASS_A = {("0", "1"), ("1", "inf"), ("inf", "0")}
_CLASS_B = {("0", "inf"), ("1", "0"), ("inf", "1")}


def binom(a, b):
    return comb(a, b) if 0 <= b <= a else 0


def closed_form_coefficient(pair, k_in, k_out):
    """Binomial closed form for a pair of default-chart labels."""
    pair = tuple(pair)
    if pair in _CLASS_A:
        return (-1) ** k_out * binom(k_in, k_out)
    if pair in _CLASS_B:
        return (-1) ** k_in * binom(k_out - 1, k_in - 1)
    raise NonDefaultChart("no closed form for label pair %r" % (pair,))


@lru_cache(maxsize=None)
def _series(lab_in, lab_out, k, N):
    return tuple(expand_inverse_power(lab_in, lab_out, k, N).coeffs)


def coefficient(lab_in, lab_out, k, l, N=None):
    """``C_{k,l}`` for chart labels; ``C_{0,l} = delta_{0,l}``."""
    if k == 0:
        return Fraction(int(l == 0))
    N = max(l, 16) if N is None else N
    if N < l:
        N = l
    # round N up so cached expansions are shared
    N = 1 << (N - 1).bit_length() if N > 1 else 1
    return _series(lab_in, lab_out, k, N)[l]


_EVAL_POINTS = (Fraction(-1), Fraction(2), Fraction(1, 3))


def partial_fraction_constant(t1, t2, k1, k2):
    """Constant term of the partial-fraction decomposition of ``t1^{-k1} t2^{-k2}``.

    The principal parts at the two zeros come from the power-series
    expansions; the remainder is a constant, read off at a sample point.
    """
    l1 = t1 if isinstance(t1, str) else None
    l2 = t2 if isinstance(t2, str) else None
    m1, m2 = _as_map(t1), _as_map(t2)
    if m1.projectively_equal(m2) or (l1 is not None and l1 == l2):
        raise SameMarkedPoint("both coordinates vanish at the same point")
    c21 = expand_inverse_power(m2, m1, k2, k1)  # t2^{-k2} in t1
    c12 = expand_inverse_power(m1, m2, k1, k2)  # t1^{-k1} in t2
    for z in _EVAL_POINTS:
        try:
            x1, x2 = m1(z), m2(z)
            if x1 == 0 or x2 == 0:
                continue
            f = x1 ** (-k1) * x2 ** (-k2)
        except (ZeroDivisionError, TypeError):
            continue
        p1 = sum((c21[b] * x1 ** (b - k1) for b in range(k1)), Fraction(0))
        p2 = sum((c12[a] * x2 ** (a - k2) for a in range(k2)), Fraction(0))
        return f - p1 - p2
    raise SameMarkedPoint("no regular sample point")  # pragma: no cover


@lru_cache(maxsize=None)
def K_coefficient(lab1, lab2, k1, k2):
    return partial_fraction_constant(lab1, lab2, k1, k2)


class PropagationTable:
    """Memoized ``C`` and ``K`` for one vertex of a graph."""

    def __init__(self, g, v, kmax, lmax=None):
        self.graph = g
        self.vertex = v
        self.kmax = kmax
        self.lmax = kmax if lmax is None else lmax
        self.edges = list(g.incident[v])
        self.C = {}
        self.K = {}
        for e in self.edges:
            for e2 in self.edges:
                if e == e2:
                    continue
                la, lb = g.label(e, v), g.label(e2, v)
                self.C[(e, e2)] = [[coefficient(la, lb, k, l, self.lmax)
                                    for l in range(self.lmax + 1)]
                                   for k in range(self.kmax + 1)]
                self.K[(e, e2)] = [[K_coefficient(la, lb, k1, k2) if k1 and k2 else None
                                    for k2 in range(self.kmax + 1)]
                                   for k1 in range(self.kmax + 1)]

    def c(self, e, e2, k, l):
        return self.C[(e, e2)][k][l]

    def k(self, e1, e2, k1, k2):
        return self.K[(e1, e2)][k1][k2]

    def rows(self):
        for (e, e2), mat in sorted(self.C.items()):
            for k in range(1, self.kmax + 1):
                for l in range(self.lmax + 1):
                    yield (self.vertex, e, e2, k, l, mat[k][l])


def prop_table_csv(g, kmax, lmax=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "e_in", "e_out", "k", "l", "value"])
    for v in g.vertices:
        for row in PropagationTable(g, v, kmax, lmax).rows():
            w.writerow(list(row[:5]) + [str(row[5])])
    return buf.getvalue()


def _check(report, name, idx, lhs, rhs):
    entry = report.setdefault(name, {"checked": 0, "failures": []})
    entry["checked"] += 1
    if lhs != rhs:
        entry["failures"].append({"indices": idx, "lhs": str(lhs), "rhs": str(rhs)})


def check_identities_for_labels(l1, l2, l3, k_bound, report=None):
    """The backwards, forward, output-bounce and tripod identities for one ordered triple."""
    report = {} if report is None else report
    n = k_bound
    N = 2 * n + 2

    def C(a, b, k, l):
        return coefficient(a, b, k, l, N)

    def K(a, b, k1, k2):
        return K_coefficient(a, b, k1, k2)

    tag = (l1, l2)
    for k1 in range(1, n + 1):
        for k2 in range(1, n + 1):
            for a in range(1, k2 + 1):
                lhs = sum(C(l2, l1, a, b) * C(l1, l2, k1 - b, k2 - a) for b in range(k1))
                if a == k2:
                    lhs += K(l1, l2, k1, k2)
                _check(report, "backwards", tag + (k1, k2, a), lhs, C(l1, l2, k1, k2))
    for k1 in range(1, n + 1):
        for k2 in range(0, n + 1):
            for a in range(1, k1):
                lhs = sum(C(l1, l2, a, b) * C(l1, l2, k1 - a, k2 - b) for b in range(k2 + 1))
                _check(report, "forward", tag + (k1, k2, a), lhs, C(l1, l2, k1, k2))
    for k1 in range(1, n + 1):
        for k2 in range(1, n + 1):
            for a in range(1, k2):
                lhs = sum(C(l2, l1, a, b) * K(l1, l2, k1 - b, k2 - a) for b in range(k1))
                _check(report, "output_bounce", tag + (k1, k2, a), lhs, K(l1, l2, k1, k2))
    for k1 in range(1, n + 1):
        for k2 in range(1, n + 1):
            for k3 in range(0, n + 1):
                lhs = sum(C(l1, l2, k1, a) * C(l2, l3, k2 - a, k3) for a in range(k2))
                lhs += sum(C(l2, l1, k2, b) * C(l1, l3, k1 - b, k3) for b in range(k1))
                if k3 == 0:
                    lhs += K(l1, l2, k1, k2)
                rhs = sum(C(l1, l3, k1, c) * C(l2, l3, k2, k3 - c) for c in range(k3 + 1))
                _check(report, "tripod", (l1, l2, l3, k1, k2, k3), lhs, rhs)
    return report


def check_propagation_identities(table_or_graph, k_bound, vertex=None):
    """Run the four identities over every ordered chart pair at the given vertices.

    Accepts a PropagationTable, a graph (all vertices) or None (the default
    labels).  Returns ``{identity: {"checked": n, "failures": [...]}}``.
    """
    if isinstance(table_or_graph, PropagationTable):
        g, verts = table_or_graph.graph, [table_or_graph.vertex]
    elif table_or_graph is None:
        g, verts = None, [None]
    else:
        g = table_or_graph
        verts = [vertex] if vertex is not None else g.vertices
    seen = set()
    report = {}
    for v in verts:
        labels = LABELS if g is None else tuple(g.label(e, v) for e in g.incident[v])
        for l1 in labels:
            for l2 in labels:
                if l1 == l2:
                    continue
                l3 = next(x for x in labels if x not in (l1, l2))
                if (l1, l2, l3) in seen:
                    continue
                seen.add((l1, l2, l3))
                check_identities_for_labels(l1, l2, l3, k_bound, report)
    return report


def identities_pass(report):
    return all(not r["failures"] for r in report.values())
