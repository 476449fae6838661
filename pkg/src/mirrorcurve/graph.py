"""Trivalent graphs with vertex charts, Moebius maps and the Schottky groupoid.

A half-edge is the pair ``(edge, vertex)``.  Each vertex carries three
Moebius coordinates ``t_{e/v}`` on its copy of the projective line, one per
incident half-edge; the stored label ("0", "1" or "inf") says which of the
three default charts is used

    t_0 = z,    t_1 = (z - 1)/z,    t_inf = 1/(1 - z).
"""

from collections import deque
from fractions import Fraction
from math import ceil
import json

from .novikov import (NovikovElement, as_fraction, dense_mul, frac_str, grid_denominator,
                      to_dense)


class GraphError(ValueError):
    pass


class NotReduced(GraphError):
    pass


class IncompatibleEndpoints(GraphError):
    pass


class CapExceeded(RuntimeError):
    pass


class _Infinity:
    __slots__ = ()

    def __repr__(self):
        return "INF"


INF = _Infinity()

LABELS = ("0", "1", "inf")

# coefficient matrices (a, b, c, d) of t = (a z + b)/(c z + d)
CHART_MATRICES = {
    "0": (1, 0, 0, 1),
    "1": (1, -1, 1, 0),
    "inf": (0, 1, -1, 1),
}


def _is_zero(x):
    if isinstance(x, NovikovElement):
        return x.is_zero()
    return x == 0


class MobiusMap:
    """``x -> (a x + b)/(c x + d)``; entries rational or Novikov, up to scalar."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def chart(cls, label):
        return cls(*(Fraction(x) for x in CHART_MATRICES[label]))

    def novikov(self, prec=None):
        conv = [x if isinstance(x, NovikovElement) else NovikovElement.constant(x)
                for x in (self.a, self.b, self.c, self.d)]
        if prec is not None:
            conv = [x.truncate(prec) for x in conv]
        return MobiusMap(*conv)

    def __matmul__(self, o):
        return MobiusMap(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                         self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def adjugate(self):
        # the inverse up to the scalar det
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    inverse = adjugate

    def det(self):
        return self.a * self.d - self.b * self.c

    def _div(self, num, den, prec):
        if _is_zero(den):
            if _is_zero(num):
                raise ZeroDivisionError("0/0 in Moebius evaluation")
            return INF
        if isinstance(num, NovikovElement) or isinstance(den, NovikovElement):
            num = NovikovElement.coerce(num)
            den = NovikovElement.coerce(den)
            if prec is not None:
                num = num.truncate(prec)
                den = den.truncate(prec)
            return num / den
        return Fraction(num) / Fraction(den)

    def __call__(self, x, prec=None):
        if x is INF:
            return self._div(self.a, self.c, prec)
        return self._div(self.a * x + self.b, self.c * x + self.d, prec)

    def at_zero(self, prec=None):
        return self._div(self.b, self.d, prec)

    def is_identity(self):
        """Projectively the identity (b = c = 0 and a = d)."""
        return _is_zero(self.b) and _is_zero(self.c) and _is_zero(self.a - self.d)

    def projectively_equal(self, other):
        m = self @ other.adjugate()
        return m.is_identity()

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return "MobiusMap(%r, %r, %r, %r)" % (self.a, self.b, self.c, self.d)


def inversion(q):
    """``t -> q/t``."""
    return MobiusMap(NovikovElement.zero(), q, NovikovElement.constant(1), NovikovElement.zero())


class Edge:
    __slots__ = ("name", "ends", "area")

    def __init__(self, name, ends, area):
        self.name = name
        self.ends = tuple(ends)
        self.area = as_fraction(area)

    def other(self, v):
        a, b = self.ends
        if v == a:
            return b
        if v == b:
            return a
        raise IncompatibleEndpoints("edge %s does not meet %s" % (self.name, v))

    def __repr__(self):
        return "Edge(%r, %r, %s)" % (self.name, self.ends, frac_str(self.area))


class TrivalentGraph:
    """Graph, edge areas and vertex charts.

    ``charts[v][e]`` is the label of half-edge ``e/v``.  Missing charts are
    filled in the order the edges appear.
    """

    def __init__(self, vertices, edges, charts=None):
        self.vertices = list(vertices)
        self.edges = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
        self.edge_index = {e.name: i for i, e in enumerate(self.edges)}
        self._edge = {e.name: e for e in self.edges}
        self.incident = {v: [] for v in self.vertices}
        for e in self.edges:
            for v in e.ends:
                if v in self.incident and e.name not in self.incident[v]:
                    self.incident[v].append(e.name)
        charts = charts or {}
        self.charts = {}
        for v in self.vertices:
            given = dict(charts.get(v, {}))
            free = [lab for lab in LABELS if lab not in given.values()]
            for e in self.incident[v]:
                if e not in given and free:
                    given[e] = free.pop(0)
            self.charts[v] = given

    # -- construction -----------------------------------------------------

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            edges = [Edge(e["name"], e["ends"], e["area"]) for e in data["edges"]]
            return cls(data["vertices"], edges, data.get("charts"))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise GraphError("malformed graph spec: %s" % exc) from exc

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self):
        return {
            "vertices": list(self.vertices),
            "edges": [{"name": e.name, "ends": list(e.ends), "area": frac_str(e.area)}
                      for e in self.edges],
            "charts": {v: dict(self.charts[v]) for v in self.vertices},
        }

    # -- accessors --------------------------------------------------------

    def edge(self, name):
        return self._edge[name]

    def area(self, name):
        return self._edge[name].area

    def min_area(self):
        return min(e.area for e in self.edges)

    def genus(self):
        return len(self.edges) - len(self.vertices) + 1

    def half_edges(self):
        return [(e, v) for v in self.vertices for e in self.incident[v]]

    def label(self, e, v):
        return self.charts[v][e]

    def chart(self, e, v):
        """Moebius matrix of ``t_{e/v}`` in the vertex coordinate ``z``."""
        return MobiusMap.chart(self.charts[v][e])

    def other_edges(self, v, e):
        return [x for x in self.incident[v] if x != e]

    def q(self, e):
        return NovikovElement.monomial(self.area(e))


def theta_graph(areas=(1, 1, 1)):
    a1, a2, a3 = areas
    return TrivalentGraph(["v0", "v1"], [Edge("e1", ("v0", "v1"), a1),
                                         Edge("e2", ("v0", "v1"), a2),
                                         Edge("e3", ("v0", "v1"), a3)])


def k4_graph(areas=None):
    names = [("a", "v0", "v1"), ("b", "v0", "v2"), ("c", "v0", "v3"),
             ("d", "v1", "v2"), ("e", "v2", "v3"), ("f", "v3", "v1")]
    areas = areas or [1] * 6
    return TrivalentGraph(["v0", "v1", "v2", "v3"],
                          [Edge(n, (u, w), A) for (n, u, w), A in zip(names, areas)])


def validate_graph(g):
    """Check trivalence, loops, connectivity and areas; report genus."""
    problems = []
    names = set()
    for e in g.edges:
        if e.name in names:
            problems.append("duplicate edge name %s" % e.name)
        names.add(e.name)
        if len(e.ends) != 2:
            problems.append("edge %s does not have two ends" % e.name)
            continue
        u, w = e.ends
        if u == w:
            problems.append("loop at vertex %s (edge %s)" % (u, e.name))
        for x in e.ends:
            if x not in g.incident:
                problems.append("edge %s ends at unknown vertex %s" % (e.name, x))
        if e.area <= 0:
            problems.append("edge %s has non-positive area %s" % (e.name, frac_str(e.area)))
    if len(set(g.vertices)) != len(g.vertices):
        problems.append("duplicate vertex names")
    for v in g.vertices:
        deg = sum((x == v) for e in g.edges for x in e.ends)
        if deg != 3:
            problems.append("vertex %s has degree %d, expected 3" % (v, deg))
        labels = [g.charts[v].get(e) for e in g.incident[v]]
        if sorted(str(x) for x in labels) != sorted(LABELS) and deg == 3:
            problems.append("vertex %s charts %r are not a bijection onto 0, 1, inf" % (v, labels))
    if g.vertices:
        seen = {g.vertices[0]}
        todo = [g.vertices[0]]
        while todo:
            v = todo.pop()
            for e in g.incident.get(v, []):
                ends = g.edge(e).ends
                for w in ends:
                    if w not in seen and w in g.incident:
                        seen.add(w)
                        todo.append(w)
        if len(seen) != len(g.vertices):
            problems.append("graph is not connected")
    return {"valid": not problems, "genus": g.genus(), "violations": problems}


class ReducedPath:
    """``(v_0, e_1, v_1, ..., e_n, v_n)`` without immediate backtracking."""

    __slots__ = ("vertices", "edges")

    def __init__(self, g, start, edges=()):
        edges = tuple(edges)
        verts = [start]
        for i, e in enumerate(edges):
            if i and edges[i - 1] == e:
                raise NotReduced("edge %s repeated at position %d" % (e, i))
            verts.append(g.edge(e).other(verts[-1]))
        self.vertices = tuple(verts)
        self.edges = edges

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def __len__(self):
        return len(self.edges)

    def is_loop(self):
        return self.start == self.end

    def extend(self, g, e):
        return ReducedPath(g, self.start, self.edges + (e,))

    def prefix(self, g, n):
        return ReducedPath(g, self.start, self.edges[:n])

    def weight(self, g):
        return Fraction(1, 4) * sum((g.area(e) for e in self.edges), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, ReducedPath) and self.vertices == other.vertices and \
            self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        seq = [self.vertices[0]]
        for e, v in zip(self.edges, self.vertices[1:]):
            seq += [e, v]
        return "ReducedPath(%s)" % ", ".join(seq)


def schottky_generator(g, e, v):
    """``g_{e/v}: Y_v -> Y_{v'}`` in z-coordinates, ``t_{e/v'}(g(x)) = q_e / t_{e/v}(x)``."""
    cache = g.__dict__.setdefault("_generators", {})
    if (e, v) not in cache:
        w = g.edge(e).other(v)
        cache[(e, v)] = g.chart(e, w).novikov().adjugate() @ inversion(g.q(e)) @ \
            g.chart(e, v).novikov()
    return cache[(e, v)]


def chart_change(g, v, e0, e):
    """``g_v^{e0,e}``: ``t_{e0/v}`` as a function of ``t_{e/v}``."""
    return g.chart(e0, v) @ g.chart(e, v).adjugate()


def back_transport(g, path):
    """Matrix of ``g_P^{-1}``, from the z-coordinate at ``v_n`` to the one at ``v_0``."""
    m = MobiusMap.identity().novikov()
    for e, v in zip(path.edges, path.vertices[1:]):
        m = m @ schottky_generator(g, e, v)
    return m


def path_transport(g, path, e0, e):
    """``gamma_P^{e0,e}``: ``t_{e0/v0}`` expressed through ``t_{e/v_n}``."""
    if e0 not in g.incident[path.start]:
        raise IncompatibleEndpoints("%s is not at %s" % (e0, path.start))
    if e not in g.incident[path.end]:
        raise IncompatibleEndpoints("%s is not at %s" % (e, path.end))
    if path.edges and path.edges[-1] == e:
        raise NotReduced("final half-edge repeats the last edge")
    return g.chart(e0, path.start).novikov() @ back_transport(g, path) @ \
        g.chart(e, path.end).novikov().adjugate()


def loop_element(g, loop, e0):
    """The Schottky-group element of a based loop, acting on ``t_{e0/v0}``."""
    if not loop.is_loop():
        raise IncompatibleEndpoints("path is not closed")
    c = g.chart(e0, loop.start).novikov()
    return c @ back_transport(g, loop).adjugate() @ c.adjugate()


class TransportCache:
    """Memoized ``back_transport`` along path prefixes from one start vertex.

    With ``work`` set, every entry is kept modulo ``T^work``.  Generator
    entries have nonnegative exponents, so products of truncated matrices
    are still correct modulo ``T^work``.
    """

    def __init__(self, g, start, work=None):
        self.graph = g
        self.start = start
        self.work = None if work is None else as_fraction(work)
        self._back = {(): MobiusMap.identity().novikov(self.work)}

    @staticmethod
    def mul(x, y):
        return x @ y

    def _trunc(self, m):
        if self.work is None:
            return m
        return MobiusMap(*(x.truncate(self.work) for x in m.entries()))

    def back(self, path):
        key = tuple(path.edges)
        if key not in self._back:
            head = ReducedPath(self.graph, self.start, key[:-1])
            m = self.back(head) @ schottky_generator(self.graph, key[-1], path.vertices[-1])
            self._back[key] = self._trunc(m)
        return self._back[key]

    def transport(self, path, e0, e):
        g = self.graph
        if path.edges and path.edges[-1] == e:
            raise NotReduced("final half-edge repeats the last edge")
        return self._trunc(g.chart(e0, path.start).novikov() @ self.back(path) @
                           g.chart(e, path.end).novikov().adjugate())

    def loop(self, path, e0):
        if not path.is_loop():
            raise IncompatibleEndpoints("path is not closed")
        c = self.graph.chart(e0, path.start).novikov()
        return self._trunc(c @ self.back(path).adjugate() @ c.adjugate())


class DenseTransportCache:
    """``TransportCache`` on a dense exponent grid, entries modulo ``T^work``.

    Matrices are 4-tuples of coefficient lists of ``T^{i/den}``; ``extra``
    lists further exponents (areas, ``B``) the grid has to contain.
    """

    def __init__(self, g, start, work, extra=()):
        self.graph = g
        self.start = start
        self.work = as_fraction(work)
        self.den = grid_denominator(self.work, *[e.area for e in g.edges], *extra)
        self.n = int(ceil(self.work * self.den))
        one = to_dense(1, self.den, self.n)
        zero = [0] * self.n
        self._back = {(): (one, zero, zero, one)}
        self._gen = {}

    def dense(self, m):
        return tuple(to_dense(x, self.den, self.n) for x in m.novikov().entries())

    def mul(self, x, y):
        n = self.n
        a, b, c, d = x
        p, q, r, s = y

        def add(u, w):
            return [i + j for i, j in zip(u, w)]
        return (add(dense_mul(a, p, n), dense_mul(b, r, n)), add(dense_mul(a, q, n), dense_mul(b, s, n)),
                add(dense_mul(c, p, n), dense_mul(d, r, n)), add(dense_mul(c, q, n), dense_mul(d, s, n)))

    def generator(self, e, v):
        if (e, v) not in self._gen:
            self._gen[(e, v)] = self.dense(schottky_generator(self.graph, e, v))
        return self._gen[(e, v)]

    def back(self, path):
        key = tuple(path.edges)
        if key not in self._back:
            head = ReducedPath(self.graph, self.start, key[:-1])
            self._back[key] = self.mul(self.back(head), self.generator(key[-1], path.vertices[-1]))
        return self._back[key]

    @staticmethod
    def adjugate(m):
        a, b, c, d = m
        return (d, [-x for x in b], [-x for x in c], a)

    def _chart(self, e, v, adj):
        key = (e, v, adj)
        if key not in self._gen:
            c = self.graph.chart(e, v)
            self._gen[key] = self.dense(c.adjugate() if adj else c)
        return self._gen[key]

    def transport(self, path, e0, e):
        if path.edges and path.edges[-1] == e:
            raise NotReduced("final half-edge repeats the last edge")
        return self.mul(self.mul(self._chart(e0, path.start, False), self.back(path)),
                        self._chart(e, path.end, True))

    def loop(self, path, e0):
        if not path.is_loop():
            raise IncompatibleEndpoints("path is not closed")
        return self.mul(self.mul(self._chart(e0, path.start, False), self.adjugate(self.back(path))),
                        self._chart(e0, path.start, True))


def enumerate_reduced_paths(g, start, budget, cap=64, end=None):
    """Reduced paths from ``start`` with weight ``(1/4) sum A_e <= budget``.

    Ordered by length, then lexicographically by edge index.  Raises
    CapExceeded when some path inside the budget is longer than ``cap``.
    """
    budget = as_fraction(budget)
    level = [ReducedPath(g, start)]
    n = 0
    while level:
        for p in level:
            if end is None or p.end == end:
                yield p
        nxt = []
        for p in level:
            last = p.edges[-1] if p.edges else None
            for e in sorted(g.incident[p.end], key=g.edge_index.get):
                if e == last:
                    continue
                q = p.extend(g, e)
                if q.weight(g) <= budget:
                    nxt.append(q)
        n += 1
        if nxt and n > cap:
            raise CapExceeded("paths of length %d fit in budget %s (cap %d)"
                              % (n, frac_str(budget), cap))
        level = nxt


def spanning_tree(g, base):
    parent = {base: None}
    order = deque([base])
    while order:
        v = order.popleft()
        for e in sorted(g.incident[v], key=g.edge_index.get):
            w = g.edge(e).other(v)
            if w not in parent:
                parent[w] = (e, v)
                order.append(w)
    return parent


def _tree_path(parent, v):
    edges = []
    while parent[v] is not None:
        e, u = parent[v]
        edges.append(e)
        v = u
    return list(reversed(edges))


def cycle_basis(g, base):
    """One based loop per edge outside a BFS spanning tree."""
    parent = spanning_tree(g, base)
    tree = {p[0] for p in parent.values() if p is not None}
    loops = []
    for e in g.edges:
        if e.name in tree:
            continue
        u, w = e.ends
        there = _tree_path(parent, u)
        back = list(reversed(_tree_path(parent, w)))
        loops.append(ReducedPath(g, base, there + [e.name] + back))
    return loops


def reduce_word(g, base, steps):
    """Freely reduce a walk given as an edge sequence starting at ``base``."""
    stack = []
    v = base
    verts = [base]
    for e in steps:
        w = g.edge(e).other(v)
        if stack and stack[-1] == e:
            stack.pop()
            verts.pop()
        else:
            stack.append(e)
            verts.append(w)
        v = w
    return ReducedPath(g, base, stack)


def word_to_loop(g, base, basis, word):
    """Loop for a word in the basis loops; letters are ``(index, +1 | -1)``."""
    steps = []
    for i, sign in word:
        edges = list(basis[i].edges)
        steps += edges if sign > 0 else list(reversed(edges))
    return reduce_word(g, base, steps)
