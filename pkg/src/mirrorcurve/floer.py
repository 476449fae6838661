"""Truncated Floer complexes in trivalent configurations.

Generator labels:

* ``("p", v)``          node generator ``p_v``, degree 0;
* ``("P", e, v, k)``    annulus generator ``p_{e/v,k}``, degree 0;
* ``("Q", e, v, k)``    saddle generator ``q_{e/v,k}``, degree 1.

Areas follow the idealized convention ``S(p_{e/v,-k}) = 3/4 k A_e``,
``S(p_{e/v,k}) = -1/4 k A_e`` for ``k >= 0``; saddles carry the area of the
adjacent annulus generator, and the short strip ``p_{e/v,k} -> q_{e/v,k}``
has area 0 and coefficient ``-1``.

In the global complex of ``L_0`` the annulus generator ``p_{e/v,-k}`` is the
same point as ``p_{e/v',k}`` (stored under the vertex near which it sits
at ``tau = 1``), and ``q_{e/v,0} = +-z_e`` is the single degree-one point in
``M_e``: ``+z_e`` seen from the head ``ends[1]``, ``-z_e`` from the tail.
"""

from fractions import Fraction
from math import ceil

from .bside import AffinoidFunctionUe, AffinoidFunctionUv
from .hpl import (Contraction, Operator, basis_vector, perturb_contraction, vadd, vscale, dg_structure, AInfinityStructure, transfer_ainfinity)
from .novikov import NovikovElement, NovikovMatrix, as_fraction, valuation_rank
from .propagation import K_coefficient, coefficient


class InsufficientTruncation(ValueError):
    pass


class NotDegreeZero(ValueError):
    pass


class NotLocal(ValueError):
    pass


class NotRepresentative(ValueError):
    pass


class NotDegreeZeroConcentrated(ValueError):
    pass


def Tm(a, c=1, prec=None):
    return NovikovElement.monomial(a, c, prec)


def default_kmax(g, prec):
    return int(ceil(4 * as_fraction(prec) / g.min_area()))


def annulus_area(g, e, k):
    """``S_{e/v}(p_{e/v,k})`` under the idealized convention."""
    A = g.area(e)
    if k < 0:
        return Fraction(3, 4) * (-k) * A
    return -Fraction(1, 4) * k * A


def degree(label):
    return 1 if label[0] == "Q" else 0


class VBObject:
    """Rotation numbers, half-edge areas and rank-one monodromies of a v.b.-type object."""

    def __init__(self, g, rotations=None, areas=None, monodromies=None):
        self.graph = g
        self.rotations = {e.name: int((rotations or {}).get(e.name, 0)) for e in g.edges}
        self.areas = {}
        areas = areas or {}
        for e in g.edges:
            u, w = e.ends
            r = self.rotations[e.name]
            su = areas.get((e.name, u))
            sw = areas.get((e.name, w))
            if su is None and sw is None:
                su = Fraction(r) * e.area / 2
            if su is None:
                su = r * e.area - as_fraction(sw)
            if sw is None:
                sw = r * e.area - as_fraction(su)
            self.areas[(e.name, u)] = as_fraction(su)
            self.areas[(e.name, w)] = as_fraction(sw)
        self.monodromies = {}
        for e in g.edges:
            u, w = e.ends
            m = (monodromies or {}).get((e.name, u))
            mw = (monodromies or {}).get((e.name, w))
            if m is None and mw is None:
                m = NovikovElement.constant(1)
            if m is None:
                m = NovikovElement.coerce(1) / mw if mw.is_monomial() else None
            if mw is None:
                mw = NovikovElement.constant(1) / m
            self.monodromies[(e.name, u)] = NovikovElement.coerce(m)
            self.monodromies[(e.name, w)] = NovikovElement.coerce(mw)
        self.check()

    @classmethod
    def trivial(cls, g):
        return cls(g)

    @classmethod
    def from_json(cls, g, data):
        obj = data.get("object", data)
        rot = obj.get("rotations", {})
        areas = {}
        for key, val in obj.get("areas", {}).items():
            e, v = key.split("/")
            areas[(e, v)] = as_fraction(val)
        mono = {}
        for key, val in obj.get("monodromies", {}).items():
            e, v = key.split("/")
            mono[(e, v)] = NovikovElement.from_json(val)
        return cls(g, rot, areas, mono)

    def check(self):
        for e in self.graph.edges:
            u, w = e.ends
            if self.areas[(e.name, u)] + self.areas[(e.name, w)] != self.rotations[e.name] * e.area:
                raise ValueError("areas on %s do not add up to r_e A_e" % e.name)
            for v in e.ends:
                m = self.monodromies[(e.name, v)]
                if not m.is_unit():
                    raise ValueError("monodromy on %s/%s is not a unit" % (e.name, v))

    def relative_to(self, other):
        """Invariants of the pair ``(self, other)``: differences of rotations and areas."""
        rot = {e: other.rotations[e] - self.rotations[e] for e in self.rotations}
        areas = {h: other.areas[h] - self.areas[h] for h in self.areas}
        mono = {}
        for h in self.monodromies:
            mono[h] = other.monodromies[h] * _unit_inverse(self.monodromies[h])
        return rot, areas, mono


def _unit_inverse(u, prec=None):
    if u.is_monomial() or prec is None:
        try:
            return NovikovElement.constant(1) / u
        except ValueError:
            pass
    from .novikov import nov_invert
    return nov_invert(u, prec=prec if prec is not None else Fraction(64))


class FloerComplex:
    """A two-term truncated complex; ``d = d_naive + delta``."""

    def __init__(self, graph, gens, d_naive, delta, prec, kmax, local_vertex=None):
        self.graph = graph
        self.gens = list(gens)
        self.deg = {x: degree(x) for x in self.gens}
        self.d_naive = d_naive
        self.delta = delta
        self.d = d_naive + delta
        self.prec = prec
        self.kmax = kmax
        self.local_vertex = local_vertex

    def degree_part(self, n):
        return [x for x in self.gens if self.deg[x] == n]

    def matrix(self):
        C0, C1 = self.degree_part(0), self.degree_part(1)
        idx = {x: i for i, x in enumerate(C1)}
        rows = [[NovikovElement.zero(self.prec) for _ in C0] for _ in C1]
        for j, x in enumerate(C0):
            for y, c in self.d.col(x).items():
                rows[idx[y]][j] = c
        return NovikovMatrix(rows, self.prec)

    def d_squared_defect(self):
        """Valuation of ``d∘d`` on the full generator set (``None`` when zero)."""
        sq = self.d @ self.d
        return sq.min_valuation()

    def grading_ok(self):
        return all(self.deg[y] == self.deg[x] + 1 for x in self.gens for y in self.d.col(x))


def _q_label(g, e, v, l):
    """Saddle ``q_{e/v,l}`` with the identification of ``q_{e/v,0}`` and ``+-z_e``."""
    if l == 0:
        head = g.edge(e).ends[1]
        return ("Q", e, head, 0), (1 if v == head else -1)
    return ("Q", e, v, l), 1


def build_cf_end_L0(g, prec, kmax=None):
    """``CF*(L_0, L_0; H)`` truncated at ``|k| <= kmax`` and ``T^prec``."""
    prec = as_fraction(prec)
    bound = default_kmax(g, prec)
    if kmax is None:
        kmax = bound
    if kmax < bound:
        raise InsufficientTruncation("kmax=%d below ceil(4*Lambda/min A)=%d" % (kmax, bound))
    gens = [("p", v) for v in g.vertices]
    gens += [("Q", e.name, e.ends[1], 0) for e in g.edges]
    for e, v in g.half_edges():
        for k in range(1, kmax + 1):
            gens.append(("P", e, v, k))
            gens.append(("Q", e, v, k))
    naive, delta = {}, {}
    for v in g.vertices:
        col = {}
        for e in g.incident[v]:
            lab, s = _q_label(g, e, v, 0)
            col = vadd(col, {lab: NovikovElement.constant(s, prec)})
        delta[("p", v)] = col
    for e, v in g.half_edges():
        w = g.edge(e).other(v)
        A = g.area(e)
        for k in range(1, kmax + 1):
            naive[("P", e, v, k)] = {("Q", e, v, k): NovikovElement.constant(-1, prec)}
            # the same generator is p_{e/w,-k}: it propagates through w
            col = {}
            for e2 in g.other_edges(w, e):
                A2 = g.area(e2)
                for l in range(0, kmax + 1):
                    c = coefficient(g.label(e, w), g.label(e2, w), k, l, kmax)
                    if not c:
                        continue
                    a = Fraction(3, 4) * k * A + Fraction(1, 4) * l * A2
                    if a >= prec:
                        continue
                    lab, s = _q_label(g, e2, w, l)
                    col = vadd(col, {lab: Tm(a, c * s, prec)})
            delta[("P", e, v, k)] = col
    return FloerComplex(g, gens, Operator(naive, prec), Operator(delta, prec), prec, kmax)


def build_local_complex(g, v, prec, kmax=None):
    """The generators of ``F(P_v; H)`` near ``p_v`` with ``|k| <= kmax``."""
    prec = as_fraction(prec)
    if kmax is None:
        kmax = default_kmax(g, prec)
    gens = [("p", v)]
    for e in g.incident[v]:
        gens += [("P", e, v, k) for k in range(-kmax, kmax + 1)]
        gens += [("Q", e, v, k) for k in range(0, kmax + 1)]
    naive, delta = {}, {}
    delta[("p", v)] = {("Q", e, v, 0): NovikovElement.constant(1, prec) for e in g.incident[v]}
    for e in g.incident[v]:
        A = g.area(e)
        for k in range(0, kmax + 1):
            naive[("P", e, v, k)] = {("Q", e, v, k): NovikovElement.constant(-1, prec)}
        for k in range(1, kmax + 1):
            col = {}
            for e2 in g.other_edges(v, e):
                A2 = g.area(e2)
                for l in range(0, kmax + 1):
                    c = coefficient(g.label(e, v), g.label(e2, v), k, l, kmax)
                    a = Fraction(3, 4) * k * A + Fraction(1, 4) * l * A2
                    if c and a < prec:
                        col[("Q", e2, v, l)] = Tm(a, c, prec)
            delta[("P", e, v, -k)] = col
    return FloerComplex(g, gens, Operator(naive, prec), Operator(delta, prec), prec, kmax,
                        local_vertex=v)


def local_representatives(g, v, prec, kmax=None):
    """Closed degree-zero elements ``p~_v`` and ``p~_{e/v,-k}`` of the local complex."""
    prec = as_fraction(prec)
    if kmax is None:
        kmax = default_kmax(g, prec)
    reps = {}
    reps[("p", v)] = vadd(basis_vector(("p", v), prec),
                          *[{("P", e, v, 0): Tm(-annulus_area(g, e, 0), 1, prec)}
                            for e in g.incident[v]])
    for e in g.incident[v]:
        for k in range(1, kmax + 1):
            vec = basis_vector(("P", e, v, -k), prec)
            for e2 in g.other_edges(v, e):
                for l in range(0, kmax + 1):
                    c = coefficient(g.label(e, v), g.label(e2, v), k, l, kmax)
                    a = annulus_area(g, e, -k) - annulus_area(g, e2, l)
                    if c and a < prec:
                        vec = vadd(vec, {("P", e2, v, l): Tm(a, c, prec)})
            reps[("P", e, v, -k)] = vec
    return reps


def naive_contraction(cx, small):
    """Contraction of ``(CF, d_naive)`` onto the span of ``small``."""
    prec = cx.prec
    i = Operator({x: basis_vector(x, prec) for x in small}, prec)
    p = Operator({x: basis_vector(x, prec) for x in small}, prec)
    h = {}
    for x, col in cx.d_naive.columns.items():
        for y, c in col.items():
            # d_naive x = c y, so h y = x / c
            h[y] = {x: NovikovElement.constant(1, prec) / c}
    dL = Operator({}, prec)
    return Contraction(cx.gens, small, cx.deg, {x: cx.deg[x] for x in small},
                       cx.d_naive, dL, i, p, Operator(h, prec), prec)


def end_L0_contraction(g, prec, kmax=None):
    """The naive contraction of the global ``L_0`` complex and its perturbation."""
    cx = build_cf_end_L0(g, prec, kmax)
    small = [("p", v) for v in g.vertices] + [("Q", e.name, e.ends[1], 0) for e in g.edges]
    c0 = naive_contraction(cx, small)
    return cx, c0, perturb_contraction(c0, cx.delta)


def local_contraction(g, v, prec, kmax=None):
    cx = build_local_complex(g, v, prec, kmax)
    small = [("p", v)] + [("P", e, v, -k) for e in g.incident[v] for k in range(1, cx.kmax + 1)]
    c0 = naive_contraction(cx, small)
    return cx, c0, perturb_contraction(c0, cx.delta)


def cohomology_basis(cx):
    """Dimensions of the cohomology in degrees 0 and 1, plus representatives.

    For a local complex the degree-zero representatives are the closed
    elements ``p~``; for the global ``L_0`` complex they are the
    HPL-corrected inclusions of the graph cohomology classes.
    """
    m = cx.matrix()
    rank = valuation_rank(m).rank
    n0, n1 = len(cx.degree_part(0)), len(cx.degree_part(1))
    out = {"h0": n0 - rank, "h1": n1 - rank, "rank": rank}
    g = cx.graph
    if cx.local_vertex is not None:
        out["representatives"] = local_representatives(g, cx.local_vertex, cx.prec, cx.kmax)
    else:
        unit = {("p", v): NovikovElement.constant(1, cx.prec) for v in g.vertices}
        out["representatives"] = {"unit": cx.d_naive and _i_tilde(cx, unit)}
    return out


def _i_tilde(cx, vec):
    small = [("p", v) for v in cx.graph.vertices] + \
        [("Q", e.name, e.ends[1], 0) for e in cx.graph.edges]
    c = perturb_contraction(naive_contraction(cx, small), cx.delta)
    return c.i(vec)


# -- cochains of the graph ------------------------------------------------------

def graph_cup(g, prec):
    """Alexander-Whitney cup product on vertex/edge cochains (``z_e`` runs tail -> head)."""
    def prod(a, b):
        if a[0] == "p" and b[0] == "p":
            return basis_vector(a, prec) if a == b else {}
        if a[0] == "p" and b[0] == "Q":
            return basis_vector(b, prec) if g.edge(b[1]).ends[0] == a[1] else {}
        if a[0] == "Q" and b[0] == "p":
            return basis_vector(a, prec) if g.edge(a[1]).ends[1] == b[1] else {}
        return {}
    return prod


def end_L0_ainfinity(g, prec, kmax=None, n_max=4):
    """Pull the cup-product DG algebra back to the big complex and transfer it again.

    Returns ``(contraction, mu_K, mu_L, lam)``.
    """
    cx, c0, c = end_L0_contraction(g, prec, kmax)
    cup = graph_cup(g, c.prec)
    mu_small = dg_structure(c.L, c.deg_L, c.dL, cup, c.prec)

    def mu2_K(labs):
        a2, a1 = labs
        x2, x1 = c.p(basis_vector(a2, c.prec)), c.p(basis_vector(a1, c.prec))
        return c.i(mu_small.mu_vec(2, [x2, x1]))

    mu_K = AInfinityStructure(cx.gens, cx.deg,
                              {1: lambda labs: c.dK(basis_vector(labs[0], c.prec)), 2: mu2_K},
                              c.prec)
    mu_L, lam = transfer_ainfinity(c, mu_K, n_max)
    return c, mu_K, mu_L, lam


# -- local products and restrictions ----------------------------------------------

def _check_local(g, v, x):
    if x[0] == "Q":
        raise NotDegreeZero("%r has degree 1" % (x,))
    if x[0] == "p":
        if x[1] != v:
            raise NotLocal("%r is not at %s" % (x, v))
        return
    if x[0] != "P" or x[2] != v or x[3] >= 0:
        raise NotLocal("%r is not a generator p_{e/%s,-k}" % (x, v))


def local_mu2(g, v, a, b):
    """``mu^2`` on the area-rescaled generators of ``F(P_v)``; rational structure constants."""
    _check_local(g, v, a)
    _check_local(g, v, b)
    one = NovikovElement.constant(1)
    if a[0] == "p":
        return {b: one}
    if b[0] == "p":
        return {a: one}
    e1, k1 = a[1], -a[3]
    e2, k2 = b[1], -b[3]
    if e1 == e2:
        return {("P", e1, v, -(k1 + k2)): one}
    l1, l2 = g.label(e1, v), g.label(e2, v)
    out = {}
    K = K_coefficient(l1, l2, k1, k2)
    if K:
        out[("p", v)] = NovikovElement.constant(K)
    for bb in range(k1):
        c = coefficient(l2, l1, k2, bb, max(k1, k2) + 1)
        if c:
            out = vadd(out, {("P", e1, v, bb - k1): NovikovElement.constant(c)})
    for aa in range(k2):
        c = coefficient(l1, l2, k1, aa, max(k1, k2) + 1)
        if c:
            out = vadd(out, {("P", e2, v, aa - k2): NovikovElement.constant(c)})
    return out


def restriction_to_edge(g, v, e, cls, prec, kmax=None):
    """``Q`` applied to a local representative, as a combination of ``p_{e/v,l}``."""
    prec = as_fraction(prec)
    if kmax is None:
        kmax = default_kmax(g, prec)
    if e not in g.incident[v]:
        raise NotLocal("%s is not at %s" % (e, v))
    if cls == ("p", v):
        return {("P", e, v, 0): Tm(-annulus_area(g, e, 0), 1, prec)}
    if cls[0] != "P" or cls[2] != v or cls[3] >= 0:
        raise NotRepresentative("%r is not a local representative" % (cls,))
    e2, k = cls[1], -cls[3]
    if e2 == e:
        return {cls: NovikovElement.constant(1, prec)}
    out = {}
    for l in range(0, kmax + 1):
        c = coefficient(g.label(e2, v), g.label(e, v), k, l, kmax)
        a = annulus_area(g, e2, -k) - annulus_area(g, e, l)
        if c and a < prec:
            out[("P", e, v, l)] = Tm(a, c, prec)
    return out


def local_generators(g, v, kbound):
    return [("p", v)] + [("P", e, v, -k) for e in g.incident[v] for k in range(1, kbound + 1)]


def _as_function(g, v, vec, rescaled):
    """A combination of local generators as a function on ``U_v``."""
    const, coeffs = NovikovElement.zero(), {}
    for lab, c in vec.items():
        if lab[0] == "p":
            const = const + c
            continue
        e, k = lab[1], -lab[3]
        c = c if rescaled else c.shift(annulus_area(g, e, -k))
        coeffs[(e, k)] = coeffs[(e, k)] + c if (e, k) in coeffs else c
    return AffinoidFunctionUv(g, v, const, coeffs)


def _edge_function(g, v, e, vec, prec):
    """A combination of ``p_{e/v,l}`` as a Laurent series on ``U_e``."""
    out = {}
    for lab, c in vec.items():
        l = lab[3]
        c = c.shift(annulus_area(g, e, l))
        out[l] = out[l] + c if l in out else c
    return AffinoidFunctionUe(g, e, v, out, prec)


def check_local_ring_map(g, v, kbound, prec, kmax=None):
    """Compare ``local_mu2`` with ``multiply_uv`` and test that restriction is multiplicative.

    Returns ``{"structure_constants": {...}, "restriction": {...}}`` with the
    number of products checked and the failing input pairs.
    """
    prec = as_fraction(prec)
    gens = local_generators(g, v, kbound)
    sc = {"checked": 0, "failures": []}
    rs = {"checked": 0, "failures": []}
    for a in gens:
        for b in gens:
            m = local_mu2(g, v, a, b)
            lhs = _as_function(g, v, m, True)
            rhs = _as_function(g, v, {a: NovikovElement.constant(1)}, True) * \
                _as_function(g, v, {b: NovikovElement.constant(1)}, True)
            sc["checked"] += 1
            if lhs.defect(rhs) is not None:
                sc["failures"].append([list(a), list(b)])
            # the same product on the unscaled generators
            shift = _gen_area(g, a) + _gen_area(g, b)
            m_un = {z: c.shift(shift - _gen_area(g, z)) for z, c in m.items()}
            for e in g.incident[v]:
                left = {}
                for z, c in m_un.items():
                    left = vadd(left, vscale(c, restriction_to_edge(g, v, e, z, prec, kmax)))
                fa = _edge_function(g, v, e, restriction_to_edge(g, v, e, a, prec, kmax), prec)
                fb = _edge_function(g, v, e, restriction_to_edge(g, v, e, b, prec, kmax), prec)
                d = _edge_function(g, v, e, left, prec).defect(fa * fb)
                rs["checked"] += 1
                if d is not None and d < prec:
                    rs["failures"].append([list(a), list(b), e])
    return {"structure_constants": sc, "restriction": rs}


def _gen_area(g, lab):
    return Fraction(0) if lab[0] == "p" else annulus_area(g, lab[1], lab[3])


# -- the degree-zero model of a pair -----------------------------------------------

class PairModel:
    """Vertex slots and edge modes of ``CF^0(L, L'; H)`` with the operator ``-h delta^1``.

    An edge mode ``("E", e, m)`` is the section ``t_{e/a}^m`` on ``U_e`` written
    in the trivialization of the tail ``a = ends[0]``; in the head
    trivialization it is ``R T^{S_{e/a} + m A_e} t_{e/b}^{-(m + r_e)}``.
    """

    def __init__(self, L, Lp, prec):
        g = L.graph
        self.graph = g
        self.prec = as_fraction(prec)
        rot, areas, mono = L.relative_to(Lp)
        bad = [e for e, r in rot.items() if r <= 0]
        if bad:
            raise NotDegreeZeroConcentrated("relative rotation not positive on %s" % ", ".join(bad))
        self.r = rot
        self.S = areas
        self.R = mono

    def side_power(self, e, m, side):
        """Exponent of ``t_{e/side}`` and the coefficient factor for mode ``t_{e/a}^m``."""
        g = self.graph
        a, b = g.edge(e).ends
        if side == a:
            return m, NovikovElement.constant(1)
        A = g.area(e)
        return -(m + self.r[e]), self.R[(e, a)].shift(self.S[(e, a)] + m * A)

    def to_tail(self, e, side, n, coeff):
        """Mode ``coeff * t_{e/side}^n`` (side trivialization) as a tail mode."""
        g = self.graph
        a, b = g.edge(e).ends
        if side == a:
            return ("E", e, n), coeff
        # t_{e/b}^n in b-triv equals R^{-1} T^{-S - mA} t_{e/a}^m with n = -(m + r)
        m = -n - self.r[e]
        A = g.area(e)
        inv = _unit_inverse(self.R[(e, a)], self.prec * 4)
        return ("E", e, m), coeff * inv.shift(-(self.S[(e, a)] + m * A))

    def mode_norm(self, e, m, coeff):
        """Sup-norm valuation of the section on ``U_e`` (tail coordinate)."""
        A = self.graph.area(e)
        v = coeff.valuation()
        if v is None:
            return None
        return v + (Fraction(1, 4) * m * A if m >= 0 else Fraction(3, 4) * m * A)

    def step(self, vec, sink=None):
        """Apply ``-h delta^1``; ``sink(v, key, coeff)`` receives the U_v monomials."""
        g = self.graph
        out = {}
        for key, c in vec.items():
            if key[0] == "V":
                v = key[1]
                for e in g.incident[v]:
                    lab, x = self.to_tail(e, v, 0, c)
                    out = vadd(out, {lab: x})
                continue
            _, e, m = key
            for side in g.edge(e).ends:
                n, factor = self.side_power(e, m, side)
                if n >= 0:
                    continue
                coeff = c * factor
                k = -n
                for e2 in g.other_edges(side, e):
                    la, lb = g.label(e, side), g.label(e2, side)
                    for l in range(0, self._lmax(e2, coeff, k) + 1):
                        C = coefficient(la, lb, k, l)
                        if not C:
                            continue
                        lab, x = self.to_tail(e2, side, l, coeff * C)
                        out = vadd(out, {lab: x})
        return {k: x for k, x in out.items() if self._keep(k, x)}

    def _lmax(self, e2, coeff, k):
        A2 = self.graph.area(e2)
        v = coeff.valuation()
        budget = self.prec - v if v is not None else 0
        return max(0, int(ceil(4 * budget / A2)) + 1)

    def _keep(self, key, x):
        if not x.terms:
            return False
        _, e, m = key
        a, b = self.graph.edge(e).ends
        vals = []
        for side in (a, b):
            n, factor = self.side_power(e, m, side)
            y = x * factor
            A = self.graph.area(e)
            vv = y.valuation()
            if vv is None:
                continue
            vals.append(vv + (Fraction(1, 4) * n * A if n >= 0 else Fraction(3, 4) * n * A))
        return bool(vals) and min(vals) < self.prec

    def local_function(self, vec, v):
        """U_v monomials of a vector: vertex slot plus negative-power modes at ``v``."""
        g = self.graph
        const = NovikovElement.zero(self.prec)
        coeffs = {}
        for key, c in vec.items():
            if key[0] == "V":
                if key[1] == v:
                    const = const + c
                continue
            _, e, m = key
            if v not in g.edge(e).ends:
                continue
            n, factor = self.side_power(e, m, v)
            if n < 0:
                k = -n
                coeffs[(e, k)] = coeffs.get((e, k), NovikovElement.zero()) + c * factor
        return const, coeffs


def build_cf_pair_degree0(L, Lp, g=None, prec=None):
    """The degree-zero pair model; rejects pairs with a non-positive relative rotation."""
    return PairModel(L, Lp, prec)
