"""Functions on the affinoids U_v and U_e, bundle gluing data and the small Čech complex.

A function on ``U_v`` is ``c + sum_{e,k>=1} c_{e,k} t_{e/v}^{-k}``; a function
on the annulus ``U_e`` is a Laurent series in ``t_{e/v}`` for a fixed
reference half-edge.  Terms whose sup-norm valuation reaches ``Lambda``
are dropped.
"""

from fractions import Fraction
from math import ceil

from .graph import cycle_basis, path_transport, enumerate_reduced_paths, INF
from .novikov import NovikovElement, as_fraction, frac_str, nov_invert, nov_divide
from .propagation import K_coefficient, coefficient


class PoleOnOrbit(ArithmeticError):
    pass


def _zero(prec):
    return NovikovElement.zero(prec)


def _nov(x, prec=None):
    x = NovikovElement.coerce(x)
    return x.truncate(prec) if prec is not None else x


def uv_norm(c, k, A):
    v = c.valuation()
    return None if v is None else v - Fraction(3, 4) * k * A


def ue_norm(c, k, A):
    v = c.valuation()
    if v is None:
        return None
    return v + (Fraction(1, 4) if k >= 0 else Fraction(3, 4)) * k * A


class AffinoidFunctionUv:
    __slots__ = ("graph", "vertex", "const", "coeffs", "prec")

    def __init__(self, g, v, const=0, coeffs=None, prec=None):
        self.graph = g
        self.vertex = v
        self.prec = None if prec is None else as_fraction(prec)
        self.const = _nov(const, self.prec)
        self.coeffs = {}
        for (e, k), c in (coeffs or {}).items():
            if e not in g.incident[v] or k < 1:
                raise ValueError("no monomial t_{%s/%s}^-%d on U_%s" % (e, v, k, v))
            self._add(e, k, _nov(c))
        self._truncate()

    def _add(self, e, k, c):
        self.coeffs[(e, k)] = self.coeffs[(e, k)] + c if (e, k) in self.coeffs else c

    def _truncate(self):
        if self.prec is None:
            self.coeffs = {key: c for key, c in self.coeffs.items() if c.terms}
            return
        keep = {}
        for (e, k), c in self.coeffs.items():
            A = self.graph.area(e)
            # coefficient precision in the sup norm
            c = c.truncate(self.prec + Fraction(3, 4) * k * A)
            n = uv_norm(c, k, A)
            if n is not None and n < self.prec:
                keep[(e, k)] = c
        self.coeffs = keep
        self.const = self.const.truncate(self.prec)

    @classmethod
    def monomial(cls, g, v, e=None, k=0, coeff=1, prec=None):
        if e is None or k == 0:
            return cls(g, v, coeff, {}, prec)
        return cls(g, v, 0, {(e, k): coeff}, prec)

    def max_order(self):
        return max([k for _, k in self.coeffs] or [0])

    def __add__(self, other):
        prec = _pmin(self.prec, other.prec)
        out = AffinoidFunctionUv(self.graph, self.vertex, self.const + other.const,
                                 dict(self.coeffs), prec)
        for (e, k), c in other.coeffs.items():
            out._add(e, k, c)
        out._truncate()
        return out

    def __neg__(self):
        return AffinoidFunctionUv(self.graph, self.vertex, -self.const,
                                  {key: -c for key, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return multiply_uv(self, other)

    def scale(self, c):
        c = NovikovElement.coerce(c)
        return AffinoidFunctionUv(self.graph, self.vertex, self.const * c,
                                  {key: x * c for key, x in self.coeffs.items()}, self.prec)

    def defect(self, other):
        """Smallest sup-norm valuation of ``self - other``; ``None`` when equal."""
        d = self - other
        vals = [n for n in (d.const.valuation(),) if n is not None]
        for (e, k), c in d.coeffs.items():
            vals.append(uv_norm(c, k, self.graph.area(e)))
        return min(vals) if vals else None

    def __eq__(self, other):
        if not isinstance(other, AffinoidFunctionUv) or other.vertex != self.vertex:
            return NotImplemented
        dv = self.defect(other)
        prec = _pmin(self.prec, other.prec)
        return dv is None or (prec is not None and dv >= prec)

    __hash__ = None

    def to_json(self):
        out = {"vertex": self.vertex, "1": self.const.to_json()}
        for e in self.graph.incident[self.vertex]:
            terms = {str(-k): c.to_json() for (e2, k), c in sorted(self.coeffs.items())
                     if e2 == e and c.terms}
            if terms:
                out[e] = terms
        if self.prec is not None:
            out["precision"] = frac_str(self.prec)
        return out

    def __repr__(self):
        parts = [repr(self.const)]
        for (e, k), c in sorted(self.coeffs.items()):
            parts.append("(%r)*t_%s^-%d" % (c, e, k))
        return "Uv[%s](%s)" % (self.vertex, " + ".join(parts))


class AffinoidFunctionUe:
    __slots__ = ("graph", "edge", "ref", "coeffs", "prec")

    def __init__(self, g, e, ref, coeffs=None, prec=None):
        self.graph = g
        self.edge = e
        self.ref = ref
        self.prec = None if prec is None else as_fraction(prec)
        self.coeffs = {}
        for k, c in (coeffs or {}).items():
            c = _nov(c)
            self.coeffs[k] = self.coeffs[k] + c if k in self.coeffs else c
        self._truncate()

    def _truncate(self):
        A = self.graph.area(self.edge)
        keep = {}
        for k, c in self.coeffs.items():
            if self.prec is not None:
                c = c.truncate(self.prec - (Fraction(1, 4) if k >= 0 else Fraction(3, 4)) * k * A)
            n = ue_norm(c, k, A)
            if n is not None and (self.prec is None or n < self.prec):
                keep[k] = c
        self.coeffs = keep

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return AffinoidFunctionUe(self.graph, self.edge, self.ref, out, _pmin(self.prec, other.prec))

    def __neg__(self):
        return AffinoidFunctionUe(self.graph, self.edge, self.ref,
                                  {k: -c for k, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        prec = _pmin(self.prec, other.prec)
        out = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                c = _tmul(c1, c2)
                out[k1 + k2] = out[k1 + k2] + c if k1 + k2 in out else c
        return AffinoidFunctionUe(self.graph, self.edge, self.ref, out, prec)

    def defect(self, other):
        d = self - other
        A = self.graph.area(self.edge)
        vals = [ue_norm(c, k, A) for k, c in d.coeffs.items()]
        vals = [x for x in vals if x is not None]
        return min(vals) if vals else None

    def __eq__(self, other):
        if not isinstance(other, AffinoidFunctionUe):
            return NotImplemented
        dv = self.defect(other)
        prec = _pmin(self.prec, other.prec)
        return dv is None or (prec is not None and dv >= prec)

    __hash__ = None

    def to_json(self):
        out = {"edge": self.edge, "ref": self.ref,
               "terms": {str(k): c.to_json() for k, c in sorted(self.coeffs.items()) if c.terms}}
        if self.prec is not None:
            out["precision"] = frac_str(self.prec)
        return out

    def __repr__(self):
        return "Ue[%s/%s](%s)" % (self.edge, self.ref, " + ".join(
            "(%r)*t^%d" % (c, k) for k, c in sorted(self.coeffs.items())))


def _tmul(a, b):
    """Product with the precision it actually has, ``min(p_a + v_b, p_b + v_a)``.

    ``nov_mul`` keeps only the smaller precision, which throws away known
    terms when one factor has positive valuation.
    """
    pa, pb = a.prec, b.prec
    va, vb = a.valuation(), b.valuation()
    cands = []
    if pa is not None:
        cands.append(pa + (vb if vb is not None else pb if pb is not None else 0))
    if pb is not None:
        cands.append(pb + (va if va is not None else pa if pa is not None else 0))
    exact = NovikovElement._raw(a.terms, None) * NovikovElement._raw(b.terms, None)
    return exact.truncate(min(cands)) if cands else exact


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _monomial_product(g, v, e1, k1, e2, k2):
    """``t_{e1}^{-k1} t_{e2}^{-k2}`` as ``(const, {(e, k): c})`` with rational entries."""
    if e1 == e2:
        return Fraction(0), {(e1, k1 + k2): Fraction(1)}
    l1, l2 = g.label(e1, v), g.label(e2, v)
    out = {}
    N = max(k1, k2) + 1
    for b in range(k1):
        c = coefficient(l2, l1, k2, b, N)
        if c:
            out[(e1, k1 - b)] = out.get((e1, k1 - b), 0) + c
    for a in range(k2):
        c = coefficient(l1, l2, k1, a, N)
        if c:
            out[(e2, k2 - a)] = out.get((e2, k2 - a), 0) + c
    return K_coefficient(l1, l2, k1, k2), out


def multiply_uv(f, h):
    if f.vertex != h.vertex:
        raise ValueError("functions live on different vertices")
    g, v = f.graph, f.vertex
    prec = _pmin(f.prec, h.prec)
    const = f.const * h.const
    coeffs = {}

    def add(key, c):
        coeffs[key] = coeffs[key] + c if key in coeffs else c

    for key, c in f.coeffs.items():
        add(key, _tmul(c, h.const))
    for key, c in h.coeffs.items():
        add(key, _tmul(c, f.const))
    for (e1, k1), c1 in f.coeffs.items():
        for (e2, k2), c2 in h.coeffs.items():
            c = _tmul(c1, c2)
            if not c.terms:
                continue
            K, terms = _monomial_product(g, v, e1, k1, e2, k2)
            if K:
                const = const + c * K
            for key, x in terms.items():
                add(key, c * x)
    return AffinoidFunctionUv(g, v, const, coeffs, prec)


def restrict_uv_to_ue(f, e):
    g, v = f.graph, f.vertex
    if e not in g.incident[v]:
        raise ValueError("%s is not at %s" % (e, v))
    prec = f.prec
    A = g.area(e)
    out = {0: f.const}
    for (e2, k), c in f.coeffs.items():
        if e2 == e:
            out[-k] = out[-k] + c if -k in out else c
            continue
        vc = c.valuation()
        if vc is None:
            continue
        lmax = int(ceil(4 * (prec - vc) / A)) if prec is not None else 4 * k + 16
        la, lb = g.label(e2, v), g.label(e, v)
        for l in range(0, max(lmax, 0) + 1):
            C = coefficient(la, lb, k, l, lmax)
            if C:
                out[l] = out[l] + c * C if l in out else c * C
    return AffinoidFunctionUe(g, e, v, out, prec)


def uv_to_ue_other_side(fe):
    """Rewrite a function on ``U_e`` in the coordinate of the other end."""
    g = fe.graph
    w = g.edge(fe.edge).other(fe.ref)
    A = g.area(fe.edge)
    # t_{e/v}^k = q^k t_{e/w}^{-k}
    return AffinoidFunctionUe(g, fe.edge, w, {-k: c.shift(k * A) for k, c in fe.coeffs.items()},
                              fe.prec)


# -- gluing data ---------------------------------------------------------------

class BundleCocycle:
    """``u_{e/v} = R_{e/v} T^{S_{e/v}} t_{e/v}^{-r_e}`` for every half-edge."""

    def __init__(self, graph, units):
        self.graph = graph
        self.units = dict(units)  # (e, v) -> (R, S, r)

    @property
    def slope(self):
        return sum(self.units[(e.name, e.ends[0])][2] for e in self.graph.edges)

    def consistent(self):
        """``u_{e/v}`` times ``u_{e/v'}`` rewritten through ``t_{e/v} t_{e/v'} = q_e`` is 1."""
        for e in self.graph.edges:
            a, b = e.ends
            Ra, Sa, ra = self.units[(e.name, a)]
            Rb, Sb, rb = self.units[(e.name, b)]
            # u_a u_b = Ra Rb T^{Sa + Sb} (t_a t_b)^{-r} = Ra Rb T^{Sa + Sb - r A}
            if ra != rb:
                return False
            if Sa + Sb - ra * e.area != 0:
                return False
            if not (Ra * Rb - NovikovElement.constant(1)).is_zero():
                return False
        return True


def bundle_cocycle(L):
    units = {}
    for (e, v), S in L.areas.items():
        units[(e, v)] = (L.monodromies[(e, v)], S, L.rotations[e])
    bc = BundleCocycle(L.graph, units)
    return bc, bc.slope


# -- Čech complex -----------------------------------------------------------------

class CechElement:
    """Degree-0: a scalar per edge.  Degree-1: per vertex an element of ``V_v``.

    ``V_v`` is spanned by ``e_{e/v}`` modulo their sum; coordinates are
    stored normalized so that the last incident edge has coefficient 0.
    """

    def __init__(self, g, degree0=None, degree1=None, prec=None):
        self.graph = g
        self.prec = prec
        self.degree0 = {e: _nov(c, prec) for e, c in (degree0 or {}).items()}
        self.degree1 = {}
        for v, comp in (degree1 or {}).items():
            self.degree1[v] = self._normalize(v, comp)

    def _normalize(self, v, comp):
        edges = self.graph.incident[v]
        last = _nov(comp.get(edges[-1], 0), self.prec)
        return {e: _nov(comp.get(e, 0), self.prec) - last for e in edges[:-1]}

    def xi(self, v, e1, e2):
        """``xi_v^{e1,e2}``: the functional ``e_{e1/v} -> 1``, ``e_{e2/v} -> -1``, third -> 0."""
        edges = self.graph.incident[v]
        comp = self.degree1.get(v) or {e: _zero(self.prec) for e in edges[:-1]}
        third = next(x for x in edges if x not in (e1, e2))
        full = dict(comp)
        full[edges[-1]] = _zero(self.prec)
        # subtract the third coordinate so the functional is well defined
        return (full[e1] - full[third]) - (full[e2] - full[third])

    def differential(self):
        """``d({f_e})_v = sum_{e/v} f_e e_{e/v}``."""
        deg1 = {}
        for v in self.graph.vertices:
            deg1[v] = {e: self.degree0.get(e, _zero(self.prec)) for e in self.graph.incident[v]}
        return CechElement(self.graph, None, deg1, self.prec)


def cech_constant_cocycle_to_group(a, base=None, loops=None):
    """Sum ``xi_{v_i}^{e_i,e_{i+1}}(a_{v_i})`` around each basis loop."""
    g = a.graph
    base = g.vertices[0] if base is None else base
    loops = cycle_basis(g, base) if loops is None else loops
    out = []
    for P in loops:
        total = _zero(a.prec)
        n = len(P.edges)
        for i in range(1, n + 1):
            v = P.vertices[i]
            e_in = P.edges[i - 1]
            e_out = P.edges[i % n]
            if e_in == e_out:
                continue
            total = total + a.xi(v, e_in, e_out)
        out.append(total)
    return out


def phi_value(s, y, prec):
    """``s/(y - s)`` with ``y`` a Novikov element or ``INF``."""
    if y is INF:
        return _zero(prec)
    y = NovikovElement.coerce(y)
    den = (y - s).truncate(prec)
    if den.is_zero():
        raise PoleOnOrbit("orbit point meets the pole s within precision")
    return (s * nov_invert(den, prec)).truncate(prec)


class InsufficientWorkingPrecision(ArithmeticError):
    pass


def phi_of_mobius(s, M, x, prec, known=None):
    """``s/(M(x) - s)`` computed as one quotient; ``x`` exact or ``INF``.

    The entries of ``M`` are exact, or known modulo ``T^known`` with
    nonnegative exponents.  In the second case the quotient ``N/D`` is
    determined modulo ``T^{known - 2 v(D) + min(v(D), v(N))}``; if that falls
    short of ``prec`` InsufficientWorkingPrecision is raised.
    """
    a, b, c, d = (NovikovElement.coerce(y) for y in M.entries())
    if x is INF:
        num, den = a, c
    else:
        x = NovikovElement.coerce(x)
        num, den = a * x + b, c * x + d
    if den.is_zero():
        if known is not None:
            raise InsufficientWorkingPrecision("denominator vanishes mod T^%s" % known)
        return NovikovElement.zero(prec)
    bottom = num - s * den
    if bottom.is_zero():
        if known is not None:
            raise InsufficientWorkingPrecision("orbit point meets s mod T^%s" % known)
        raise PoleOnOrbit("orbit point is the pole s")
    top = s * den
    if known is not None:
        vD, vN = bottom.valuation(), top.valuation()
        if known - 2 * vD + min(vD, vN) < prec:
            raise InsufficientWorkingPrecision("entries known mod T^%s only" % known)
    return nov_divide(top, bottom, prec)


def cech_principal_parts(s, g, base, prec, budget=None, points=(Fraction(-1), Fraction(2)),
                         cap=64):
    """The constant degree-one Čech class of ``phi = s/(t - s)`` at the base half-edge.

    ``f_e`` is evaluated at two points of each vertex component ``W_v``; the
    degree-one element is ``d({f_e})`` evaluated at ``points[0]``, and the
    result at the other points is kept in ``spread`` (its deviation
    valuation measures the failure of constancy).
    """
    e0, v0 = base
    prec = as_fraction(prec)
    s = NovikovElement.coerce(s)
    budget = prec + 1 if budget is None else as_fraction(budget)
    paths = list(enumerate_reduced_paths(g, v0, budget, cap))
    maps = {}
    for P in paths:
        for e in g.incident[P.end]:
            if not (P.edges and P.edges[-1] == e):
                maps[(P, e)] = path_transport(g, P, e0, e)
    zero = NovikovElement.zero()
    samples = {}
    for z in points:
        comp = {}
        for v in g.vertices:
            comp[v] = {}
            for e in g.incident[v]:
                w = g.edge(e).other(v)
                tv = g.chart(e, v)(z)
                te = {v: NovikovElement.constant(tv), w: g.q(e) * NovikovElement.constant(1 / tv)}
                total = NovikovElement.zero(prec)
                for P in paths:
                    M = maps.get((P, e))
                    if M is None or P.end not in (v, w):
                        continue
                    total = total + phi_of_mobius(s, M, te[P.end], prec) - \
                        phi_of_mobius(s, M, zero, prec)
                comp[v][e] = total
        samples[z] = CechElement(g, None, comp, prec)
    first = samples[points[0]]
    spread = None
    for z in points[1:]:
        for v in g.vertices:
            for e in first.degree1[v]:
                d = (first.degree1[v][e] - samples[z].degree1[v][e]).valuation()
                if d is not None and (spread is None or d < spread):
                    spread = d
    first.spread = spread
    return first
