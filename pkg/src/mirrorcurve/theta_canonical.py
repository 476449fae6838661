"""Theta functions of pairs of v.b.-type objects and the canonical map on both sides."""

from fractions import Fraction
from math import ceil, gcd

import numpy as np

from .bside import (AffinoidFunctionUe, AffinoidFunctionUv, PoleOnOrbit, _tmul,
                    cech_constant_cocycle_to_group, cech_principal_parts, phi_of_mobius,
                    restrict_uv_to_ue)
from .floer import NotDegreeZeroConcentrated, PairModel
from .graph import (INF, DenseTransportCache, ReducedPath, TransportCache, chart_change,
                    cycle_basis, enumerate_reduced_paths, path_transport, schottky_generator)
from .hpl import vadd
from .novikov import (NovikovElement, as_fraction, dense_divide, dense_mul, dense_valuation,
                      frac_str, from_dense, nov_divide, to_dense)
from .propagation import coefficient


class InvalidPointObject(ValueError):
    pass


class SchottkyCocycle:
    """One Novikov value per basis loop."""

    def __init__(self, loops, values, prec):
        self.loops = list(loops)
        self.values = [NovikovElement.coerce(v).truncate(prec) for v in values]
        self.prec = as_fraction(prec)

    def defects(self, other):
        out = []
        for a, b in zip(self.values, other.values):
            out.append((a - b).truncate(self.prec).valuation())
        return out

    def agrees(self, other):
        return all(d is None for d in self.defects(other))

    def to_json(self):
        return {"precision": frac_str(self.prec),
                "loops": [{"path": _path_json(P), "value": v.to_json()}
                          for P, v in zip(self.loops, self.values)]}

    def __repr__(self):
        return "SchottkyCocycle(%s)" % ", ".join(repr(v) for v in self.values)


def _path_json(P):
    seq = [P.vertices[0]]
    for e, v in zip(P.edges, P.vertices[1:]):
        seq += [e, v]
    return seq


class IntersectionPoint:
    """A point ``x`` of ``L ∩ L'`` inside ``P_{v0}``.

    ``rot`` and ``area`` hold ``r_{e/v}(x)`` and ``S_{e/v}(x)`` for the two
    half-edges of the host edge; a node ``p_{v0}`` has ``edge=None``.
    """

    def __init__(self, vertex, edge=None, rot=None, area=None):
        self.vertex = vertex
        self.edge = edge
        self.rot = dict(rot or {})
        self.area = {h: as_fraction(a) for h, a in (area or {}).items()}

    @classmethod
    def node(cls, v):
        return cls(v)

    def check(self, g, r_rel, S_rel):
        if self.edge is None:
            return True
        e = self.edge
        a, b = g.edge(e).ends
        v, w = self.vertex, g.edge(e).other(self.vertex)
        if self.rot[(e, v)] + self.rot[(e, w)] != r_rel[e]:
            return False
        lhs = self.area[(e, w)] - self.area[(e, v)] + self.rot[(e, v)] * g.area(e)
        return lhs == S_rel[(e, v)]

    def seed(self):
        """Exponent and area of the seed monomial ``T^S t_{e0/v0}^{-r}``."""
        if self.edge is None:
            return 0, Fraction(0)
        return self.rot[(self.edge, self.vertex)], self.area[(self.edge, self.vertex)]


class PointObject:
    """The circle ``L_1`` in the annulus of ``e0``: area ``B`` and a holonomy unit."""

    def __init__(self, g, edge, B, holonomy=1, vertex=None):
        self.graph = g
        self.edge = edge
        self.vertex = g.edge(edge).ends[0] if vertex is None else vertex
        self.B = as_fraction(B)
        self.holonomy = NovikovElement.coerce(holonomy)
        if not (0 < self.B < g.area(edge)):
            raise InvalidPointObject("need 0 < B < A_%s" % edge)
        if not self.holonomy.is_unit():
            raise InvalidPointObject("holonomy must be a unit")

    def s(self):
        return self.holonomy * NovikovElement.monomial(self.B)


# -- groupoid resummation ------------------------------------------------------------

def groupoid_resummation(g, path, e0, e, k, prec):
    """Both sides of the Schottky groupoid identity for ``t_{e0/v0}^{-k}`` along ``path``.

    The left side chains propagation coefficients, ``sum C_{k,k1} C_{k1,k2} ...
    C_{kn,0} q_{e1}^{k1} ... q_{en}^{kn}`` over ``k_i >= 0``; the right side is
    ``gamma_P^{e0,e}(0)^{-k}`` from the Moebius matrix.  Returns
    ``(lhs, rhs, defect valuation)``.
    """
    prec = as_fraction(prec)
    chain = [e0] + list(path.edges) + [e]
    if chain[1] == e0:
        raise ValueError("the identity needs e_1 != e_0")
    state = {k: NovikovElement.constant(1)}
    for i, v in enumerate(path.vertices):
        a, b = chain[i], chain[i + 1]
        la, lb = g.label(a, v), g.label(b, v)
        new = {}
        final = i == len(path.edges)
        A = g.area(b)
        for kk, c in state.items():
            if final:
                C = coefficient(la, lb, kk, 0)
                if C:
                    new[0] = new.get(0, NovikovElement.zero()) + c * C
                continue
            lmax = int(ceil((prec - c.valuation()) / A))
            for l in range(0, lmax + 1):
                C = coefficient(la, lb, kk, l, lmax)
                x = (c * C).shift(l * A).truncate(prec) if C else None
                if x is not None and x.terms:
                    new[l] = new[l] + x if l in new else x
        state = new
    lhs = state.get(0, NovikovElement.zero()).truncate(prec)
    M = path_transport(g, path, e0, e)
    _, b, _, d = (NovikovElement.coerce(y) for y in M.entries())
    rhs = nov_divide(d ** k, b ** k, prec)
    return lhs, rhs, (lhs - rhs).truncate(prec).valuation()


# -- theta functions ---------------------------------------------------------------

def _relative(L, Lp):
    rot, areas, mono = L.relative_to(Lp)
    bad = [e for e, r in rot.items() if r <= 0]
    if bad:
        raise NotDegreeZeroConcentrated("relative rotation not positive on %s" % ", ".join(bad))
    return rot, areas, mono


def _seed_data(g, x, areas, rot):
    if x.edge is None:
        return None, 0, Fraction(0)
    return x.edge, x.rot[(x.edge, x.vertex)], x.area[(x.edge, x.vertex)]


def default_theta_budget(g, L, Lp, x, prec):
    """Path weight beyond which every averaging term is ``0 mod T^prec``.

    A path term has sup norm at most ``T^{S(x) + sum S_{e_i/v_{i-1}} - 3/4 r_e A_e}``
    on ``U_v``, so weight ``w`` terms are below ``T^{4 sigma w - 3/4 max r_e A_e}``
    with ``sigma = min S_{e/v}/A_e``.  For an interior point, a path leaving
    through the host edge turns the seed into ``q^{-r(x)}`` times a positive
    power, which costs up to ``r(x) A_{e0}`` more.
    """
    rot, areas, _ = _relative(L, Lp)
    sigma = min(areas[h] / g.area(h[0]) for h in areas)
    if sigma <= 0:
        raise ValueError("averaging needs positive half-edge areas")
    worst = max(Fraction(3, 4) * rot[e.name] * e.area for e in g.edges)
    e0, r0, S = _seed_data(g, x, areas, rot)
    extra = r0 * g.area(e0) if e0 is not None else 0
    return (as_fraction(prec) + worst - min(S, 0) + extra) / (4 * sigma)


def _poly_mul(p, q, deg):
    out = [NovikovElement.zero() for _ in range(min(len(p) + len(q) - 1, deg + 1))]
    for i, a in enumerate(p):
        if not a.terms:
            continue
        for j, b in enumerate(q):
            if i + j > deg:
                break
            out[i + j] = out[i + j] + a * b
    return out


def _inverse_to(x, absprec):
    """``1/x`` modulo ``T^absprec`` for an exact ``x``."""
    return nov_divide(NovikovElement.constant(1), x, absprec)


class _SuffixMemo:
    """Suffix transports ``chart_i @ back_i`` on a dense grid modulo ``T^work``.

    Paths from one seed to one end share suffixes; truncation is exact
    because every generator entry has nonnegative exponents.
    """

    def __init__(self, g, work, extra=()):
        self.dc = DenseTransportCache(g, None, work, extra)
        self.work = self.dc.work
        self.den = self.dc.den
        self.g = g
        self.table = {}

    def suffix(self, es, vs, i):
        key = tuple(es[i - 1:])
        if key not in self.table:
            dc = self.dc
            if i == len(es):
                back = dc._chart(es[-1], vs[-1], True)
            else:
                back = self.suffix(es, vs, i + 1)[1]
            e, v = es[i - 1], vs[i]
            self.table[key] = (tuple(_as_int64(x) for x in dc.mul(dc._chart(e, v, False), back)),
                               dc.mul(dc.generator(e, v), back))
        return self.table[key]


def _as_int64(x):
    """An int64 array when every entry is a small integer, else ``x`` unchanged."""
    if all(type(y) is int and -_INT64_SAFE < y < _INT64_SAFE for y in x):
        return np.asarray(x, dtype=np.int64)
    return x


def _is_int64(x):
    if isinstance(x, np.ndarray):
        return x.dtype == np.int64
    return all(type(y) is int and -_INT64_SAFE < y < _INT64_SAFE for y in x)


def _nonnegative_generators(g):
    for e in g.edges:
        for v in e.ends:
            for y in schottky_generator(g, e.name, v).entries():
                if any(ex < 0 for ex, _ in NovikovElement.coerce(y).terms):
                    return False
    return True


def _path_term(g, path, x, rot, areas, mono, phi, prec, K, memo=None):
    """Laurent coefficients ``c_k`` of ``t_{e_n/v_n}^{-k}`` for one averaging path.

    ``memo`` is an optional ``_SuffixMemo`` shared between paths with the same end.
    """
    vs, es = path.vertices, path.edges
    n = len(es)
    en = es[-1]
    e0, r0, S0 = _seed_data(g, x, areas, rot)
    coeff = NovikovElement.coerce(phi)
    for e, u in zip(es, vs):
        coeff = coeff * mono[(e, u)].shift(areas[(e, u)])
    coeff = coeff.shift(S0)
    A = g.area(en)
    vc = coeff.valuation() or 0
    W = as_fraction(prec) + Fraction(3, 4) * K * A - vc + A

    if memo is not None and memo.work >= W and (W * memo.den).denominator == 1:
        dense = [memo.suffix(es, vs, i)[0] for i in range(1, n + 1)]
        rots = [rot[e] for e in es]
        if e0 is not None and r0:
            dc = memo.dc
            dense.append(dc.mul(dc._chart(e0, vs[0], False), memo.suffix(es, vs, 1)[1]))
            rots.append(r0)
        if all(m[0][0] for m in dense):
            cuts = [min(W, prec - vc + Fraction(3, 4) * k * A) for k in range(K + 1)]
            return [_tmul(coeff, fk) for fk in _grid_series(dense, rots, K, W, memo.den, cuts)]
    tail = g.chart(en, vs[-1]).novikov().adjugate()
    factors = []
    back = tail
    for i in range(n, 0, -1):
        e, v = es[i - 1], vs[i]
        factors.append((g.chart(e, v).novikov() @ back, rot[e]))
        back = schottky_generator(g, e, v) @ back
    factors.reverse()
    if e0 is not None and r0:
        factors.append((g.chart(e0, vs[0]).novikov() @ back, r0))
    entries = [[NovikovElement.coerce(y) for y in M.entries()] for M, _ in factors]
    fast = _dense_path_series(entries, [r for _, r in factors], K, W)
    if fast is not None:
        return [_tmul(coeff, fk) for fk in fast]
    # t_i^{-r} with t = 1/s: ((c + d s)/(a + b s))^r
    # a factor with a = 0 has a pole at s = 0; pull out s^m and expand N/D' to order K + m
    m = sum(r for (a, _, _, _), (_, r) in zip(entries, factors) if a.is_zero())
    N = [NovikovElement.constant(1)]
    D = [NovikovElement.constant(1)]
    for (a, b, c, d), (_, r) in zip(entries, factors):
        for _ in range(r):
            N = _poly_mul(N, [c, d], K + m)
            D = _poly_mul(D, [b] if a.is_zero() else [a, b], len(D) + 1)
    if any(not y.is_zero() for y in N[:m]):
        raise ValueError("averaging term has a pole at the marked point of %s" % en)
    v0 = D[0].valuation()
    inv = _inverse_to(D[0], W + 2 * max(v0, 0) + A)
    N = N[m:]
    f = []
    for k in range(K + 1):
        acc = N[k] if k < len(N) else NovikovElement.zero()
        for j in range(1, min(k, len(D) - 1) + 1):
            acc = acc - D[j] * f[k - j]
        f.append((acc * inv).truncate(W + 2 * abs(v0)))
    return [_tmul(coeff, fk) for fk in f]


def _dense_path_series(entries, rots, K, W):
    """Fast path of ``_path_term`` on a dense exponent grid.

    Applies when every matrix entry is a polynomial in ``T`` with
    nonnegative exponents and the constant terms ``a`` are units, so that
    truncating every intermediate at ``T^W`` is exact.  Returns ``None``
    otherwise.
    """
    den = W.denominator
    for row in entries:
        for y in row:
            for ex, _ in y.terms:
                if ex < 0:
                    return None
                den = den * ex.denominator // gcd(den, ex.denominator)
    if any(not row[0].is_unit() for row in entries):
        return None
    n = int(ceil(W * den))
    if n <= 0:
        return [NovikovElement.zero(W) for _ in range(K + 1)]
    return _grid_series([[to_dense(y, den, n) for y in row] for row in entries], rots, K, W, den)


_INT64_SAFE = 1 << 58


class _Overflow(Exception):
    pass


def _grid_series_int64(entries, rots, K, n, lead):
    """``_grid_series`` with machine integers; raises ``_Overflow`` if a bound could be exceeded.

    Polynomials in ``s`` with ``T``-series coefficients are arrays of shape
    ``(deg + 1, n)``.  Every convolution is checked with
    ``|p * q|_inf <= |p|_1 |q|_inf``, so sums of up to 32 stay inside int64.
    """
    def check(p, q):
        if int(np.abs(p).sum(axis=-1).max(initial=0)) * int(np.abs(q).max(initial=0)) >= _INT64_SAFE:
            raise _Overflow

    def rows_times(M, q):
        # each row of M times the T-series q, rows padded so products do not overlap
        check(M, q)
        L = M.shape[0]
        P = np.zeros((L, 2 * n), dtype=np.int64)
        P[:, :n] = M
        return np.convolve(P.ravel(), q)[:2 * n * L].reshape(L, 2 * n)[:, :n]

    def times_linear(M, lo, hi, deg):
        # M(s) * (lo + hi s), degree capped at deg
        L = min(M.shape[0] + 1, deg + 1)
        out = np.zeros((L, n), dtype=np.int64)
        out[:M.shape[0]][:L] += rows_times(M, lo)[:L]
        out[1:] += rows_times(M[:L - 1], hi)
        return out

    N = np.zeros((1, n), dtype=np.int64)
    N[0, 0] = 1
    D = N.copy()
    for (a, b, c, d), r in zip(entries, rots):
        a, b, c, d = (np.asarray(x[:n], dtype=np.int64) for x in (a, b, c, d))
        for _ in range(r):
            N = times_linear(N, c, d, K)
            D = times_linear(D, a, b, D.shape[0])
    if D.shape[0] > 32:
        raise _Overflow
    d0 = D[0]
    inv = np.zeros(n, dtype=np.int64)
    for i in range(n):
        acc = int(i == 0) - sum(int(d0[j]) * int(inv[i - j]) for j in range(1, i + 1) if d0[j])
        if abs(acc) >= _INT64_SAFE:
            raise _Overflow
        inv[i] = acc * lead
    zero = np.zeros(n, dtype=np.int64)
    d_l1 = int(np.abs(D[1:]).sum(axis=1).max(initial=0))
    inv_inf = int(np.abs(inv).max())
    # lower-triangular Toeplitz matrices: TD[j - 1] @ x is D_j * x truncated at n
    pad = np.zeros((D.shape[0] - 1, 2 * n - 1), dtype=np.int64)
    pad[:, n - 1:] = D[1:]
    TD = np.lib.stride_tricks.sliding_window_view(pad, n, axis=1)[:, :, ::-1]
    F = np.zeros((K + 1, n), dtype=np.int64)
    f, f_inf = [], []
    for k in range(K + 1):
        acc = N[k] if k < N.shape[0] else zero
        m = min(k, D.shape[0] - 1)
        # one bound for the whole step instead of one per convolution
        if m and int(np.abs(acc).max()) + m * d_l1 * max(f_inf[k - m:k]) >= _INT64_SAFE:
            raise _Overflow
        if m:
            acc = acc - np.einsum("jab,jb->a", TD[:m], F[k - m:k][::-1])
        if int(np.abs(acc).sum()) * inv_inf >= _INT64_SAFE:
            raise _Overflow
        fk = np.convolve(acc, inv)[:n]
        F[k] = fk
        f.append(fk)
        f_inf.append(int(np.abs(fk).max()))
    return f


def _grid_series(entries, rots, K, W, den, cuts=None):
    """``_dense_path_series`` on entries already on the grid ``T^{1/den}``.

    ``cuts[k] <= W`` is the precision wanted for the ``k``-th coefficient.
    """
    n = int(ceil(W * den))
    cuts = [W] * (K + 1) if cuts is None else cuts
    if n <= 0:
        return [NovikovElement.zero(c) for c in cuts]
    lead = 1
    for (a, _, _, _), r in zip(entries, rots):
        lead *= a[0] ** r
    if lead in (1, -1) and all(_is_int64(x) for m in entries for x in m):
        try:
            f = _grid_series_int64(entries, rots, K, n, lead)
        except _Overflow:
            f = None
        if f is not None:
            out = []
            for fk, cut in zip(f, cuts):
                m = max(0, int(ceil(cut * den)))
                idx = np.flatnonzero(fk[:m])
                out.append(NovikovElement._raw(tuple((Fraction(int(i), den), Fraction(int(fk[i])))
                                                     for i in idx), cut))
            return out

    def mul(p, q):
        out = [0] * n
        for i, x in enumerate(p):
            if x:
                for j in range(n - i):
                    y = q[j]
                    if y:
                        out[i + j] += x * y
        return out

    def sub(p, q):
        return [x - y for x, y in zip(p, q)]

    zero = [0] * n
    one = [1] + [0] * (n - 1)
    N, D = [one], [one]
    for (a, b, c, d), r in zip(entries, rots):
        a, b, c, d = a[:n], b[:n], c[:n], d[:n]
        for _ in range(r):
            N = [sub(mul(N[k], c) if k < len(N) else zero,
                     [-x for x in mul(N[k - 1], d)] if 0 < k <= len(N) else zero)
                 for k in range(min(len(N) + 1, K + 1))]
            D = [sub(mul(D[k], a) if k < len(D) else zero,
                     [-x for x in mul(D[k - 1], b)] if 0 < k <= len(D) else zero)
                 for k in range(len(D) + 1)]
    # 1/D_0 by the recurrence u_0 = 1/d_0, u_i = -(sum_{j>=1} d_j u_{i-j})/d_0
    d0 = D[0]
    lead = Fraction(d0[0])
    inv = [0] * n
    for i in range(n):
        acc = Fraction(int(i == 0)) - sum((d0[j] * inv[i - j] for j in range(1, i + 1)), 0)
        q = acc / lead
        inv[i] = q.numerator if q.denominator == 1 else q
    f = []
    for k in range(K + 1):
        acc = N[k] if k < len(N) else zero
        for j in range(1, min(k, len(D) - 1) + 1):
            acc = sub(acc, mul(D[j], f[k - j]))
        f.append(mul(acc, inv))
    return [NovikovElement(((Fraction(i, den), c) for i, c in enumerate(fk) if c), cut)
            for fk, cut in zip(f, cuts)]


def theta_by_averaging(L, Lp, x, phi, v, prec, budget=None, kmax=None, cap=64):
    """Sum over reduced paths ``v0 -> v`` of the seed pushed through the gluing."""
    g = L.graph
    prec = as_fraction(prec)
    rot, areas, mono = _relative(L, Lp)
    if not x.check(g, rot, areas):
        raise ValueError("intersection point data violate the r/S relations")
    budget = default_theta_budget(g, L, Lp, x, prec) if budget is None else as_fraction(budget)
    v0 = x.vertex
    phi = NovikovElement.coerce(phi)
    memo = None
    if _nonnegative_generators(g):
        Amax = max(e.area for e in g.edges)
        K_all = kmax if kmax is not None else int(ceil(4 * prec / g.min_area())) + 4
        S_seed = _seed_data(g, x, areas, rot)[2]
        work = prec + Fraction(3, 4) * K_all * Amax + Amax - min(S_seed, 0)
        grid = [S_seed] + list(areas.values()) + [Fraction(3, 4) * e.area for e in g.edges]
        grid += [m.valuation() for m in mono.values() if m.terms]
        memo = _SuffixMemo(g, work, grid)
    # plain dict sums; the function is built (and truncated) once at the end
    acc = {}

    def add(key, c):
        slot = acc.setdefault(key, {})
        for ex, a in c.terms:
            slot[ex] = slot.get(ex, 0) + a

    for P in enumerate_reduced_paths(g, v0, budget, cap, end=v):
        if not P.edges:
            e0, r0, S0 = _seed_data(g, x, areas, rot)
            add(None if e0 is None or r0 == 0 else (e0, r0), phi.shift(S0))
            continue
        en = P.edges[-1]
        K = kmax if kmax is not None else int(ceil(4 * prec / g.area(en))) + 4
        cs = _path_term(g, P, x, rot, areas, mono, phi, prec, K, memo)
        for k, c in enumerate(cs):
            if c.terms:
                add(None if k == 0 else (en, k), c)
    const = NovikovElement(acc.pop(None, {}).items(), prec)
    coeffs = {(e, k): NovikovElement(slot.items(), prec + Fraction(3, 4) * k * g.area(e))
              for (e, k), slot in acc.items()}
    return AffinoidFunctionUv(g, v, const, coeffs, prec)


def theta_by_hpl(L, Lp, x, phi, prec, maxiter=10000):
    """``sum_n (-h delta^1)^n i(phi)`` in the degree-zero pair model, read off on every U_v."""
    g = L.graph
    pm = PairModel(L, Lp, prec)
    if not x.check(g, pm.r, pm.S):
        raise ValueError("intersection point data violate the r/S relations")
    phi = NovikovElement.coerce(phi)
    e0, r0, S0 = _seed_data(g, x, pm.S, pm.r)
    if x.edge is None:
        seed = {("V", x.vertex): phi.shift(S0)}
    else:
        lab, c = pm.to_tail(e0, x.vertex, -r0, phi.shift(S0))
        seed = {lab: c}
    total = dict(seed)
    term = seed
    for _ in range(maxiter):
        term = pm.step(term)
        if not term:
            break
        total = vadd(total, term)
    else:
        raise RuntimeError("theta series did not terminate")
    out = {}
    for v in g.vertices:
        const, coeffs = pm.local_function(total, v)
        out[v] = AffinoidFunctionUv(g, v, const, coeffs, prec)
    return out, total


def gluing_defect(L, Lp, thetas, e, prec):
    """Defect valuation of ``theta_v|U_e`` against ``theta_w|U_e`` moved to the ``v`` side."""
    g = L.graph
    rot, areas, mono = _relative(L, Lp)
    v, w = g.edge(e).ends
    fv = restrict_uv_to_ue(thetas[v], e)
    fw = restrict_uv_to_ue(thetas[w], e)
    # f_w = R T^{S_{e/v}} t_{e/w}^{-r} f_v, and t_{e/w}^{-r} = q^{-r} t_{e/v}^{r}
    A = g.area(e)
    r = rot[e]
    unit = mono[(e, v)].shift(areas[(e, v)] - r * A)
    moved = {}
    for k, c in fv.coeffs.items():
        moved[k + r] = c * unit
    # express f_w in the v coordinate: t_{e/w}^k = q^k t_{e/v}^{-k}
    back = {}
    for k, c in fw.coeffs.items():
        back[-k] = c.shift(k * A)
    a = AffinoidFunctionUe(g, e, v, moved, prec)
    b = AffinoidFunctionUe(g, e, v, back, prec)
    return a.defect(b)


# -- B side -------------------------------------------------------------------------

def default_group_budget(g, prec):
    return (as_fraction(prec) + 3 * max(e.area for e in g.edges)) / 4


class _PhiEvaluator:
    """``phi = s/(t - s)`` on Moebius images, first on a truncated dense grid.

    Products are formed modulo ``T^work``; the quotient ``N/D`` is then known
    modulo ``T^{work - 2 v(D) + min(v(D), v(N))}``.  When that falls short of
    ``prec`` the same term is redone with exact matrices.
    """

    def __init__(self, g, start, s, prec, work=None):
        self.s = s
        self.prec = prec
        if work is None:
            work = 2 * prec + 4 * max(e.area for e in g.edges)
        self.work = as_fraction(work)
        self.fast = DenseTransportCache(g, start, self.work, extra=[s, prec])
        self.exact = TransportCache(g, start)
        self.s_dense = to_dense(s, self.fast.den, self.fast.n)
        self.fallbacks = 0

    def _dense_phi(self, M, x):
        den, n = self.fast.den, self.fast.n
        a, b, c, d = M
        if isinstance(x, NovikovElement):
            if any(e != 0 for e, _ in x.terms):
                return None
            x = x.coefficient(0)
        if x is not INF and Fraction(x).denominator == 1:
            x = int(x)
        if x is INF:
            num, dd = a, c
        else:
            num = [x * p + q for p, q in zip(a, b)]
            dd = [x * p + q for p, q in zip(c, d)]
        if dense_valuation(dd) is None:
            return None
        top = dense_mul(self.s_dense, dd, n)
        bottom = [p - q for p, q in zip(num, top)]
        vD, vN = dense_valuation(bottom), dense_valuation(top)
        if vD is None or vN is None or n - 2 * vD + min(vD, vN) < self.prec * den:
            return None
        m = int(ceil(self.prec * den)) - (vN - vD)
        if m <= 0:
            return NovikovElement.zero(self.prec)
        shift, coeffs = dense_divide(top, bottom, m)
        return from_dense(coeffs, den, self.prec, shift)

    def __call__(self, build, x):
        out = self._dense_phi(build(self.fast), x)
        if out is None:
            self.fallbacks += 1
            out = phi_of_mobius(self.s, build(self.exact), x, self.prec)
        return out


def canonical_bside(g, s, base=None, t0=Fraction(-1), prec=2, budget=None, cap=64):
    """``c(gamma) = sum_g phi(g gamma t0) - phi(g t0)`` on the basis loops at ``v0``.

    Group elements are the reduced closed paths at ``v0`` (one for each
    reduced word in the basis loops), acting on ``t_{e0/v0}``.
    """
    prec = as_fraction(prec)
    e0, v0 = base if base is not None else (g.incident[g.vertices[0]][0], g.vertices[0])
    s = NovikovElement.coerce(s)
    budget = default_group_budget(g, prec) if budget is None else as_fraction(budget)
    loops = cycle_basis(g, v0)
    if s.is_zero():
        return SchottkyCocycle(loops, [NovikovElement.zero(prec)] * len(loops), prec)
    x0 = g.chart(e0, v0)(as_fraction(t0))
    if x0 == 0 or x0 is INF:
        raise PoleOnOrbit("base point sits at a marked point")
    phi = _PhiEvaluator(g, v0, s, prec)
    closed = list(enumerate_reduced_paths(g, v0, budget, cap, end=v0))
    vals = []
    for P in loops:
        tot = NovikovElement.zero(prec)
        for Q in closed:
            tot = tot + phi(lambda tc: tc.mul(tc.loop(Q, e0), tc.loop(P, e0)), x0) - \
                phi(lambda tc: tc.loop(Q, e0), x0)
        vals.append(tot)
    return SchottkyCocycle(loops, vals, prec)


def canonical_cech(g, s, base, prec, budget=None, cap=64):
    """The same cocycle through the Čech route: principal parts, then loop sums."""
    e0, v0 = base
    budget = default_group_budget(g, prec) if budget is None else budget
    a = cech_principal_parts(s, g, base, prec, budget, cap=cap)
    loops = cycle_basis(g, v0)
    # the connecting map of the Cech-to-group comparison carries an overall sign
    vals = [-x for x in cech_constant_cocycle_to_group(a, v0, loops)]
    return SchottkyCocycle(loops, vals, prec), a


# -- A side --------------------------------------------------------------------------

# Sign table: a factor per half-edge transition (chart-class A, class B, or
# straight through e_0), a factor for the arrival end of e (q_{e/v,0} = -z_e
# at the tail, +z_e at the head), and the sign of the small triangle.
SHIPPED_CONVENTION = {"A": 1, "B": 1, "II": 1, "tail": -1, "head": 1, "triangle": 1}
# flips the arrival orientation only; used as the negative control
WRONG_CONVENTION = {"A": 1, "B": 1, "II": 1, "tail": 1, "head": 1, "triangle": 1}

_CLASS_A = {("0", "1"), ("1", "inf"), ("inf", "0")}


def _transition_sign(g, conv, e0, P, e):
    seq = [e0] + list(P.edges) + [e]
    sign = 1
    for i, v in enumerate(P.vertices):
        a, b = seq[i], seq[i + 1]
        if a == b:
            sign *= conv["II"]
        elif (g.label(a, v), g.label(b, v)) in _CLASS_A:
            sign *= conv["A"]
        else:
            sign *= conv["B"]
    return sign * (conv["tail"] if g.edge(e).ends[0] == P.end else conv["head"])


def aside_coefficients(g, pt, prec, budget=None, convention=None, cap=64):
    """``a_e``: resummed strip counts through the nodes plus the small triangle."""
    conv = SHIPPED_CONVENTION if convention is None else convention
    prec = as_fraction(prec)
    e0, v0 = pt.edge, pt.vertex
    s = pt.s()
    budget = default_group_budget(g, prec) if budget is None else as_fraction(budget)
    zero = NovikovElement.zero()
    phi = _PhiEvaluator(g, v0, s, prec)
    a = {e.name: NovikovElement.zero(prec) for e in g.edges}
    for P in enumerate_reduced_paths(g, v0, budget, cap):
        for e in g.incident[P.end]:
            if P.edges and P.edges[-1] == e:
                continue
            if not P.edges:
                if e == e0:
                    continue
                val = phi_of_mobius(s, chart_change(g, v0, e0, e), zero, prec)
            else:
                Pp = ReducedPath(g, v0, P.edges[:-1])
                val = phi(lambda tc: tc.transport(P, e0, e), zero) - \
                    phi(lambda tc: tc.transport(Pp, e0, P.edges[-1]), zero)
            a[e] = a[e] + val * _transition_sign(g, conv, e0, P, e)
    # the triangle is oriented like e0 seen from v0, as in the loop contraction
    orient = 1 if g.edge(e0).ends[0] == v0 else -1
    a[e0] = a[e0] + NovikovElement.constant(conv["triangle"] * orient)
    return a


def contract_along_loops(g, a, loops, prec):
    """``sum +-a_e`` along each loop: ``+`` when running from ``ends[0]`` to ``ends[1]``."""
    vals = []
    for P in loops:
        tot = NovikovElement.zero(prec)
        for e, u in zip(P.edges, P.vertices):
            tot = tot + (a[e] if g.edge(e).ends[0] == u else -a[e])
        vals.append(tot)
    return vals


def canonical_aside(g, pt, prec, budget=None, convention=None, cap=64):
    loops = cycle_basis(g, pt.vertex)
    a = aside_coefficients(g, pt, prec, budget, convention, cap)
    return SchottkyCocycle(loops, contract_along_loops(g, a, loops, prec), prec)


def compare_canonical(g, pt, prec, budget=None, convention=None, t0=Fraction(-1), cap=64):
    """A-side and B-side cocycles for the same point; passes when all defects reach ``prec``."""
    prec = as_fraction(prec)
    A = canonical_aside(g, pt, prec, budget, convention, cap)
    B = canonical_bside(g, pt.s(), (pt.edge, pt.vertex), t0, prec, budget, cap)
    rows = []
    for P, x, y, d in zip(A.loops, A.values, B.values, A.defects(B)):
        rows.append({"loop": _path_json(P), "aside": x.to_json(), "bside": y.to_json(),
                     "defect": None if d is None else frac_str(d)})
    return {"precision": frac_str(prec), "edge": pt.edge, "vertex": pt.vertex,
            "B": frac_str(pt.B), "holonomy": pt.holonomy.to_json(), "loops": rows,
            "pass": all(r["defect"] is None for r in rows)}
