"""Homological perturbation over the truncated Novikov field.

Vectors are sparse dicts ``{basis label: NovikovElement}``; linear maps are
``Operator`` objects storing the image of every basis label.  Multilinear
operations are callables on tuples of basis labels returning vectors.

Sign conventions: ``mu^k(a_k, ..., a_1)`` with the relation

    sum (-1)^{*} mu^{k+1-l}(a_k, ..., mu^l(a_{j+l}, ..., a_{j+1}), a_j, ..., a_1) = 0,
    * = j + deg(a_1) + ... + deg(a_j).

Internally the tree sums are written for ``b^k(a_1, ..., a_k) = mu^k(a_k, ..., a_1)``,
where the relation is plain Koszul with shifted degrees.
"""

from fractions import Fraction
from itertools import product

from .novikov import NovikovElement


class NotNilpotent(ValueError):
    pass


class NotSquareZero(ValueError):
    pass


# -- sparse vectors -------------------------------------------------------

def vclean(v, prec=None):
    out = {}
    for k, x in v.items():
        if prec is not None:
            x = x.truncate(prec)
        if x.terms:
            out[k] = x
    return out


def vadd(*vs):
    out = {}
    for v in vs:
        for k, x in v.items():
            out[k] = out[k] + x if k in out else x
    return {k: x for k, x in out.items() if x.terms}


def vscale(c, v):
    if isinstance(c, (int, Fraction)):
        c = NovikovElement.constant(c)
    out = {}
    for k, x in v.items():
        y = c * x
        if y.terms:
            out[k] = y
    return out


def vneg(v):
    return {k: -x for k, x in v.items()}


def vsub(a, b):
    return vadd(a, vneg(b))


def vval(v):
    """Minimal coefficient valuation; ``None`` for the zero vector."""
    vals = [x.valuation() for x in v.values() if x.terms]
    return min(vals) if vals else None


def basis_vector(label, prec=None):
    return {label: NovikovElement.constant(1, prec)}


# -- operators ------------------------------------------------------------

class Operator:
    """A linear map given on a basis; unlisted labels map to zero."""

    def __init__(self, columns=None, prec=None):
        self.prec = prec
        self.columns = {k: vclean(v, prec) for k, v in (columns or {}).items()}

    def __call__(self, v):
        out = {}
        for k, c in v.items():
            col = self.columns.get(k)
            if not col:
                continue
            for r, x in col.items():
                y = c * x
                if self.prec is not None:
                    y = y.truncate(self.prec)
                if y.terms:
                    out[r] = out[r] + y if r in out else y
        return {k: x for k, x in out.items() if x.terms}

    def col(self, k):
        return self.columns.get(k, {})

    def __matmul__(self, other):
        prec = _pmin(self.prec, other.prec)
        return Operator({k: self(c) for k, c in other.columns.items()}, prec)

    def __add__(self, other):
        keys = set(self.columns) | set(other.columns)
        return Operator({k: vadd(self.col(k), other.col(k)) for k in keys},
                        _pmin(self.prec, other.prec))

    def __neg__(self):
        return Operator({k: vneg(c) for k, c in self.columns.items()}, self.prec)

    def __sub__(self, other):
        return self + (-other)

    @classmethod
    def identity(cls, labels, prec=None):
        return cls({k: basis_vector(k, prec) for k in labels}, prec)

    def is_zero(self):
        return all(not c for c in self.columns.values())

    def min_valuation(self):
        vals = [vval(c) for c in self.columns.values() if c]
        return min(vals) if vals else None

    def restrict(self, labels):
        return Operator({k: self.col(k) for k in labels}, self.prec)


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def defect_valuation(op_a, op_b, labels, prec):
    """Valuation of ``op_a - op_b`` on the given basis (``None`` if zero mod T^prec)."""
    worst = None
    for k in labels:
        d = vclean(vsub(op_a(basis_vector(k)), op_b(basis_vector(k))), prec)
        v = vval(d)
        if v is not None and (worst is None or v < worst):
            worst = v
    return worst


# -- contractions -----------------------------------------------------------

class Contraction:
    """``(i, p, h)`` between ``(K, d_K)`` and ``(L, d_L)``.

    ``deg_K`` and ``deg_L`` map basis labels to degrees.
    """

    def __init__(self, K, L, deg_K, deg_L, dK, dL, i, p, h, prec):
        self.K = list(K)
        self.L = list(L)
        self.deg_K = dict(deg_K)
        self.deg_L = dict(deg_L)
        self.dK, self.dL, self.i, self.p, self.h = dK, dL, i, p, h
        self.prec = prec

    def side_conditions(self):
        """Defect valuations of the five side conditions and the two chain-map laws."""
        K, L, prec = self.K, self.L, self.prec
        d, dL, i, p, h = self.dK, self.dL, self.i, self.p, self.h
        idK, idL = Operator.identity(K, prec), Operator.identity(L, prec)
        zero = Operator({}, prec)
        return {
            "pi=1": defect_valuation(p @ i, idL, L, prec),
            "1-ip=dh+hd": defect_valuation(idK - i @ p, d @ h + h @ d, K, prec),
            "hh=0": defect_valuation(h @ h, zero, K, prec),
            "ph=0": defect_valuation(p @ h, zero, K, prec),
            "hi=0": defect_valuation(h @ i, zero, L, prec),
            "di=idL": defect_valuation(d @ i, i @ dL, L, prec),
            "pd=dLp": defect_valuation(p @ d, dL @ p, K, prec),
            "dd=0": defect_valuation(d @ d, zero, K, prec),
            "dLdL=0": defect_valuation(dL @ dL, zero, L, prec),
        }

    def sound(self):
        return all(v is None or v >= self.prec for v in self.side_conditions().values())


def nilpotency_gain(h, delta, labels, strict=True):
    """``min val(h delta x)`` over basis labels ``x`` with nonzero image.

    With ``strict=False`` valuation-zero terms are tolerated; the Neumann
    series then has to terminate on its own.
    """
    gain = None
    for k in labels:
        y = h(delta(basis_vector(k)))
        v = vval(y)
        if v is None:
            continue
        if v < 0 or (strict and v == 0):
            raise NotNilpotent("h∘delta does not raise valuation on %r" % (k,))
        gain = v if gain is None else min(gain, v)
    return gain


def neumann(first, second, v, prec, maxiter=2000):
    """``sum_n (-first∘second)^n v`` truncated at ``T^prec``."""
    total = dict(v)
    term = dict(v)
    for _ in range(maxiter):
        term = vclean(vneg(first(second(term))), prec)
        if not term:
            return total
        total = vadd(total, term)
    raise NotNilpotent("Neumann series did not terminate")


def perturb_contraction(c, delta):
    """The perturbed contraction for ``d_K + delta``."""
    prec = c.prec
    K, L = c.K, c.L
    nilpotency_gain(c.h, delta, K, strict=False)
    dK = c.dK + delta
    sq = dK @ dK
    if not all(not vclean(col, prec) for col in sq.columns.values()):
        raise NotSquareZero("(d_K + delta)^2 != 0 mod T^%s" % prec)
    h, p, i = c.h, c.p, c.i

    i_t = Operator({x: neumann(h, delta, i(basis_vector(x)), prec) for x in L}, prec)
    h_t = Operator({x: neumann(h, delta, h(basis_vector(x)), prec) for x in K}, prec)
    # p (1 + delta h)^{-1}: apply to columns of the identity
    p_t = Operator({x: p(neumann(delta, h, basis_vector(x), prec)) for x in K}, prec)
    dL_t = c.dL + Operator({x: p(delta(i_t(basis_vector(x)))) for x in L}, prec)
    return Contraction(K, L, c.deg_K, c.deg_L, dK, dL_t, i_t, p_t, h_t, prec)


# -- A-infinity structures -----------------------------------------------------

class AInfinityStructure:
    """Operations ``mu[k](a_k, ..., a_1)`` on basis labels (Seidel's order)."""

    def __init__(self, basis, degrees, ops, prec):
        self.basis = list(basis)
        self.deg = dict(degrees)
        self.ops = dict(ops)  # k -> callable(tuple of labels in order a_k..a_1) -> vector
        self.prec = prec

    def mu(self, k, labels):
        f = self.ops.get(k)
        if f is None:
            return {}
        return vclean(f(tuple(labels)), self.prec)

    def mu_vec(self, k, vecs):
        """Multilinear extension on vectors listed ``a_k, ..., a_1``."""
        f = self.ops.get(k)
        if f is None:
            return {}
        out = {}
        for combo in product(*[list(v.items()) for v in vecs]):
            coeff = NovikovElement.constant(1, self.prec)
            for _, x in combo:
                coeff = coeff * x
            if not coeff.terms:
                continue
            out = vadd(out, vscale(coeff, self.mu(k, [lab for lab, _ in combo])))
        return vclean(out, self.prec)

    def max_arity(self):
        return max(self.ops) if self.ops else 0


def _degree_of(vec, deg):
    ds = {deg[k] for k in vec}
    if len(ds) > 1:
        raise ValueError("inhomogeneous vector")
    return ds.pop() if ds else None


def ainfinity_defect(mu, labels):
    """Left side of the A-infinity relation on inputs ``labels = (a_k, ..., a_1)``."""
    k = len(labels)
    ins = list(reversed(labels))  # a_1 .. a_k
    total = {}
    for l in range(1, k + 1):
        if l not in mu.ops or (k + 1 - l) not in mu.ops:
            continue
        for j in range(0, k - l + 1):
            inner = mu.mu(l, list(reversed(ins[j:j + l])))
            if not inner:
                continue
            star = j + sum(mu.deg[a] for a in ins[:j])
            outer_inputs = ins[:j] + [None] + ins[j + l:]
            vecs = []
            for a in reversed(outer_inputs):
                vecs.append(inner if a is None else basis_vector(a, mu.prec))
            term = mu.mu_vec(k + 1 - l, vecs)
            if star % 2:
                term = vneg(term)
            total = vadd(total, term)
    return vclean(total, mu.prec)


def verify_ainfinity(mu, n_max, labels=None):
    """Evaluate all relations of arity ``<= n_max`` on basis tuples."""
    labels = mu.basis if labels is None else labels
    worst = None
    failures = 0
    checked = 0
    for k in range(1, n_max + 1):
        for tup in product(labels, repeat=k):
            checked += 1
            d = ainfinity_defect(mu, tup)
            v = vval(d)
            if v is not None:
                failures += 1
                if worst is None or v < worst:
                    worst = v
    ok = worst is None or worst >= mu.prec
    return {"checked": checked, "nonzero": failures, "min_defect_valuation": worst, "pass": ok}


def dg_structure(basis, degrees, d, product_fn, prec):
    """A-infinity structure of a DG algebra: ``mu^1 = d`` and ``mu^2(a2, a1) = (-1)^{|a1|} a1 a2``."""
    deg = dict(degrees)

    def mu1(labs):
        return d(basis_vector(labs[0], prec))

    def mu2(labs):
        a2, a1 = labs
        v = product_fn(a1, a2)
        return vneg(v) if deg[a1] % 2 else v

    return AInfinityStructure(basis, deg, {1: mu1, 2: mu2}, prec)


def transfer_ainfinity(c, mu_K, n_max):
    """Tree-sum transfer of ``mu_K`` along the contraction ``c`` (for the full ``d_K``).

    Returns ``(mu_L, lam)`` with ``lam[n]`` the components of the
    A-infinity morphism ``L -> K`` (``lam[1] = i``).
    """
    prec = c.prec
    L = c.L
    higher = [k for k in mu_K.ops if k >= 2]

    def b_K(k, vecs):
        # b^k(x_1..x_k) = mu^k(x_k..x_1)
        return mu_K.mu_vec(k, list(reversed(vecs)))

    lam = {1: {(x,): c.i(basis_vector(x, prec)) for x in L}}
    mu_L_tables = {}

    def compositions(n, k):
        if k == 1:
            yield (n,)
            return
        for first in range(1, n - k + 2):
            for rest in compositions(n - first, k - 1):
                yield (first,) + rest

    def tree_sum(tup):
        # sum_k b_K^k(lam_{n1} (x) ... (x) lam_{nk}) on inputs tup = (x_1..x_n)
        n = len(tup)
        out = {}
        for k in higher:
            if k > n:
                continue
            for comp in compositions(n, k):
                vecs, pos = [], 0
                for m in comp:
                    vecs.append(lam[m][tup[pos:pos + m]])
                    pos += m
                if any(not v for v in vecs):
                    continue
                out = vadd(out, b_K(k, vecs))
        return vclean(out, prec)

    for n in range(2, n_max + 1):
        lam[n] = {}
        mu_L_tables[n] = {}
        for tup in product(L, repeat=n):
            s = tree_sum(tup)
            lam[n][tup] = vclean(vneg(c.h(s)), prec)
            mu_L_tables[n][tup] = vclean(c.p(s), prec)

    def make_op(n):
        table = mu_L_tables[n]

        def op(labs):
            # labs in Seidel order a_n..a_1 -> b order a_1..a_n
            return table[tuple(reversed(labs))]
        return op

    ops = {1: lambda labs: c.dL(basis_vector(labs[0], prec))}
    for n in range(2, n_max + 1):
        ops[n] = make_op(n)
    return AInfinityStructure(L, c.deg_L, ops, prec), lam
