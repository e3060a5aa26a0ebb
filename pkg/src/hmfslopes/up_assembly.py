"""Matrices of U_p and U_q on truncations of the space of overconvergent forms.

Basis: the monomials X^x (x in Z_{>=0}^g) of each of the h copies of the
power-series ring, ordered by the diagonal enumeration ``bi`` and then by the
class index, so the flat index of (monomial m, class i) is m*h + i.  Column
(y, j) holds the image of X^y in copy j, so the matrix acts on column vectors.
"""

from fractions import Fraction
from math import comb, isqrt

import numpy as np

from .errors import PrecisionTooLow, ShapeViolation, UnstableSubspace
from .field_core import LocalRing
from .padic_core import BelowPrecision, PadicEmbedding, PadicMatrix, is_exact
from .quat_hecke import _mat_mul
from .weights_chars import CharacterEvaluator


# -- monomial ordering -----------------------------------------------------------

def bi(x):
    a, b = x
    return (a + b + 1) * (a + b) // 2 + b


def b_of(m):
    """Total degree of the m-th monomial."""
    return (isqrt(1 + 8 * m) - 1) // 2


def bi_inv(m):
    t = b_of(m)
    b = m - t * (t + 1) // 2
    return (t - b, b)


def monomials(R):
    return [bi_inv(m) for m in range(R)]


def gbinom(m, t):
    """m choose t for any integer m and t >= 0."""
    if t < 0:
        return 0
    if m >= 0:
        return comb(m, t) if t <= m else 0
    # (-1)^t (t - m - 1 choose t)
    out = comb(t - m - 1, t)
    return -out if t % 2 else out


# -- single-matrix action ----------------------------------------------------------

class PlaceMatrix:
    """Entries of a local matrix at one infinite place, embedded in L."""

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = a, b, c, d
        self.d_inv = d.inverse()
        self._pow = {}

    def power(self, name, k):
        if name == "d" and k < 0:
            name, k = "d_inv", -k
        seq = self._pow.setdefault(name, [self.a.ctx.one()])
        base = getattr(self, name)
        while len(seq) <= k:
            seq.append(seq[-1] * base)
        return seq[k]

    def det(self):
        return self.a * self.d - self.b * self.c


def c_entry(pm, n, x, y):
    """Coefficient of X^x in (cX+d)^(n-y) (aX+b)^y, as a finite sum."""
    out = None
    for t in range(0, x + 1):
        bt = gbinom(n - y, t)
        if bt == 0:
            continue
        by = gbinom(y, x - t)
        if by == 0:
            continue
        term = pm.power("a", x - t) * pm.power("c", t) * pm.power("d", n - y - t) * pm.power("b", y - x + t)
        term = term * (bt * by)
        out = term if out is None else out + term
    return out if out is not None else pm.a.ctx.zero()


def omega_entry(places, x, y, n, v=None, chi=None):
    """Entry (x, y) of the weight-n action of one local matrix.

    ``places`` holds one PlaceMatrix per infinite place; ``chi`` is the value
    of the finite character at the lower-right entry (1 if None) and v the
    determinant twist (omitted when None, as for normalized operators).
    """
    ctx = places[0].a.ctx
    out = chi if chi is not None else ctx.one()
    for i, pm in enumerate(places):
        out = out * c_entry(pm, n[i], x[i], y[i])
        if v is not None and v[i]:
            out = out * pm.det() ** v[i]
    return out


def _series_inverse(coeffs, T):
    """Power-series inverse up to X^(T-1) of a series with unit constant term."""
    ctx = coeffs[0].ctx
    inv0 = coeffs[0].inverse()
    out = [inv0]
    for k in range(1, T):
        acc = ctx.zero()
        for j in range(1, min(k, len(coeffs) - 1) + 1):
            acc = acc + coeffs[j] * out[k - j]
        out.append(-(acc * inv0))
    return out


def _series_mul(f, g, T):
    ctx = f[0].ctx
    out = [ctx.zero() for _ in range(T)]
    for i, fi in enumerate(f[:T]):
        if fi.is_zero():
            continue
        for j, gj in enumerate(g[:T - i]):
            out[i + j] = out[i + j] + fi * gj
    return out


def generating_oracle(places, n, T, v=None, chi=None):
    """Entries for all x, y < T (per place) by expanding the generating function.

    The coefficient of Z^y in (cX+d)^(n+1) / (cX + d - Z(aX + b)) is
    (cX+d)^n ((aX+b)/(cX+d))^y; here it is produced by series inversion and
    repeated multiplication rather than by binomial sums.
    Returns a dict keyed by (x_tuple, y_tuple).
    """
    ctx = places[0].a.ctx
    per_place = []
    for i, pm in enumerate(places):
        lin = [pm.d, pm.c]                      # cX + d
        num = [pm.b, pm.a]                      # aX + b
        inv = _series_inverse(lin, T)
        base = [ctx.one()] + [ctx.zero()] * (T - 1)
        for _ in range(n[i] + 1):
            base = _series_mul(base, lin + [ctx.zero()] * (T - 2), T)
        # Z^0 coefficient: (cX+d)^(n+1) / (cX+d)
        cur = _series_mul(base, inv, T)
        table = {}
        ratio = _series_mul(num + [ctx.zero()] * (T - 2), inv, T)
        for y in range(T):
            for x in range(T):
                table[(x, y)] = cur[x]
            cur = _series_mul(cur, ratio, T)
        per_place.append(table)
    out = {}
    lead = chi if chi is not None else ctx.one()
    if v is not None:
        for i, pm in enumerate(places):
            if v[i]:
                lead = lead * pm.det() ** v[i]
    g = len(places)
    from itertools import product
    for xs in product(range(T), repeat=g):
        for ys in product(range(T), repeat=g):
            val = lead
            for i in range(g):
                val = val * per_place[i][(xs[i], ys[i])]
            out[(xs, ys)] = val
    return out


# -- operator data ----------------------------------------------------------------

class OperatorTerms:
    """Per class i: list of (j, {prime: 2x2 local matrix}) for one Hecke operator."""

    def __init__(self, tag, h, rows, primes_over_p, uniformizers, Np, pi_places=None):
        self.pi_places = pi_places
        self.tag = tag
        self.h = h
        self.rows = rows
        self.primes = primes_over_p
        self.uniformizers = uniformizers
        self.Np = Np

    @classmethod
    def from_hecke(cls, data, cs):
        primes = [cs.modulus.components[k][0] for k in cs.p_components]
        rows = [[(j, mats) for (j, _alpha, _delta, mats) in data.entries[i]] for i in range(data.h)]
        g = cs.order.alg.F.degree
        if len(primes) == g:
            pi_places = tuple(1 if q == data.prime else 0 for q in primes)
        else:
            pi_places = (1,) * g
        return cls("U_" + data.prime.name(), data.h, rows, primes, [data.pi], cs.Np, pi_places)

    def compose(self, other):
        """Terms of the operator 'self then other' (f -> (f|self)|other)."""
        rows = []
        for i in range(self.h):
            out = []
            for (k, m2) in other.rows[i]:
                for (j, m1) in self.rows[k]:
                    mats = {}
                    for q in self.primes:
                        R = LocalRing(q, self.Np)
                        mats[q] = _mat_mul(R, m1[q], m2[q])
                    out.append((j, mats))
            rows.append(out)
        pi_places = tuple(a + b for a, b in zip(self.pi_places, other.pi_places))
        return OperatorTerms(self.tag + "*" + other.tag, self.h, rows, self.primes,
                             self.uniformizers + other.uniformizers, self.Np, pi_places)


def operator_terms(cs, hecke_by_prime, tag):
    """'U_p', a single prime ('U_p3.1' or 'p3.1') or a product like 'U_p3.1^2*U_p3.2'."""
    if tag == "U_p":
        terms = None
        for q in sorted(hecke_by_prime, key=lambda q: q.key()):
            t = OperatorTerms.from_hecke(hecke_by_prime[q], cs)
            terms = t if terms is None else terms.compose(t)
        terms.tag = "U_p"
        return terms
    factors = [f.strip() for f in tag.split("*") if f.strip()]
    terms = None
    for f in factors:
        name, _, power = f.partition("^")
        power = int(power) if power else 1
        base = None
        for q, data in hecke_by_prime.items():
            if name in ("U_" + q.name(), q.name()):
                base = OperatorTerms.from_hecke(data, cs)
        if base is None:
            raise KeyError("unknown operator %r" % tag)
        for _ in range(power):
            terms = base if terms is None else terms.compose(base)
    if terms is None:
        raise KeyError("unknown operator %r" % tag)
    terms.tag = tag
    return terms


class ApproxOperatorMatrix:
    """A finite block approximation of a Hecke operator."""

    def __init__(self, matrix, tag, weight, monos, h, normalized):
        self.matrix = matrix
        self.tag = tag
        self.weight = weight
        self.monos = list(monos)
        self.h = h
        self.normalized = normalized

    @property
    def ctx(self):
        return self.matrix.ctx

    @property
    def size(self):
        return len(self.monos) * self.h

    def index(self, mono, i):
        return self.monos.index(tuple(mono)) * self.h + i


def _place_matrices(mats, primes, emb, g):
    """PlaceMatrix for each infinite place from per-prime local matrices."""
    out = []
    split = len(primes) == g
    for place in range(1, g + 1):
        q = primes[place - 1] if split else primes[0]
        (a, b), (c, d) = mats[q]
        conv = lambda u, place=place: emb.embed_residue(place, u)
        out.append(PlaceMatrix(conv(a), conv(b), conv(c), conv(d)))
    return out


def valuation_bound(x, y, n, s, pi_places=None):
    """Lower bound for the p-adic valuation of a normalized entry (None: entry is 0).

    ``pi_places[v]`` is the power of the uniformizer in the top-left entry at
    place v (1 everywhere for U_p; for U_q only at the places above q).
    """
    if pi_places is None:
        pi_places = (1,) * len(x)
    total = 0
    for xi, yi, ni, a in zip(x, y, n, pi_places):
        if xi > ni >= yi:
            return None
        # the term t of C_n has valuation a (x - t) + s t with t >= t_min
        t_min = xi if yi == 0 else max(0, xi - yi)
        total += min(a * (xi - t_min) + s * t_min, s * xi)
    return total


def assemble(terms, kappa, R=None, ctx=None, M=None, normalize=True, monos=None, check=True):
    """Matrix of the operator on the first R monomials (or the given ones)."""
    if monos is None:
        monos = monomials(R)
    monos = [tuple(m) for m in monos]
    if ctx is None:
        ctx = kappa.coefficient_context(M or 60)
    emb = PadicEmbedding(kappa.F, ctx)
    ev = CharacterEvaluator(kappa, ctx)
    n = kappa.tuple.n
    v = None if normalize else kappa.tuple.v
    g = kappa.tuple.g
    h = terms.h
    s = kappa.s
    size = len(monos) * h
    d = ctx.d
    P = ctx.P
    data = [[[0] * size for _ in range(size)] for _ in range(d)]
    group = kappa.group
    for i in range(h):
        for (j, mats) in terms.rows[i]:
            places = _place_matrices(mats, terms.primes, emb, g)
            residues = tuple(mats[q][1][1] for q in terms.primes)
            chi = ev.psi_of_residues(residues) * ev.tau_at([pm.d for pm in places])
            lead = chi
            if v is not None:
                for k, pm in enumerate(places):
                    if v[k]:
                        lead = lead * pm.det() ** v[k]
            ctabs = {}
            for a, x in enumerate(monos):
                for b, y in enumerate(monos):
                    val = lead
                    for k in range(g):
                        key = (k, x[k], y[k])
                        ce = ctabs.get(key)
                        if ce is None:
                            ce = c_entry(places[k], n[k], x[k], y[k])
                            ctabs[key] = ce
                        val = val * ce
                    # row (x, i), column (y, j): image of X^y in copy j
                    r, c = a * h + i, b * h + j
                    for t in range(d):
                        data[t][r][c] = (data[t][r][c] + val.coeffs[t]) % P
    arr = np.empty((d, size, size), dtype=object)
    for t in range(d):
        for r in range(size):
            arr[t, r, :] = data[t][r]
    mat = PadicMatrix(ctx, arr)
    out = ApproxOperatorMatrix(mat, terms.tag, kappa, monos, h, normalize)
    out.pi_places = terms.pi_places
    if check and normalize:
        _check_valuation_bounds(out, n, s, terms.pi_places)
    return out


def _check_valuation_bounds(A, n, s, pi_places=None):
    ctx = A.ctx
    ceiling = Fraction(ctx.M, ctx.e)
    h = A.h
    for a, x in enumerate(A.monos):
        for b, y in enumerate(A.monos):
            bound = valuation_bound(x, y, n, s, pi_places)
            for i in range(h):
                for j in range(h):
                    e = A.matrix[a * h + i, b * h + j]
                    if e.is_zero():
                        continue
                    if bound is None:
                        raise ShapeViolation("classical stability fails at %r <- %r" % (x, y))
                    val = e.valuation()
                    if is_exact(val) and val < bound:
                        raise ShapeViolation("entry at %r <- %r has valuation %s < %s" % (x, y, val, bound))
            if bound is not None and bound > ceiling:
                raise PrecisionTooLow("precision too low to certify block %r <- %r" % (x, y))


# -- subspaces ----------------------------------------------------------------------

class SubspaceSpec:
    """'classical' (degree <= n_i in every variable) or 'box' with per-variable caps.

    For a box, a cap of None means unbounded (then the finite caps of the
    monomials actually present in the matrix apply).
    """

    def __init__(self, kind, caps):
        self.kind = kind
        self.caps = tuple(caps)

    @classmethod
    def classical(cls, n):
        return cls("classical", n)

    @classmethod
    def box(cls, *caps):
        return cls("box", caps)

    def contains(self, mono):
        return all(c is None or m <= c for m, c in zip(mono, self.caps))

    def dimension(self, h):
        out = h
        for c in self.caps:
            if c is None:
                return None
            out *= c + 1
        return out


def restrict(A, spec):
    """Principal submatrix on the monomials of ``spec``."""
    n = A.weight.tuple.n
    if spec.kind == "box":
        # the exact (non-truncated) directions must be classical caps of the weight,
        # and the operator may only be compact in the truncated directions
        tag = A.tag
        for k, (c, nk) in enumerate(zip(spec.caps, n)):
            if c is None:
                continue
            exact_ok = c == nk
            if not exact_ok and not _compact_in(tag, k, A):
                raise UnstableSubspace("box cap %d in variable %d is not stable under %s" % (c, k + 1, tag))
    keep = [m for m in A.monos if spec.contains(m)]
    if spec.kind == "classical":
        need = spec.dimension(1)
        if len(keep) != need:
            raise UnstableSubspace("truncation does not contain the classical subspace")
    idx = []
    for m in keep:
        a = A.monos.index(m)
        idx.extend(a * A.h + i for i in range(A.h))
    sub = A.matrix.submatrix(idx, idx)
    return ApproxOperatorMatrix(sub, A.tag, A.weight, keep, A.h, A.normalized)


def _compact_in(tag, k, A):
    """Whether the operator contracts variable k (so truncating it is an approximation)."""
    if tag == "U_p":
        return True
    splitting = A.weight.group.splitting
    if not splitting.is_split():
        return True
    name = splitting.primes[k].name()
    return tag in ("U_" + name, name)


def classical_matrix(terms, kappa, ctx=None, M=None, normalize=True):
    n = kappa.tuple.n
    from itertools import product
    monos = sorted((tuple(m) for m in product(*[range(x + 1) for x in n])), key=bi)
    return assemble(terms, kappa, ctx=ctx, M=M, normalize=normalize, monos=monos)
