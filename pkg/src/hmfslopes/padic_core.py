"""Capped-precision arithmetic in L = K(zeta_{p^s}) with K/Q_p unramified.

An element of O_L is stored by its coordinates on the basis u^i pi^j
(0 <= i < f, 0 <= j < e), where u generates O_K over Z_p and
pi = zeta_{p^s} - 1 is a uniformizer of the cyclotomic part.  Coordinates
are integers mod p^N; every element is therefore known modulo
p^N O_L = pi^(eN).  This is a flat absolute-precision model: ring
operations never lose precision, which is what the division-free and
pivoted charpoly routines downstream rely on.

Valuations are normalized so that v(p) = 1.
"""

from fractions import Fraction
from itertools import product
from math import gcd

import flint
import numpy as np

from .errors import NonUnitInverse, PrecisionTooLow


class BelowPrecision:
    """Valuation marker for an element indistinguishable from zero.

    ``bound`` is the (normalized) valuation that is known to be exceeded or
    reached.  Compares greater than every exact valuation below the bound.
    """

    __slots__ = ("bound",)

    def __init__(self, bound):
        self.bound = Fraction(bound)

    def __repr__(self):
        return "BelowPrecision(>=%s)" % self.bound

    def __eq__(self, other):
        return isinstance(other, BelowPrecision) and other.bound == self.bound

    def __hash__(self):
        return hash(("BP", self.bound))


def is_exact(v):
    return not isinstance(v, BelowPrecision)


def vp_int(x, p, cap):
    """p-adic valuation of an integer, capped at ``cap`` (used for x = 0)."""
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if v >= cap:
            return cap
    return v


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def cyclotomic_shifted(p, s):
    """Coefficients (low to high) of Phi_{p^s}(1 + X)."""
    # Phi_{p^s}(Y) = sum_{k<p} Y^(k p^(s-1))
    q = p ** (s - 1)
    # binomial expansion of (1+X)^(k q)
    deg = (p - 1) * q
    coeffs = [0] * (deg + 1)
    for k in range(p):
        n = k * q
        c = 1
        for t in range(n + 1):
            coeffs[t] += c
            c = c * (n - t) // (t + 1)
    return coeffs


def _irreducible_mod_p(p, f):
    """Lexicographically first monic irreducible polynomial of degree f mod p."""
    if f == 1:
        return [0, 1]
    for tail in product(range(p), repeat=f):
        poly = list(tail) + [1]
        if poly[0] == 0:
            continue
        if _is_irreducible(poly, p):
            return poly
    raise ValueError("no irreducible polynomial found")


def _is_irreducible(poly, p):
    f = len(poly) - 1
    # brute force: no monic factor of degree <= f/2
    for k in range(1, f // 2 + 1):
        for tail in product(range(p), repeat=k):
            div = list(tail) + [1]
            if _poly_divides(div, poly, p):
                return False
    return True


def _poly_divides(div, poly, p):
    r = [c % p for c in poly]
    k = len(div) - 1
    for top in range(len(r) - 1, k - 1, -1):
        c = r[top]
        if c:
            for i in range(k + 1):
                r[top - k + i] = (r[top - k + i] - c * div[i]) % p
    return all(c == 0 for c in r[:k])


class PadicContext:
    """Parameters of L together with its multiplication table.

    ``M`` is the absolute precision in pi-adic digits.  Coordinates are kept
    modulo p^N with N = ceil(M / e), so the stored precision is at least M.
    """

    def __init__(self, p, f=1, s=0, M=60, unram_poly=None):
        if p < 2 or f < 1 or s < 0 or M < 1:
            raise ValueError("bad context parameters")
        self.p, self.f, self.s, self.M = p, f, s, M
        self.e = (p - 1) * p ** (s - 1) if s >= 1 else 1
        self.N = -(-M // self.e)
        self.P = p ** self.N
        self.d = self.e * self.f
        if unram_poly is None:
            unram_poly = _irreducible_mod_p(p, f)
        unram_poly = [int(c) for c in unram_poly]
        if len(unram_poly) != f + 1 or unram_poly[-1] != 1:
            raise ValueError("unramified polynomial must be monic of degree f")
        if f > 1 and not _is_irreducible([c % p for c in unram_poly], p):
            raise ValueError("unramified polynomial is reducible mod p")
        self.unram_poly = unram_poly
        self.eis_poly = cyclotomic_shifted(p, s) if s >= 1 else [-p, 1]
        self._build_table()
        # for larger totally ramified towers products go through flint polynomials
        self.eis_fmpz = flint.fmpz_poly(self.eis_poly) if f == 1 and self.d >= 4 else None
        self._frob_u = None
        self._teich_gen = None

    def __repr__(self):
        return "PadicContext(p=%d, f=%d, s=%d, e=%d, M=%d)" % (self.p, self.f, self.s, self.e, self.M)

    def key(self):
        return (self.p, self.f, self.s, self.M, tuple(self.unram_poly))

    def with_precision(self, M):
        return PadicContext(self.p, self.f, self.s, M, self.unram_poly)

    # basis index k = i + f*j for u^i pi^j
    def _reduce_u(self, i):
        """u^i as a length-f integer vector."""
        vec = [0] * self.f
        if i < self.f:
            vec[i] = 1
            return vec
        # multiply up from u^(f-1)
        vec[self.f - 1] = 1
        g = self.unram_poly
        for _ in range(i - self.f + 1):
            top = vec[-1]
            vec = [0] + vec[:-1]
            for k in range(self.f):
                vec[k] -= top * g[k]
        return vec

    def _reduce_pi(self, j):
        if self.s == 0:
            # pi stands for p
            vec = [p_pow for p_pow in [self.p ** j]]
            return vec
        vec = [0] * self.e
        if j < self.e:
            vec[j] = 1
            return vec
        vec[self.e - 1] = 1
        E = self.eis_poly
        for _ in range(j - self.e + 1):
            top = vec[-1]
            vec = [0] + vec[:-1]
            for k in range(self.e):
                vec[k] -= top * E[k]
        return vec

    def _build_table(self):
        f, e, d = self.f, self.e, self.d
        table = {}
        for a in range(d):
            ia, ja = a % f, a // f
            for b in range(d):
                ib, jb = b % f, b // f
                uv = self._reduce_u(ia + ib)
                pv = self._reduce_pi(ja + jb)
                terms = []
                for j, cp in enumerate(pv):
                    if cp == 0:
                        continue
                    for i, cu in enumerate(uv):
                        if cu:
                            terms.append((i + f * j, cu * cp))
                table[(a, b)] = terms
        self.table = table
        # grouped form: for each output coordinate c, list of (a, b, coeff)
        by_out = [[] for _ in range(d)]
        for (a, b), terms in table.items():
            for c, k in terms:
                by_out[c].append((a, b, k))
        self.table_by_out = by_out

    # -- constructors -------------------------------------------------------
    def elem(self, coeffs, prec=None):
        return PadicElem(self, coeffs, prec)

    def from_int(self, n):
        c = [0] * self.d
        c[0] = n % self.P
        return PadicElem(self, c)

    def from_fraction(self, q):
        q = Fraction(q)
        if q.denominator % self.p == 0:
            raise NonUnitInverse("denominator divisible by p")
        return self.from_int(q.numerator * pow(q.denominator, -1, self.P))

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def u(self):
        c = [0] * self.d
        if self.f > 1:
            c[1] = 1
            return PadicElem(self, c)
        # f = 1: u is the root of x, i.e. 0
        return self.zero()

    def uniformizer(self):
        if self.e == 1:
            # L is unramified (this includes Q_2(zeta_2) = Q_2, where pi = zeta_2 - 1 = -2)
            return self.from_int(-self.eis_poly[0])
        c = [0] * self.d
        c[self.f] = 1
        return PadicElem(self, c)

    def zeta_ps(self):
        """The primitive p^s-th root of unity 1 + pi."""
        if self.s == 0:
            return self.one()
        return self.one() + self.uniformizer()

    def from_O_K(self, coords):
        """Element of O_K given by its coordinates on 1, u, ..., u^(f-1)."""
        c = [0] * self.d
        for i, a in enumerate(coords):
            c[i] = a % self.P
        return PadicElem(self, c)

    # -- Frobenius and roots of unity --------------------------------------------
    def frobenius_u(self):
        """sigma(u): the root of the unramified polynomial congruent to u^p."""
        if self._frob_u is None:
            if self.f == 1:
                self._frob_u = self.u()
            else:
                y = self.u() ** self.p
                g = self.unram_poly
                for _ in range(self.N.bit_length() + 2):
                    gy = self.zero()
                    dgy = self.zero()
                    for k in reversed(range(len(g))):
                        gy = gy * y + self.from_int(g[k])
                    for k in reversed(range(1, len(g))):
                        dgy = dgy * y + self.from_int(k * g[k])
                    y = y - gy * dgy.inverse()
                self._frob_u = y
        return self._frob_u

    def teichmuller(self, x):
        """Teichmuller lift of the residue of a unit x."""
        if not x.is_unit():
            raise NonUnitInverse("Teichmuller lift of a non-unit")
        q = self.p ** self.f
        c = [0] * self.d
        for i in range(self.f):
            c[i] = x.coeffs[i] % self.p
        t = PadicElem(self, c)
        for _ in range(self.N + 1):
            t = t ** q
        return t

    def residue_generator(self):
        """Teichmuller lift of a fixed generator of the residue field units."""
        if self._teich_gen is None:
            q = self.p ** self.f
            order = q - 1
            primes = _prime_factors(order)
            for coords in product(range(self.p), repeat=self.f):
                if not any(coords):
                    continue
                cand = self.from_O_K(coords)
                ok = True
                for l in primes:
                    if _residue_is_one(cand ** (order // l), self.p):
                        ok = False
                        break
                if ok:
                    self._teich_gen = self.teichmuller(cand)
                    break
        return self._teich_gen

    def root_of_unity(self, m):
        """A fixed primitive m-th root of unity, when L contains one."""
        q = self.p ** self.f
        m_p, m_rest = 1, m
        while m_rest % self.p == 0:
            m_rest //= self.p
            m_p *= self.p
        if (q - 1) % m_rest:
            raise ValueError("mu_%d not contained in %r" % (m, self))
        out = self.one()
        if m_rest > 1:
            out = self.residue_generator() ** ((q - 1) // m_rest)
        if m_p > 1:
            if self.p == 2 and m_p == 2:
                out = -out
            elif self.s >= 1 and m_p <= self.p ** self.s:
                out = out * self.zeta_ps() ** (self.p ** self.s // m_p)
            else:
                raise ValueError("mu_%d not contained in %r" % (m, self))
        return out


def _prime_factors(n):
    out = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def _residue_is_one(x, p):
    return x.coeffs[0] % p == 1 and all(c % p == 0 for c in x.coeffs[1:x.ctx.f])


class PadicElem:
    __slots__ = ("ctx", "coeffs", "prec")

    def __init__(self, ctx, coeffs, prec=None):
        self.ctx = ctx
        P = ctx.P
        self.coeffs = tuple(int(c) % P for c in coeffs)
        if len(self.coeffs) != ctx.d:
            raise ValueError("expected %d coordinates" % ctx.d)
        self.prec = ctx.M if prec is None else min(prec, ctx.M)

    def _coerce(self, other):
        if isinstance(other, PadicElem):
            if other.ctx is not self.ctx and other.ctx.key() != self.ctx.key():
                raise ValueError("elements from different contexts")
            return other
        if isinstance(other, Fraction):
            return self.ctx.from_fraction(other)
        return self.ctx.from_int(int(other))

    def __add__(self, other):
        o = self._coerce(other)
        return PadicElem(self.ctx, [a + b for a, b in zip(self.coeffs, o.coeffs)], min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return PadicElem(self.ctx, [-a for a in self.coeffs], self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        return PadicElem(self.ctx, [a - b for a, b in zip(self.coeffs, o.coeffs)], min(self.prec, o.prec))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return PadicElem(self.ctx, mul_coords(self.ctx, self.coeffs, o.coeffs), min(self.prec, o.prec))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ctx.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        if out.prec > self.prec:
            out.prec = self.prec
        return out

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self):
        return isinstance(self.valuation(), BelowPrecision)

    def valuation_pi(self):
        """Valuation in units of v(pi), or None when below precision."""
        ctx = self.ctx
        f, e, p = ctx.f, ctx.e, ctx.p
        best = None
        for j in range(e):
            vj = min(vp_int(c, p, ctx.N) for c in self.coeffs[j * f:(j + 1) * f])
            if vj >= ctx.N:
                continue
            cand = e * vj + j
            if best is None or cand < best:
                best = cand
        if best is None or best >= self.prec:
            return None
        return best

    def valuation(self):
        v = self.valuation_pi()
        if v is None:
            return BelowPrecision(Fraction(self.prec, self.ctx.e))
        return Fraction(v, self.ctx.e)

    def is_unit(self):
        return self.valuation_pi() == 0

    def inverse(self):
        if not self.is_unit():
            raise NonUnitInverse("element of positive or unknown valuation")
        ctx = self.ctx
        q = ctx.p ** ctx.f
        # initial inverse modulo pi from the residue
        res = PadicElem(ctx, list(self.coeffs[:ctx.f]) + [0] * (ctx.d - ctx.f))
        y = _pow_plain(res, q - 2)
        prec_pi = 1
        two = ctx.from_int(2)
        while prec_pi < ctx.e * ctx.N:
            y = y * (two - self * y)
            prec_pi *= 2
        y.prec = self.prec
        return y

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def frobenius(self):
        """Apply the arithmetic Frobenius of K (fixing pi)."""
        ctx = self.ctx
        if ctx.f == 1:
            return self
        su = ctx.frobenius_u()
        powers = [ctx.one()]
        for _ in range(ctx.f - 1):
            powers.append(powers[-1] * su)
        out = ctx.zero()
        pi = ctx.uniformizer() if ctx.s >= 1 else None
        for j in range(ctx.e):
            part = ctx.zero()
            for i in range(ctx.f):
                c = self.coeffs[i + ctx.f * j]
                if c:
                    part = part + powers[i] * c
            if j and pi is not None:
                part = part * pi ** j
            out = out + part
        out.prec = self.prec
        return out

    def div_pi(self, t=1):
        """y with pi^t * y = self (mod p^N), assuming v(self) >= t/e.

        The result is determined modulo pi^(eN - t); the representative
        returned satisfies the congruence exactly at full stored precision.
        """
        ctx = self.ctx
        coords = div_pi_coords(ctx, list(self.coeffs), t)
        return PadicElem(ctx, coords, self.prec - t)

    def __repr__(self):
        return "PadicElem(%s, v=%s)" % (list(self.coeffs), self.valuation())

    def lift_int(self):
        """Integer representative, for elements of Z_p."""
        return self.coeffs[0]


def _pow_plain(x, k):
    out = x.ctx.one()
    base = x
    while k:
        if k & 1:
            out = out * base
        base = base * base
        k >>= 1
    return out


def _mul_poly(ctx, a, b):
    """Totally ramified case: multiply as integer polynomials in pi, reduce by E(pi)."""
    prod = flint.fmpz_poly(list(a)) * flint.fmpz_poly(list(b))
    rem = prod % ctx.eis_fmpz
    P = ctx.P
    out = [int(c) % P for c in rem.coeffs()]
    return out + [0] * (ctx.d - len(out))


def mul_coords(ctx, a, b):
    """Product of coordinate vectors; entries may be ints or numpy object arrays."""
    if ctx.eis_fmpz is not None and isinstance(a, tuple) and isinstance(b, tuple):
        return _mul_poly(ctx, a, b)
    P = ctx.P
    out = []
    for terms in ctx.table_by_out:
        acc = 0
        for i, j, k in terms:
            ai, bj = a[i], b[j]
            if isinstance(ai, int) and ai == 0:
                continue
            if isinstance(bj, int) and bj == 0:
                continue
            t = ai * bj
            acc = acc + (t if k == 1 else k * t)
        out.append(acc % P)
    return out


def _pi_inverse_times_p(ctx):
    """Coordinates of p / pi (an integral element)."""
    if ctx.s == 0:
        return [1] + [0] * (ctx.d - 1)
    E = ctx.eis_poly
    # p = E(0); pi^e + E_{e-1} pi^{e-1} + ... + E_1 pi + p = 0 (E(0) = p for cyclotomic)
    # so p/pi = -(pi^{e-1} + E_{e-1} pi^{e-2} + ... + E_1)
    if E[0] != ctx.p:
        raise ValueError("Eisenstein constant term must be p")
    coords = [0] * ctx.d
    for j in range(ctx.e):
        coords[ctx.f * j] = -E[j + 1]
    return coords


_ETA_CACHE = {}


def _p_over_pi_e(ctx, q):
    """Coordinates of the unit (p / pi^e)^q."""
    key = (ctx.key(), q)
    out = _ETA_CACHE.get(key)
    if out is None:
        E = ctx.eis_poly
        # pi^e / p = -sum_{k<e} (E_k / p) pi^k
        coords = [0] * ctx.d
        for k in range(ctx.e):
            coords[ctx.f * k] = -(E[k] // ctx.p)
        eta = PadicElem(ctx, coords).inverse() ** q
        out = list(eta.coeffs)
        _ETA_CACHE[key] = out
    return out


def div_pi_coords(ctx, coords, t):
    """Divide a coordinate vector (ints or arrays) by pi^t, see PadicElem.div_pi."""
    p, f, e = ctx.p, ctx.f, ctx.e
    P = ctx.P
    q, r = divmod(t, e)
    if q:
        pq = p ** q
        coords = [c // pq for c in coords]
        if ctx.s >= 1:
            # x / pi^(eq) = (x / p^q) * (p / pi^e)^q
            coords = mul_coords(ctx, coords, _p_over_pi_e(ctx, q))
    if r == 0:
        return [c % P for c in coords]
    p_over_pi = _pi_inverse_times_p(ctx)
    for _ in range(r):
        # x = sum_j c_j pi^j; x/pi = sum_{j>=1} c_j pi^(j-1) + (c_0/p) * (p/pi)
        low = [c // p for c in coords[:f]]
        shifted = list(coords[f:]) + [0] * f
        extra = mul_coords(ctx, low + [0] * (ctx.d - f), p_over_pi)
        coords = [(a + b) % P for a, b in zip(shifted, extra)]
    return coords


# -- embeddings of the quadratic field ------------------------------------------

def context_for_field(F, p, s, M):
    """Context for weights over F at p: the unramified part is the completion."""
    from .field_core import split_prime
    st = split_prime(F, p)
    if st.is_split():
        return PadicContext(p, 1, s, M)
    c0, c1, c2 = F.min_poly_w()
    return PadicContext(p, 2, s, M, unram_poly=[c0, c1, c2])


class PadicEmbedding:
    """The two embeddings F -> L attached to the fixed labelling of places."""

    def __init__(self, F, ctx):
        from .field_core import split_prime, hensel_root
        self.F = F
        self.ctx = ctx
        st = split_prime(F, ctx.p)
        self.splitting = st
        if st.is_split():
            self.w_images = [ctx.from_int(hensel_root(F, q.root, ctx.p, ctx.N)) for q in st.primes]
        else:
            if ctx.f % 2:
                raise PrecisionTooLow("inert prime needs an even unramified degree")
            w1 = self._inert_root()
            self.w_images = [w1, w1.frobenius()]

    def _inert_root(self):
        ctx, F = self.ctx, self.F
        c0, c1, _ = F.min_poly_w()

        def g(y):
            return y * y + y * c1 + c0

        if ctx.f == 2 and list(ctx.unram_poly) == [c0, c1, 1]:
            return ctx.u()
        start = None
        for coords in product(range(ctx.p), repeat=ctx.f):
            y = ctx.from_O_K(coords)
            if g(y).valuation_pi() != 0 and all(c % ctx.p == 0 for c in g(y).coeffs[:ctx.f]):
                start = y
                break
        if start is None:
            raise PrecisionTooLow("no root of the minimal polynomial in the residue field")
        y = start
        for _ in range(ctx.N.bit_length() + 2):
            y = y - g(y) * (y * 2 + c1).inverse()
        return y

    def __call__(self, x, place):
        wi = self.w_images[place - 1]
        xx, yy = x.x, x.y
        return self.ctx.from_fraction(xx) + wi * self.ctx.from_fraction(yy)

    def embed_residue(self, prime_index, u):
        """Image at a place of an element of O_p / p^N given in LocalRing form."""
        if len(u) == 1:
            return self.ctx.from_int(u[0])
        return self.ctx.from_int(u[0]) + self.w_images[prime_index - 1] * u[1]


_EMBED_CACHE = {}


def embed_field(x, place, ctx):
    key = (x.F.d, ctx.key())
    emb = _EMBED_CACHE.get(key)
    if emb is None:
        emb = PadicEmbedding(x.F, ctx)
        _EMBED_CACHE[key] = emb
    return emb(x, place)


def make_context(p, f=1, s=0, M=60, unram_poly=None):
    return PadicContext(p, f, s, M, unram_poly)


# -- matrices ---------------------------------------------------------------------

class PadicMatrix:
    """Dense matrix over O_L / p^N, stored as d coordinate arrays."""

    def __init__(self, ctx, data, prec=None):
        self.ctx = ctx
        self.data = data
        self.prec = ctx.M if prec is None else prec

    @classmethod
    def zeros(cls, ctx, n, m=None):
        m = n if m is None else m
        data = np.empty((ctx.d, n, m), dtype=object)
        data.fill(0)
        return cls(ctx, data)

    @classmethod
    def from_elems(cls, ctx, rows):
        n = len(rows)
        m = len(rows[0]) if n else 0
        out = cls.zeros(ctx, n, m)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                out[i, j] = x
        return out

    @classmethod
    def from_ints(cls, ctx, rows):
        return cls.from_elems(ctx, [[ctx.from_int(int(x)) for x in row] for row in rows])

    @property
    def shape(self):
        return self.data.shape[1:]

    def __getitem__(self, ij):
        i, j = ij
        return PadicElem(self.ctx, [int(self.data[k, i, j]) for k in range(self.ctx.d)], self.prec)

    def __setitem__(self, ij, x):
        i, j = ij
        if not isinstance(x, PadicElem):
            x = self.ctx.from_int(int(x))
        for k in range(self.ctx.d):
            self.data[k, i, j] = x.coeffs[k]
        if x.prec < self.prec:
            self.prec = x.prec

    def copy(self):
        return PadicMatrix(self.ctx, self.data.copy(), self.prec)

    def submatrix(self, rows, cols=None):
        cols = rows if cols is None else cols
        rows = list(rows)
        cols = list(cols)
        return PadicMatrix(self.ctx, self.data[:, rows][:, :, cols].copy(), self.prec)

    def transpose(self):
        return PadicMatrix(self.ctx, self.data.transpose(0, 2, 1).copy(), self.prec)

    def __add__(self, other):
        return PadicMatrix(self.ctx, (self.data + other.data) % self.ctx.P, min(self.prec, other.prec))

    def __sub__(self, other):
        return PadicMatrix(self.ctx, (self.data - other.data) % self.ctx.P, min(self.prec, other.prec))

    def __matmul__(self, other):
        ctx = self.ctx
        n = self.shape[0]
        m = other.shape[1]
        out = np.empty((ctx.d, n, m), dtype=object)
        out.fill(0)
        for c, terms in enumerate(ctx.table_by_out):
            acc = None
            for i, j, k in terms:
                t = np.dot(self.data[i], other.data[j])
                t = t if k == 1 else k * t
                acc = t if acc is None else acc + t
            if acc is not None:
                out[c] = acc % ctx.P
        return PadicMatrix(ctx, out, min(self.prec, other.prec))

    def scale(self, x):
        coords = mul_coords(self.ctx, list(x.coeffs), list(self.data))
        return PadicMatrix(self.ctx, np.array(coords, dtype=object).reshape(self.data.shape), min(self.prec, x.prec))

    def rows(self):
        n, m = self.shape
        return [[self[i, j] for j in range(m)] for i in range(n)]

    def __eq__(self, other):
        if self.shape != other.shape:
            return False
        diff = (self.data - other.data) % self.ctx.P
        return not diff.any()

    def identity_like(self):
        n = self.shape[0]
        out = PadicMatrix.zeros(self.ctx, n)
        for i in range(n):
            out.data[0, i, i] = 1
        return out

    def min_valuation(self):
        best = None
        n, m = self.shape
        for i in range(n):
            for j in range(m):
                v = self[i, j].valuation()
                if is_exact(v) and (best is None or v < best):
                    best = v
        return best
