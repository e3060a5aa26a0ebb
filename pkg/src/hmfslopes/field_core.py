"""Exact arithmetic in real quadratic fields.

Elements live on the integral basis (1, w) where w = (1 + sqrt d)/2 when
d = 1 mod 4 and w = sqrt d otherwise.  Besides the field itself this module
provides prime splitting, the fundamental unit, residue rings O_F / q^e and
projective lines over products of such rings.
"""

from fractions import Fraction
from itertools import product
from math import gcd, isqrt

from .errors import RamifiedPrime, UnsupportedModulus


def _is_squarefree(n):
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def factor_int(n):
    """Trial-division factorization of a positive integer as {prime: exponent}."""
    out = {}
    k = 2
    while k * k <= n:
        while n % k == 0:
            out[k] = out.get(k, 0) + 1
            n //= k
        k += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class RealQuadraticField:
    """The field Q(sqrt d) with a fixed ordering of its two real embeddings.

    Embedding 1 sends sqrt d to the positive root, embedding 2 to the
    negative one.
    """

    def __init__(self, d):
        d = int(d)
        if d <= 1 or not _is_squarefree(d):
            raise ValueError("d must be a squarefree integer > 1, got %r" % d)
        self.d = d
        self.degree = 2
        if d % 4 == 1:
            # w^2 = w + (d-1)/4
            self.w_trace, self.w_norm = 1, -(d - 1) // 4
            self.disc = d
        else:
            self.w_trace, self.w_norm = 0, -d
            self.disc = 4 * d

    def __call__(self, x, y=0):
        return FieldElem(self, x, y)

    @property
    def w(self):
        return FieldElem(self, 0, 1)

    def one(self):
        return FieldElem(self, 1, 0)

    def zero(self):
        return FieldElem(self, 0, 0)

    def min_poly_w(self):
        """Coefficients (c0, c1, c2) of the minimal polynomial of w."""
        return (self.w_norm, -self.w_trace, 1)

    def from_sqrt(self, a, b):
        """The element a + b*sqrt(d)."""
        a, b = Fraction(a), Fraction(b)
        if self.w_trace == 1:
            # sqrt d = 2w - 1
            return FieldElem(self, a - b, 2 * b)
        return FieldElem(self, a, b)

    def __eq__(self, other):
        return isinstance(other, RealQuadraticField) and other.d == self.d

    def __hash__(self):
        return hash(("RQF", self.d))

    def __repr__(self):
        return "Q(sqrt %d)" % self.d


class FieldElem:
    __slots__ = ("F", "x", "y")

    def __init__(self, F, x, y=0):
        self.F = F
        self.x = Fraction(x)
        self.y = Fraction(y)

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            return other
        return FieldElem(self.F, other, 0)

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElem(self.F, self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.F, -self.x, -self.y)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        t, n = self.F.w_trace, self.F.w_norm
        yy = self.y * other.y
        return FieldElem(self.F,
                         self.x * other.x - n * yy,
                         self.x * other.y + self.y * other.x + t * yy)

    __rmul__ = __mul__

    def conj(self):
        return FieldElem(self.F, self.x + self.F.w_trace * self.y, -self.y)

    def norm(self):
        t, n = self.F.w_trace, self.F.w_norm
        return self.x * self.x + t * self.x * self.y + n * self.y * self.y

    def trace(self):
        return 2 * self.x + self.F.w_trace * self.y

    def inverse(self):
        nm = self.norm()
        if nm == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return FieldElem(self.F, c.x / nm, c.y / nm)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.F.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, FieldElem):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def is_integral(self):
        return self.x.denominator == 1 and self.y.denominator == 1

    def denominator(self):
        return self.x.denominator * self.y.denominator // gcd(self.x.denominator, self.y.denominator)

    def sqrt_coords(self):
        """(a, b) with self = a + b*sqrt(d)."""
        if self.F.w_trace == 1:
            return self.x + self.y / 2, self.y / 2
        return self.x, self.y

    def sign(self, place):
        """Exact sign (-1, 0, 1) of the image under real embedding 1 or 2."""
        a, b = self.sqrt_coords()
        if place == 2:
            b = -b
        return _sign_a_plus_b_sqrt(a, b, self.F.d)

    def is_totally_positive(self):
        return self.sign(1) > 0 and self.sign(2) > 0

    def embed_real(self, place):
        a, b = self.sqrt_coords()
        r = float(self.F.d) ** 0.5
        return float(a) + float(b) * (r if place == 1 else -r)

    def __repr__(self):
        return "FieldElem(%s, %s)" % (self.x, self.y)

    def __str__(self):
        sym = "w" if self.F.w_trace == 1 else "sqrt%d" % self.F.d
        return "%s + %s*%s" % (self.x, self.y, sym)


def _sign_a_plus_b_sqrt(a, b, d):
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with d b^2
    diff = a * a - d * b * b
    return sa if diff > 0 else sb


# -- units -------------------------------------------------------------------

def _pell_sqrt(d):
    """Smallest x + y sqrt d > 1 with x^2 - d y^2 = +-1 (continued fractions)."""
    a0 = isqrt(d)
    m, q, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, qq = 0, 1
    while p * p - d * qq * qq not in (1, -1):
        m = a * q - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        p_prev, p = p, a * p + p_prev
        q_prev, qq = qq, a * qq + q_prev
    return p, qq


def _integral_cube_root(F, eps):
    """Cube root of eps inside O_F if there is one, else None."""
    target1 = eps.embed_real(1)
    target2 = eps.embed_real(2)
    r1 = abs(target1) ** (1.0 / 3) * (1 if target1 > 0 else -1)
    r2 = abs(target2) ** (1.0 / 3) * (1 if target2 > 0 else -1)
    # solve x + y w_i = r_i for the two embeddings
    w1 = F.w.embed_real(1)
    w2 = F.w.embed_real(2)
    y = (r1 - r2) / (w1 - w2)
    x = r1 - y * w1
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            c = F(round(x) + dx, round(y) + dy)
            if c * c * c == eps:
                return c
    return None


def fundamental_unit(F):
    """Generator e of O_F^x / {+-1} with e > 1 under embedding 1."""
    x, y = _pell_sqrt(F.d)
    eps = F.from_sqrt(x, y)
    if F.w_trace == 1:
        # [O_F^x : Z[sqrt d]^x] is 1 or 3
        c = _integral_cube_root(F, eps)
        if c is not None:
            eps = c
    if eps.embed_real(1) < 0:
        eps = -eps
    if eps.embed_real(1) < 1:
        eps = eps.inverse()
    return eps


# -- primes ------------------------------------------------------------------

class PrimeIdeal:
    """A prime of O_F above an unramified rational prime p.

    For split primes ``root`` is the residue r in [0, p) with w = r mod the
    prime; for inert primes it is None and the residue field has p^2
    elements.
    """

    def __init__(self, F, p, f, root=None, label=0):
        self.F = F
        self.p = p
        self.f = f
        self.root = root
        self.label = label

    def norm(self):
        return self.p ** self.f

    def is_split(self):
        return self.f == 1

    def contains(self, x):
        x = x if isinstance(x, FieldElem) else self.F(x)
        if not x.is_integral():
            return False
        if self.f == 2:
            return x.x % self.p == 0 and x.y % self.p == 0
        return (int(x.x) + int(x.y) * self.root) % self.p == 0

    def residue_ring(self, e):
        return LocalRing(self, e)

    def generator(self):
        """Totally positive generator of minimal trace (class number one)."""
        return _totally_positive_generator(self)

    def key(self):
        return (self.p, self.f, self.root)

    def __eq__(self, other):
        return isinstance(other, PrimeIdeal) and self.F == other.F and self.key() == other.key()

    def __hash__(self):
        return hash((self.F.d,) + self.key())

    def name(self):
        if self.f == 2:
            return "(%d)" % self.p
        return "p%d.%d" % (self.p, self.label)

    def __repr__(self):
        return "PrimeIdeal(%s, %s)" % (self.F, self.name())


class SplittingType:
    def __init__(self, kind, primes):
        self.kind = kind
        self.primes = primes

    def is_split(self):
        return self.kind == "split"

    def __repr__(self):
        return "SplittingType(%s, %r)" % (self.kind, self.primes)


def split_prime(F, p):
    """Decompose p O_F.  Split primes are labelled by increasing residue root."""
    if F.disc % p == 0:
        raise RamifiedPrime("%d ramifies in %r" % (p, F))
    c0, c1, _ = F.min_poly_w()
    roots = [r for r in range(p) if (r * r + c1 * r + c0) % p == 0]
    if not roots:
        return SplittingType("inert", [PrimeIdeal(F, p, 2)])
    return SplittingType("split", [PrimeIdeal(F, p, 1, r, i + 1) for i, r in enumerate(roots)])


def _totally_positive_generator(prime):
    F = prime.F
    target = prime.norm()
    eps = fundamental_unit(F)
    best = None
    bound = 1
    while best is None:
        for y in range(-bound, bound + 1):
            for x in range(-bound * 4 - 4, bound * 4 + 5):
                c = F(x, y)
                if abs(c.norm()) != target or not prime.contains(c):
                    continue
                for cand in (c, -c, c * eps, -c * eps):
                    if cand.is_totally_positive():
                        k = (cand.trace(), cand.x, cand.y)
                        if best is None or k < best[0]:
                            best = (k, cand)
        bound *= 2
        if bound > 1 << 12:
            raise ValueError("no totally positive generator found for %r" % prime)
    # shrink the trace using squares of the unit
    c = best[1]
    e2 = eps * eps
    while True:
        better = [u for u in (c * e2, c * e2.inverse()) if u.trace() < c.trace()]
        if not better:
            return c
        c = better[0]


def hensel_root(F, root, p, N):
    """Lift a simple root r of the minimal polynomial of w to Z / p^N."""
    c0, c1, _ = F.min_poly_w()
    P = p ** N
    r = root % p
    k = 1
    while k < N:
        k = min(2 * k, N)
        q = p ** k
        fr = (r * r + c1 * r + c0) % q
        dfr = (2 * r + c1) % q
        r = (r - fr * pow(dfr, -1, q)) % q
    return r % P


# -- residue rings -------------------------------------------------------------

class LocalRing:
    """O_F / q^e for an unramified prime q.

    Elements are tuples: (a,) for split q (an integer mod p^e, via w -> root)
    and (a, b) meaning a + b w for inert q.
    """

    def __init__(self, prime, e):
        if e < 0:
            raise UnsupportedModulus("negative exponent")
        self.prime = prime
        self.p = prime.p
        self.e = e
        self.modulus = prime.p ** e
        self.f = prime.f
        F = prime.F
        self._t, self._n = F.w_trace, F.w_norm
        if self.f == 1:
            self.root = hensel_root(F, prime.root, self.p, max(e, 1)) % self.modulus

    def size(self):
        return self.modulus ** self.f

    def reduce(self, x):
        """Image of a p-integral element of F."""
        if not isinstance(x, FieldElem):
            x = self.prime.F(x)
        m = self.modulus
        den = x.denominator()
        if den % self.p == 0:
            raise UnsupportedModulus("element not integral at %r" % self.prime)
        dinv = pow(den, -1, m) if m > 1 else 0
        a = int(x.x * den) * dinv
        b = int(x.y * den) * dinv
        if self.f == 1:
            return ((a + b * self.root) % m,)
        return (a % m, b % m)

    def from_int(self, n):
        return (n % self.modulus,) if self.f == 1 else (n % self.modulus, 0)

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def add(self, u, v):
        m = self.modulus
        return tuple((a + b) % m for a, b in zip(u, v))

    def sub(self, u, v):
        m = self.modulus
        return tuple((a - b) % m for a, b in zip(u, v))

    def neg(self, u):
        m = self.modulus
        return tuple((-a) % m for a in u)

    def mul(self, u, v):
        m = self.modulus
        if self.f == 1:
            return ((u[0] * v[0]) % m,)
        a, b = u
        c, d = v
        bd = b * d
        return ((a * c - self._n * bd) % m, (a * d + b * c + self._t * bd) % m)

    def norm_int(self, u):
        if self.f == 1:
            return u[0]
        a, b = u
        return a * a + self._t * a * b + self._n * b * b

    def is_unit(self, u):
        return self.norm_int(u) % self.p != 0

    def is_zero(self, u):
        return all(a % self.modulus == 0 for a in u)

    def inv(self, u):
        m = self.modulus
        nm = self.norm_int(u) % m
        if nm % self.p == 0:
            raise ZeroDivisionError("non-unit in %r" % self)
        ni = pow(nm, -1, m)
        if self.f == 1:
            return (ni,)
        a, b = u
        return (((a + self._t * b) * ni) % m, (-b * ni) % m)

    def lift(self, u):
        """Canonical integral lift in O_F."""
        F = self.prime.F
        if self.f == 1:
            return F(u[0])
        return F(u[0], u[1])

    def elements(self):
        r = range(self.modulus)
        if self.f == 1:
            return [(a,) for a in r]
        return [(a, b) for a in r for b in r]

    def non_units(self):
        return [u for u in self.elements() if not self.is_unit(u)]

    def reduce_to(self, u, other):
        """Reduce an element of this ring to a ring of smaller exponent."""
        return tuple(a % other.modulus for a in u)

    def valuation(self, u):
        """q-adic valuation of an element (e when zero)."""
        if self.is_zero(u):
            return self.e
        v = 0
        m = self.modulus
        if self.f == 2:
            g = 0
            for a in u:
                g = gcd(g, a % m)
            while g % self.p == 0 and v < self.e:
                g //= self.p
                v += 1
            return v
        a = u[0] % m
        while a % self.p == 0 and v < self.e:
            a //= self.p
            v += 1
        return v

    def __repr__(self):
        return "LocalRing(%s^%d)" % (self.prime.name(), self.e)


# -- moduli and projective lines --------------------------------------------------

class Modulus:
    """An integral ideal given as a product of prime powers q^e."""

    def __init__(self, components):
        comps = [(q, e) for q, e in components if e > 0]
        seen = set()
        for q, _ in comps:
            if q in seen:
                raise UnsupportedModulus("repeated prime %r" % q)
            seen.add(q)
        self.components = comps

    @classmethod
    def from_integer(cls, F, n):
        comps = []
        for p, k in sorted(factor_int(n).items()):
            try:
                st = split_prime(F, p)
            except RamifiedPrime as exc:
                raise UnsupportedModulus(str(exc))
            comps.extend((q, k) for q in st.primes)
        return cls(comps)

    def __mul__(self, other):
        comps = dict(self.components)
        for q, e in other.components:
            comps[q] = comps.get(q, 0) + e
        return Modulus(sorted(comps.items(), key=lambda qe: qe[0].key()))

    def rings(self):
        return [LocalRing(q, e) for q, e in self.components]

    def residue_size(self):
        s = 1
        for q, e in self.components:
            s *= q.norm() ** e
        return s

    def p1_size(self):
        s = 1
        for q, e in self.components:
            nq = q.norm()
            s *= nq ** (e - 1) * (nq + 1)
        return s

    def exponent_at(self, q):
        for qq, e in self.components:
            if qq == q:
                return e
        return 0

    def describe(self):
        return "*".join("%s^%d" % (q.name(), e) for q, e in self.components) or "(1)"

    def __repr__(self):
        return "Modulus(%s)" % self.describe()


def p1_normalize(R, a, b):
    """Normalized representative of (a : b) over the local ring R."""
    if R.is_unit(a):
        return (R.one(), R.mul(b, R.inv(a)))
    if R.is_unit(b):
        return (R.mul(a, R.inv(b)), R.one())
    raise ValueError("(a : b) is not unimodular")


def p1_points_local(R):
    one = R.one()
    pts = [(one, b) for b in R.elements()]
    pts.extend((a, one) for a in R.non_units())
    return pts


def proj_line(F, modulus):
    """All normalized points of P^1(O_F / m), as tuples over the components of m."""
    if not isinstance(modulus, Modulus):
        modulus = Modulus.from_integer(F, modulus)
    try:
        per = [p1_points_local(R) for R in modulus.rings()]
    except Exception as exc:  # pragma: no cover - defensive
        raise UnsupportedModulus(str(exc))
    return [tuple(pt) for pt in product(*per)]
