"""Weights, finite characters of (O_F / p^s)^x, and weight-space bookkeeping.

A locally algebraic weight is an algebraic weight tuple (k, r, n, v, w)
together with a finite character psi of p-power conductor and powers
(j_1, ..., j_g) of the Teichmuller character tau at each place.  The
character acting on the lower-right entry d of a Hecke matrix is
psi(d) * prod_v tau(sigma_v(d))^(j_v).  At p = 2 only even j_v are allowed,
since tau^2 does not depend on how the sign part of 1 + 2 O_p is split off.
"""

from fractions import Fraction
from itertools import product
from math import gcd

from .errors import NonParitious
from .field_core import LocalRing, fundamental_unit, split_prime
from .padic_core import PadicContext, PadicEmbedding, context_for_field


def _lcm(a, b):
    return a * b // gcd(a, b)


class WeightTuple:
    """Algebraic weight data (k, r, n, v, w) with n + 2v = (r, ..., r)."""

    def __init__(self, k):
        k = tuple(int(x) for x in k)
        if not k or any(x < 2 for x in k):
            raise ValueError("weights must be >= 2")
        if len({x % 2 for x in k}) != 1:
            raise NonParitious("weight %r is not paritious" % (k,))
        self.k = k
        self.k0 = max(k)
        self.n = tuple(x - 2 for x in k)
        self.v = tuple((self.k0 - x) // 2 for x in k)
        self.r = self.k0 - 2
        self.w = tuple(vi + ni + 1 for vi, ni in zip(self.v, self.n))

    @property
    def g(self):
        return len(self.k)

    def classical_dimension_factor(self):
        out = 1
        for x in self.k:
            out *= x - 1
        return out

    def __eq__(self, other):
        return isinstance(other, WeightTuple) and other.k == self.k

    def __hash__(self):
        return hash(self.k)

    def __repr__(self):
        return "WeightTuple(k=%r, r=%d, n=%r, v=%r, w=%r)" % (self.k, self.r, self.n, self.v, self.w)


def weight_tuple_from_k(k):
    return WeightTuple(k)


class UnitResidueGroup:
    """The finite group (O_F / p^s)^x = prod over q | p of (O_F / q^s)^x.

    Elements are tuples with one LocalRing element per prime above p, in the
    order of ``split_prime``.  A generating set and a word for every element
    in those generators are computed once, so characters can be stored by
    generator images.
    """

    def __init__(self, F, p, s):
        self.F, self.p, self.s = F, p, s
        self.splitting = split_prime(F, p)
        self.rings = [LocalRing(q, s) for q in self.splitting.primes]
        per = [[u for u in R.elements() if R.is_unit(u)] for R in self.rings]
        self.elements = [tuple(t) for t in product(*per)]
        self.order = len(self.elements)
        self.identity = tuple(R.one() for R in self.rings)
        self._build_generators()

    def mul(self, a, b):
        return tuple(R.mul(x, y) for R, x, y in zip(self.rings, a, b))

    def power(self, a, k):
        out = self.identity
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def element_order(self, a):
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def _span(self, gens):
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def _build_generators(self):
        gens = []
        span = {self.identity}
        order_of = {a: self.element_order(a) for a in self.elements}
        while len(span) < self.order:
            best = max((a for a in self.elements if a not in span),
                       key=lambda a: (len(self._span(gens + [a])), -self.elements.index(a)))
            gens.append(best)
            span = self._span(gens)
        self.generators = gens
        self.generator_orders = [order_of[g] for g in gens]
        # word (exponent vector) for every element, by breadth-first search
        words = {self.identity: (0,) * len(gens)}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for i, g in enumerate(gens):
                    y = self.mul(x, g)
                    if y not in words:
                        w = list(words[x])
                        w[i] += 1
                        words[y] = tuple(w)
                        nxt.append(y)
            frontier = nxt
        self.words = words

    def reduce(self, x):
        """Image of a p-adic unit of F (a FieldElem) in the group."""
        return tuple(R.reduce(x) for R in self.rings)

    def reduce_local(self, parts):
        """Image of a tuple of per-prime residues of higher precision."""
        return tuple(tuple(c % R.modulus for c in u) for R, u in zip(self.rings, parts))

    def level_kernel(self, prime_index, level):
        """Elements trivial away from the given prime and = 1 mod q^level there."""
        R = self.rings[prime_index]
        m = R.p ** level
        out = []
        for a in self.elements:
            ok = True
            for i, (Ri, u) in enumerate(zip(self.rings, a)):
                if i == prime_index:
                    if any((c - o) % m for c, o in zip(u, Ri.one())):
                        ok = False
                elif u != Ri.one():
                    ok = False
            if ok:
                out.append(a)
        return out


class FiniteCharacter:
    """A character of (O_F / p^s)^x with values in mu_m, stored by generator images."""

    def __init__(self, group, m, exps):
        self.group = group
        self.m = m
        self.exps = tuple(int(x) % m for x in exps)
        if len(self.exps) != len(group.generators):
            raise ValueError("need one exponent per generator")
        table = {}
        for a, word in group.words.items():
            table[a] = sum(e * w for e, w in zip(self.exps, word)) % m
        self.table = table
        for a in group.elements:
            for i, g in enumerate(group.generators):
                if table[group.mul(a, g)] != (table[a] + self.exps[i]) % m:
                    raise ValueError("generator images do not define a character")

    @classmethod
    def trivial(cls, group):
        return cls(group, 1, [0] * len(group.generators))

    def __call__(self, a):
        """Exponent e with chi(a) = zeta_m^e."""
        return self.table[a]

    def value_fraction(self, a):
        return Fraction(self.table[a], self.m)

    def evaluate_field(self, x):
        return self(self.group.reduce(x))

    def order(self):
        o = 1
        for e in self.exps:
            o = _lcm(o, self.m // gcd(self.m, e)) if e else o
        return o

    def normalized(self):
        """Same character with the smallest possible m."""
        o = self.order()
        return FiniteCharacter(self.group, o, [e * o // self.m for e in self.exps])

    def __mul__(self, other):
        m = _lcm(self.m, other.m)
        return FiniteCharacter(self.group, m,
                               [a * (m // self.m) + b * (m // other.m) for a, b in zip(self.exps, other.exps)]).normalized()

    def __pow__(self, k):
        return FiniteCharacter(self.group, self.m, [e * k for e in self.exps]).normalized()

    def __eq__(self, other):
        if not isinstance(other, FiniteCharacter) or other.group is not self.group:
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return a.m == b.m and a.exps == b.exps

    def __hash__(self):
        n = self.normalized()
        return hash((n.m, n.exps))

    def conductor_exponents(self):
        """Per prime above p: the smallest c with chi trivial on 1 + q^c."""
        out = []
        for i in range(len(self.group.rings)):
            c = self.group.s
            while c > 0 and all(self.table[a] == 0 for a in self.group.level_kernel(i, c - 1)):
                c -= 1
            out.append(c)
        return tuple(out)

    def is_primitive(self):
        return all(c == self.group.s for c in self.conductor_exponents())

    def descriptor(self):
        return {"m": self.m, "exps": list(self.exps)}

    def __repr__(self):
        return "FiniteCharacter(m=%d, exps=%r)" % (self.m, self.exps)


def enumerate_characters(group, m):
    """All characters with values in mu_m, in lexicographic order of exponents."""
    out = []
    ranges = [range(m) for _ in group.generators]
    for exps in product(*ranges):
        # quick necessary condition: ord(g) * e = 0 mod m
        if any((o * e) % m for o, e in zip(group.generator_orders, exps)):
            continue
        try:
            out.append(FiniteCharacter(group, m, exps))
        except ValueError:
            continue
    return out


def check_nebentypus(psi, r, F=None):
    """psi(eps) = Norm(eps)^r for eps = -1 and the fundamental unit."""
    F = psi.group.F if F is None else F
    eps = fundamental_unit(F)
    for u in (F(-1), eps):
        want = int(u.norm()) ** r
        want_exp = 0 if want == 1 else Fraction(1, 2)
        if psi.value_fraction(psi.group.reduce(u)) != want_exp:
            return False
    return True


def nebentypus_characters(group, r, m, primitive=True):
    """Characters of values in mu_m compatible with the units for parity of r."""
    return [c for c in enumerate_characters(group, m)
            if (not primitive or c.is_primitive()) and check_nebentypus(c, r)]


class LocallyAlgebraicWeight:
    """[k_1, ..., k_g] psi tau^j."""

    def __init__(self, k, psi, tau_power=0, name=None):
        self.tuple = k if isinstance(k, WeightTuple) else WeightTuple(k)
        self.psi = psi
        if isinstance(tau_power, int):
            tau_power = (tau_power,) + (0,) * (self.tuple.g - 1)
        tau_power = tuple(int(j) for j in tau_power)
        if len(tau_power) != self.tuple.g:
            raise ValueError("need one tau exponent per place")
        if psi.group.p == 2 and any(j % 2 for j in tau_power):
            raise ValueError("odd powers of tau are not defined at p = 2")
        self.tau_power = tau_power
        self.name = name

    @property
    def group(self):
        return self.psi.group

    @property
    def F(self):
        return self.psi.group.F

    @property
    def p(self):
        return self.psi.group.p

    @property
    def s(self):
        return self.psi.group.s

    def nebentypus_ok(self):
        return check_nebentypus(self.psi, self.tuple.r)

    def display(self):
        base = "[%s]" % ",".join(str(x) for x in self.tuple.k)
        tag = "psi" if self.name is None else self.name
        out = base + tag
        if any(self.tau_power):
            if all(j == 0 for j in self.tau_power[1:]):
                out += "tau^%d" % self.tau_power[0]
            else:
                out += "tau^(%s)" % ",".join(str(j) for j in self.tau_power)
        return out

    def __repr__(self):
        return "LocallyAlgebraicWeight(%s)" % self.display()

    def value_orders(self):
        """(order of psi values, order of tau^j values)."""
        q = self.p ** (self.group.splitting.primes[0].f)
        tau_order = 1
        for j in self.tau_power:
            if j:
                tau_order = _lcm(tau_order, (q - 1) // gcd(q - 1, j))
        return self.psi.order(), tau_order

    def coefficient_context(self, M):
        """Smallest context of our tower containing all character values."""
        F, p = self.F, self.p
        f_field = self.group.splitting.primes[0].f
        m = _lcm(*self.value_orders())
        m_p, m_rest = 1, m
        while m_rest % p == 0:
            m_rest //= p
            m_p *= p
        f = f_field
        while (p ** f - 1) % m_rest:
            f += f_field
        s = 0
        while p ** s < m_p and not (p == 2 and m_p == 2):
            s += 1
        if f == f_field:
            return context_for_field(F, p, s, M)
        return PadicContext(p, f, s, M)


def tau_twist(kappa, j):
    """Multiply the weight's character by tau^j (an int acts at the first place)."""
    if isinstance(j, int):
        j = (j,) + (0,) * (kappa.tuple.g - 1)
    new = tuple(a + b for a, b in zip(kappa.tau_power, j))
    return LocallyAlgebraicWeight(kappa.tuple, kappa.psi, new, kappa.name)


class CharacterEvaluator:
    """Evaluates psi * tau^j on p-adic units inside a fixed context."""

    def __init__(self, kappa, ctx):
        self.kappa = kappa
        self.ctx = ctx
        # values live in mu_(order of psi), which may be smaller than mu_m
        self.psi = psi = kappa.psi.normalized()
        self.zeta_psi = ctx.root_of_unity(psi.m) if psi.m > 1 else ctx.one()
        self.psi_powers = [self.zeta_psi ** e for e in range(psi.m)]
        self.embedding = PadicEmbedding(kappa.F, ctx)

    def psi_of_residues(self, parts):
        """psi at a unit given by per-prime residues (LocalRing tuples)."""
        a = self.kappa.group.reduce_local(parts)
        return self.psi_powers[self.psi(a)]

    def tau_at(self, images):
        """prod_v tau(x_v)^(j_v) for the place images x_v of a unit."""
        out = self.ctx.one()
        for x, j in zip(images, self.kappa.tau_power):
            if j == 0:
                continue
            t = self.ctx.teichmuller(x)
            out = out * (t ** j if j > 0 else t.inverse() ** (-j))
        return out


def classify_weight(kappa, M=40):
    """('Centre' | 'QuasiBoundary', val_p(w(kappa))).

    w(kappa) is evaluated on the topological generators 1 + q of each Z_p
    factor (q = p, or 4 when p = 2): per prime for split p, and 1 + q,
    1 + q w for inert p.
    """
    F, p = kappa.F, kappa.p
    q = 4 if p == 2 else p
    ctx = kappa.coefficient_context(max(M, 8))
    emb = PadicEmbedding(F, ctx)
    group = kappa.group
    primes = group.splitting.primes
    n = kappa.tuple.n
    gens = []
    if group.splitting.is_split():
        for i in range(len(primes)):
            gens.append([F(1 + q) if j == i else F(1) for j in range(len(primes))])
    else:
        gens = [[F(1 + q)], [F(1, q)]]
    ev = CharacterEvaluator(kappa, ctx)
    vals = []
    for gen in gens:
        residues = tuple(R.reduce(x) for R, x in zip(group.rings, gen))
        value = ev.psi_of_residues(residues)
        images = []
        for place in range(1, len(n) + 1):
            if group.splitting.is_split():
                images.append(emb(gen[place - 1], place))
            else:
                images.append(emb(gen[0], place))
        for img, e in zip(images, n):
            value = value * img ** e
        value = value * ev.tau_at(images)
        vals.append((value - ctx.one()).valuation())
    exact = [v for v in vals if not hasattr(v, "bound")]
    val = min(exact) if exact else min(v.bound for v in vals)
    threshold = 3 if p == 2 else 1
    return ("QuasiBoundary" if val < threshold else "Centre"), val


def component_of(kappa, M=20):
    """Restriction of the weight to the torsion subgroup H, as exponents in Q/Z.

    The tag is a tuple: the value of psi * tau^j * prod_v sigma_v^(n_v) on each
    generator of the torsion of O_p^x (written as a fraction a/b meaning
    exp(2 pi i a/b)), followed by r modulo the number of roots of unity in Q_p.
    """
    F, p = kappa.F, kappa.p
    group = kappa.group
    st = group.splitting
    n = kappa.tuple.n
    f_field = st.primes[0].f
    q = p ** f_field
    tors = q - 1 if p != 2 else (q - 1) * 2
    psi_m = kappa.psi.m
    big = _lcm(tors, psi_m)
    # context holding mu_big
    m_p, m_rest = 1, big
    while m_rest % p == 0:
        m_rest //= p
        m_p *= p
    f = f_field
    while (p ** f - 1) % m_rest:
        f += f_field
    s = 0
    while p ** s < m_p and not (p == 2 and m_p == 2):
        s += 1
    ctx = context_for_field(F, p, s, M) if f == f_field else PadicContext(p, f, s, M)
    emb = PadicEmbedding(F, ctx)
    zeta = ctx.root_of_unity(big)
    powers = [ctx.one()]
    for _ in range(big - 1):
        powers.append(powers[-1] * zeta)

    def exponent_of(x):
        for e, z in enumerate(powers):
            if (x - z).is_zero():
                return Fraction(e, big)
        raise ValueError("value is not a big-th root of unity")

    ev = CharacterEvaluator(kappa, ctx)
    # torsion generators as elements of O_p given per place
    gens = []
    if st.is_split():
        for i in range(len(st.primes)):
            if p == 2:
                gi = -ctx.one()
            else:
                gi = ctx.root_of_unity(p - 1)
            gens.append([gi if j == i else ctx.one() for j in range(len(st.primes))])
    else:
        z = ctx.root_of_unity(q - 1)
        if p == 2:
            z = -z
        # place 1 image z, place 2 image its Frobenius conjugate
        gens.append([z, z.frobenius()])
    tags = []
    for gen in gens:
        # residues of the generator at each prime above p, via its place images
        if st.is_split():
            residues = tuple((int(gen[i].coeffs[0]) % (p ** group.s),) for i in range(len(st.primes)))
        else:
            residues = (_inert_residue(gen[0], emb, group.rings[0]),)
        value = ev.psi_of_residues(residues)
        for place in range(1, len(n) + 1):
            value = value * gen[place - 1] ** n[place - 1]
        value = value * ev.tau_at(gen)
        tags.append(exponent_of(value))
    wp = 2 if p == 2 else p - 1
    return tuple(tags) + (kappa.tuple.r % wp,)


def _inert_residue(x, emb, R):
    """Write the place-1 image x of an element of O_p as a + b w mod p^s."""
    ctx = emb.ctx
    w1 = emb.w_images[0]
    m = R.modulus
    for a in range(m):
        for b in range(m):
            if ((ctx.from_int(a) + w1 * b) - x).valuation() >= R.e:
                return (a, b)
    raise ValueError("element not in the image of O_p")
