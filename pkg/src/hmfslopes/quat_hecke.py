"""Totally definite quaternion algebras over real quadratic fields.

Covers the maximal order and its unit group, local splittings at the level
and at p, the class set as orbits on a projective line, and the local
matrices of the Hecke operators at primes above p.  The expensive results
can be written to and read from a self-describing cache file.
"""

import hashlib
import json
import os
from fractions import Fraction
from functools import cached_property
from itertools import product

from .errors import (CacheVersionMismatch, EnumerationBoundExceeded, HashMismatch, IoFailure,
                     NotAnOrder, PrincipalizationFailure, ShapeViolation)
from .field_core import (FieldElem, LocalRing, Modulus, RealQuadraticField, fundamental_unit,
                         p1_normalize, split_prime)
from .lattice import hnf_rows, rational_det, short_vectors, solve_rational

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


# -- the algebra -------------------------------------------------------------

class QuaternionAlgebra:
    """(a, b)_F with i^2 = a, j^2 = b, k = ij = -ji."""

    def __init__(self, F, a, b):
        self.F = F
        self.a = a if isinstance(a, FieldElem) else F(a)
        self.b = b if isinstance(b, FieldElem) else F(b)
        for x in (self.a, self.b):
            if x.sign(1) >= 0 or x.sign(2) >= 0:
                raise ValueError("a and b must be totally negative")

    def elem(self, coords):
        return tuple(c if isinstance(c, FieldElem) else self.F(c) for c in coords)

    def mul(self, x, y):
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        ab = a * b
        return (x0 * y0 + a * x1 * y1 + b * x2 * y2 - ab * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1)

    def add(self, x, y):
        return tuple(s + t for s, t in zip(x, y))

    def scale(self, c, x):
        return tuple(c * t for t in x)

    def conj(self, x):
        return (x[0], -x[1], -x[2], -x[3])

    def nrd(self, x):
        a, b = self.a, self.b
        return x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3]

    def trd(self, x):
        return x[0] * 2

    def one(self):
        F = self.F
        return (F(1), F(0), F(0), F(0))

    # rational coordinates: (x_m, y_m) of x_m + y_m w for m = 0..3
    def to_q8(self, x):
        out = []
        for c in x:
            out.extend([c.x, c.y])
        return out

    def from_q8(self, v):
        return tuple(self.F(v[2 * m], v[2 * m + 1]) for m in range(4))

    def __repr__(self):
        return "QuaternionAlgebra(%s, %s, %s)" % (self.F, self.a, self.b)


def _fe_to_json(x):
    return [str(x.x), str(x.y)]


def _fe_from_json(F, t):
    return F(Fraction(t[0]), Fraction(t[1]))


class QuaternionOrder:
    """An O_F-order given by four basis elements (O_F is a PID for the presets).

    The induced Z-basis is z_(2m) = e_m, z_(2m+1) = w e_m.  Multiplication,
    reduced norm and trace are precomputed as integer tensors on that basis.
    """

    def __init__(self, alg, basis):
        self.alg = alg
        self.F = alg.F
        self.basis = [alg.elem(e) for e in basis]
        if len(self.basis) != 4:
            raise NotAnOrder("need four basis elements")
        w = self.F.w
        self.zbasis = []
        for e in self.basis:
            self.zbasis.append(e)
            self.zbasis.append(alg.scale(w, e))
        self._zrows = [alg.to_q8(z) for z in self.zbasis]
        if rational_det(self._zrows) == 0:
            raise NotAnOrder("basis elements are dependent")

    # coordinates on the Z-basis; None when not in the lattice span over Q
    def zcoords(self, x):
        c = solve_rational(self._zrows, self.alg.to_q8(x))
        return c

    def contains(self, x):
        c = self.zcoords(x)
        return c is not None and all(t.denominator == 1 for t in c)

    def from_z(self, v):
        out = self.alg.elem([0, 0, 0, 0])
        for c, z in zip(v, self.zbasis):
            if c:
                out = self.alg.add(out, self.alg.scale(self.F(c), z))
        return out

    @cached_property
    def mult_table(self):
        """T[a][b] = integer coordinates of z_a z_b; NotAnOrder if not closed."""
        table = []
        for za in self.zbasis:
            row = []
            for zb in self.zbasis:
                c = self.zcoords(self.alg.mul(za, zb))
                if c is None or any(t.denominator != 1 for t in c):
                    raise NotAnOrder("basis is not closed under multiplication")
                row.append([int(t) for t in c])
            table.append(row)
        one = self.zcoords(self.alg.one())
        if one is None or any(t.denominator != 1 for t in one):
            raise NotAnOrder("order does not contain 1")
        return table

    @cached_property
    def one_z(self):
        return [int(t) for t in self.zcoords(self.alg.one())]

    def zmul(self, u, v):
        T = self.mult_table
        out = [0] * 8
        for a, ua in enumerate(u):
            if not ua:
                continue
            for b, vb in enumerate(v):
                if not vb:
                    continue
                c = ua * vb
                row = T[a][b]
                for k in range(8):
                    if row[k]:
                        out[k] += c * row[k]
        return out

    @cached_property
    def nrd_forms(self):
        """Integer matrices (N0, N1) with nrd(x) = x N0 x^t + (x N1 x^t) w."""
        F, alg = self.F, self.alg
        z = self.zbasis
        N0 = [[0] * 8 for _ in range(8)]
        N1 = [[0] * 8 for _ in range(8)]
        for a in range(8):
            for b in range(8):
                if a == b:
                    v = alg.nrd(z[a])
                else:
                    # polarization: (nrd(x+y) - nrd(x) - nrd(y)) / 2
                    v = (alg.nrd(alg.add(z[a], z[b])) - alg.nrd(z[a]) - alg.nrd(z[b])) / 2
                N0[a][b], N1[a][b] = v.x, v.y
        return N0, N1

    def znrd(self, v):
        N0, N1 = self.nrd_forms
        s0 = sum(v[a] * N0[a][b] * v[b] for a in range(8) for b in range(8) if v[a] and v[b])
        s1 = sum(v[a] * N1[a][b] * v[b] for a in range(8) for b in range(8) if v[a] and v[b])
        return self.F(s0, s1)

    @cached_property
    def trace_gram(self):
        """Gram matrix of Tr_{F/Q} nrd on the Z-basis (integral when maximal)."""
        N0, N1 = self.nrd_forms
        t = self.F.w_trace
        return [[2 * N0[a][b] + t * N1[a][b] for b in range(8)] for a in range(8)]

    def discriminant_z(self):
        """det of Tr_{F/Q} trd(z_a z_b); equals disc(F)^4 for a maximal order of a
        totally definite algebra unramified at every finite place."""
        rows = []
        for za in self.zbasis:
            rows.append([self.alg.trd(self.alg.mul(za, zb)).trace() for zb in self.zbasis])
        return rational_det(rows)

    def reduced_discriminant_norm(self):
        """Norm of det(trd(e_i e_j)) over F, computed from the O_F basis."""
        alg = self.alg
        M = [[alg.trd(alg.mul(ei, ej)) for ej in self.basis] for ei in self.basis]
        return _det4(M).norm()

    def to_json(self):
        return {
            "d": self.F.d,
            "a": _fe_to_json(self.alg.a),
            "b": _fe_to_json(self.alg.b),
            "basis": [[_fe_to_json(c) for c in e] for e in self.basis],
        }

    @classmethod
    def from_json(cls, data):
        F = RealQuadraticField(int(data["d"]))
        alg = QuaternionAlgebra(F, _fe_from_json(F, data["a"]), _fe_from_json(F, data["b"]))
        basis = [[_fe_from_json(F, c) for c in e] for e in data["basis"]]
        return cls(alg, basis)


def _det4(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    out = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det4(minor)
        if j % 2:
            term = -term
        out = term if out is None else out + term
    return out


def verify_maximal_order(order):
    """True iff the basis spans an order whose reduced discriminant is trivial.

    Closure under multiplication is checked first (NotAnOrder otherwise).  The
    determinant of trd(e_i e_j) over O_F is the square of the reduced
    discriminant up to a unit, so maximality with trivial discriminant is the
    statement that this determinant has norm +-1.
    """
    order.mult_table
    for e in order.basis:
        if not order.alg.nrd(e).is_integral() or not order.alg.trd(e).is_integral():
            raise NotAnOrder("basis element is not integral")
    n = order.reduced_discriminant_norm()
    return abs(n) == 1


def load_preset(d):
    path = os.path.join(DATA_DIR, "order_d%d.json" % d)
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoFailure("no preset order for d=%d" % d) from exc
    order = QuaternionOrder.from_json(data)
    if not verify_maximal_order(order):
        raise NotAnOrder("preset order for d=%d is not maximal" % d)
    return order


# -- unit group --------------------------------------------------------------

class UnitGroup:
    """O_D^x / O_F^x, realized by the reduced-norm-one units modulo -1.

    For the preset fields the fundamental unit has norm -1, so every totally
    positive unit is a square and each class has a norm-one representative.
    Elements are integer coordinate tuples on the order's Z-basis, with a
    sign fixed by making the first nonzero coordinate positive.
    """

    def __init__(self, order, elements):
        self.order = order
        self.elements = elements
        self.index = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        table = []
        for a in elements:
            row = []
            for b in elements:
                c = canonical_sign(order.zmul(a, b))
                if c not in self.index:
                    raise EnumerationBoundExceeded("unit enumeration is not closed")
                row.append(self.index[c])
            table.append(row)
        self.table = table
        self.identity = self.index[canonical_sign(order.one_z)]
        self.inverse = [row.index(self.identity) for row in table]
        self.order_size = n

    def __len__(self):
        return len(self.elements)

    def mul(self, i, j):
        return self.table[i][j]


def canonical_sign(v):
    v = tuple(int(x) for x in v)
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def unit_group(order):
    gram2 = [[int(2 * x) for x in row] for row in order.trace_gram]
    vecs = short_vectors(gram2, 4, limit=100000)
    one = order.F(1)
    elems = []
    for v, _ in vecs:
        if order.znrd(v) == one:
            elems.append(canonical_sign(v))
    elems = sorted(set(elems), key=lambda e: (e != canonical_sign(order.one_z), [abs(x) for x in e], e))
    return UnitGroup(order, elems)


# -- local splittings ----------------------------------------------------------

def _mat_mul(R, A, B):
    return ((R.add(R.mul(A[0][0], B[0][0]), R.mul(A[0][1], B[1][0])),
             R.add(R.mul(A[0][0], B[0][1]), R.mul(A[0][1], B[1][1]))),
            (R.add(R.mul(A[1][0], B[0][0]), R.mul(A[1][1], B[1][0])),
             R.add(R.mul(A[1][0], B[0][1]), R.mul(A[1][1], B[1][1]))))


def _mat_det(R, A):
    return R.sub(R.mul(A[0][0], A[1][1]), R.mul(A[0][1], A[1][0]))


def _mat_inv(R, A):
    di = R.inv(_mat_det(R, A))
    return ((R.mul(A[1][1], di), R.neg(R.mul(A[0][1], di))),
            (R.neg(R.mul(A[1][0], di)), R.mul(A[0][0], di)))


def _mat_reduce(R, A, S):
    return tuple(tuple(R.reduce_to(x, S) for x in row) for row in A)


class LocalSplitting:
    """A ring isomorphism O_D / q^N -> M_2(O_F / q^N).

    Built from an idempotent: a rank-one idempotent e mod q is lifted by
    e -> 3e^2 - 2e^3 (whose limit is unique), and O_D acts on the left ideal
    O_D e, which is free of rank 2.  Reductions to lower precision agree
    with the map computed directly at that precision.
    """

    def __init__(self, order, prime, N):
        self.order = order
        self.prime = prime
        self.N = N
        R = LocalRing(prime, N)
        self.ring = R
        F = order.F
        T = order.mult_table
        # O_F structure constants on the O_F basis
        self.const = [[[R.reduce(F(T[2 * a][2 * b][2 * k], T[2 * a][2 * b][2 * k + 1]))
                        for k in range(4)] for b in range(4)] for a in range(4)]
        self.trd_basis = [R.reduce(order.alg.trd(e)) for e in order.basis]
        self.w_bar = R.reduce(F.w)
        self._build()

    def _amul(self, x, y, R=None):
        R = R or self.ring
        out = [R.zero()] * 4
        for a in range(4):
            if R.is_zero(x[a]):
                continue
            for b in range(4):
                if R.is_zero(y[b]):
                    continue
                xy = R.mul(x[a], y[b])
                for k in range(4):
                    out[k] = R.add(out[k], R.mul(xy, R.reduce_to(self.const[a][b][k], R)))
        return out

    def _build(self):
        R = self.ring
        R1 = LocalRing(self.prime, 1)
        one1 = [R1.one(), R1.zero(), R1.zero(), R1.zero()]
        oz = self.order.one_z
        # 1 in O_F coordinates
        one_of = [R.reduce(self.order.F(oz[2 * m], oz[2 * m + 1])) for m in range(4)]
        one1 = [R.reduce_to(c, R1) for c in one_of]
        idem = None
        for cand in product(R1.elements(), repeat=4):
            cand = list(cand)
            if all(R1.is_zero(R1.sub(c, o)) for c, o in zip(cand, one1)) or all(R1.is_zero(c) for c in cand):
                continue
            if self._amul(cand, cand, R1) != cand:
                continue
            t = R1.zero()
            for c, tb in zip(cand, self.trd_basis):
                t = R1.add(t, R1.mul(c, R.reduce_to(tb, R1)))
            if t == R1.one():
                idem = cand
                break
        if idem is None:
            raise NotAnOrder("no rank-one idempotent modulo %s" % self.prime.name())
        e = [R.from_int(0)] * 4
        e = [tuple(int(c) for c in x) for x in idem]
        for _ in range(2 * self.N.bit_length() + 4):
            e2 = self._amul(e, e)
            e3 = self._amul(e2, e)
            new = [R.sub(R.mul(R.from_int(3), a), R.mul(R.from_int(2), b)) for a, b in zip(e2, e3)]
            if new == e:
                break
            e = new
        if self._amul(e, e) != e:
            raise NotAnOrder("idempotent lift did not converge")
        self.idempotent = e
        basis_vecs = []
        for m in range(4):
            em = [R.zero()] * 4
            em[m] = R.one()
            basis_vecs.append(self._amul(em, e))
        choice = None
        for k1 in range(4):
            for k2 in range(k1 + 1, 4):
                for r1 in range(4):
                    for r2 in range(r1 + 1, 4):
                        minor = ((basis_vecs[k1][r1], basis_vecs[k2][r1]),
                                 (basis_vecs[k1][r2], basis_vecs[k2][r2]))
                        if R.is_unit(_mat_det(R, minor)):
                            choice = (k1, k2, r1, r2, minor)
                            break
                    if choice:
                        break
                if choice:
                    break
            if choice:
                break
        k1, k2, r1, r2, minor = choice
        minv = _mat_inv(R, minor)
        v = (basis_vecs[k1], basis_vecs[k2])
        mats = []
        for m in range(4):
            em = [R.zero()] * 4
            em[m] = R.one()
            cols = []
            for c in range(2):
                y = self._amul(em, v[c])
                coords = (R.add(R.mul(minv[0][0], y[r1]), R.mul(minv[0][1], y[r2])),
                          R.add(R.mul(minv[1][0], y[r1]), R.mul(minv[1][1], y[r2])))
                cols.append(coords)
            mats.append(((cols[0][0], cols[1][0]), (cols[0][1], cols[1][1])))
        self.basis_images = mats
        z_images = []
        for m in range(4):
            z_images.append(mats[m])
            z_images.append(tuple(tuple(R.mul(self.w_bar, x) for x in row) for row in mats[m]))
        self.z_images = z_images

    def rho(self, v, R=None):
        """Image of the element with Z-coordinates v, over R (default: full precision)."""
        S = self.ring
        R = R or S
        acc = [[R.zero(), R.zero()], [R.zero(), R.zero()]]
        for c, M in zip(v, self.z_images):
            if not c:
                continue
            cc = R.from_int(c)
            for i in range(2):
                for j in range(2):
                    acc[i][j] = R.add(acc[i][j], R.mul(cc, S.reduce_to(M[i][j], R)))
        return (tuple(acc[0]), tuple(acc[1]))


# -- class set -----------------------------------------------------------------

def parse_level(F, p, s, extra=()):
    """Modulus n p^s where extra lists (prime label, exponent) pairs away from p."""
    comps = [(q, s) for q in split_prime(F, p).primes]
    for label, e in extra:
        comps.append((prime_by_name(F, label), e))
    comps.sort(key=lambda qe: (qe[0].p, qe[0].key()))
    return Modulus(comps)


def prime_by_name(F, name):
    """'p11.2' -> second prime above 11; '(2)' or 'p2' -> the inert prime above 2."""
    name = name.strip()
    if name.startswith("(") and name.endswith(")"):
        p, label = int(name[1:-1]), None
    else:
        body = name.lstrip("p")
        if "." in body:
            a, b = body.split(".")
            p, label = int(a), int(b)
        else:
            p, label = int(body), None
    primes = split_prime(F, p).primes
    if label is None:
        if len(primes) != 1:
            raise ValueError("%s splits; give a label" % p)
        return primes[0]
    return primes[label - 1]


class ClassSet:
    """Orbits of the unit group on P^1(O_F / level).

    ``points`` lists normalized points in enumeration order; ``orbit_of`` and
    ``witness`` give, for each point P, the orbit j and a unit g with
    g P_j = P.  ``t_p`` holds the matrices t_i at the primes above p (exact
    SL_2 completions of the representative's column, at precision Np).
    """

    def __init__(self, order, units, modulus, p, s, Np, splittings):
        self.order = order
        self.units = units
        self.modulus = modulus
        self.p, self.s, self.Np = p, s, Np
        self.splittings = splittings
        self.rings = modulus.rings()
        self.points = []
        for pt in product(*[_p1_local(R) for R in self.rings]):
            self.points.append(tuple(pt))
        self.point_index = {pt: k for k, pt in enumerate(self.points)}
        self._unit_mats = []
        for g in units.elements:
            self._unit_mats.append([splittings[q].rho(g, R) for (q, _), R in zip(modulus.components, self.rings)])
        self._orbits()
        self._lift_representatives()

    def act(self, g_index, pt):
        out = []
        for R, M, (a, c) in zip(self.rings, self._unit_mats[g_index], pt):
            a2 = R.add(R.mul(M[0][0], a), R.mul(M[0][1], c))
            c2 = R.add(R.mul(M[1][0], a), R.mul(M[1][1], c))
            out.append(p1_normalize(R, a2, c2))
        return tuple(out)

    def _orbits(self):
        n = len(self.points)
        orbit_of = [None] * n
        witness = [None] * n
        reps = []
        sizes = []
        for k in range(n):
            if orbit_of[k] is not None:
                continue
            j = len(reps)
            reps.append(k)
            P = self.points[k]
            size = 0
            stab = 0
            for g in range(len(self.units)):
                Q = self.point_index[self.act(g, P)]
                if orbit_of[Q] is None:
                    orbit_of[Q] = j
                    witness[Q] = g
                    size += 1
                if Q == k:
                    stab += 1
            sizes.append(size)
        self.orbit_of = orbit_of
        self.witness = witness
        self.reps = reps
        self.orbit_sizes = sizes
        self.h = len(reps)
        self.stabilizer_orders = [len(self.units) // sz for sz in sizes]
        self.sufficiently_small = all(o == 1 for o in self.stabilizer_orders)

    def _lift_representatives(self):
        self.p_components = [k for k, (q, _) in enumerate(self.modulus.components) if q.p == self.p]
        t_p = []
        for k in self.reps:
            mats = {}
            for idx in self.p_components:
                q = self.modulus.components[idx][0]
                R = self.splittings[q].ring
                a, c = self.points[k][idx]
                a, c = tuple(int(x) for x in a), tuple(int(x) for x in c)
                if R.is_unit(a):
                    mats[q] = ((a, R.zero()), (c, R.inv(a)))
                else:
                    mats[q] = ((a, R.neg(R.inv(c))), (c, R.zero()))
            t_p.append(mats)
        self.t_p = t_p

    def locate(self, pt):
        k = self.point_index[pt]
        return self.orbit_of[k], self.witness[k]


def _p1_local(R):
    one = R.one()
    pts = [(one, b) for b in R.elements()]
    pts.extend((a, one) for a in R.non_units())
    return pts


def class_set(order, modulus, p, s, Np=None, units=None):
    """Class set for level ``modulus`` (which must include p^s)."""
    units = units or unit_group(order)
    Np = max(Np or 0, s + 2)
    splittings = {}
    for q, e in modulus.components:
        splittings[q] = LocalSplitting(order, q, Np if q.p == p else e)
    return ClassSet(order, units, modulus, p, s, Np, splittings)


# -- Hecke data at primes above p ----------------------------------------------

def _kernel_lattice(rows_mod_p, p, n=8):
    """Z-basis of {x in Z^n : A x = 0 mod p}, A given by its rows mod p."""
    A = [[x % p for x in r] for r in rows_mod_p]
    m = len(A)
    # row reduce mod p
    piv = []
    r = 0
    for c in range(n):
        k = next((i for i in range(r, m) if A[i][c]), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        piv.append(c)
        r += 1
    free = [c for c in range(n) if c not in piv]
    gens = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(piv):
            v[pc] = (-A[i][fc]) % p
        gens.append(v)
    for c in range(n):
        v = [0] * n
        v[c] = p
        gens.append(v)
    return [[int(x) for x in row] for row in hnf_rows(gens)]


class HeckeLocalData:
    """Local matrices (gamma_alpha u_alpha)_p for the operator at one prime.

    ``entries[i]`` is a list of (j, alpha, delta, mats) where mats maps each
    prime above p to a 2x2 matrix over O/q^Np and delta is the global element
    (Z-coordinates) with t_j^(-1) delta t_i = gamma_alpha u_alpha.
    """

    def __init__(self, prime, pi, entries, h):
        self.prime = prime
        self.pi = pi
        self.entries = entries
        self.h = h

    def theta(self, i, j):
        return [e[1] for e in self.entries[i] if e[0] == j]


def _div_by_pi(R, x, pi_img):
    """x / pi in O/q^(N-1) for x divisible by pi (pi a generator of q)."""
    p = R.p
    S = LocalRing(R.prime, R.e - 1)
    if R.f == 2:
        # pi = p for inert primes
        return tuple((c // p) % S.modulus for c in x)
    u = (pi_img[0] // p) % S.modulus
    return ((x[0] // p) * pow(u, -1, S.modulus) % S.modulus,)


def hecke_data(cs, prime, search_slack=0):
    """Hecke coset data for the prime ``prime`` above p."""
    order = cs.order
    F = order.F
    pi = prime.generator()
    p, s = cs.p, cs.s
    comps = cs.modulus.components
    kp = next(k for k, (q, _) in enumerate(comps) if q == prime)
    Sp = cs.splittings[prime]
    Rbig = Sp.ring
    Rs1 = LocalRing(prime, s + 1)
    Rs = LocalRing(prime, s)
    R1 = LocalRing(prime, 1)
    pi_s1 = Rs1.reduce(pi)
    alphas = R1.elements()
    gram2 = [[int(2 * x) for x in row] for row in order.trace_gram]
    bound = 2 * pi.trace() + search_slack
    entries = []
    for i in range(cs.h):
        rep = cs.points[cs.reps[i]]
        a0, c0 = rep[kp]
        # rows of the map x -> rho(x) P_i mod q, over Z/p coordinates
        cols = []
        for z in range(8):
            e = [0] * 8
            e[z] = 1
            M = Sp.rho(e, R1)
            v0 = R1.add(R1.mul(M[0][0], R1.reduce_to(a0, R1)), R1.mul(M[0][1], R1.reduce_to(c0, R1)))
            v1 = R1.add(R1.mul(M[1][0], R1.reduce_to(a0, R1)), R1.mul(M[1][1], R1.reduce_to(c0, R1)))
            cols.append(list(v0) + list(v1))
        rows = [[cols[z][r] for z in range(8)] for r in range(len(cols[0]))]
        J = _kernel_lattice(rows, p)
        G = [[sum(J[a][x] * gram2[x][y] * J[b][y] for x in range(8) for y in range(8))
              for b in range(8)] for a in range(8)]
        delta = None
        for coeffs, _ in short_vectors(G, bound, limit=200000):
            x = [sum(coeffs[a] * J[a][k] for a in range(8)) for k in range(8)]
            if order.znrd(x) == pi:
                delta = x
                break
        if delta is None:
            raise PrincipalizationFailure("no element of norm %s in J_%d" % (pi, i))
        # P1 point of delta t_i u_alpha^{-1}, component by component
        Mq = Sp.rho(delta, Rs1)
        a1 = tuple(int(t) for t in a0)
        c1 = tuple(int(t) for t in c0)
        ti = ((Rs1.reduce_to(a1, Rs1), None), (Rs1.reduce_to(c1, Rs1), None))
        col1 = (R_add(Rs1, Rs1.mul(Mq[0][0], ti[0][0]), Rs1.mul(Mq[0][1], ti[1][0])),
                R_add(Rs1, Rs1.mul(Mq[1][0], ti[0][0]), Rs1.mul(Mq[1][1], ti[1][0])))
        tfull = cs.t_p[i][prime]
        ti_s1 = tuple(tuple(Rbig.reduce_to(x, Rs1) for x in row) for row in tfull)
        col2 = (R_add(Rs1, Rs1.mul(Mq[0][0], ti_s1[0][1]), Rs1.mul(Mq[0][1], ti_s1[1][1])),
                R_add(Rs1, Rs1.mul(Mq[1][0], ti_s1[0][1]), Rs1.mul(Mq[1][1], ti_s1[1][1])))
        if not (R1.is_zero(Rs1.reduce_to(col1[0], R1)) and R1.is_zero(Rs1.reduce_to(col1[1], R1))):
            raise PrincipalizationFailure("generator does not kill P_%d" % i)
        q0 = _div_by_pi(Rs1, col1[0], pi_s1)
        q1 = _div_by_pi(Rs1, col1[1], pi_s1)
        pis1 = Rs.reduce(pi ** (s - 1))
        others = []
        for k, ((q, e), R) in enumerate(zip(comps, cs.rings)):
            if k == kp:
                others.append(None)
                continue
            M = cs.splittings[q].rho(delta, R)
            a, c = rep[k]
            others.append(p1_normalize(R, R.add(R.mul(M[0][0], a), R.mul(M[0][1], c)),
                                       R.add(R.mul(M[1][0], a), R.mul(M[1][1], c))))
        row = []
        for alpha in alphas:
            al = Rs.reduce_to(alpha, Rs) if False else tuple(int(t) % Rs.modulus for t in alpha)
            f = Rs.mul(al, pis1)
            y0 = Rs.sub(q0, Rs.mul(f, Rs1.reduce_to(col2[0], Rs)))
            y1 = Rs.sub(q1, Rs.mul(f, Rs1.reduce_to(col2[1], Rs)))
            pt = list(others)
            pt[kp] = p1_normalize(Rs, y0, y1)
            j, g = cs.locate(tuple(pt))
            ginv = cs.units.inverse[g]
            dprime = order.zmul(cs.units.elements[ginv], delta)
            mats = {}
            for qidx in cs.p_components:
                q = comps[qidx][0]
                S = cs.splittings[q]
                R = S.ring
                D = S.rho(dprime)
                tj_inv = _mat_inv(R, cs.t_p[j][q])
                mats[q] = _mat_mul(R, _mat_mul(R, tj_inv, D), cs.t_p[i][q])
            _check_shape(mats, prime, s)
            row.append((j, alpha, tuple(dprime), mats))
        entries.append(row)
    return HeckeLocalData(prime, pi, entries, cs.h)


def R_add(R, a, b):
    return R.add(a, b)


def _check_shape(mats, prime, s):
    for q, M in mats.items():
        R = LocalRing(q, 1)
        val = lambda x, S=LocalRing(q, max(s, 1) + 1): S.valuation(tuple(int(t) % S.modulus for t in x))
        (a, b), (c, d) = M
        if q == prime:
            ok = val(a) >= 1 and val(c) >= s and val(d) == 0
        else:
            ok = val(a) == 0 and val(c) >= s and val(d) == 0
        if not ok:
            raise ShapeViolation("local matrix at %s has the wrong shape" % q.name())
