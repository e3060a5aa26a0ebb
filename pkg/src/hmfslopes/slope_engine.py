"""Characteristic polynomials over O_L / p^N, Newton polygons and slope sets.

Two charpoly routes are provided.  ``berkowitz`` is the classical
division-free algorithm.  ``hessenberg`` first reduces the matrix to upper
Hessenberg form by integral similarity transforms and then runs the
division-free Hessenberg recurrence.  Every multiplier used in the reduction
is an exact element of O_L / p^N with m * pivot = entry, so the transform
is unimodular and no precision is lost.
"""

from fractions import Fraction
from itertools import permutations
from math import comb

import numpy as np

from .padic_core import BelowPrecision, PadicElem, div_pi_coords, is_exact, mul_coords


class CharPoly:
    """Coefficients c_0..c_n of det(X I - A), c_n = 1."""

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        self.coeffs = coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def valuations(self):
        return [c.valuation() for c in self.coeffs]

    def __getitem__(self, k):
        return self.coeffs[k]


# -- Berkowitz -----------------------------------------------------------------

def charpoly_berkowitz(A):
    """Division-free Berkowitz algorithm on a PadicMatrix."""
    ctx = A.ctx
    n = A.shape[0]
    M = [[A[i, j] for j in range(n)] for i in range(n)]
    zero, one = ctx.zero(), ctx.one()
    # vector of coefficients, highest degree first
    poly = [one]
    for r in range(n):
        # leading principal submatrix of size r + 1; last row/col split off
        a = M[r][r]
        R = [M[r][j] for j in range(r)]      # row to the left
        C = [M[i][r] for i in range(r)]      # column above
        Ablk = [row[:r] for row in M[:r]]
        # Toeplitz column: 1, -a, -R C, -R A C, -R A^2 C, ...
        col = [one, -a]
        v = C
        for _ in range(r):
            s = zero
            for x, y in zip(R, v):
                s = s + x * y
            col.append(-s)
            v = [sum((Ablk[i][j] * v[j] for j in range(r)), zero) for i in range(r)]
        # new poly = Toeplitz(col) * poly
        new = []
        for k in range(len(poly) + 1):
            s = zero
            for j in range(len(poly)):
                if 0 <= k - j < len(col):
                    s = s + col[k - j] * poly[j]
            new.append(s)
        poly = new
    # poly is highest degree first
    coeffs = list(reversed(poly))
    return CharPoly(ctx, coeffs)


# -- cofactor oracle (small matrices) ------------------------------------------------

def charpoly_cofactor(A):
    """Leibniz expansion of det(X I - A); only for tiny matrices."""
    ctx = A.ctx
    n = A.shape[0]
    zero = ctx.zero()
    M = [[A[i, j] for j in range(n)] for i in range(n)]
    total = [zero] * (n + 1)
    for perm in permutations(range(n)):
        sign = 1
        seen = [False] * n
        for i in range(n):
            if not seen[i]:
                j, length = i, 0
                while not seen[j]:
                    seen[j] = True
                    j = perm[j]
                    length += 1
                if length % 2 == 0:
                    sign = -sign
        poly = [ctx.one()]
        for i in range(n):
            if perm[i] == i:
                factor = [-M[i][i], ctx.one()]
            else:
                factor = [-M[i][perm[i]]]
            out = [zero] * (len(poly) + len(factor) - 1)
            for a, x in enumerate(poly):
                for b, y in enumerate(factor):
                    out[a + b] = out[a + b] + x * y
            poly = out
        for k, c in enumerate(poly):
            total[k] = total[k] + (c if sign == 1 else -c)
    return CharPoly(ctx, total)


# -- Hessenberg ---------------------------------------------------------------------

def _vpi_coords(ctx, coords):
    """pi-adic valuation of a coordinate vector, None if zero mod p^N."""
    p, f, e, N = ctx.p, ctx.f, ctx.e, ctx.N
    best = None
    for j in range(e):
        block = coords[j * f:(j + 1) * f]
        vj = None
        for c in block:
            c = int(c)
            if c == 0:
                continue
            k = 0
            while c % p == 0:
                c //= p
                k += 1
            vj = k if vj is None else min(vj, k)
        if vj is None or vj >= N:
            continue
        cand = e * vj + j
        if best is None or cand < best:
            best = cand
    return best


def hessenberg_reduce(A):
    """Upper Hessenberg matrix similar to A over O_L / p^N (coordinate arrays)."""
    ctx = A.ctx
    P = ctx.P
    d = ctx.d
    n = A.shape[0]
    H = [A.data[k].copy() for k in range(d)]
    for k in range(n - 2):
        best, piv = None, None
        for i in range(k + 1, n):
            v = _vpi_coords(ctx, [H[t][i, k] for t in range(d)])
            if v is not None and (best is None or v < best):
                best, piv = v, i
                if v == 0:
                    break
        if piv is None:
            continue
        r = k + 1
        if piv != r:
            for t in range(d):
                H[t][[r, piv], :] = H[t][[piv, r], :]
                H[t][:, [r, piv]] = H[t][:, [piv, r]]
        pivot = PadicElem(ctx, [H[t][r, k] for t in range(d)])
        unit = PadicElem(ctx, div_pi_coords(ctx, list(pivot.coeffs), best))
        uinv = unit.inverse()
        rows = []
        mult = []
        for i in range(r + 1, n):
            x = [int(H[t][i, k]) for t in range(d)]
            if not any(x):
                continue
            q = div_pi_coords(ctx, x, best)
            m = mul_coords(ctx, q, list(uinv.coeffs))
            if not any(m):
                continue
            rows.append(i)
            mult.append(m)
        if not rows:
            continue
        # row ops: H[i, :] -= m_i H[r, :]
        mvec = [np.array([m[t] for m in mult], dtype=object) for t in range(d)]
        pivot_row = [H[t][r, :].copy() for t in range(d)]
        for c, terms in enumerate(ctx.table_by_out):
            acc = None
            for a, b, coef in terms:
                t = np.multiply.outer(mvec[a], pivot_row[b])
                t = t if coef == 1 else coef * t
                acc = t if acc is None else acc + t
            if acc is not None:
                H[c][rows, :] = (H[c][rows, :] - acc) % P
        # column op: H[:, r] += sum_i m_i H[:, i]
        cols = [H[t][:, rows].copy() for t in range(d)]
        for c, terms in enumerate(ctx.table_by_out):
            acc = None
            for a, b, coef in terms:
                t = cols[b].dot(mvec[a])
                t = t if coef == 1 else coef * t
                acc = t if acc is None else acc + t
            if acc is not None:
                H[c][:, r] = (H[c][:, r] + acc) % P
    return H


def charpoly_hessenberg(A):
    ctx = A.ctx
    P = ctx.P
    d = ctx.d
    n = A.shape[0]
    H = hessenberg_reduce(A)

    def ent(i, j):
        return [int(H[t][i, j]) for t in range(d)]

    # polys[k]: coordinate arrays (d, k+1), ascending degree
    polys = [[np.array([1 if t == 0 else 0], dtype=object) for t in range(d)]]
    for k in range(n):
        prev = polys[k]
        # (X - h_kk) * p_k
        hkk = ent(k, k)
        shifted = [np.concatenate([np.zeros(1, dtype=object), prev[t]]) for t in range(d)]
        prod = mul_coords(ctx, hkk, [np.concatenate([prev[t], np.zeros(1, dtype=object)]) for t in range(d)])
        new = [(shifted[t] - prod[t]) % P for t in range(d)]
        # - sum_{i<k} h_ik * (prod_{m=i+1}^{k} h_{m,m-1}) * p_i
        sub = [1] + [0] * (d - 1)
        for i in range(k - 1, -1, -1):
            sub = mul_coords(ctx, sub, ent(i + 1, i))
            if not any(sub):
                break
            coef = mul_coords(ctx, ent(i, k), sub)
            if not any(coef):
                continue
            pi_arr = [np.concatenate([polys[i][t], np.zeros(k + 1 - i, dtype=object)]) for t in range(d)]
            term = mul_coords(ctx, coef, pi_arr)
            new = [(new[t] - term[t]) % P for t in range(d)]
        polys.append(new)
    final = polys[n]
    coeffs = [PadicElem(ctx, [int(final[t][k]) for t in range(d)], A.prec) for k in range(n + 1)]
    return CharPoly(ctx, coeffs)


def charpoly(A, method="hessenberg"):
    """Characteristic polynomial of a PadicMatrix or ApproxOperatorMatrix."""
    mat = getattr(A, "matrix", A)
    if mat.shape[0] == 0:
        return CharPoly(mat.ctx, [mat.ctx.one()])
    if method == "hessenberg":
        return charpoly_hessenberg(mat)
    if method == "berkowitz":
        return charpoly_berkowitz(mat)
    if method == "cofactor":
        return charpoly_cofactor(mat)
    raise ValueError("unknown method %r" % method)


# -- Newton polygons --------------------------------------------------------------

class SMSet:
    """Sorted (slope, multiplicity) pairs plus the certified horizon."""

    def __init__(self, pairs, horizon=None, uncertified=()):
        self.pairs = [(Fraction(s), int(m)) for s, m in pairs]
        self.horizon = horizon
        self.uncertified = list(uncertified)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def total(self):
        return sum(m for _, m in self.pairs)

    def as_list(self):
        return list(self.pairs)

    def prefix(self, bound):
        return SMSet([(s, m) for s, m in self.pairs if s <= bound], self.horizon)

    def expand(self):
        out = []
        for s, m in self.pairs:
            out.extend([s] * m)
        return out

    def __eq__(self, other):
        if isinstance(other, SMSet):
            return self.pairs == other.pairs
        return self.pairs == [(Fraction(s), m) for s, m in other]

    def __repr__(self):
        return "SMSet(%s)" % ", ".join("(%s, %d)" % (s, m) for s, m in self.pairs)


def smset_from_slopes(slopes):
    out = {}
    for s in slopes:
        s = Fraction(s)
        out[s] = out.get(s, 0) + 1
    return SMSet(sorted(out.items()))


class NewtonPolygon:
    """Lower convex hull of (i, v(c_(n-i))); slopes are eigenvalue valuations."""

    def __init__(self, vertices, certified_upto, degree, uncertified_tail):
        self.vertices = vertices
        self.certified_upto = certified_upto
        self.degree = degree
        self.uncertified_tail = uncertified_tail

    def slopes(self):
        pairs = []
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            if x2 > self.certified_upto:
                break
            pairs.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
        horizon = pairs[-1][0] if pairs else None
        return SMSet(pairs, horizon, self.uncertified_tail)

    def value_at(self, x):
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            if x1 <= x <= x2:
                return y1 + Fraction(y2 - y1, x2 - x1) * (x - x1)
        return None


def _lower_hull(points):
    hull = []
    for pt in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # remove hull[-1] if it lies on or above the segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def row_floor(A):
    """f(i) = sum of the i smallest row valuations of A, a lower bound for v(c_(n-i)).

    Every i x i minor uses i distinct rows, so this bounds the coefficient
    even where the coefficient itself is below precision.
    """
    mat = getattr(A, "matrix", A)
    n = mat.shape[0]
    ceiling = Fraction(mat.ctx.M, mat.ctx.e)
    rows = []
    for i in range(n):
        best = ceiling
        for j in range(n):
            v = mat[i, j].valuation()
            if is_exact(v) and v < best:
                best = Fraction(v)
        rows.append(best)
    rows.sort()
    out = [Fraction(0)]
    for r in rows:
        out.append(out[-1] + r)
    return out


def newton_slopes(cp, floor=None):
    """Newton polygon of a CharPoly, certifying edges against unknown coefficients.

    ``floor`` optionally lists a priori lower bounds for v(c_(n-i)) which
    strengthen the precision bound of coefficients that are below precision.
    """
    n = cp.degree
    known, unknown = [], []
    for i in range(n + 1):
        v = cp.coeffs[n - i].valuation()
        if is_exact(v):
            known.append((i, Fraction(v)))
        else:
            b = Fraction(v.bound)
            if floor is not None:
                b = max(b, floor[i])
            unknown.append((i, b))
    hull = _lower_hull(known)
    certified_upto = 0
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        ok = all(b >= y1 + slope * (i - x1) for i, b in unknown)
        if not ok:
            break
        certified_upto = x2
    tail = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 >= certified_upto:
            tail.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    return NewtonPolygon(hull, certified_upto, n, tail)


def slopes_of(A, method="hessenberg"):
    return newton_slopes(charpoly(A, method), row_floor(A)).slopes()


# -- Hodge bound -----------------------------------------------------------------------

def hodge_bound(h, g, count):
    """Vertices of the polygon with slope i repeated C(i+g-1, g-1) h times, i < count."""
    verts = [(0, Fraction(0))]
    x, y = 0, Fraction(0)
    for i in range(count):
        m = comb(i + g - 1, g - 1) * h
        x += m
        y += i * m
        verts.append((x, y))
    return verts


def _poly_value(verts, x):
    for (x1, y1), (x2, y2) in zip(verts, verts[1:]):
        if x1 <= x <= x2:
            return y1 + Fraction(y2 - y1, x2 - x1) * (x - x1)
    return None


def verify_np_above_hodge(np_poly, hodge):
    """Pointwise comparison on the certified part of the Newton polygon."""
    for x in range(0, np_poly.certified_upto + 1):
        a = np_poly.value_at(x)
        b = _poly_value(hodge, x)
        if a is None or b is None:
            continue
        if a < b:
            return False
    return True


def trust_count(R, h):
    from .up_assembly import b_of
    return b_of(R) // h


def stabilization_horizon(slopes_small, slopes_large):
    """Largest slope s such that both sets agree on all slopes <= s."""
    a, b = slopes_small.pairs, slopes_large.pairs
    horizon = None
    for (s1, m1), (s2, m2) in zip(a, b):
        if s1 != s2:
            break
        if m1 != m2:
            break
        horizon = s1
    return horizon


def precision_for_slope(h, g, s_max, e=1, margin=20):
    """pi-adic precision needed to certify slopes up to s_max from the Hodge bound."""
    verts = hodge_bound(h, g, int(s_max) + 2)
    need = Fraction(0)
    for x, y in verts:
        if y > need:
            need = y
    return int(e * (need + margin))
