"""Integer lattice helpers: rational HNF, LLL on Gram matrices, short vectors.

HNF and LLL are delegated to FLINT; the short-vector enumeration is a plain
Fincke-Pohst search with exact rational bookkeeping.
"""

from fractions import Fraction
from math import floor, ceil, sqrt, lcm

import flint

from .errors import EnumerationBoundExceeded


def _common_denominator(rows):
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, Fraction(x).denominator)
    return den


def hnf_rows(rows):
    """Row HNF basis of the Z-span of rational vectors (zero rows dropped)."""
    rows = [list(r) for r in rows]
    if not rows:
        return []
    den = _common_denominator(rows)
    M = flint.fmpz_mat([[int(Fraction(x) * den) for x in r] for r in rows])
    H = M.hnf()
    out = []
    for i in range(H.nrows()):
        r = [Fraction(int(H[i, j]), den) for j in range(H.ncols())]
        if any(r):
            out.append(r)
    return out


def rational_det(rows):
    den = _common_denominator(rows)
    n = len(rows)
    M = flint.fmpz_mat([[int(Fraction(x) * den) for x in r] for r in rows])
    return Fraction(int(M.det()), den ** n)


def solve_rational(rows, target):
    """Coordinates c with sum c_i rows[i] = target, or None (rows independent)."""
    n = len(rows)
    m = len(target)
    # Gaussian elimination on the transposed system
    A = [[Fraction(rows[i][j]) for i in range(n)] + [Fraction(target[j])] for j in range(m)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((k for k in range(r, m) if A[k][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for k in range(m):
            if k != r and A[k][c] != 0:
                f = A[k][c]
                A[k] = [x - f * y for x, y in zip(A[k], A[r])]
        piv_cols.append(c)
        r += 1
    for k in range(r, m):
        if A[k][n] != 0:
            return None
    out = [Fraction(0)] * n
    for k, c in enumerate(piv_cols):
        out[c] = A[k][n]
    return out


def lll_transform(gram):
    """Unimodular T such that T G T^t is LLL reduced (G integral, positive definite)."""
    G = flint.fmpz_mat([[int(x) for x in r] for r in gram])
    _, T = G.lll(transform=True, rep="gram")
    n = len(gram)
    return [[int(T[i, j]) for j in range(n)] for i in range(n)]


def _ldl(gram):
    n = len(gram)
    q = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def short_vectors(gram, bound, limit=None):
    """All nonzero integer x with x G x^t <= bound, up to sign.

    Returns a list of (x, value) in enumeration order.  Raises
    EnumerationBoundExceeded when more than ``limit`` vectors are found.
    """
    n = len(gram)
    T = lll_transform(gram)
    Gr = [[sum(T[i][a] * gram[a][b] * T[j][b] for a in range(n) for b in range(n))
           for j in range(n)] for i in range(n)]
    q = _ldl(Gr)
    bound = Fraction(bound)
    out = []
    x = [0] * n

    def rec(i, remaining):
        c = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        r = remaining / q[i][i]
        w = sqrt(float(r)) + 1e-9
        lo, hi = ceil(float(c) - w) - 1, floor(float(c) + w) + 1
        for xi in range(lo, hi + 1):
            t = q[i][i] * (xi - c) ** 2
            if t > remaining:
                continue
            x[i] = xi
            if i == 0:
                if any(x):
                    out.append(list(x))
                    if limit is not None and len(out) > limit:
                        raise EnumerationBoundExceeded("more than %d short vectors" % limit)
            else:
                rec(i - 1, remaining - t)
        x[i] = 0

    rec(n - 1, bound)
    result = []
    seen = set()
    for y in out:
        v = [sum(y[i] * T[i][j] for i in range(n)) for j in range(n)]
        key = tuple(v)
        neg = tuple(-a for a in v)
        if neg in seen:
            continue
        seen.add(key)
        val = sum(v[a] * gram[a][b] * v[b] for a in range(n) for b in range(n))
        result.append((v, val))
    result.sort(key=lambda t: (t[1], [abs(a) for a in t[0]], t[0]))
    return result
