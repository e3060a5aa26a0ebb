import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hmfslopes.padic_core import PadicContext, PadicMatrix
from hmfslopes.slope_engine import (SMSet, charpoly, hodge_bound, newton_slopes, row_floor, slopes_of,
                                    smset_from_slopes, stabilization_horizon, trust_count,
                                    verify_np_above_hodge)
from hmfslopes.up_assembly import b_of

CTXS = [PadicContext(3, 1, 0, 12), PadicContext(3, 1, 1, 16), PadicContext(2, 2, 0, 10)]


def random_matrix(ctx, n, rng, max_val=3):
    A = PadicMatrix.zeros(ctx, n)
    pi = ctx.uniformizer()
    for i in range(n):
        for j in range(n):
            x = ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)])
            A[i, j] = x * pi ** rng.randrange(max_val + 1)
    return A


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(range(len(CTXS))), st.integers(1, 6), st.integers(0, 2**32))
def test_charpoly_routes_agree(ci, n, seed):
    ctx = CTXS[ci]
    A = random_matrix(ctx, n, random.Random(seed))
    h = charpoly(A, "hessenberg").coeffs
    b = charpoly(A, "berkowitz").coeffs
    c = charpoly(A, "cofactor").coeffs
    assert len(h) == n + 1
    for x, y, z in zip(h, b, c):
        assert x == y == z


def test_charpoly_of_triangular():
    ctx = CTXS[0]
    A = PadicMatrix.from_ints(ctx, [[2, 5, 7], [0, 3, 1], [0, 0, 9]])
    cp = charpoly(A)
    # (X - 2)(X - 3)(X - 9) = X^3 - 14 X^2 + 51 X - 54
    assert [c == v for c, v in zip(cp.coeffs, [-54, 51, -14, 1])] == [True] * 4


def test_diagonal_slopes():
    ctx = PadicContext(3, 1, 0, 20)
    vals = [0, 2, 2, 5, 1]
    A = PadicMatrix.from_ints(ctx, [[3 ** v if i == j else 0 for j, v in enumerate(vals)]
                                    for i in range(len(vals))])
    np_poly = newton_slopes(charpoly(A), row_floor(A))
    assert np_poly.certified_upto == 5
    assert np_poly.slopes() == [(0, 1), (1, 1), (2, 2), (5, 1)]


def test_zero_matrix_slopes_are_uncertified():
    ctx = PadicContext(3, 1, 0, 8)
    A = PadicMatrix.zeros(ctx, 3)
    np_poly = newton_slopes(charpoly(A))
    assert np_poly.slopes().total() == 0


def test_below_precision_tail_not_certified():
    ctx = PadicContext(3, 1, 0, 6)
    A = PadicMatrix.from_ints(ctx, [[1, 0, 0], [0, 3 ** 2, 0], [0, 0, 3 ** 7]])
    np_poly = newton_slopes(charpoly(A))
    # det is 3^9, below the precision 3^6: only the first two slopes are known
    assert np_poly.slopes() == [(0, 1), (2, 1)]
    assert np_poly.certified_upto == 2


def test_row_floor_recovers_small_last_slope():
    ctx = PadicContext(3, 1, 0, 6)
    # the third row is divisible by 3^7 (hence zero mod 3^6) but the floor says v(det) >= 2 + 6
    A = PadicMatrix.from_ints(ctx, [[1, 1, 0], [0, 9, 9], [0, 0, 0]])
    f = row_floor(A)
    assert f == [0, 0, 2, 8]


def test_hodge_vertices():
    assert hodge_bound(12, 2, 3) == [(0, 0), (12, 0), (36, 24), (72, 96)]
    assert hodge_bound(1, 1, 3) == [(0, 0), (1, 0), (2, 1), (3, 3)]
    assert trust_count(240, 12) == 1
    assert trust_count(30 * 16, 16) == b_of(480) // 16


def b_pattern_matrix(ctx, h, R, rng):
    n = R * h
    A = PadicMatrix.zeros(ctx, n)
    for r in range(n):
        deg = b_of(r // h)
        for c in range(n):
            x = ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)])
            A[r, c] = x * ctx.p ** deg
    return A


@pytest.mark.parametrize("seed", range(6))
def test_newton_above_hodge_small(seed):
    rng = random.Random(seed)
    h, R = rng.choice([1, 2, 3]), rng.randrange(1, 11)
    ctx = PadicContext(3, 1, 0, 30)
    A = b_pattern_matrix(ctx, h, R, rng)
    np_poly = newton_slopes(charpoly(A), row_floor(A))
    assert verify_np_above_hodge(np_poly, hodge_bound(h, 2, b_of(R) + 2))


def test_smset_helpers():
    sm = smset_from_slopes([Fraction(1, 2), 0, Fraction(1, 2), 2])
    assert sm == [(0, 1), (Fraction(1, 2), 2), (2, 1)]
    assert sm.total() == 4
    assert sm.prefix(1) == [(0, 1), (Fraction(1, 2), 2)]
    assert sm.expand() == [0, Fraction(1, 2), Fraction(1, 2), 2]
    a = SMSet([(0, 1), (1, 2), (2, 5)])
    b = SMSet([(0, 1), (1, 2), (2, 6)])
    assert stabilization_horizon(a, b) == 1


def test_slopes_of_operator(s13):
    A = s13.matrix(s13.weight((2, 2)), "U_p", M=40, classical=True)
    assert slopes_of(A) == [(0, 1), (Fraction(1, 2), 2), (1, 6), (Fraction(3, 2), 2), (2, 1)]
