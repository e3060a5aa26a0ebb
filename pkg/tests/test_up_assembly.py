import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from hmfslopes.errors import UnstableSubspace
from hmfslopes.padic_core import PadicContext
from hmfslopes.up_assembly import (PlaceMatrix, SubspaceSpec, b_of, bi, bi_inv, c_entry, gbinom,
                                   generating_oracle, omega_entry, restrict, valuation_bound)


def test_bi_examples():
    assert bi((0, 0)) == 0 and b_of(0) == 0
    assert bi((1, 2)) == 8 and bi((2, 1)) == 7
    assert bi_inv(7) == (2, 1) and bi_inv(8) == (1, 2)


def test_bi_round_trip():
    for m in range(10**5):
        x = bi_inv(m)
        assert bi(x) == m
        assert b_of(m) == sum(x)


@given(st.integers(0, 400), st.integers(0, 400))
def test_bi_inverse_of_pairs(a, b):
    assert bi_inv(bi((a, b))) == (a, b)


def test_gbinom():
    assert gbinom(5, 2) == 10
    assert gbinom(2, 5) == 0
    assert gbinom(-1, 3) == -1
    assert gbinom(-2, 2) == 3
    assert gbinom(4, -1) == 0


def random_delta(ctx, rng, s):
    """Random local matrix with p * unit top-left, p^s | bottom-left, unit bottom-right."""
    p = ctx.p

    def unit():
        while True:
            x = ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)])
            if x.is_unit():
                return x

    a = unit() * p
    b = ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)])
    c = ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)]) * p ** s
    return PlaceMatrix(a, b, c, unit())


def test_omega_matches_oracle_small():
    rng = random.Random(3)
    ctx = PadicContext(3, 1, 1, 40)
    for _ in range(15):
        pms = [random_delta(ctx, rng, 1) for _ in range(2)]
        n = (rng.randrange(7), rng.randrange(7))
        chi = ctx.root_of_unity(3) if rng.random() < 0.5 else None
        tabs = [generating_oracle([pm], (k,), 6) for pm, k in zip(pms, n)]
        for x in product(range(6), repeat=2):
            for y in product(range(6), repeat=2):
                want = tabs[0][((x[0],), (y[0],))] * tabs[1][((x[1],), (y[1],))]
                if chi is not None:
                    want = want * chi
                assert omega_entry(pms, x, y, n, chi=chi) == want


def test_oracle_with_determinant_twist():
    rng = random.Random(5)
    ctx = PadicContext(2, 1, 2, 30)
    pms = [random_delta(ctx, rng, 2) for _ in range(2)]
    n, v = (2, 0), (0, 1)
    tab = generating_oracle(pms, n, 4, v=v)
    for (x, y), val in tab.items():
        assert omega_entry(pms, x, y, n, v=v) == val


def test_valuation_bound_cases():
    # x > n >= y: the classical subspace is stable, the entry is zero
    assert valuation_bound((3,), (1,), (2,), 1) is None
    assert valuation_bound((0, 0), (5, 5), (0, 0), 2) == 0
    # U_p at s = 2: entry (x, 0) carries p^x from c^x, the top-left factor cannot help
    assert valuation_bound((3,), (0,), (4,), 2) == 6
    # for U_q the place away from q has no uniformizer in the top-left entry
    assert valuation_bound((2, 2), (2, 2), (0, 0), 1, (1, 0)) == 2


def test_assembled_entries_respect_bounds(s13):
    kap = s13.weight((2, 4))
    for op in ("U_p", "U_p3.1", "U_p3.2"):
        A = s13.matrix(kap, op, R=10, M=40)
        assert A.size == 120      # assemble checks every entry against valuation_bound


@pytest.mark.parametrize("k", [(2, 2), (2, 4), (4, 4), (3, 3)])
def test_classical_dimension(s13, k):
    kap = s13.weight(k)
    A = s13.matrix(kap, "U_p", M=30, classical=True)
    assert A.size == s13.h * (k[0] - 1) * (k[1] - 1)


def test_classical_restriction_of_truncation(s13):
    kap = s13.weight((2, 4))
    big = s13.matrix(kap, "U_p", R=15, M=40)
    C = restrict(big, SubspaceSpec.classical(kap.tuple.n))
    direct = s13.matrix(kap, "U_p", M=40, classical=True)
    assert C.monos == direct.monos
    assert C.matrix == direct.matrix


def test_box_restriction_requires_compactness(s13):
    kap = s13.weight((4, 4))
    A = s13.matrix(kap, "U_p3.1", R=15, M=40)
    restrict(A, SubspaceSpec.box(None, 2))           # exact in the second variable
    with pytest.raises(UnstableSubspace):
        restrict(A, SubspaceSpec.box(2, 1))          # U_q1 is not compact in variable 2


@pytest.mark.parametrize("name,k", [("s13", (2, 2)), ("s13", (2, 4)), ("s17", (2, 2)), ("s17", (4, 2))])
def test_split_commutation(name, k, request):
    S = request.getfixturevalue(name)
    kap = S.weight(k)
    q1, q2 = ["U_" + q.name() for q in S.primes]
    A1 = S.matrix(kap, q1, M=40, classical=True).matrix
    A2 = S.matrix(kap, q2, M=40, classical=True).matrix
    Ap = S.matrix(kap, "U_p", M=40, classical=True).matrix
    assert A1 @ A2 == A2 @ A1
    assert A1 @ A2 == Ap
