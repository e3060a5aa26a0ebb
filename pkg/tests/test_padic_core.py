import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hmfslopes.errors import NonUnitInverse
from hmfslopes.padic_core import BelowPrecision, PadicContext, is_exact, vp_int

CTXS = [PadicContext(3, 1, 1, 30), PadicContext(3, 1, 2, 40), PadicContext(2, 2, 0, 20),
        PadicContext(2, 2, 3, 40), PadicContext(3, 2, 1, 24)]


def rand_elem(ctx, rng, val=0):
    x = ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)])
    return x * ctx.uniformizer() ** val


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(range(len(CTXS))), st.integers(0, 2**32), st.integers(0, 3), st.integers(0, 3))
def test_field_axioms_and_valuations(ci, seed, va, vb):
    ctx = CTXS[ci]
    rng = random.Random(seed)
    x, y, z = rand_elem(ctx, rng, va), rand_elem(ctx, rng, vb), rand_elem(ctx, rng)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    vx, vy = x.valuation(), y.valuation()
    if is_exact(vx) and is_exact(vy):
        assert (x * y).valuation() == vx + vy
        s = (x + y).valuation()
        assert not is_exact(s) or s >= min(vx, vy)
        if vx != vy:
            assert s == min(vx, vy)


@pytest.mark.parametrize("ctx", CTXS, ids=repr)
def test_inverse_and_uniformizer(ctx):
    rng = random.Random(7)
    pi = ctx.uniformizer()
    assert pi.valuation() == Fraction(1, ctx.e)
    for _ in range(10):
        x = rand_elem(ctx, rng)
        if x.is_unit():
            assert x * x.inverse() == ctx.one()
        else:
            with pytest.raises(NonUnitInverse):
                x.inverse()
    y = rand_elem(ctx, rng)
    assert ((y * pi).div_pi() - y).is_zero()


def test_roots_of_unity():
    ctx = PadicContext(3, 1, 2, 40)
    z = ctx.zeta_ps()
    assert z ** 9 == ctx.one()
    assert z ** 3 != ctx.one()
    ctx4 = PadicContext(2, 2, 0, 20)
    w = ctx4.root_of_unity(3)
    assert w ** 3 == ctx4.one() and w != ctx4.one()


def test_zero_is_below_precision():
    ctx = CTXS[0]
    v = ctx.zero().valuation()
    assert isinstance(v, BelowPrecision)
    assert v.bound == Fraction(ctx.M, ctx.e)
    x = ctx.uniformizer() ** (ctx.M + 2)
    assert x.is_zero()


def test_vp_int():
    assert vp_int(0, 3, 7) == 7
    assert vp_int(18, 3, 7) == 2
    assert vp_int(-16, 2, 10) == 4


def test_from_fraction():
    ctx = PadicContext(3, 1, 0, 10)
    assert ctx.from_fraction(Fraction(1, 2)) * 2 == ctx.one()
    with pytest.raises(NonUnitInverse):
        ctx.from_fraction(Fraction(1, 3))
