from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hmfslopes.errors import RamifiedPrime, UnsupportedModulus
from hmfslopes.field_core import (LocalRing, Modulus, RealQuadraticField, fundamental_unit, proj_line,
                                  split_prime)

FIELDS = {d: RealQuadraticField(d) for d in (5, 13, 17)}
ints = st.integers(-50, 50)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(FIELDS)), ints, ints, ints, ints)
def test_norm_and_trace(d, a, b, c, e):
    F = FIELDS[d]
    x, y = F(a, b), F(c, e)
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    assert x.conj().conj() == x
    if x != F.zero():
        assert x * x.inverse() == F.one()


def test_from_sqrt_squares_to_d():
    for d, F in FIELDS.items():
        r = F.from_sqrt(0, 1)
        assert r * r == F(d)


def test_bad_d():
    with pytest.raises(ValueError):
        RealQuadraticField(12)


@pytest.mark.parametrize("d", sorted(FIELDS))
def test_fundamental_unit(d):
    F = FIELDS[d]
    eps = fundamental_unit(F)
    assert abs(eps.norm()) == 1
    assert eps.embed_real(1) > 1


def test_splitting_types():
    assert split_prime(FIELDS[13], 3).is_split()
    assert split_prime(FIELDS[17], 2).is_split()
    assert not split_prime(FIELDS[5], 2).is_split()
    assert not split_prime(FIELDS[5], 3).is_split()
    with pytest.raises(RamifiedPrime):
        split_prime(FIELDS[13], 13)
    with pytest.raises(UnsupportedModulus):
        Modulus.from_integer(FIELDS[5], 5)


@pytest.mark.parametrize("d,p", [(13, 3), (17, 2), (5, 2), (5, 11)])
def test_prime_generators(d, p):
    for q in split_prime(FIELDS[d], p).primes:
        g = q.generator()
        assert g.is_totally_positive()
        assert abs(g.norm()) == q.norm()
        assert q.contains(g)


@pytest.mark.parametrize("d,n", [(13, 9), (13, 3), (17, 8), (17, 2), (5, 8), (5, 4), (5, 6)])
def test_p1_size_formula(d, n):
    F = FIELDS[d]
    m = Modulus.from_integer(F, n)
    pts = proj_line(F, m)
    assert len(pts) == m.p1_size()
    assert len(set(pts)) == len(pts)


def _local(d, p, e, idx=0):
    return LocalRing(split_prime(FIELDS[d], p).primes[idx], e)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([(13, 3), (17, 2), (5, 2), (5, 3)]), st.integers(0, 10**6), st.integers(0, 10**6),
       st.integers(0, 10**6), st.integers(0, 10**6))
def test_local_valuation_multiplicative(dp, a, b, c, e):
    d, p = dp
    F = FIELDS[d]
    R = _local(d, p, 6)
    x, y = R.reduce(F(a, b)), R.reduce(F(c, e))
    vx, vy = R.valuation(x), R.valuation(y)
    assert R.valuation(R.mul(x, y)) == min(R.e, vx + vy)
    assert R.valuation(R.add(x, y)) >= min(vx, vy)
    if R.is_unit(x):
        assert R.mul(x, R.inv(x)) == R.one()


def test_local_ring_sizes():
    assert _local(13, 3, 2).size() == 9
    assert _local(5, 2, 3).size() == 64
    assert len(list(_local(5, 2, 1).elements())) == 4
