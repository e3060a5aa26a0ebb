import pytest

from hmfslopes.field_core import LocalRing
from hmfslopes.lattice import hnf_rows, lll_transform, rational_det, short_vectors, solve_rational
from hmfslopes.quat_hecke import _check_shape, load_preset, verify_maximal_order


@pytest.mark.parametrize("d", [5, 13, 17])
def test_preset_orders_are_maximal(d):
    O = load_preset(d)
    assert verify_maximal_order(O)


@pytest.mark.parametrize("name", ["s13", "s17", "s5"])
def test_orbits_cover_projective_line(name, request):
    S = request.getfixturevalue(name)
    cs = S.class_set()
    assert sum(cs.orbit_sizes) == len(cs.points) == cs.modulus.p1_size()
    assert cs.sufficiently_small
    assert all(o == len(S.units) for o in cs.orbit_sizes)


@pytest.mark.parametrize("name", ["s13", "s17", "s5"])
def test_theta_rows_partition(name, request):
    S = request.getfixturevalue(name)
    cs = S.class_set()
    for q, data in S.hecke().items():
        residues = sorted(LocalRing(q, 1).elements())
        for i in range(cs.h):
            alphas = sorted(a for j in range(cs.h) for a in data.theta(i, j))
            assert alphas == residues
        for row in data.entries:
            for j, alpha, delta, mats in row:
                _check_shape(mats, q, cs.s)


def test_unit_group_closed(s13):
    U = s13.units
    for i in range(len(U)):
        assert U.mul(i, U.inverse[i]) == U.identity
        assert U.mul(U.identity, i) == i


def test_lattice_helpers():
    gram = [[2, 1], [1, 2]]
    vecs = short_vectors(gram, 2)
    assert len(vecs) == 3        # +-(1,0), +-(0,1), +-(1,-1) up to sign
    assert rational_det([[2, 1], [1, 2]]) == 3
    x = solve_rational([[2, 1], [1, 2]], [3, 3])
    assert list(x) == [1, 1]
    H = hnf_rows([[2, 4], [1, 3]])
    assert abs(rational_det(H)) == 2
    T = lll_transform([[10, 7], [7, 5]])
    assert abs(rational_det(T)) == 1
