"""Ready-made settings (field, prime, level) and a small pipeline around them.

A Setting owns the maximal order, the class set and the Hecke data at the
primes above p, and turns (weight, operator, truncation) requests into
slope sets.
"""

import os
from fractions import Fraction

from .field_core import split_prime
from .quat_hecke import class_set, hecke_data, load_preset, parse_level, unit_group
from .slope_engine import charpoly, newton_slopes, row_floor
from .up_assembly import SubspaceSpec, assemble, classical_matrix, monomials, operator_terms, restrict
from .weights_chars import LocallyAlgebraicWeight, UnitResidueGroup, nebentypus_characters

# d -> p, s, level factors away from p, character value order
PRESETS = {
    "sqrt13-p3": dict(d=13, p=3, s=2, extra=(), m=6),
    "sqrt17-p2": dict(d=17, p=2, s=3, extra=(), m=2),
    "sqrt5-p2": dict(d=5, p=2, s=3, extra=(("p11.2", 1),), m=2),
    "sqrt5-p3": dict(d=5, p=3, s=1, extra=(("p11.2", 1),), m=2),
}


class Setting:
    """Field, prime and level; caches the order, class set and Hecke data."""

    def __init__(self, d, p, s, extra=(), m=None, cache_dir=None):
        self.d, self.p, self.s = d, p, s
        self.cache_dir = cache_dir
        self.extra = tuple(tuple(x) for x in extra)
        self.order = load_preset(d)
        self.F = self.order.alg.F
        self.units = unit_group(self.order)
        self.modulus = parse_level(self.F, p, s, self.extra)
        self.group = UnitResidueGroup(self.F, p, s)
        self.m = m
        self._cs = None
        self._hecke = None
        self.cache_path = None

    @classmethod
    def preset(cls, name, cache_dir=None):
        return cls(cache_dir=cache_dir, **PRESETS[name])

    @property
    def primes(self):
        return split_prime(self.F, self.p).primes

    def level_name(self):
        return self.modulus.describe()

    def class_set(self, Np=None):
        if self._cs is None or (Np is not None and self._cs.Np < Np):
            self._cs = class_set(self.order, self.modulus, self.p, self.s, Np=Np, units=self.units)
            self._hecke = None
        return self._cs

    def hecke(self, Np=None):
        cs = self.class_set(Np)
        if self._hecke is None:
            path = None
            if self.cache_dir:
                from .cache import cache_key, cache_load, cache_save
                os.makedirs(self.cache_dir, exist_ok=True)
                path = os.path.join(self.cache_dir, "hecke-d%d-p%d-%s.bin" % (self.d, self.p, cache_key(cs)))
                if os.path.exists(path):
                    _, self._hecke = cache_load(path, expect=cs)
                    self.cache_path = path
                    return self._hecke
            self._hecke = {q: hecke_data(cs, q) for q in self.primes}
            if path:
                cache_save(path, cs, self._hecke)
                self.cache_path = path
        return self._hecke

    @property
    def h(self):
        return self.class_set().h

    def characters(self, r, primitive=True):
        m = self.m
        if m is None:
            m = 1
            while not nebentypus_characters(self.group, r, m, primitive):
                m += 1
        return nebentypus_characters(self.group, r, m, primitive)

    def weight(self, k, tau=0, char_index=0, primitive=True, name=None):
        """[k]psi tau^j, psi the char_index-th admissible character for the parity of r."""
        from .weights_chars import WeightTuple
        r = WeightTuple(k).r
        psi = self.characters(r, primitive)[char_index]
        if name is None:
            name = "psi%d" % (1 if r % 2 else 2) if primitive else ""
        return LocallyAlgebraicWeight(k, psi, tau, name)

    def terms(self, op, Np=None):
        return operator_terms(self.class_set(Np), self.hecke(Np), op)

    def matrix(self, kappa, op, R=None, M=60, classical=False, normalize=True):
        ctx = kappa.coefficient_context(M)
        terms = self.terms(op, ctx.N + 2)
        if classical:
            return classical_matrix(terms, kappa, ctx=ctx, normalize=normalize)
        return assemble(terms, kappa, R=R, ctx=ctx, normalize=normalize)

    def classical_slopes(self, kappa, op="U_p", M=None, method="hessenberg"):
        """Fully certified slopes on the classical subspace (precision raised as needed)."""
        dim = self.h * kappa.tuple.classical_dimension_factor()
        if M is None:
            M = 2 * dim * (sum(kappa.tuple.k) // 2) + 40
        while True:
            A = self.matrix(kappa, op, M=M, classical=True)
            np_poly = newton_slopes(charpoly(A, method), row_floor(A))
            if np_poly.certified_upto == np_poly.degree:
                return np_poly.slopes(), A
            M *= 2

    def overconvergent_slopes(self, kappa, R, op="U_p", M=200, method="hessenberg"):
        A = self.matrix(kappa, op, R=R, M=M)
        np_poly = newton_slopes(charpoly(A, method), row_floor(A))
        return np_poly, A


def slope_bound_precision(slope_bound, size, e):
    """pi-adic precision that comfortably certifies slopes up to slope_bound."""
    return int(e * (Fraction(slope_bound) * size + 40))
