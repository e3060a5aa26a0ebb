"""Offline search for maximal orders of the preset algebras.

Starts from O_F<1, i, j, k> and repeatedly adjoins elements of (1/l) L that
keep the lattice an order, until the Z-discriminant reaches disc(F)^4.  The
result is written as an O_F-basis to src/hmfslopes/data/order_d<d>.json; the
package re-verifies it on every load.

    python3 tools/find_maximal_orders.py
"""

import json
import os
import random
import sys
from fractions import Fraction
from itertools import product

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hmfslopes.field_core import RealQuadraticField, factor_int  # noqa: E402
from hmfslopes.lattice import hnf_rows, rational_det, solve_rational  # noqa: E402
from hmfslopes.quat_hecke import QuaternionAlgebra, QuaternionOrder, verify_maximal_order  # noqa: E402

PRESETS = {5: (-1, -1), 13: (-1, -1), 17: (-1, -3)}
OUT = os.path.join(os.path.dirname(__file__), "..", "src", "hmfslopes", "data")


def q8_mul(alg, u, v):
    return alg.to_q8(alg.mul(alg.from_q8(u), alg.from_q8(v)))


def closure(alg, rows, max_rounds=12):
    w = alg.to_q8(alg.scale(alg.F.w, alg.one()))
    L = hnf_rows(rows)
    for _ in range(max_rounds):
        gens = list(L)
        for u in L:
            gens.append(q8_mul(alg, w, u))
            for v in L:
                gens.append(q8_mul(alg, u, v))
        M = hnf_rows(gens)
        if M == L:
            return L
        L = M
        if any(x.denominator > 1 << 20 for r in L for x in r):
            return None
    return None


def z_disc(alg, L):
    rows = []
    for u in L:
        x = alg.from_q8(u)
        rows.append([alg.trd(alg.mul(x, alg.from_q8(v))).trace() for v in L])
    return rational_det(rows)


def is_integral_lattice(alg, L):
    for u in L:
        x = alg.from_q8(u)
        if not alg.nrd(x).is_integral() or not alg.trd(x).is_integral():
            return False
        for v in L:
            if not alg.trd(alg.mul(x, alg.from_q8(v))).is_integral():
                return False
    return True


def find(d):
    F = RealQuadraticField(d)
    a, b = PRESETS[d]
    alg = QuaternionAlgebra(F, a, b)
    start = []
    for m in range(4):
        e = [0, 0, 0, 0]
        e[m] = 1
        x = alg.elem(e)
        start.append(alg.to_q8(x))
        start.append(alg.to_q8(alg.scale(F.w, x)))
    L = hnf_rows(start)
    target = F.disc ** 4
    disc = abs(z_disc(alg, L))
    while disc != target:
        ratio = disc / target
        primes = sorted(factor_int(int(ratio)))
        improved = False
        for l in primes:
            for c in product(range(l), repeat=8):
                if not any(c):
                    continue
                cand = [sum(Fraction(ci, l) * L[k][j] for k, ci in enumerate(c)) for j in range(8)]
                x = alg.from_q8(cand)
                if not alg.nrd(x).is_integral() or not alg.trd(x).is_integral():
                    continue
                M = closure(alg, L + [cand])
                if M is None or len(M) != 8 or not is_integral_lattice(alg, M):
                    continue
                nd = abs(z_disc(alg, M))
                if nd < disc:
                    L, disc = M, nd
                    improved = True
                    print("d=%d: disc %s" % (d, disc))
                    break
            if improved:
                break
        if not improved:
            raise RuntimeError("stuck at discriminant %s" % disc)
    return alg, L


def of_basis(alg, L, seed=1):
    """Four elements whose O_F-span is the Z-lattice L."""
    F = alg.F
    rng = random.Random(seed)
    target = hnf_rows(L)
    for _ in range(20000):
        picks = []
        for _ in range(4):
            c = [rng.randint(-1, 1) if rng.random() < 0.4 else 0 for _ in range(8)]
            picks.append([sum(ci * L[k][j] for k, ci in enumerate(c)) for j in range(8)])
        rows = []
        for u in picks:
            rows.append(u)
            rows.append(alg.to_q8(alg.scale(F.w, alg.from_q8(u))))
        if hnf_rows(rows) == target:
            # prefer 1 as the first element when possible
            return [alg.from_q8(u) for u in picks]
    raise RuntimeError("no O_F basis found")


def with_one_first(alg, basis):
    """Swap 1 into the basis if it can replace one of the elements."""
    F = alg.F
    one = alg.one()
    for k in range(4):
        trial = [one] + [e for i, e in enumerate(basis) if i != k]
        try:
            order = QuaternionOrder(alg, trial)
            if verify_maximal_order(order) and all(order.contains(e) for e in basis):
                return trial
        except Exception:
            continue
    return basis


def main():
    os.makedirs(OUT, exist_ok=True)
    for d in sorted(PRESETS):
        alg, L = find(d)
        basis = with_one_first(alg, of_basis(alg, L))
        order = QuaternionOrder(alg, basis)
        assert verify_maximal_order(order)
        with open(os.path.join(OUT, "order_d%d.json" % d), "w") as fh:
            json.dump(order.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")
        print("d=%d written" % d)


if __name__ == "__main__":
    main()
