"""One check per acceptance criterion; each prints a PASS/FAIL line.

Tolerances: slopes are exact rationals and are compared exactly.  p-adic
oracle agreement is checked modulo pi^(20 e).  Overconvergent rows are
compared only on slopes <= 5, which is inside the certified horizon.
"""

import random
import time
from fractions import Fraction
from itertools import product

import pytest

from conftest import record
from hmfslopes.cli_io import compare_within, compute_grid, compute_overconvergent, fixture_row, read_fixture, read_grids
from hmfslopes.field_core import LocalRing, proj_line
from hmfslopes.padic_core import PadicContext, PadicMatrix, is_exact
from hmfslopes.presets import Setting
from hmfslopes.slope_engine import charpoly, hodge_bound, newton_slopes, row_floor, verify_np_above_hodge
from hmfslopes.structure_lab import (SeedMap, al_centre, al_check, classical_prediction, generate_conjectured,
                                     seed_from_smallest_classical)
from hmfslopes.up_assembly import PlaceMatrix, b_of, bi, bi_inv, generating_oracle, omega_entry

OC_BOUND = Fraction(5)            # slopes compared in the overconvergent criteria
ORACLE_DIGITS = 20                # agreement modulo pi^(ORACLE_DIGITS * e)
CLASSICAL = {}                    # (setting, weight, operator) -> (SMSet, pi_places), shared by 11


def _classical(S, name, weight, op):
    key = (name, weight.display(), op)
    if key not in CLASSICAL:
        sm, A = S.classical_slopes(weight, op)
        CLASSICAL[key] = (sm, A.pi_places, weight.tuple.k)
    return CLASSICAL[key][0]


def _op_tag(S, op):
    if op == "U_p":
        return op
    return "U_" + S.primes[int(op[-1]) - 1].name()


def _table_check(S, name, fixture, weights):
    fx = read_fixture(fixture)
    bad, count, slow = [], 0, 0.0
    for label, kappa in weights:
        t0 = time.time()
        for op in ("U_p", "U_q1", "U_q2"):
            want = fixture_row(fx, op, label, "classical")
            if want is None:
                continue
            got = _classical(S, name, kappa, _op_tag(S, op))
            count += 1
            if got != want:
                bad.append("%s %s: got %s" % (op, label, got))
        slow = max(slow, time.time() - t0)
    return bad, count, slow


def test_c01_class_numbers():
    expected = {"sqrt13-p3": 12, "sqrt17-p2": 24, "sqrt5-p2": 16}
    out, ok = [], True
    for name, h in expected.items():
        t0 = time.time()
        cs = Setting.preset(name).class_set()
        dt = time.time() - t0
        ok &= cs.h == h and dt <= 600
        out.append("%s h=%d (%.1fs)" % (name, cs.h, dt))
    assert record(1, ok, "; ".join(out))


def test_c02_table1_classical(s13):
    weights = [(w, s13.weight(k)) for w, k in [("[2,2]psi2", (2, 2)), ("[2,4]psi2", (2, 4)),
                                               ("[2,6]psi2", (2, 6)), ("[4,4]psi2", (4, 4)),
                                               ("[3,3]psi1", (3, 3))]]
    bad, count, slow = _table_check(s13, "sqrt13-p3", "table1.txt", weights)
    ok = not bad and count == 15 and slow <= 900
    assert record(2, ok, "%d rows, slowest weight %.1fs %s" % (count, slow, "; ".join(bad)))


def test_c03_table3_classical(s17):
    weights = [(w, s17.weight(k)) for w, k in [("[2,2]psi2", (2, 2)), ("[4,2]psi2", (4, 2))]]
    bad, count, slow = _table_check(s17, "sqrt17-p2", "table3.txt", weights)
    assert record(3, not bad and count == 6, "%d rows %s" % (count, "; ".join(bad)))


def test_c04_table4_inert_classical(s5):
    weights = [("[2,2]psi2", s5.weight((2, 2))), ("[2,2]psi2tau^2", s5.weight((2, 2), 2))]
    bad, count, _ = _table_check(s5, "sqrt5-p2", "table4.txt", weights)
    want = {"[2,2]psi2": [(Fraction(2, 3), 6), (1, 4), (Fraction(4, 3), 6)],
            "[2,2]psi2tau^2": [(Fraction(1, 2), 4), (1, 8), (Fraction(3, 2), 4)]}
    for label, kappa in weights:
        if _classical(s5, "sqrt5-p2", kappa, "U_p") != want[label]:
            bad.append(label)
    assert record(4, not bad and count == 2, "%d rows %s" % (count, "; ".join(bad)))


def _oc_check(n, S, weight, fixture, R):
    t0 = time.time()
    rec = compute_overconvergent(S, weight, "U_p", R, slope_bound=OC_BOUND)
    dt = time.time() - t0
    want = fixture_row(read_fixture(fixture), "U_p", weight.display(), R)
    certified = rec.certified_upto is not None and rec.certified_upto >= OC_BOUND
    ok = certified and compare_within(rec.slopes, want, bound=OC_BOUND) and dt <= 7200
    detail = "U_p(%d x %d) precision %d, certified to %s, %.0fs, slopes<=5: %s" % (
        R, S.h, rec.precision, rec.certified_upto, dt, rec.slopes.prefix(OC_BOUND))
    return record(n, ok, detail)


def test_c05_overconvergent_split(s13):
    assert _oc_check(5, s13, s13.weight((2, 2)), "table2.txt", 20)


def test_c06_overconvergent_inert(s5):
    assert _oc_check(6, s5, s5.weight((2, 2)), "table5.txt", 20)


def test_c07_conjecture_generator(s13, s5):
    split = seed_from_smallest_classical(lambda k: _classical(s13, "sqrt13-p3", k, "U_p"),
                                         {(0, 0): s13.weight((2, 2))}, 2, 1)
    got_split = generate_conjectured(split, OC_BOUND)
    want_split = fixture_row(read_fixture("table2.txt"), "U_p", "[2,2]psi2", 25).prefix(OC_BOUND)
    plain, twisted = s5.weight((2, 2)), s5.weight((2, 2), 2)
    inert = seed_from_smallest_classical(lambda k: _classical(s5, "sqrt5-p2", k, "U_p"),
                                         lambda t: plain if t[0] == t[1] else twisted, 2, 3)
    got_inert = generate_conjectured(inert, OC_BOUND)
    want_inert = fixture_row(read_fixture("table5.txt"), "U_p", "[2,2]psi2", 30).prefix(OC_BOUND)
    ok = got_split == want_split and got_inert == want_inert
    ok &= got_split.pairs[-1] == (5, 40) and got_inert.pairs[-1] == (5, 36)
    assert record(7, ok, "split ends %s, inert ends %s" % (got_split.pairs[-1], got_inert.pairs[-1]))


def test_c08_classical_prediction(s13):
    seed = SeedMap.constant(2, _classical(s13, "sqrt13-p3", s13.weight((2, 2)), "U_p"))
    fx = read_fixture("table1.txt")
    bad = [w for w, k in [("[2,4]psi2", (2, 4)), ("[4,4]psi2", (4, 4))]
           if classical_prediction(seed, k) != fixture_row(fx, "U_p", w, "classical")]
    assert record(8, not bad, "mismatch: %s" % bad if bad else "[2,4]psi2 and [4,4]psi2 U_p rows")


def _delta(ctx, rng, s):
    def unit():
        while True:
            x = ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)])
            if x.is_unit():
                return x
    rnd = lambda: ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)])
    return PlaceMatrix(unit() * ctx.p, rnd(), rnd() * ctx.p ** s, unit())


def test_c09_oracle_equivalence():
    rng = random.Random(2024)
    t0 = time.time()
    contexts = {}
    checked, bad = 0, 0
    for trial in range(200):
        p, s = rng.choice([2, 3]), rng.choice([1, 2, 3])
        if (p, s) not in contexts:
            e = (p - 1) * p ** (s - 1)
            contexts[(p, s)] = PadicContext(p, 1, s, ORACLE_DIGITS * e)
        ctx = contexts[(p, s)]
        pms = [_delta(ctx, rng, s) for _ in range(2)]
        n = (rng.randrange(7), rng.randrange(7))
        chi = ctx.zeta_ps() if trial % 2 else None
        tables = [generating_oracle([pm], (k,), 13) for pm, k in zip(pms, n)]
        for x, y in product(range(13), repeat=2):
            checked += 1
            if omega_entry(pms[:1], (x,), (y,), n[:1]) != tables[0][((x,), (y,))]:
                bad += 1
        for _ in range(12):
            x = (rng.randrange(13), rng.randrange(13))
            y = (rng.randrange(13), rng.randrange(13))
            want = tables[0][((x[0],), (y[0],))] * tables[1][((x[1],), (y[1],))]
            if chi is not None:
                want = want * chi
            checked += 1
            if omega_entry(pms, x, y, n, chi=chi) != want:
                bad += 1
    dt = time.time() - t0
    assert record(9, bad == 0 and dt <= 60, "200 matrices, %d entries, %d disagreements, %.1fs" % (checked, bad, dt))


def test_c10_newton_above_hodge():
    rng = random.Random(10)
    ctx = PadicContext(3, 1, 0, 30)
    t0 = time.time()
    failures = 0
    sizes = []
    for _ in range(100):
        h, R = rng.choice([1, 2, 3]), rng.randrange(1, 61)
        n = R * h
        rows = []
        for r in range(n):
            deg = b_of(r // h)
            rows.append([rng.randrange(ctx.P) * 3 ** deg for _ in range(n)])
        A = PadicMatrix.from_ints(ctx, rows)
        np_poly = newton_slopes(charpoly(A), row_floor(A))
        if not verify_np_above_hodge(np_poly, hodge_bound(h, 2, b_of(R - 1) + 1)):
            failures += 1
        sizes.append(n)
    verts = hodge_bound(12, 2, 2)
    ok = failures == 0 and verts == [(0, 0), (12, 0), (36, 24)] and time.time() - t0 <= 300
    assert record(10, ok, "100 matrices up to size %d, %d failures, h=12 vertices %s, %.0fs"
                  % (max(sizes), failures, verts, time.time() - t0))


def test_c11_atkin_lehner():
    # runs after 2-4 and reuses their slope sets
    assert CLASSICAL, "criteria 2-4 must run first"
    bad = []
    for (name, w, op), (sm, pi_places, k) in sorted(CLASSICAL.items()):
        centre = al_centre(k, pi_places)
        if not al_check(sm, centre)["ok"]:
            bad.append("%s %s %s about %s" % (name, w, op, centre))
    assert record(11, not bad, "%d slope sets checked %s" % (len(CLASSICAL), "; ".join(bad)))


def test_c12_partial_grids(s13, s17):
    expected = read_grids()
    out, ok = [], True
    for S, name, k in [(s13, "sqrt13-p3", (2, 2)), (s17, "sqrt17-p2", (2, 2)), (s13, "sqrt13-p3", (4, 4))]:
        kappa = S.weight(k)
        g, cons = compute_grid(S, kappa)
        want = expected[(name, kappa.display())][2]
        good = g.unique and g.as_rows() == want
        ok &= good
        out.append("%s %s %s from %d products" % (name, kappa.display(), "unique match" if good else "differs",
                                                  len(cons)))
    assert record(12, ok, "; ".join(out))


def test_c13_property_suites(s13, s17, s5):
    problems = []
    # theta rows partition the residues, P^1 size formula, classical dimension
    for S in (s13, s17, s5):
        cs = S.class_set()
        if len(proj_line(S.F, cs.modulus)) != cs.modulus.p1_size() or sum(cs.orbit_sizes) != cs.modulus.p1_size():
            problems.append("P1 size %s" % S.d)
        for q, data in S.hecke().items():
            res = sorted(LocalRing(q, 1).elements())
            for i in range(cs.h):
                if sorted(a for j in range(cs.h) for a in data.theta(i, j)) != res:
                    problems.append("theta row %d at %s" % (i, q.name()))
        for k in ((2, 2), (2, 4)) if S is not s5 else ((2, 2), (4, 4)):
            if S.matrix(S.weight(k), "U_p", M=20, classical=True).size != cs.h * (k[0] - 1) * (k[1] - 1):
                problems.append("classical dimension %s %s" % (S.d, k))
    # valuations: multiplicativity and the ultrametric inequality
    rng = random.Random(13)
    for ctx in (PadicContext(3, 1, 2, 30), PadicContext(2, 2, 0, 20)):
        for _ in range(200):
            x = ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)]) * ctx.uniformizer() ** rng.randrange(4)
            y = ctx.elem([rng.randrange(ctx.P) for _ in range(ctx.d)]) * ctx.uniformizer() ** rng.randrange(4)
            vx, vy = x.valuation(), y.valuation()
            if is_exact(vx) and is_exact(vy):
                if (x * y).valuation() != vx + vy:
                    problems.append("multiplicativity")
                vs = (x + y).valuation()
                if is_exact(vs) and vs < min(vx, vy):
                    problems.append("ultrametric")
    # Bi round trip
    if any(bi(bi_inv(m)) != m or sum(bi_inv(m)) != b_of(m) for m in range(10**5)):
        problems.append("Bi round trip")
    # split commutation on classical subspaces
    for S, k in ((s13, (2, 4)), (s17, (4, 2))):
        kappa = S.weight(k)
        q1, q2 = ["U_" + q.name() for q in S.primes]
        A1, A2, Ap = (S.matrix(kappa, op, M=40, classical=True).matrix for op in (q1, q2, "U_p"))
        if not (A1 @ A2 == A2 @ A1 and A1 @ A2 == Ap):
            problems.append("commutation %s %s" % (S.d, k))
    assert record(13, not problems, "; ".join(sorted(set(problems))) or "all property checks hold")


def test_c14_centre_table7():
    S = Setting.preset("sqrt5-p3")
    cs = S.class_set()
    fx = read_fixture("table7.txt")
    bad = []
    for k in ((2, 2), (4, 4), (6, 6)):
        kappa = S.weight(k, primitive=False, name="")
        want = next(r["slopes"] for r in fx.rows if r["weight"] == kappa.display()
                    and r["level"] == "3*p11" and r["size"] != "200")
        sm, _ = S.classical_slopes(kappa)
        if sm != want:
            bad.append("%s got %s" % (kappa.display(), sm))
    ok = cs.sufficiently_small and not bad
    assert record(14, ok, "h=%d, sufficiently small %s, [2,2] [4,4] [6,6] classical %s"
                  % (cs.h, cs.sufficiently_small, "; ".join(bad) or "match"))
