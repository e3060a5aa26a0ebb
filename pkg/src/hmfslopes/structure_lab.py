"""Slope structure experiments: seed-generated slope sets, classical
predictions, Atkin-Lehner pairing, partial-slope grids, recovery of U_q
slopes from products, and arithmetic-progression detection.
"""

from fractions import Fraction
from itertools import product

from .errors import EmptySmallestWeight, Infeasible, NoStabilization, Underdetermined
from .slope_engine import SMSet


def _counter(sm):
    out = {}
    for s, m in sm:
        s = Fraction(s)
        out[s] = out.get(s, 0) + m
    return out


def _to_smset(counts, horizon=None):
    return SMSet(sorted((s, m) for s, m in counts.items() if m), horizon)


class SeedMap:
    """Seeds B(t mod T) for t in Z_{>=0}^g.

    ``seeds`` maps residue tuples to SMSets; a callable is also accepted.
    """

    def __init__(self, g, T, seeds, component=None):
        self.g = g
        self.T = T
        self.component = component
        if callable(seeds):
            self._fn = seeds
            self.seeds = {t: SMSet(seeds(t)) for t in product(range(T), repeat=g)}
        else:
            self.seeds = {tuple(t): (v if isinstance(v, SMSet) else SMSet(v)) for t, v in seeds.items()}
            self._fn = None
        for t in product(range(T), repeat=g):
            if t not in self.seeds:
                raise ValueError("seed missing for residue %r" % (t,))

    @classmethod
    def constant(cls, g, seed, component=None):
        return cls(g, 1, {(0,) * g: seed}, component)

    def seed(self, t):
        return self.seeds[tuple(x % self.T for x in t)]

    def sizes(self):
        return {t: s.total() for t, s in self.seeds.items()}


def _tuples_of_level(g, level):
    if g == 1:
        yield (level,)
        return
    for first in range(level + 1):
        for rest in _tuples_of_level(g - 1, level - first):
            yield (first,) + rest


def generate_conjectured(seed, s_max):
    """Union over t of {B(t mod T) + l(t)}, cut at slopes <= s_max."""
    s_max = Fraction(s_max)
    lowest = min(min((s for s, _ in b), default=s_max + 1) for b in seed.seeds.values())
    counts = {}
    level = 0
    while lowest + level <= s_max:
        for t in _tuples_of_level(seed.g, level):
            for s, m in seed.seed(t):
                val = s + level
                if val <= s_max:
                    counts[val] = counts.get(val, 0) + m
        level += 1
    return _to_smset(counts, s_max)


def classical_prediction(seed, k):
    """Union over the box 0 <= t_i <= k_i - 2."""
    counts = {}
    for t in product(*[range(x - 1) for x in k]):
        shift = sum(t)
        for s, m in seed.seed(t):
            counts[s + shift] = counts.get(s + shift, 0) + m
    return _to_smset(counts)


def seed_from_smallest_classical(compute, weights, g, T, component=None):
    """Seed map whose value at residue t is the classical slope set of weights[t].

    ``compute`` maps a weight to its classical SMSet; ``weights`` maps each
    residue tuple in (Z/T)^g to a weight (or None when no admissible weight
    exists for that twist, which raises EmptySmallestWeight).
    """
    seeds = {}
    cache = {}
    for t in product(range(T), repeat=g):
        kappa = weights.get(t) if isinstance(weights, dict) else weights(t)
        if kappa is None:
            raise EmptySmallestWeight("no admissible smallest weight for twist %r" % (t,))
        key = kappa.display() if hasattr(kappa, "display") else repr(kappa)
        if key not in cache:
            sm = compute(kappa)
            if sm.total() == 0:
                raise EmptySmallestWeight("zero space at %s" % key)
            cache[key] = sm
        seeds[t] = cache[key]
    return SeedMap(g, T, seeds, component)


# -- Atkin-Lehner --------------------------------------------------------------

def al_centre(k, pi_places=None, residue_degree=1):
    """Centre of the Atkin-Lehner pairing for a normalized operator.

    For U_p this is val_p(Norm(p)^(k0 - 1 - v_p(k))); for a product
    U_q1^a U_q2^b the places above q contribute with multiplicity.
    """
    k = tuple(k)
    if pi_places is None:
        pi_places = (1,) * len(k)
    return Fraction(sum(a * (x - 1) for a, x in zip(pi_places, k)) * residue_degree)


def al_check(sm, centre):
    """Pairs alpha with centre - alpha; reports pairs or the violating slopes."""
    counts = _counter(sm)
    centre = Fraction(centre)
    pairs, bad = [], []
    for s in sorted(counts):
        partner = centre - s
        if counts.get(partner, 0) != counts[s]:
            bad.append((s, counts[s], partner, counts.get(partner, 0)))
        elif s <= partner:
            pairs.append((s, partner, counts[s]))
    return {"ok": not bad, "centre": centre, "pairs": pairs, "violations": bad}


# -- partial grids -----------------------------------------------------------------

class PartialGrid:
    """Multiplicities x[i][j] of simultaneous slopes (cols[i], rows[j])."""

    def __init__(self, cols, rows, x, unique, dimension=0, solutions=None):
        self.cols = cols
        self.rows = rows
        self.x = x
        self.unique = unique
        self.dimension = dimension
        self.solutions = solutions or [x]

    def total(self):
        return sum(sum(c) for c in self.x)

    def at(self, a, b):
        return self.x[self.cols.index(Fraction(a))][self.rows.index(Fraction(b))]

    def as_rows(self):
        """Rows top (largest second slope) to bottom, as printed in the figures."""
        out = []
        for j in reversed(range(len(self.rows))):
            out.append([self.x[i][j] for i in range(len(self.cols))])
        return out


def _rref(A, b):
    """Exact reduced row echelon form of [A | b]; returns (rows, pivots) or raises Infeasible."""
    m = len(A)
    n = len(A[0]) if A else 0
    M = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if M[i][n] != 0:
            raise Infeasible("inconsistent slope constraints")
    return M[:r], pivots


def partial_grid_solve(constraints, symmetry=None, max_solutions=10000):
    """Nonnegative integer grid matching every U_q1^a U_q2^b slope set.

    ``constraints`` maps (a, b) to an SMSet; (1, 0) and (0, 1) are
    required and fix the axes.  ``symmetry`` = (c1, c2) adds the
    Atkin-Lehner grid symmetry x(l1, l2) = x(c1 - l1, c2 - l2).
    """
    cols = sorted(_counter(constraints[(1, 0)]))
    rows = sorted(_counter(constraints[(0, 1)]))
    nv = len(cols) * len(rows)

    def var(i, j):
        return i * len(rows) + j

    A, b = [], []
    for (a, bb), sm in sorted(constraints.items()):
        counts = _counter(sm)
        targets = {}
        for i, l1 in enumerate(cols):
            for j, l2 in enumerate(rows):
                targets.setdefault(a * l1 + bb * l2, []).append(var(i, j))
        for s in set(targets) | set(counts):
            row = [0] * nv
            for v in targets.get(s, []):
                row[v] = 1
            if not any(row):
                raise Infeasible("slope %s of U^(%d,%d) cannot be written on the grid" % (s, a, bb))
            A.append(row)
            b.append(counts.get(s, 0))
    if symmetry is not None:
        c1, c2 = (Fraction(c) for c in symmetry)
        for i, l1 in enumerate(cols):
            for j, l2 in enumerate(rows):
                if c1 - l1 in cols and c2 - l2 in rows:
                    i2, j2 = cols.index(c1 - l1), rows.index(c2 - l2)
                    if var(i2, j2) > var(i, j):
                        row = [0] * nv
                        row[var(i, j)] = 1
                        row[var(i2, j2)] = -1
                        A.append(row)
                        b.append(0)
    R, pivots = _rref(A, b)
    free = [c for c in range(nv) if c not in pivots]
    # x(i, j) never exceeds the multiplicities of its column and row slopes
    mc, mr = _counter(constraints[(1, 0)]), _counter(constraints[(0, 1)])
    ub = [0] * nv
    for i, l1 in enumerate(cols):
        for j, l2 in enumerate(rows):
            ub[var(i, j)] = min(mc[l1], mr[l2])
    solutions = _enumerate_free(R, pivots, free, ub, nv, max_solutions)
    if not solutions:
        raise Infeasible("no nonnegative integer grid satisfies the constraints")

    def shape(x):
        return [[x[var(i, j)] for j in range(len(rows))] for i in range(len(cols))]

    grid = PartialGrid(cols, rows, shape(solutions[0]), len(solutions) == 1, len(free),
                       [shape(s) for s in solutions])
    return grid


def _enumerate_free(R, pivots, free, ub, nv, max_solutions):
    """Depth-first search over the free variables, pruned by interval bounds on the pivots."""
    order = sorted(free, key=lambda f: -sum(1 for row in R if row[f] != 0))
    pos = {f: k for k, f in enumerate(order)}
    # for each pivot row: (rhs, [(position, coefficient)]), pivot value = rhs - sum coef * x
    rows = []
    for row, c in zip(R, pivots):
        terms = [(pos[f], row[f]) for f in free if row[f] != 0]
        rows.append((c, row[nv], terms))
    solutions = []
    vals = [0] * len(order)

    def feasible(depth):
        for c, rhs, terms in rows:
            lo = hi = rhs
            for k, coef in terms:
                if k < depth:
                    lo -= coef * vals[k]
                    hi -= coef * vals[k]
                elif coef > 0:
                    lo -= coef * ub[order[k]]
                else:
                    hi -= coef * ub[order[k]]
            if hi < 0 or lo > ub[c]:
                return False
        return True

    def finish():
        x = [0] * nv
        for k, f in enumerate(order):
            x[f] = vals[k]
        for c, rhs, terms in rows:
            val = rhs - sum(coef * vals[k] for k, coef in terms)
            if val < 0 or val.denominator != 1:
                return
            x[c] = int(val)
        solutions.append(x)

    def rec(depth):
        if len(solutions) > max_solutions:
            return
        if not feasible(depth):
            return
        if depth == len(order):
            finish()
            return
        for v in range(ub[order[depth]] + 1):
            vals[depth] = v
            rec(depth + 1)

    rec(0)
    return solutions


def require_unique(grid):
    if not grid.unique:
        raise Underdetermined("%d grids fit the data" % len(grid.solutions))
    return grid


# -- recovering U_q slopes ----------------------------------------------------------

def recover_partial_slopes(products):
    """T(s) = intersection over n of {(t - s)/n : t slope of U_p U_q^n}.

    ``products[n]`` is the SMSet for U_p U_q^n (n = 0 .. J).  Returns
    (slopes, report) where report maps s to the stabilized set.
    """
    if len(products) < 2:
        raise NoStabilization("need at least one product besides U_p")
    base = sorted(_counter(products[0]))
    sets = [set(_counter(p)) for p in products]
    report = {}
    for s in base:
        current = None
        history = []
        for n in range(1, len(products)):
            cand = {(t - s) / n for t in sets[n] if t >= s}
            current = cand if current is None else current & cand
            history.append(frozenset(current))
        stable = len(history) >= 2 and history[-1] == history[-2] and history[-1]
        if not stable:
            raise NoStabilization("intersection for slope %s did not stabilize" % s)
        report[s] = sorted(history[-1])
    out = sorted({x for v in report.values() for x in v})
    return out, report


# -- arithmetic progressions ----------------------------------------------------------

def ap_detect(sm, difference=1, horizon=None):
    """Is the slope multiset (below horizon) a finite union of APs with the given difference?

    A union of progressions s, s + d, s + 2d, ... has, along every residue
    class mod d, a nondecreasing multiplicity.  A drop is a witness of failure.
    """
    d = Fraction(difference)
    counts = _counter(sm)
    if horizon is not None:
        counts = {s: m for s, m in counts.items() if s <= Fraction(horizon)}
    if not counts:
        return {"ok": True, "progressions": [], "witness": None}
    top = max(counts)
    classes = {}
    for s in counts:
        r = s - d * (s // d)
        classes.setdefault(r, []).append(s)
    progressions = []
    for r in sorted(classes):
        start = min(classes[r])
        prev = 0
        x = start
        while x <= top:
            m = counts.get(x, 0)
            if m < prev:
                return {"ok": False, "progressions": progressions,
                        "witness": (x, m, x - d, prev)}
            if m > prev:
                progressions.append((x, m - prev))
            prev = m
            x += d
    return {"ok": True, "progressions": progressions, "witness": None}
