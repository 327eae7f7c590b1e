"""Independent reference computations used by several test modules."""
import itertools

import numpy as np

from cifc.polytope import LinearConstraint, RateSystem

KEEP = ("R1", "R2")
DROP = ("R1c", "R1pb")
BOUND = 4


def random_lattice_system(rng, n_rows=6) -> RateSystem:
    """Random system over R1, R2, R1c, R1pb with coefficients in {-1, 0, 1}
    and integer right-hand sides, plus box rows on the eliminated pair.

    Every vertex of a fibre over a quarter-integer (R1, R2) then lies on the
    quarter-integer lattice, which makes grid search an exact oracle.
    """
    rows = []
    names = KEEP + DROP
    while len(rows) < n_rows:
        c = rng.integers(-1, 2, size=4)
        if not c.any():
            continue
        rows.append(LinearConstraint(dict(zip(names, map(int, c))), "<=", float(rng.integers(0, 4))))
    for v in DROP:
        rows.append(LinearConstraint({v: 1}, "<=", float(BOUND)))
    return RateSystem(rows)


def grid_feasible(sys: RateSystem, r1: float, r2: float, step=0.25, tol=1e-6) -> bool:
    """Is there (R1c, R1pb) on the lattice making the full system feasible?"""
    g = np.arange(0, BOUND + step / 2, step)
    a, b = np.meshgrid(g, g, indexing="ij")
    ok = np.ones_like(a, dtype=bool)
    for c in sys.constraints:
        lhs = (float(c.coeffs.get("R1", 0)) * r1 + float(c.coeffs.get("R2", 0)) * r2
               + float(c.coeffs.get("R1c", 0)) * a + float(c.coeffs.get("R1pb", 0)) * b)
        if c.sense == "<=":
            ok &= lhs <= c.rhs + tol
        elif c.sense == ">=":
            ok &= lhs >= c.rhs - tol
        else:
            ok &= np.abs(lhs - c.rhs) <= tol
    return bool(ok.any())


def test_points():
    vals = np.arange(0, 3.01, 0.5)
    return list(itertools.product(vals, vals))


def enumerate_det_entropies(f1, f2, px):
    """H(Y1|X2), H(Y2) and H(Y1|Y2,X2) of a deterministic channel, by counting."""
    import math
    from collections import defaultdict

    def h(pairs):
        joint, cond = defaultdict(float), defaultdict(float)
        for (t, g), m in pairs:
            joint[(t, g)] += m
            cond[g] += m
        return -sum(m * math.log2(m / cond[g]) for (t, g), m in joint.items() if m > 0)

    cells = [((a, b), px[a][b]) for a in range(len(px)) for b in range(len(px[0]))]
    h1 = h([((f1[a][b], b), m) for (a, b), m in cells])
    h2 = h([((f2[a][b], ()), m) for (a, b), m in cells])
    h12 = h([((f1[a][b], (f2[a][b], b)), m) for (a, b), m in cells])
    return h1, h2, h12
