from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cifc.errors import InputError, Unbounded, UnknownVariable
from cifc.polytope import (
    LinearConstraint, RatePolytope2D, RateSystem, box, contains, eliminate_many, eq, fme_eliminate,
    fmt, frontier_csv, ge, hausdorff, le, project_to_r1_r2, regions_equal, remove_redundant,
    union_frontier, vertices_2d,
)

from oracles import DROP, grid_feasible, random_lattice_system, test_points as lattice_points


def test_constraint_basics():
    c = le({"R1": 2, "R2": Fraction(1, 2)}, 3.0)
    assert c.lhs({"R1": 1, "R2": 2}) == 3.0
    assert c.slack({"R1": 1, "R2": 2}) == 0.0
    assert str(c) == "2*R1 + 1/2*R2 <= 3"
    with pytest.raises(UnknownVariable):
        le({"R9": 1}, 1.0)
    with pytest.raises(InputError):
        LinearConstraint({"R1": 1}, "<", 1.0)


def test_fme_single_variable_example():
    # R1 + R1c <= 3 and R1c >= 0 leave R1 <= 3
    sys = RateSystem([le({"R1": 1, "R1c": 1}, 3.0), le({"R2": 1}, 1.0)])
    out = fme_eliminate(sys, "R1c")
    assert {(tuple(c.coeffs.items()), c.rhs) for c in out} == {
        ((("R1", Fraction(1)),), 3.0), ((("R2", Fraction(1)),), 1.0)}


def test_fme_rejects_absent_variable():
    with pytest.raises(UnknownVariable):
        fme_eliminate(RateSystem([le({"R1": 1}, 1.0)]), "R2c")


def test_fme_detects_infeasibility():
    sys = RateSystem([le({"R1c": 1}, 1.0), ge({"R1c": 1}, 2.0), le({"R1": 1}, 1.0)])
    assert eliminate_many(sys, ["R1c"]).infeasible


def test_projection_of_split_box():
    sys = RateSystem([le({"R1c": 1, "R1pb": 1}, 2.0), le({"R2c": 1, "R2pa": 1, "R2pb": 1}, 3.0)])
    poly = project_to_r1_r2(sys)
    assert regions_equal(poly, box(2, 3))


def test_unbounded_projection_raises():
    with pytest.raises(Unbounded):
        project_to_r1_r2(RateSystem([le({"R1": 1}, 1.0)]))


def test_vertices_ccw_from_origin():
    poly = RatePolytope2D([le({"R1": 1}, 2), le({"R2": 1}, 3), le({"R1": 1, "R2": 1}, 4)])
    assert vertices_2d(poly) == [(0, 0), (2, 0), (2, 2), (1, 3), (0, 3)]


def test_all_zero_region_is_a_point():
    poly = RatePolytope2D([le({"R1": 1}, 0.0), le({"R2": 1}, 0.0)])
    assert poly.vertices == [(0.0, 0.0)]
    assert not poly.is_empty()


def test_negative_rhs_gives_empty_region():
    poly = RatePolytope2D([le({"R1": 1}, -1.0), le({"R2": 1}, 1.0)])
    assert poly.is_empty() and poly.vertices == []


def test_redundant_sum_row_removed():
    sys = RateSystem([le({"R1": 1}, 1), le({"R2": 1}, 2), le({"R1": 1, "R2": 1}, 3.5)])
    assert len(remove_redundant(sys)) == 2


def test_redundancy_in_higher_dimension():
    sys = RateSystem([le({"R1": 1, "R1c": 1}, 1), le({"R1": 1}, 2), le({"R2": 1, "R1c": 1}, 1),
                      le({"R1": 1, "R2": 1, "R1c": 1}, 5)])
    kept = remove_redundant(sys)
    assert {c.rhs for c in kept} == {1.0}


def test_contains_and_hausdorff():
    small, big = box(1, 1), box(2, 2)
    assert contains(big, small) and not contains(small, big)
    assert hausdorff(small, big) == 1.0
    assert regions_equal(big, box(2 + 1e-12, 2))
    empty = RatePolytope2D((), empty=True)
    assert contains(small, empty)


def test_union_frontier_prefers_first_on_ties():
    pts = union_frontier([box(1, 2), box(2, 1)], [0.0, 0.5, 1.0])
    assert [p.source for p in pts] == [0, 0, 1]
    assert [p.value for p in pts] == [2.0, 1.5, 2.0]
    assert pts[0].point[1] == 2 and pts[2].point[0] == 2
    assert frontier_csv(pts).splitlines()[0] == "lambda,R1,R2,value"


def test_fmt_twelve_significant_digits():
    assert fmt(1 / 3) == 0.333333333333
    assert fmt(-0.0) == 0.0


@pytest.mark.parametrize("seed", range(30))
def test_fme_matches_lattice_grid_search(seed):
    rng = np.random.default_rng(seed)
    sys = random_lattice_system(rng)
    proj = eliminate_many(sys, DROP)
    for r1, r2 in lattice_points():
        got = (not proj.infeasible) and proj.satisfied({"R1": r1, "R2": r2}, tol=1e-6)
        assert got == grid_feasible(sys, r1, r2), (r1, r2)


def _random_float_system(rng, n_rows=7):
    names = ["R1", "R2", "R1c", "R1pb", "R2c"]
    rows = []
    while len(rows) < n_rows:
        c = rng.integers(-2, 3, size=len(names))
        if c.any():
            rows.append(le(dict(zip(names, map(int, c))), float(rng.uniform(0, 3))))
    rows += [le({v: 1}, 3.0) for v in names]
    return RateSystem(rows)


def _as_poly(sys):
    red = remove_redundant(sys)
    return RatePolytope2D(red.constraints, empty=red.infeasible)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_chernikov_pruning_preserves_projection(seed):
    sys = _random_float_system(np.random.default_rng(seed))
    drop = ["R1c", "R1pb", "R2c"]
    a = _as_poly(eliminate_many(sys, drop, chernikov=True))
    b = _as_poly(eliminate_many(sys, drop, chernikov=False))
    assert hausdorff(a, b) <= 1e-9


@given(st.integers(0, 10 ** 6), st.permutations(["R1c", "R1pb", "R2c"]))
@settings(max_examples=40, deadline=None)
def test_elimination_order_does_not_matter(seed, order):
    sys = _random_float_system(np.random.default_rng(seed))
    a = _as_poly(eliminate_many(sys, order, greedy=False))
    b = _as_poly(eliminate_many(sys, ["R1c", "R1pb", "R2c"]))
    assert hausdorff(a, b) <= 1e-9


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_projection_contains_projected_feasible_points(seed):
    rng = np.random.default_rng(seed)
    sys = _random_float_system(rng)
    proj = eliminate_many(sys, ["R1c", "R1pb", "R2c"])
    for _ in range(20):
        pt = {v: float(x) for v, x in zip(["R1", "R2", "R1c", "R1pb", "R2c"], rng.uniform(0, 1.5, 5))}
        if sys.satisfied(pt):
            assert proj.satisfied({"R1": pt["R1"], "R2": pt["R2"]})


def test_equality_rows_are_split():
    sys = RateSystem([eq({"R1cP": 1}, 0.5), le({"R1": 1, "R1cP": 1}, 2.0), le({"R2": 1}, 1.0)])
    out = eliminate_many(sys, ["R1cP"])
    assert RatePolytope2D(out.constraints).vertices == [(0, 0), (1.5, 0), (1.5, 1), (0, 1)]
