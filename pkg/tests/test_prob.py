import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cifc.errors import (
    AlphabetMismatch, MassNotOne, NegativeMass, OverlappingSets, RoleCollision,
    ShapeMismatch, UnknownRole,
)
from cifc.channel import asymmetric_clipper
from cifc.prob import (
    JointPMF, RoleTag as R, compose_with_channel, entropy, marginalize, mutual_information,
    point_mass, product, uniform, uniform_on,
)


def brute_entropy(p: JointPMF, targets, given=()):
    """H(T|G) by explicit summation over cells, as an independent oracle."""
    t_ax = [p.axis(r) for r in targets]
    g_ax = [p.axis(r) for r in given]
    joint, cond = {}, {}
    for idx in itertools.product(*[range(n) for n in p.shape]):
        m = p.values[idx]
        kt = tuple(idx[i] for i in t_ax + g_ax)
        kg = tuple(idx[i] for i in g_ax)
        joint[kt] = joint.get(kt, 0.0) + m
        cond[kg] = cond.get(kg, 0.0) + m
    h = 0.0
    for k, m in joint.items():
        if m > 0:
            h -= m * math.log2(m / cond[k[len(t_ax):]])
    return h


pmfs = st.integers(0, 2 ** 31 - 1).map(
    lambda s: JointPMF(np.random.default_rng(s).dirichlet(np.full(12, 0.7)).reshape(2, 3, 2),
                       ("X1", "X2", "U")))


def test_uniform_entropy_is_log_cardinality():
    p = uniform(("X1", "X2"), (4, 8))
    assert entropy(p, ("X1", "X2")) == pytest.approx(5.0, abs=1e-12)
    assert entropy(p, "X1", "X2") == pytest.approx(2.0, abs=1e-12)


def test_dyadic_example_is_exact():
    v = np.array([[0.5, 0.25], [0.125, 0.125]])
    p = JointPMF(v, ("X1", "X2"))
    assert p.entropy(("X1", "X2")) == 1.75


@given(pmfs)
@settings(max_examples=40, deadline=None)
def test_entropy_matches_brute_force(p):
    for t, g in [((R.X1,), ()), ((R.X1, R.U), (R.X2,)), ((R.U,), (R.X1, R.X2))]:
        assert p.entropy(t, g) == pytest.approx(brute_entropy(p, t, g), abs=1e-10)


@given(pmfs)
@settings(max_examples=40, deadline=None)
def test_mutual_information_properties(p):
    i_ab = mutual_information(p, "X1", "X2")
    assert i_ab >= 0
    assert i_ab == pytest.approx(mutual_information(p, "X2", "X1"), abs=1e-12)
    # chain rule I(X1; X2, U) = I(X1; X2) + I(X1; U | X2)
    lhs = p.mutual_information("X1", ("X2", "U"))
    rhs = p.mutual_information("X1", "X2") + p.mutual_information("X1", "U", "X2")
    assert lhs == pytest.approx(rhs, abs=1e-10)
    assert p.mutual_information("X1", "U", "X2") <= p.entropy("X1", "X2") + 1e-12


@given(pmfs)
@settings(max_examples=30, deadline=None)
def test_marginal_sums_out(p):
    m = marginalize(p, ("U", "X1"))
    assert m.roles == (R.X1, R.U)
    assert m.values.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(m.values, p.values.sum(axis=1))


def test_independent_product_has_zero_information():
    p = product(uniform_on(4, [0, 1], "X1"), uniform(("X2",), (8,)))
    assert p.mutual_information("X1", "X2") == 0.0
    assert p.entropy(("X1", "X2")) == pytest.approx(4.0)


def test_point_mass_has_zero_entropy():
    p = point_mass(("X1", "X2"), (2, 3), (1, 2))
    assert p.entropy(("X1", "X2")) == 0.0


def test_validation_errors():
    with pytest.raises(NegativeMass):
        JointPMF([[0.6, -0.1], [0.3, 0.2]], ("X1", "X2"))
    with pytest.raises(MassNotOne):
        JointPMF([[0.5, 0.1], [0.1, 0.1]], ("X1", "X2"))
    with pytest.raises(ShapeMismatch):
        JointPMF([0.5, 0.5], ("X1", "X2"))
    with pytest.raises(RoleCollision):
        JointPMF([[0.5, 0.0], [0.0, 0.5]], ("X1", "X1"))
    p = uniform(("X1", "X2"), (2, 2))
    with pytest.raises(UnknownRole):
        p.entropy("Y1")
    with pytest.raises(UnknownRole):
        p.entropy("Z9")
    with pytest.raises(OverlappingSets):
        p.mutual_information("X1", ("X1", "X2"))


def test_tiny_negative_rounding_is_clamped():
    p = JointPMF([[0.5, -1e-17], [0.25, 0.25]], ("X1", "X2"))
    assert p.values.min() == 0.0


def test_compose_with_channel_appends_outputs():
    ch = asymmetric_clipper()
    j = compose_with_channel(uniform(("X1", "X2"), (4, 8)), ch)
    assert j.roles[-2:] == (R.Y1, R.Y2)
    assert j.entropy("Y1", "X2") == pytest.approx(2.0)
    assert j.entropy("Y2") == pytest.approx(3.0)
    assert j.entropy("Y1", ("Y2", "X2")) == pytest.approx(1.0)


def test_compose_rejects_wrong_alphabets():
    with pytest.raises(AlphabetMismatch):
        compose_with_channel(uniform(("X1", "X2"), (2, 8)), asymmetric_clipper())
    j = compose_with_channel(uniform(("X1", "X2"), (4, 8)), asymmetric_clipper())
    with pytest.raises(RoleCollision):
        compose_with_channel(j, asymmetric_clipper())


def test_with_function_and_merge():
    p = uniform(("X1", "X2"), (2, 3))
    q = p.with_function("U", ("X1",), np.array([1, 0]), 2)
    assert q.entropy("U", "X1") == 0.0
    assert q.mutual_information("U", "X1") == pytest.approx(1.0)
    m = q.merge(("X1", "X2"), "V")
    assert m.card("V") == 6
    assert m.entropy("V") == pytest.approx(math.log2(6))
