import time

import numpy as np
import pytest

from cifc.channel import asymmetric_clipper, channel_from_kernel, channel_from_maps, symmetric_clipper
from cifc.prob import JointPMF, RoleTag as R, compose_with_channel, product, uniform_on
from cifc.regime import CONDITIONS, VIOLATION_TOL, Status, classify_regime, deterministic_shortcut

from conftest import random_channel


def very_strong_violation(ch, px):
    """max of the two very-strong gaps, written out from entropies."""
    j = compose_with_channel(px, ch)
    H = j.entropy
    g1 = (H(R.Y2, R.X2) - H(R.Y2, (R.X1, R.X2))) - (H(R.Y1, R.X2) - H(R.Y1, (R.X1, R.X2)))
    g2 = (H(R.Y1) - H(R.Y1, (R.X1, R.X2))) - (H(R.Y2) - H(R.Y2, (R.X1, R.X2)))
    return max(-g1, -g2)


def test_example_one_reference_witness_violates():
    px = product(uniform_on(4, [0], R.X1), uniform_on(8, range(8), R.X2))
    assert very_strong_violation(asymmetric_clipper(), px) == pytest.approx(1.0, abs=1e-12)


def test_example_two_reference_witness_violates():
    px = product(uniform_on(4, [3], R.X1), uniform_on(3, [1, 2], R.X2))
    j = compose_with_channel(px, symmetric_clipper())
    assert j.entropy(R.Y1) == 0.0 and j.entropy(R.Y2) == 1.0
    assert very_strong_violation(symmetric_clipper(), px) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("ch", [asymmetric_clipper(), symmetric_clipper()], ids=lambda c: c.name)
def test_builtin_channels_violate_very_strong(ch):
    t = time.perf_counter()
    rep = classify_regime(ch, budget=1000, seed=0)
    assert time.perf_counter() - t < 10
    res = rep["very_strong"]
    assert res.status is Status.VIOLATED
    assert very_strong_violation(ch, res.witness) >= VIOLATION_TOL
    assert res.violation == pytest.approx(very_strong_violation(ch, res.witness), abs=1e-9)


def test_identical_outputs_hold_strong_and_very_strong():
    rng = np.random.default_rng(0)
    k = rng.dirichlet(np.ones(3), size=(2, 2))
    kernel = np.zeros((2, 2, 3, 3))
    for y in range(3):
        kernel[:, :, y, y] = k[:, :, y]
    rep = classify_regime(channel_from_kernel(kernel), budget=200, seed=1)
    for n in ("strong", "very_strong", "weak", "better_cognitive"):
        assert rep[n].status is Status.HOLDS_AT_BUDGET, n
        assert rep[n].witness is None


def test_violations_always_carry_checkable_witnesses():
    rng = np.random.default_rng(2)
    for _ in range(3):
        ch = random_channel(rng, 2, 2, 2, 2)
        rep = classify_regime(ch, aux_card=2, budget=100, seed=3)
        for name, res in rep.conditions.items():
            assert res.budget == 100
            if res.status is Status.VIOLATED:
                f, aux = CONDITIONS[name]
                j = compose_with_channel(res.witness, ch)
                assert f(j) > VIOLATION_TOL
                assert res.aux_cardinality == (2 if aux else 0)
                if aux:
                    assert res.witness.card(R.U) == 2


def test_report_is_seed_deterministic():
    ch = random_channel(np.random.default_rng(4))
    a = classify_regime(ch, budget=50, seed=7).to_dict()
    b = classify_regime(ch, budget=50, seed=7).to_dict()
    assert a == b


def test_weak_receiver_two_classified():
    # receiver 2 sees nothing: weak interference holds, strong interference fails
    ch = channel_from_maps(np.array([[0, 1], [1, 0]]), np.zeros((2, 2), int), 2, 1)
    rep = classify_regime(ch, budget=100)
    assert rep["weak"].status is Status.HOLDS_AT_BUDGET
    assert rep["strong"].status is Status.VIOLATED
    assert rep["strong"].violation == pytest.approx(1.0, abs=1e-9)


def test_bad_arguments():
    with pytest.raises(ValueError):
        classify_regime(asymmetric_clipper(), budget=0)
    with pytest.raises(ValueError):
        classify_regime(asymmetric_clipper(), aux_card=0)


def test_deterministic_shortcut():
    px = JointPMF(np.full((4, 8), 1 / 32), (R.X1, R.X2))
    # H(Y1|X2) = 2, H(Y2|X2) = 1
    assert deterministic_shortcut(asymmetric_clipper(), px) == pytest.approx(1.0, abs=1e-12)
