import io
import json

import numpy as np
import pytest

from cifc.channel import (
    BUILTINS, asymmetric_clipper, builtin, channel_from_kernel, channel_from_maps,
    channel_to_dict, is_deterministic, is_semideterministic, load_channel, save_channel,
    symmetric_clipper,
)
from cifc.errors import ParseError, RowNotStochastic, SchemaViolation, ShapeMismatch, UnknownName

from conftest import random_channel


def test_asymmetric_clipper_formulas():
    ch = asymmetric_clipper()
    assert ch.cards == dict(x1=4, x2=8, y1=4, y2=8)
    for x1 in range(4):
        for x2 in range(8):
            y1, y2 = ch(x1, x2)
            assert y1 == (x1 + x2) % 4
            assert y2 == ((1 if x1 >= 2 else 0) + x2) % 8


def test_symmetric_clipper_formulas():
    ch = symmetric_clipper()
    assert ch.cards == dict(x1=4, x2=3, y1=2, y2=4)
    for x1 in range(4):
        for x2 in range(3):
            ind1 = 1 if x1 in (1, 2) else 0
            ind2 = 1 if x2 in (1, 2) else 0
            assert ch(x1, x2) == ((ind1 + ind2) % 2, (1 if x1 in (0, 1) else 0) + x2)


def test_builtins_are_deterministic():
    for name in BUILTINS:
        ch = builtin(name)
        assert is_deterministic(ch) and is_semideterministic(ch)


def test_unknown_builtin():
    with pytest.raises(UnknownName):
        builtin("no_such_channel")


def test_noisy_channel_is_not_semideterministic():
    ch = random_channel(np.random.default_rng(0))
    assert not is_semideterministic(ch)
    assert ch.maps() is None


def test_kernel_validation():
    with pytest.raises(RowNotStochastic):
        channel_from_kernel(np.full((2, 2, 2, 2), 0.3))
    with pytest.raises(ShapeMismatch):
        channel_from_kernel(np.ones((2, 2, 2)))
    with pytest.raises(ShapeMismatch):
        channel_from_kernel(np.full((1, 1, 2, 2), 0.25), cards=dict(x1=2, x2=1, y1=2, y2=2))
    with pytest.raises(ShapeMismatch):
        channel_from_maps([[0, 2]], [[0, 0]], 2, 1)


@pytest.mark.parametrize("make", [asymmetric_clipper, symmetric_clipper])
def test_json_roundtrip_deterministic(make, tmp_path):
    ch = make()
    path = tmp_path / "ch.json"
    save_channel(ch, path)
    assert "maps" in json.loads(path.read_text())
    assert load_channel(path) == ch


def test_json_roundtrip_kernel():
    ch = random_channel(np.random.default_rng(3), 2, 3, 2, 2)
    buf = io.StringIO()
    save_channel(ch, buf)
    back = load_channel(buf.getvalue())
    np.testing.assert_allclose(back.kernel, ch.kernel, atol=0)


def test_load_errors():
    with pytest.raises(ParseError):
        load_channel("{not json")
    with pytest.raises(SchemaViolation):
        load_channel('{"card": {"x1": 1, "x2": 1, "y1": 1, "y2": 1}}')
    doc = channel_to_dict(symmetric_clipper())
    doc["card"]["x1"] = 5
    with pytest.raises(SchemaViolation):
        load_channel(json.dumps(doc))
    with pytest.raises(SchemaViolation):
        load_channel('{"card": {"x1": 1, "x2": 1, "y1": 2, "y2": 1}, "kernel": [[[[0.5, 0.5]]]]}')
    with pytest.raises(RowNotStochastic):
        load_channel('{"card": {"x1": 1, "x2": 1, "y1": 1, "y2": 2}, "kernel": [[[[0.5, 0.6]]]]}')
