"""Discrete memoryless cognitive interference channels.

Channels are stored as dense kernels ``p(y1, y2 | x1, x2)`` with axes ordered
``[x1][x2][y1][y2]``; alphabets are the integer ranges ``0..card-1``.
"""
from __future__ import annotations

import io
import json
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParseError, RowNotStochastic, SchemaViolation, ShapeMismatch, UnknownName

ROW_TOL = 1e-12


@dataclass(frozen=True)
class DeterministicMaps:
    f1: np.ndarray
    f2: np.ndarray | None = None


class CifcChannel:
    """Transition kernel of a two-user cognitive interference channel."""

    __slots__ = ("_kernel", "name")

    def __init__(self, kernel, name: str | None = None):
        k = np.array(kernel, dtype=float)
        if k.ndim != 4 or min(k.shape, default=0) < 1:
            raise ShapeMismatch(f"kernel must be 4-dimensional, got shape {k.shape}")
        if np.any(k < 0) or not np.all(np.isfinite(k)):
            raise RowNotStochastic("kernel has negative or non-finite entries")
        sums = k.sum(axis=(2, 3))
        bad = np.argwhere(np.abs(sums - 1.0) > ROW_TOL)
        if len(bad):
            x1, x2 = bad[0]
            raise RowNotStochastic(
                f"p(.,.|x1={x1},x2={x2}) sums to {sums[x1, x2]!r}")
        k.setflags(write=False)
        self._kernel = k
        self.name = name

    @property
    def kernel(self) -> np.ndarray:
        return self._kernel

    @property
    def card_x1(self) -> int:
        return self._kernel.shape[0]

    @property
    def card_x2(self) -> int:
        return self._kernel.shape[1]

    @property
    def card_y1(self) -> int:
        return self._kernel.shape[2]

    @property
    def card_y2(self) -> int:
        return self._kernel.shape[3]

    @property
    def cards(self) -> dict[str, int]:
        return dict(x1=self.card_x1, x2=self.card_x2, y1=self.card_y1, y2=self.card_y2)

    def kernel_y1(self) -> np.ndarray:
        """Marginal kernel p(y1 | x1, x2)."""
        return self._kernel.sum(axis=3)

    def kernel_y2(self) -> np.ndarray:
        """Marginal kernel p(y2 | x1, x2)."""
        return self._kernel.sum(axis=2)

    def maps(self) -> DeterministicMaps | None:
        """Deterministic output maps, or None when Y1 is noisy."""
        if not is_semideterministic(self):
            return None
        f1 = self.kernel_y1().argmax(axis=2)
        f2 = self.kernel_y2().argmax(axis=2) if is_deterministic(self) else None
        return DeterministicMaps(f1, f2)

    def __call__(self, x1: int, x2: int) -> tuple[int, int]:
        """Outputs of a deterministic channel at one input pair."""
        m = self.maps()
        if m is None or m.f2 is None:
            raise ValueError("channel is not deterministic")
        return int(m.f1[x1, x2]), int(m.f2[x1, x2])

    def __eq__(self, other):
        if not isinstance(other, CifcChannel):
            return NotImplemented
        return (self._kernel.shape == other._kernel.shape
                and np.array_equal(self._kernel, other._kernel))

    __hash__ = None

    def __repr__(self):
        c = self.cards
        label = f" {self.name!r}" if self.name else ""
        return f"CifcChannel{label}(|X1|={c['x1']}, |X2|={c['x2']}, |Y1|={c['y1']}, |Y2|={c['y2']})"


def channel_from_kernel(kernel, cards: dict | None = None, name=None) -> CifcChannel:
    k = np.asarray(kernel, dtype=float)
    if cards is not None:
        want = (cards["x1"], cards["x2"], cards["y1"], cards["y2"])
        if k.shape != tuple(want):
            raise ShapeMismatch(f"kernel shape {k.shape} does not match cards {want}")
    return CifcChannel(k, name=name)


def channel_from_maps(f1, f2, card_y1: int, card_y2: int, name=None) -> CifcChannel:
    """Deterministic channel from output tables ``f1[x1][x2]``, ``f2[x1][x2]``."""
    f1 = np.asarray(f1, dtype=int)
    f2 = np.asarray(f2, dtype=int)
    if f1.ndim != 2 or f1.shape != f2.shape:
        raise ShapeMismatch("f1 and f2 must be 2-D tables of equal shape")
    for f, n in ((f1, card_y1), (f2, card_y2)):
        if f.min() < 0 or f.max() >= n:
            raise ShapeMismatch("map value outside output alphabet")
    k = np.zeros(f1.shape + (card_y1, card_y2))
    i, j = np.indices(f1.shape)
    k[i, j, f1, f2] = 1.0
    return CifcChannel(k, name=name)


def channel_from_functions(card_x1, card_x2, card_y1, card_y2,
                           f1: Callable[[int, int], int],
                           f2: Callable[[int, int], int], name=None) -> CifcChannel:
    t1 = [[f1(a, b) for b in range(card_x2)] for a in range(card_x1)]
    t2 = [[f2(a, b) for b in range(card_x2)] for a in range(card_x1)]
    return channel_from_maps(t1, t2, card_y1, card_y2, name=name)


def _ind(x, members) -> int:
    return 1 if x in members else 0


def asymmetric_clipper() -> CifcChannel:
    return channel_from_functions(
        4, 8, 4, 8,
        lambda x1, x2: (x1 + x2) % 4,
        lambda x1, x2: (_ind(x1, (2, 3)) + x2) % 8,
        name="asymmetric_clipper")


def symmetric_clipper() -> CifcChannel:
    return channel_from_functions(
        4, 3, 2, 4,
        lambda x1, x2: (_ind(x1, (1, 2)) + _ind(x2, (1, 2))) % 2,
        lambda x1, x2: _ind(x1, (0, 1)) + x2,
        name="symmetric_clipper")


BUILTINS = {
    "asymmetric_clipper": asymmetric_clipper,
    "symmetric_clipper": symmetric_clipper,
}


def builtin(name: str) -> CifcChannel:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise UnknownName(f"no built-in channel {name!r}; "
                          f"choose from {sorted(BUILTINS)}") from None


def _is_01(a: np.ndarray) -> bool:
    return bool(np.all((np.abs(a) <= ROW_TOL) | (np.abs(a - 1.0) <= ROW_TOL)))


def is_semideterministic(ch: CifcChannel) -> bool:
    return _is_01(ch.kernel_y1())


def is_deterministic(ch: CifcChannel) -> bool:
    return is_semideterministic(ch) and _is_01(ch.kernel_y2())


# -- JSON serialization ------------------------------------------------------

def channel_to_dict(ch: CifcChannel) -> dict:
    doc = {"card": ch.cards}
    m = ch.maps()
    if m is not None and m.f2 is not None:
        doc["maps"] = {"f1": m.f1.tolist(), "f2": m.f2.tolist()}
    else:
        doc["kernel"] = ch.kernel.tolist()
    if ch.name:
        doc["name"] = ch.name
    return doc


def save_channel(ch: CifcChannel, sink) -> None:
    """Write ``ch`` as JSON to a path or text stream.

    Deterministic channels are written in the ``maps`` form.
    """
    text = json.dumps(channel_to_dict(ch), indent=1)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sink.write(text + "\n")


def _positive_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v >= 1


def channel_from_dict(doc) -> CifcChannel:
    if not isinstance(doc, dict):
        raise SchemaViolation("channel document must be a JSON object")
    card = doc.get("card")
    if not isinstance(card, dict) or not all(
            _positive_int(card.get(k)) for k in ("x1", "x2", "y1", "y2")):
        raise SchemaViolation('"card" must map x1, x2, y1, y2 to positive integers')
    has_k, has_m = "kernel" in doc, "maps" in doc
    if has_k == has_m:
        raise SchemaViolation('exactly one of "kernel" or "maps" is required')
    name = doc.get("name")
    if has_k:
        try:
            k = np.array(doc["kernel"], dtype=float)
        except (TypeError, ValueError) as e:
            raise SchemaViolation(f'"kernel" is not a numeric array: {e}') from None
        want = (card["x1"], card["x2"], card["y1"], card["y2"])
        if k.shape != want:
            raise SchemaViolation(f'"kernel" shape {k.shape} does not match card {want}')
        return CifcChannel(k, name=name)
    maps = doc["maps"]
    if not isinstance(maps, dict) or "f1" not in maps or "f2" not in maps:
        raise SchemaViolation('"maps" needs both "f1" and "f2"')
    try:
        f1 = np.array(maps["f1"])
        f2 = np.array(maps["f2"])
    except (TypeError, ValueError) as e:
        raise SchemaViolation(f'malformed "maps": {e}') from None
    shape = (card["x1"], card["x2"])
    for f in (f1, f2):
        if f.shape != shape or f.dtype.kind not in "iu":
            raise SchemaViolation(f'maps must be integer tables of shape {shape}')
    try:
        return channel_from_maps(f1, f2, card["y1"], card["y2"], name=name)
    except ShapeMismatch as e:
        raise SchemaViolation(str(e)) from None


def load_channel(source) -> CifcChannel:
    """Read a channel from a path, a text stream or a JSON string."""
    try:
        if isinstance(source, (str, os.PathLike)) and not str(source).lstrip().startswith("{"):
            with open(source, encoding="utf-8") as fh:
                doc = json.load(fh)
        elif isinstance(source, str):
            doc = json.loads(source)
        else:
            doc = json.load(source if not isinstance(source, bytes) else io.StringIO(source.decode()))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    return channel_from_dict(doc)
