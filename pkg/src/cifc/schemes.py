"""Single-letter zero-error schemes for deterministic channels.

A scheme maps each message pair to one channel use; it is zero-error when
both receivers recover their messages from every output.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .channel import CifcChannel, is_deterministic
from .errors import AlphabetMismatch, EncoderNotCausal, NotDeterministic, ParseError
from .prob import JointPMF, RoleTag as R

CSV_HEADER = ("w1", "w2", "x1", "x2", "y1", "y2", "w1_hat", "w2_hat")


@dataclass(frozen=True, eq=False)
class SchemeTable:
    """Encoder ``enc[w1][w2] = (x1, x2)`` and per-receiver decoding tables."""

    enc: np.ndarray
    dec1: np.ndarray
    dec2: np.ndarray
    name: str = ""

    def __post_init__(self):
        enc = np.asarray(self.enc, dtype=int)
        if enc.ndim != 3 or enc.shape[2] != 2 or min(enc.shape) < 1:
            raise AlphabetMismatch("encoder must have shape (m1, m2, 2)")
        x2 = enc[:, :, 1]
        if np.any(x2 != x2[:1, :]):
            w2 = int(np.argwhere((x2 != x2[:1, :]).any(axis=0))[0][0])
            raise EncoderNotCausal(f"x2 varies with w1 at w2={w2}")
        for nm in ("dec1", "dec2"):
            object.__setattr__(self, nm, np.asarray(getattr(self, nm), dtype=int))
        enc.setflags(write=False)
        object.__setattr__(self, "enc", enc)

    @property
    def m1(self) -> int:
        return self.enc.shape[0]

    @property
    def m2(self) -> int:
        return self.enc.shape[1]

    @property
    def rates(self) -> tuple[float, float]:
        return math.log2(self.m1), math.log2(self.m2)

    def encode(self, w1: int, w2: int) -> tuple[int, int]:
        x1, x2 = self.enc[w1, w2]
        return int(x1), int(x2)


@dataclass
class ZeroErrorReport:
    ok: bool
    rates: tuple[float, float]
    failures: list[dict] = field(default_factory=list)
    collisions: list[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "rates": list(self.rates), "failures": self.failures,
                "collisions": [[list(a), list(b)] for a, b in self.collisions]}


def _check(ch: CifcChannel, s: SchemeTable):
    if not is_deterministic(ch):
        raise NotDeterministic("zero-error verification needs a deterministic channel")
    x1, x2 = s.enc[..., 0], s.enc[..., 1]
    if x1.min() < 0 or x1.max() >= ch.card_x1 or x2.min() < 0 or x2.max() >= ch.card_x2:
        raise AlphabetMismatch("encoder output outside the channel input alphabets")
    if s.dec1.shape != (ch.card_y1,) or s.dec2.shape != (ch.card_y2,):
        raise AlphabetMismatch("decoder tables must cover the output alphabets")
    return ch.maps()


def emit_table(ch: CifcChannel, s: SchemeTable, order: str = "w1") -> list[tuple[int, ...]]:
    """Rows ``(w1, w2, x1, x2, y1, y2, w1_hat, w2_hat)``.

    ``order="w1"`` lists all w2 for w1=0 first, the conventional table layout;
    ``order="w2"`` groups by w2 instead.
    """
    m = _check(ch, s)
    pairs = [(a, b) for a in range(s.m1) for b in range(s.m2)]
    if order == "w2":
        pairs.sort(key=lambda p: (p[1], p[0]))
    elif order != "w1":
        raise ValueError("order must be 'w1' or 'w2'")
    rows = []
    for w1, w2 in pairs:
        x1, x2 = s.encode(w1, w2)
        y1, y2 = int(m.f1[x1, x2]), int(m.f2[x1, x2])
        rows.append((w1, w2, x1, x2, y1, y2, int(s.dec1[y1]), int(s.dec2[y2])))
    return rows


def verify_zero_error(ch: CifcChannel, s: SchemeTable) -> ZeroErrorReport:
    """Exhaustively decode every message pair."""
    rows = emit_table(ch, s)
    failures = [dict(zip(CSV_HEADER, r)) for r in rows if (r[6], r[7]) != (r[0], r[1])]
    seen: dict[tuple[int, int], tuple[int, int]] = {}
    collisions = []
    for r in rows:
        key = (r[2], r[3])
        if key in seen:
            collisions.append((seen[key], (r[0], r[1])))
        else:
            seen[key] = (r[0], r[1])
    return ZeroErrorReport(not failures and not collisions, s.rates, failures, collisions)


def induced_input(s: SchemeTable, card_x1: int, card_x2: int) -> JointPMF:
    """Input law produced by uniformly distributed messages."""
    v = np.zeros((card_x1, card_x2))
    for x1, x2 in s.enc.reshape(-1, 2):
        v[x1, x2] += 1.0
    return JointPMF(v / v.sum(), (R.X1, R.X2))


def table_to_csv(rows, sink=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    text = buf.getvalue()
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    elif sink is not None:
        sink.write(text)
    return text


def scheme_from_csv(source, ch: CifcChannel) -> SchemeTable:
    """Rebuild a scheme from an exported table.

    Output columns are ignored (outputs are recomputed from the channel);
    the decoders take the first ``w_hat`` listed for each output value.
    """
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or any(c not in reader.fieldnames for c in CSV_HEADER):
        raise ParseError(f"scheme CSV needs columns {','.join(CSV_HEADER)}")
    try:
        rows = [{k: int(r[k]) for k in CSV_HEADER} for r in reader]
    except (TypeError, ValueError) as e:
        raise ParseError(f"non-integer entry in scheme CSV: {e}") from None
    if not rows:
        raise ParseError("scheme CSV has no rows")
    m1 = max(r["w1"] for r in rows) + 1
    m2 = max(r["w2"] for r in rows) + 1
    if len({(r["w1"], r["w2"]) for r in rows}) != m1 * m2 or len(rows) != m1 * m2:
        raise ParseError("scheme CSV must list every message pair exactly once")
    enc = np.zeros((m1, m2, 2), dtype=int)
    m = ch.maps()
    if m is None or m.f2 is None:
        raise NotDeterministic("scheme tables need a deterministic channel")
    dec1 = np.full(ch.card_y1, -1)
    dec2 = np.full(ch.card_y2, -1)
    for r in rows:
        enc[r["w1"], r["w2"]] = (r["x1"], r["x2"])
    if (enc[..., 0].max() >= ch.card_x1 or enc[..., 1].max() >= ch.card_x2
            or enc.min() < 0):
        raise AlphabetMismatch("encoder output outside the channel input alphabets")
    for r in rows:
        y1, y2 = m.f1[r["x1"], r["x2"]], m.f2[r["x1"], r["x2"]]
        if dec1[y1] < 0:
            dec1[y1] = r["w1_hat"]
        if dec2[y2] < 0:
            dec2[y2] = r["w2_hat"]
    dec1[dec1 < 0] = 0
    dec2[dec2 < 0] = 0
    return SchemeTable(enc, dec1, dec2, name="csv")


# -- built-in constructions ----------------------------------------------------

def scheme_clipper_13() -> SchemeTable:
    """Rate (1, 3) on the asymmetric clipper: x2 carries w2, x1 fixes the parity of y1."""
    enc = np.zeros((2, 8, 2), dtype=int)
    for w1 in range(2):
        for w2 in range(8):
            enc[w1, w2] = ((w1 - w2) % 2, w2)
    return SchemeTable(enc, np.arange(4) % 2, np.arange(8), "clipper13")


def scheme_clipper_22() -> SchemeTable:
    """Rate (2, 2) on the asymmetric clipper: even x2 symbols, x1 pre-cancels x2."""
    enc = np.zeros((4, 4, 2), dtype=int)
    for w1 in range(4):
        for w2 in range(4):
            x2 = 2 * w2
            enc[w1, w2] = ((w1 - x2) % 4, x2)
    return SchemeTable(enc, np.arange(4), np.arange(8) // 2, "clipper22")


def scheme_symmetric_12() -> SchemeTable:
    """Rate (1, 2) on the symmetric clipper: both outputs equal the messages."""
    from .channel import symmetric_clipper

    m = symmetric_clipper().maps()
    enc = np.zeros((2, 4, 2), dtype=int)
    for w1 in range(2):
        for w2 in range(4):
            x2 = max(w2 - 1, 0)
            x1 = next(a for a in range(4) if (m.f1[a, x2], m.f2[a, x2]) == (w1, w2))
            enc[w1, w2] = (x1, x2)
    return SchemeTable(enc, np.arange(2), np.arange(4), "symmetric12")


SCHEMES = {
    "clipper13": (scheme_clipper_13, "asymmetric_clipper"),
    "clipper22": (scheme_clipper_22, "asymmetric_clipper"),
    "symmetric12": (scheme_symmetric_12, "symmetric_clipper"),
}
