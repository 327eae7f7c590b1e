"""Finite-alphabet joint distributions and information measures (in bits).

A :class:`JointPMF` is a dense probability tensor whose axes are labelled by
:class:`RoleTag` values (``X1``, ``Y2``, ``U1c`` ...).  Every information
quantity used by the bound evaluators reduces to joint entropies of axis
subsets, which are cached per distribution since PMFs are immutable.
"""
from __future__ import annotations

import enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AlphabetMismatch,
    MassNotOne,
    NegativeMass,
    OverlappingSets,
    RoleCollision,
    ShapeMismatch,
    UnknownRole,
)

MASS_TOL = 1e-9
NEG_CLAMP = -1e-15


class RoleTag(str, enum.Enum):
    """Random-variable roles that may label a PMF axis."""

    U = "U"
    U1 = "U1"
    U2 = "U2"
    V = "V"
    U1c = "U1c"
    U2c = "U2c"
    U1pb = "U1pb"
    U2pb = "U2pb"
    X1 = "X1"
    X2 = "X2"
    Y1 = "Y1"
    Y2 = "Y2"
    Y2P = "Y2P"
    W1 = "W1"
    W2 = "W2"
    T = "T"

    def __str__(self):
        return self.value


def as_role(role) -> RoleTag:
    if isinstance(role, RoleTag):
        return role
    try:
        return RoleTag(role)
    except ValueError:
        raise UnknownRole(f"unknown role {role!r}") from None


def as_roles(roles) -> tuple[RoleTag, ...]:
    if isinstance(roles, (str, RoleTag)):
        roles = (roles,)
    return tuple(as_role(r) for r in roles)


def _plogp_sum(p: np.ndarray) -> float:
    q = p[p > 0]
    return float(-(q * np.log2(q)).sum())


class JointPMF:
    """Immutable joint probability mass function over role-labelled axes."""

    __slots__ = ("_roles", "_values", "_hcache")

    def __init__(self, values, roles, *, _trusted: bool = False):
        if _trusted and isinstance(values, np.ndarray) and values.dtype == float:
            # internal fast path: roles already validated, array freshly built
            values.setflags(write=False)
            self._roles = tuple(roles)
            self._values = values
            self._hcache = {}
            return
        roles = as_roles(roles)
        if len(set(roles)) != len(roles):
            raise RoleCollision(f"duplicate roles in {[str(r) for r in roles]}")
        arr = np.array(values, dtype=float)
        if arr.ndim != len(roles):
            raise ShapeMismatch(
                f"{arr.ndim}-dimensional table given for {len(roles)} roles")
        if not _trusted:
            if arr.size == 0:
                raise ShapeMismatch("every axis needs cardinality >= 1")
            if not np.all(np.isfinite(arr)):
                raise NegativeMass("non-finite probability")
            if np.any(arr < NEG_CLAMP):
                raise NegativeMass(f"negative entry {arr.min()!r}")
            arr[arr < 0] = 0.0
            total = arr.sum()
            if abs(total - 1.0) > MASS_TOL:
                raise MassNotOne(f"total mass {total!r} differs from 1")
        arr.setflags(write=False)
        self._roles = roles
        self._values = arr
        self._hcache: dict[frozenset, float] = {}

    # -- basic accessors -------------------------------------------------
    @property
    def roles(self) -> tuple[RoleTag, ...]:
        return self._roles

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def shape(self) -> tuple[int, ...]:
        return self._values.shape

    def card(self, role) -> int:
        return self._values.shape[self.axis(role)]

    def axis(self, role) -> int:
        role = as_role(role)
        try:
            return self._roles.index(role)
        except ValueError:
            raise UnknownRole(f"role {role} not in {self.role_names}") from None

    @property
    def role_names(self) -> list[str]:
        return [r.value for r in self._roles]

    def __contains__(self, role) -> bool:
        try:
            return as_role(role) in self._roles
        except UnknownRole:
            return False

    def __repr__(self):
        dims = ", ".join(f"{r}:{n}" for r, n in zip(self._roles, self.shape))
        return f"JointPMF({dims})"

    def __eq__(self, other):
        if not isinstance(other, JointPMF):
            return NotImplemented
        return self._roles == other._roles and np.array_equal(self._values, other._values)

    __hash__ = None

    # -- structural operations ---------------------------------------------
    def _check(self, roles) -> tuple[RoleTag, ...]:
        if isinstance(roles, str):
            roles = (as_role(roles),)
        else:
            roles = tuple(r if r.__class__ is RoleTag else as_role(r) for r in roles)
        for r in roles:
            if r not in self._roles:
                raise UnknownRole(f"role {r} not in {self.role_names}")
        return roles

    def marginal(self, keep) -> "JointPMF":
        """Sum out every axis not in ``keep``; kept axes retain their order."""
        keep = set(self._check(keep))
        return self._marginal(keep)

    def _marginal(self, keep) -> "JointPMF":
        drop = tuple(i for i, r in enumerate(self._roles) if r not in keep)
        kept = tuple(r for r in self._roles if r in keep)
        if not drop:
            return self
        return JointPMF(self._values.sum(axis=drop), kept, _trusted=True)

    def transpose(self, order) -> "JointPMF":
        order = self._check(order)
        if set(order) != set(self._roles):
            raise UnknownRole("transpose needs every role exactly once")
        perm = [self._roles.index(r) for r in order]
        return JointPMF(np.transpose(self._values, perm), order, _trusted=True)

    def rename(self, mapping: dict) -> "JointPMF":
        mapping = {as_role(k): as_role(v) for k, v in mapping.items()}
        self._check(mapping)
        roles = tuple(mapping.get(r, r) for r in self._roles)
        return JointPMF(self._values, roles, _trusted=True)

    def merge(self, roles, into) -> "JointPMF":
        """Fuse several axes into one axis ``into`` (row-major index)."""
        roles = self._check(roles)
        into = as_role(into)
        rest = tuple(r for r in self._roles if r not in roles)
        if into in rest:
            raise RoleCollision(f"role {into} already present")
        t = self.transpose(rest + roles)
        shape = t.shape[: len(rest)] + (int(np.prod(t.shape[len(rest):])),)
        return JointPMF(t.values.reshape(shape), rest + (into,), _trusted=True)

    def with_function(self, role, of, table, card: int | None = None) -> "JointPMF":
        """Append an axis holding a deterministic function of existing axes.

        ``table`` is an integer array indexed by the axes named in ``of``.
        """
        role = as_role(role)
        if role in self._roles:
            raise RoleCollision(f"role {role} already present")
        of = self._check(of)
        table = np.asarray(table, dtype=int)
        if table.shape != tuple(self.card(r) for r in of):
            raise ShapeMismatch("function table shape does not match its arguments")
        card = int(table.max()) + 1 if card is None else int(card)
        if table.min() < 0 or table.max() >= card:
            raise ShapeMismatch("function values outside the declared alphabet")
        onehot = np.eye(card)[table]  # shape of + (card,)
        letters = "abcdefghijklmnopqrstuvw"
        src = "".join(letters[i] for i in range(len(self._roles)))
        sub = "".join(src[self._roles.index(r)] for r in of) + "z"
        vals = np.einsum(f"{src},{sub}->{src}z", self._values, onehot)
        return JointPMF(vals, self._roles + (role,), _trusted=True)

    # -- information measures ----------------------------------------------
    def joint_entropy(self, roles) -> float:
        return self._h(frozenset(self._check(roles)))

    def _h(self, key: frozenset) -> float:
        h = self._hcache.get(key)
        if h is None:
            if not key:
                h = 0.0
            else:
                h = _plogp_sum(self._marginal(key).values)
            self._hcache[key] = h
        return h

    def entropy(self, targets, given=()) -> float:
        t = set(self._check(targets))
        g = set(self._check(given))
        if t & g:
            raise OverlappingSets("targets and conditioning sets overlap")
        h = self._h(frozenset(t | g)) - self._h(frozenset(g))
        return max(h, 0.0)

    def mutual_information(self, a, b, given=()) -> float:
        a = set(self._check(a))
        b = set(self._check(b))
        g = set(self._check(given))
        if a & b or a & g or b & g:
            raise OverlappingSets("mutual information arguments must be disjoint")
        h = self._h
        mi = h(frozenset(a | g)) + h(frozenset(b | g)) - h(frozenset(a | b | g)) - h(frozenset(g))
        return mi if mi > 0.0 else 0.0


def pmf_from_table(values, roles) -> JointPMF:
    """Validate and wrap a probability table.

    Raises ShapeMismatch, NegativeMass or MassNotOne.
    """
    return JointPMF(values, roles)


def marginalize(p: JointPMF, keep) -> JointPMF:
    return p.marginal(keep)


def entropy(p: JointPMF, targets, given=()) -> float:
    """Conditional entropy ``H(targets | given)`` in bits."""
    return p.entropy(targets, given)


def mutual_information(p: JointPMF, a, b, given=()) -> float:
    """Conditional mutual information ``I(a; b | given)`` in bits, clamped at 0."""
    return p.mutual_information(a, b, given)


def product(*pmfs: JointPMF) -> JointPMF:
    """Independent product of PMFs over disjoint role sets."""
    roles: tuple[RoleTag, ...] = ()
    vals = np.ones(())
    for p in pmfs:
        if set(p.roles) & set(roles):
            raise RoleCollision("product of PMFs with shared roles")
        vals = np.multiply.outer(vals, p.values)
        roles = roles + p.roles
    return JointPMF(vals, roles, _trusted=True)


def uniform(roles, cards: Sequence[int]) -> JointPMF:
    cards = tuple(int(c) for c in cards)
    return JointPMF(np.full(cards, 1.0 / np.prod(cards)), roles)


def point_mass(roles, cards: Sequence[int], index: Sequence[int]) -> JointPMF:
    vals = np.zeros(tuple(cards))
    vals[tuple(index)] = 1.0
    return JointPMF(vals, roles)


def uniform_on(card: int, support: Iterable[int], role) -> JointPMF:
    support = list(support)
    vals = np.zeros(card)
    vals[support] = 1.0 / len(support)
    return JointPMF(vals, (role,))


def compose_with_channel(p: JointPMF, ch) -> JointPMF:
    """Attach channel outputs: returns the joint of ``p``'s axes with Y1, Y2.

    ``ch`` is a :class:`cifc.channel.CifcChannel`.
    """
    for r in (RoleTag.Y1, RoleTag.Y2):
        if r in p.roles:
            raise RoleCollision(f"input PMF already carries {r}")
    i1, i2 = p.axis(RoleTag.X1), p.axis(RoleTag.X2)
    if (p.shape[i1], p.shape[i2]) != (ch.card_x1, ch.card_x2):
        raise AlphabetMismatch(
            f"input alphabets {p.shape[i1]}x{p.shape[i2]} do not match channel "
            f"{ch.card_x1}x{ch.card_x2}")
    letters = "abcdefghijklmnopqrstuvw"
    src = letters[: len(p.roles)]
    ker = src[i1] + src[i2] + "yz"
    vals = np.einsum(f"{src},{ker}->{src}yz", p.values, ch.kernel)
    return JointPMF(vals, p.roles + (RoleTag.Y1, RoleTag.Y2), _trusted=True)
