"""Random distributions with a prescribed conditional structure.

A structure is a list of ``(targets, given)`` factors over roles; sampling
draws every conditional row from a flat Dirichlet, so the joint satisfies the
structure's conditional independences exactly.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .bounds import RTD_ROLES, Factorization
from .errors import UnknownRole
from .prob import JointPMF, RoleTag as R, as_roles

Factor = tuple[tuple[R, ...], tuple[R, ...]]


def chain(roles: Sequence[R]) -> list[Factor]:
    """Chain-rule factors: any joint over ``roles``."""
    roles = as_roles(roles)
    return [((r,), roles[:i]) for i, r in enumerate(roles)]


STRUCTURES: dict[Factorization, list[Factor]] = {
    Factorization.GENERIC: chain((R.X1, R.X2)),
    Factorization.WU: chain((R.U, R.X1, R.X2)),
    Factorization.BC: [((R.U1,), ()), ((R.U2,), ()), ((R.V,), (R.U1, R.U2)),
                       ((R.X2,), (R.U2, R.V)), ((R.X1,), (R.U1, R.U2, R.V))],
    Factorization.RTD: chain(RTD_ROLES),
    Factorization.DMT: [((R.U2c,), ()), ((R.X2,), (R.U2c,)), ((R.U1c,), (R.X2,)),
                        ((R.U1pb,), (R.X2,)), ((R.X1,), (R.X2, R.U1c, R.U1pb))],
    Factorization.JIANG: [((R.U1c,), ()), ((R.U2c,), ()), ((R.X2,), (R.U2c,)),
                          ((R.U1pb,), (R.U1c, R.U2c, R.X2)),
                          ((R.U2pb,), (R.U1c, R.U2c, R.X2, R.U1pb)),
                          ((R.X1,), (R.U2c, R.X2, R.U1c, R.U1pb, R.U2pb))],
}
# CC is RTD with X2 a function of U2c; see ``random_assignment``.
STRUCTURES[Factorization.CC] = chain(RTD_ROLES)


def default_cards(kind: Factorization, n1: int, n2: int) -> dict[R, int]:
    """Alphabet sizes used when none are given."""
    kind = Factorization(kind)
    base = {R.X1: n1, R.X2: n2}
    extra = {
        Factorization.GENERIC: {},
        Factorization.WU: {R.U: n1 * n2},
        Factorization.BC: {R.U1: n1, R.U2: n2, R.V: n1 * n2},
    }.get(kind, {R.U1c: n1, R.U1pb: n1, R.U2pb: n1, R.U2c: n2})
    if kind is Factorization.DMT:
        extra = {R.U1c: n1, R.U1pb: n1, R.U2c: n2}
    return {**extra, **base}


def factor_shapes(factors: Sequence[Factor], cards: dict[R, int]) -> list[tuple[int, ...]]:
    """Shape of each conditional table: given axes then target axes."""
    try:
        return [tuple(cards[g] for g in given) + tuple(cards[t] for t in targets)
                for targets, given in factors]
    except KeyError as e:
        raise UnknownRole(f"no cardinality for role {e.args[0]}") from None


def sample_tables(factors, cards, rng: np.random.Generator, alpha: float = 1.0) -> list[np.ndarray]:
    out = []
    for (targets, given), shape in zip(factors, factor_shapes(factors, cards)):
        n_t = int(np.prod([cards[t] for t in targets]))
        n_g = int(np.prod([cards[g] for g in given])) if given else 1
        out.append(rng.dirichlet(np.full(n_t, alpha), size=n_g).reshape(shape))
    return out


def joint_from_tables(factors, tables, cards) -> JointPMF:
    """Multiply conditional tables into a joint over all roles in first-seen order."""
    roles: list[R] = []
    for targets, given in factors:
        for r in tuple(given) + tuple(targets):
            if r not in roles:
                roles.append(r)
    letters = {r: chr(ord("a") + i) for i, r in enumerate(roles)}
    terms = ",".join("".join(letters[r] for r in tuple(g) + tuple(t)) for t, g in factors)
    out = "".join(letters[r] for r in roles)
    vals = np.einsum(f"{terms}->{out}", *tables)
    vals = vals / vals.sum()
    return JointPMF(vals, tuple(roles), _trusted=True)


def random_assignment(kind, n1: int, n2: int, rng: np.random.Generator,
                      cards: dict | None = None, alpha: float = 1.0):
    """A random assignment that satisfies ``kind``'s factorization exactly."""
    from .bounds import AuxAssignment

    kind = Factorization(kind)
    cs = default_cards(kind, n1, n2)
    if cards:
        cs.update({R(k) if not isinstance(k, R) else k: int(v) for k, v in cards.items()})
    cs[R.X1], cs[R.X2] = n1, n2
    factors = STRUCTURES[kind]
    if kind is Factorization.CC:
        # X2 is a random function of U2c, onto when alphabets allow
        tables = sample_tables(factors, cs, rng, alpha)
        f = rng.integers(0, n2, size=cs[R.U2c])
        if cs[R.U2c] >= n2:
            f[:n2] = rng.permutation(n2)
        tables[1] = np.eye(n2)[f]
        pmf = joint_from_tables(factors, tables, cs)
    else:
        pmf = joint_from_tables(factors, sample_tables(factors, cs, rng, alpha), cs)
    if kind is Factorization.DMT:
        pmf = JointPMF(pmf.values[..., None], pmf.roles + (R.U2pb,), _trusted=True)
    return AuxAssignment(pmf, kind)
