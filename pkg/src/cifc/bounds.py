"""Single-letter inner bounds, outer bounds and capacity regions.

Every evaluator takes a channel plus a distribution over auxiliary and input
roles and returns the planar region for that one distribution; the union
over distributions is left to :mod:`cifc.search`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .channel import CifcChannel, is_deterministic, is_semideterministic
from .errors import (
    BadCoupling,
    FactorizationMismatch,
    NotDeterministic,
    NotSemiDeterministic,
    UnknownRole,
)
from .polytope import LinearConstraint, RatePolytope2D, RateSystem, eq, ge, le, project_to_r1_r2
from .prob import JointPMF, RoleTag, as_roles, compose_with_channel

R = RoleTag
FACTOR_TOL = 1e-9


class Factorization(str, enum.Enum):
    GENERIC = "GENERIC"
    WU = "WU"
    BC = "BC"
    RTD = "RTD"
    # restricted RTD-type laws used by the region comparisons
    DMT = "DMT"
    CC = "CC"
    JIANG = "JIANG"


class Binning(str, enum.Enum):
    JOINT = "JOINT"
    TWO_STEP = "TWO_STEP"


RTD_ROLES = (R.U2c, R.X2, R.U1c, R.U1pb, R.U2pb, R.X1)

REQUIRED_ROLES = {
    Factorization.GENERIC: (R.X1, R.X2),
    Factorization.WU: (R.U, R.X1, R.X2),
    Factorization.BC: (R.U1, R.U2, R.V, R.X1, R.X2),
    Factorization.RTD: RTD_ROLES,
    Factorization.DMT: (R.U2c, R.X2, R.U1c, R.U1pb, R.X1),
    Factorization.CC: RTD_ROLES,
    Factorization.JIANG: RTD_ROLES,
}

# (targets, given) lists; the product of the conditionals must equal the joint
FACTORS = {
    Factorization.BC: [((R.U1,), ()), ((R.U2,), ()), ((R.V,), (R.U1, R.U2)),
                       ((R.X2,), (R.U2, R.V)), ((R.X1,), (R.U1, R.U2, R.V))],
    Factorization.DMT: [((R.U2c, R.X2), ()), ((R.U1c,), (R.X2,)), ((R.U1pb,), (R.X2,)),
                        ((R.X1,), (R.X2, R.U1c, R.U1pb))],
    Factorization.JIANG: [((R.U1c,), ()), ((R.U2c,), ()), ((R.X2,), (R.U2c,)),
                          ((R.U1pb, R.U2pb), (R.U1c, R.U2c, R.X2)),
                          ((R.X1,), (R.U2c, R.X2, R.U1c, R.U1pb, R.U2pb))],
}


def _cond_table(p: JointPMF, targets, given, order) -> np.ndarray:
    """p(targets | given) broadcast over the axes ``order``; 0 where p(given)=0."""
    def spread(roles):
        roles = set(roles)
        m = p.marginal(roles) if roles else None
        shape = [p.card(r) if r in roles else 1 for r in order]
        if m is None:
            return np.ones(shape)
        return m.transpose([r for r in order if r in roles]).values.reshape(shape)

    num = spread(tuple(targets) + tuple(given))
    den = spread(given)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def factorization_gap(p: JointPMF, factors) -> float:
    """Largest pointwise gap between the joint and the product of conditionals."""
    roles = []
    for t, g in factors:
        for r in tuple(t) + tuple(g):
            if r not in roles:
                roles.append(r)
    order = [r for r in p.roles if r in roles]
    prod = np.ones([p.card(r) for r in order])
    for t, g in factors:
        prod = prod * _cond_table(p, t, g, order)
    joint = p.marginal(order).transpose(order).values
    return float(np.max(np.abs(prod - joint)))


def check_factorization(p: JointPMF, kind: Factorization, tol: float = FACTOR_TOL) -> None:
    kind = Factorization(kind)
    missing = [r.value for r in REQUIRED_ROLES[kind] if r not in p.roles]
    if missing:
        raise FactorizationMismatch(f"{kind.value} assignment lacks roles {missing}")
    if kind in FACTORS:
        gap = factorization_gap(p, FACTORS[kind])
        if gap > tol:
            raise FactorizationMismatch(
                f"distribution does not factor as {kind.value} (gap {gap:.3g})")
    if kind is Factorization.DMT and R.U2pb in p.roles and p.entropy(R.U2pb) > tol:
        raise FactorizationMismatch("DMT assignments need a constant U2pb")
    if kind is Factorization.CC and p.entropy(R.X2, R.U2c) > tol:
        raise FactorizationMismatch("CC assignments need X2 determined by U2c")


@dataclass(frozen=True, eq=False)
class AuxAssignment:
    """Distribution over auxiliary and input roles with a declared factorization.

    The declared factorization is verified on construction.
    """

    pmf: JointPMF
    factorization: Factorization = Factorization.GENERIC

    def __post_init__(self):
        object.__setattr__(self, "factorization", Factorization(self.factorization))
        for r in (R.Y1, R.Y2, R.Y2P):
            if r in self.pmf.roles:
                raise FactorizationMismatch(f"assignment must not carry output role {r}")
        check_factorization(self.pmf, self.factorization)

    @property
    def roles(self):
        return self.pmf.roles

    def input_pmf(self) -> JointPMF:
        return self.pmf.marginal((R.X1, R.X2)).transpose((R.X1, R.X2))

    def joint(self, ch: CifcChannel) -> JointPMF:
        return compose_with_channel(self.pmf, ch)

    def with_constant(self, role) -> "AuxAssignment":
        """Add a constant (cardinality 1) axis for ``role``."""
        (role,) = as_roles(role)
        vals = self.pmf.values[..., None]
        return AuxAssignment(JointPMF(vals, self.pmf.roles + (role,)), self.factorization)

    def to_dict(self) -> dict:
        return {"factorization": self.factorization.value,
                "roles": self.pmf.role_names,
                "values": np.round(self.pmf.values, 15).tolist()}

    def __repr__(self):
        return f"AuxAssignment({self.factorization.value}, {self.pmf!r})"


def as_assignment(a, kind: Factorization) -> AuxAssignment:
    """Accept a JointPMF or an assignment and check it against ``kind``."""
    if isinstance(a, JointPMF):
        return AuxAssignment(a, kind)
    if a.factorization is not kind:
        check_factorization(a.pmf, kind)
    return a


def _input_pmf(p) -> JointPMF:
    if isinstance(p, AuxAssignment):
        return p.input_pmf()
    return p.marginal((R.X1, R.X2)).transpose((R.X1, R.X2))


def _region(rows: Iterable[tuple[dict, float, str]]) -> RatePolytope2D:
    return RatePolytope2D([le(c, b, lab) for c, b, lab in rows]).reduced()


R1, R2, SUM = {"R1": 1}, {"R2": 1}, {"R1": 1, "R2": 1}


# ---------------------------------------------------------------------------
# outer bounds


def outer_bound_wu(ch: CifcChannel, a) -> RatePolytope2D:
    """One-auxiliary outer bound at a single ``p(u, x1, x2)``."""
    a = as_assignment(a, Factorization.WU)
    j = a.joint(ch)
    I = j.mutual_information
    r2 = I((R.X2, R.U), R.Y2)
    return _region([
        (R1, I(R.X1, R.Y1, R.X2), "R1"),
        (R2, r2, "R2"),
        (SUM, r2 + I(R.X1, R.Y1, (R.X2, R.U)), "R1+R2"),
    ])


class CornerPair(NamedTuple):
    point_a: tuple[float, float]
    point_b: tuple[float, float]
    delta: float


def wu_corner_points(ch: CifcChannel, a) -> CornerPair:
    a = as_assignment(a, Factorization.WU)
    j = a.joint(ch)
    I = j.mutual_information
    r1a = I(R.Y1, R.X1, (R.U, R.X2))
    r2a = I(R.Y2, (R.U, R.X2))
    delta = max(r2a - I(R.Y1, R.U, R.X2), 0.0)
    return CornerPair((r1a, r2a), (r1a + r2a - delta, delta), delta)


def outer_bound_weak(ch: CifcChannel, a) -> RatePolytope2D:
    """Simplified outer bound valid under the weak-interference condition."""
    a = as_assignment(a, Factorization.WU)
    I = a.joint(ch).mutual_information
    return _region([(R1, I(R.Y1, R.X1, (R.U, R.X2)), "R1"),
                    (R2, I((R.U, R.X2), R.Y2), "R2")])


def outer_bound_strong(ch: CifcChannel, p_in) -> RatePolytope2D:
    """Simplified outer bound valid under the strong-interference condition."""
    j = compose_with_channel(_input_pmf(p_in), ch)
    I = j.mutual_information
    return _region([(R1, I(R.Y1, R.X1, R.X2), "R1"),
                    (SUM, I(R.Y2, (R.X1, R.X2)), "R1+R2")])


def outer_bound_bc(ch: CifcChannel, a) -> RatePolytope2D:
    """Broadcast-style outer bound with auxiliaries U1, U2, V."""
    a = as_assignment(a, Factorization.BC)
    I = a.joint(ch).mutual_information
    r1 = I((R.V, R.U1), R.Y1)
    r2 = I((R.V, R.U2), R.Y2)
    return _region([
        (R1, r1, "R1"),
        (R2, r2, "R2"),
        (SUM, r1 + I(R.U2, R.Y2, (R.U1, R.V)), "R1+R2 (rx1 first)"),
        (SUM, r2 + I(R.U1, R.Y1, (R.U2, R.V)), "R1+R2 (rx2 first)"),
    ])


class Coupling:
    """Joint law q(y1, y2' | x1, x2) whose marginals are the channel's.

    Stored like a channel kernel, axes ``[x1][x2][y1][y2']``.
    """

    __slots__ = ("q", "name")

    def __init__(self, q, name: str = ""):
        q = np.array(q, dtype=float)
        if q.ndim != 4:
            raise BadCoupling("coupling must be a 4-dimensional table")
        if np.any(q < 0):
            raise BadCoupling("coupling has negative entries")
        q.setflags(write=False)
        self.q = q
        self.name = name

    @classmethod
    def identity(cls, ch: CifcChannel) -> "Coupling":
        """Y2' = Y2: the channel's own joint output law."""
        return cls(ch.kernel, "identity")

    @classmethod
    def product(cls, ch: CifcChannel) -> "Coupling":
        """Y1 and Y2' conditionally independent given the inputs."""
        q = np.einsum("abi,abj->abij", ch.kernel_y1(), ch.kernel_y2())
        return cls(q, "product")

    def mismatch(self, ch: CifcChannel) -> float:
        if self.q.shape != ch.kernel.shape:
            return float("inf")
        d1 = np.abs(self.q.sum(axis=3) - ch.kernel_y1()).max()
        d2 = np.abs(self.q.sum(axis=2) - ch.kernel_y2()).max()
        return float(max(d1, d2))

    def validate(self, ch: CifcChannel, tol: float = FACTOR_TOL) -> None:
        gap = self.mismatch(ch)
        if gap > tol:
            raise BadCoupling(f"coupling {self.name!r} marginals differ from channel by {gap:.3g}")


def coupled_joint(p_in: JointPMF, c: Coupling) -> JointPMF:
    """Joint law of (X1, X2, Y1, Y2') under a coupling."""
    x = _input_pmf(p_in).values
    return JointPMF(np.einsum("ab,abij->abij", x, c.q), (R.X1, R.X2, R.Y1, R.Y2P), _trusted=True)


def coupling_terms(ch: CifcChannel, p_in, couplings: Sequence[Coupling] = (),
                   single: bool = False) -> list[tuple[str, float]]:
    """I(Y1; X1 | Y2', X2) for each coupling considered by the marginal bound."""
    cs = list(couplings)
    if single:
        if len(cs) != 1:
            raise BadCoupling("single-coupling evaluation needs exactly one coupling")
    else:
        cs = [Coupling.identity(ch)] + cs
    out = []
    for i, c in enumerate(cs):
        c.validate(ch)
        j = coupled_joint(p_in, c)
        out.append((c.name or f"coupling{i}", j.mutual_information(R.Y1, R.X1, (R.Y2P, R.X2))))
    return out


def outer_bound_marginal(ch: CifcChannel, p_in, couplings: Sequence[Coupling] = (),
                         single: bool = False) -> RatePolytope2D:
    """Outer bound that needs no auxiliary, via a coupled copy Y2' of Y2.

    The sum rate uses the smallest coupling term (each coupling gives a valid
    bound).  The identity coupling is always included unless ``single`` asks
    for exactly the one supplied coupling.
    """
    p_in = _input_pmf(p_in)
    j = compose_with_channel(p_in, ch)
    I = j.mutual_information
    r2 = I((R.X1, R.X2), R.Y2)
    extra = min(v for _, v in coupling_terms(ch, p_in, couplings, single))
    return _region([
        (R1, I(R.Y1, R.X1, R.X2), "R1"),
        (R2, r2, "R2"),
        (SUM, r2 + extra, "R1+R2"),
    ])


# ---------------------------------------------------------------------------
# capacity results


def capacity_better_cognitive(ch: CifcChannel, a) -> RatePolytope2D:
    """Achievable region of the common-primary / split-cognitive scheme.

    Equals the one-auxiliary outer bound at ``a`` whenever
    ``I(Y1; U, X2) >= I(Y2; U, X2)``.
    """
    a = as_assignment(a, Factorization.WU)
    I = a.joint(ch).mutual_information
    r2 = I(R.Y2, (R.U, R.X2))
    return _region([
        (R1, I(R.Y1, (R.U, R.X1), R.X2), "R1"),
        (R2, r2, "R2"),
        (SUM, r2 + I(R.Y1, R.X1, (R.X2, R.U)), "R1+R2 (rx2)"),
        (SUM, I(R.Y1, (R.X2, R.U, R.X1)), "R1+R2 (rx1)"),
    ])


def better_cognitive_margin(ch: CifcChannel, a) -> float:
    """``I(Y1; U, X2) - I(Y2; U, X2)``; nonnegative when the fourth row is idle."""
    I = as_assignment(a, Factorization.WU).joint(ch).mutual_information
    return I(R.Y1, (R.U, R.X2)) - I(R.Y2, (R.U, R.X2))


def capacity_semidet(ch: CifcChannel, a) -> RatePolytope2D:
    if not is_semideterministic(ch):
        raise NotSemiDeterministic("Y1 is not a deterministic function of the inputs")
    a = as_assignment(a, Factorization.WU)
    j = a.joint(ch)
    r2 = j.mutual_information(R.Y2, (R.U, R.X2))
    return _region([
        (R1, j.entropy(R.Y1, R.X2), "R1"),
        (R2, r2, "R2"),
        (SUM, r2 + j.entropy(R.Y1, (R.U, R.X2)), "R1+R2"),
    ])


def capacity_det(ch: CifcChannel, p_in) -> RatePolytope2D:
    if not is_deterministic(ch):
        raise NotDeterministic("both outputs must be deterministic functions of the inputs")
    j = compose_with_channel(_input_pmf(p_in), ch)
    h2 = j.entropy(R.Y2)
    return _region([
        (R1, j.entropy(R.Y1, R.X2), "R1"),
        (R2, h2, "R2"),
        (SUM, h2 + j.entropy(R.Y1, (R.Y2, R.X2)), "R1+R2"),
    ])


class SubRegions(NamedTuple):
    r0: RatePolytope2D
    r1: RatePolytope2D
    r2: RatePolytope2D


def semidet_terms(ch: CifcChannel, pmf: JointPMF) -> dict[str, float]:
    for r in (R.U1pb, R.U2pb, R.X1, R.X2):
        if r not in pmf.roles:
            raise UnknownRole(f"sub-region evaluation needs role {r}")
    j = compose_with_channel(pmf, ch)
    I = j.mutual_information
    return {
        "private1": I(R.Y1, R.U1pb) - I(R.U1pb, R.X2),
        "gap": I(R.Y2, R.U2pb, R.X2) - I(R.U1pb, R.U2pb, R.X2),
        "r2": I(R.Y2, (R.U2pb, R.X2)),
        "sum": I(R.Y2, (R.U2pb, R.X2)) + I(R.Y1, R.U1pb) - I(R.U1pb, (R.U2pb, R.X2)),
        "r2_plain": I(R.Y2, R.X2),
    }


def semidet_sub_regions(ch: CifcChannel, a) -> SubRegions:
    """The 4-row, 3-row and 2-row regions of the private-only scheme.

    ``r0`` carries the extra cognitive-rate row that depends on how much of
    U2pb receiver 2 can resolve, ``r1`` drops it, ``r2`` sets U2pb := X2.
    """
    if not is_semideterministic(ch):
        raise NotSemiDeterministic("Y1 is not a deterministic function of the inputs")
    pmf = a.pmf if isinstance(a, AuxAssignment) else a
    t = semidet_terms(ch, pmf)
    a1 = t["private1"]
    r1_rows = [(R1, a1, "R1"), (R2, t["r2"], "R2"), (SUM, t["sum"], "R1+R2")]
    r0_rows = r1_rows[:1] + [(R1, t["gap"] + a1, "R1 (rx2 resolves U2pb)")] + r1_rows[1:]
    r2_rows = [(R1, a1, "R1"), (R2, t["r2_plain"], "R2")]
    return SubRegions(_region(r0_rows), _region(r1_rows), _region(r2_rows))


# ---------------------------------------------------------------------------
# the rate-split / binning inner bound

BINNING_RATES = ("R1cP", "R1pbP", "R2pbP")
SPLIT_RATES = ("R1c", "R1pb", "R2c", "R2pa", "R2pb")

# rows that may be omitted when every rate of the group is zero
DROPPABLE = {
    "d": {"R2c", "R2pa", "R2pb", "R2pbP"},
    "e": {"R2pa", "R2pb", "R2pbP"},
    "g": {"R2pb", "R2pbP"},
    "i": {"R1c", "R1cP", "R1pb", "R1pbP"},
}


def rtd_terms(ch: CifcChannel, a) -> dict[str, float]:
    """Right-hand sides of the eleven rows (without the binning offset)."""
    a = as_assignment(a, Factorization.RTD) if not isinstance(a, AuxAssignment) else a
    pmf = a.pmf
    if a.factorization is Factorization.DMT and R.U2pb not in pmf.roles:
        pmf = a.with_constant(R.U2pb).pmf
    missing = [r.value for r in RTD_ROLES if r not in pmf.roles]
    if missing:
        raise FactorizationMismatch(f"rate-split assignment lacks roles {missing}")
    j = compose_with_channel(pmf, ch)
    I = j.mutual_information
    c, c2, pb1, pb2, x2 = R.U1c, R.U2c, R.U1pb, R.U2pb, R.X2
    return {
        "I0": I(c, x2, c2),
        "b": I(pb1, x2, (c, c2)),
        "c": I(pb1, (x2, pb2), (c, c2)),
        "d": I(R.Y2, (pb2, c, x2, c2)),
        "e": I(R.Y2, (pb2, c, x2), c2),
        "f": I(R.Y2, (pb2, x2), (c, c2)),
        "g": I(R.Y2, (pb2, c), (x2, c2)),
        "h": I(R.Y2, pb2, (c, x2, c2)),
        "i": I(R.Y1, (pb1, c, c2)),
        "j": I(R.Y1, (pb1, c), c2),
        "k": I(R.Y1, pb1, (c, c2)),
    }


def rtd_rate_system(ch: CifcChannel, a, binning: Binning = Binning.JOINT,
                    zero_rates: Iterable[str] = ()) -> RateSystem:
    """The eleven-row rate system over split and binning rates.

    Rates listed in ``zero_rates`` are fixed to zero; a droppable row is
    omitted only when its whole rate group is in ``zero_rates``.
    """
    t = rtd_terms(ch, a)
    return rate_system_from_terms(t, binning, zero_rates)


def rate_system_from_terms(t: dict[str, float], binning: Binning = Binning.JOINT,
                           zero_rates: Iterable[str] = ()) -> RateSystem:
    binning = Binning(binning)
    zero = set(zero_rates)
    i0 = t["I0"]
    rows: list[LinearConstraint] = []
    if binning is Binning.JOINT:
        rows += [
            eq({"R1cP": 1}, i0, "a"),
            ge({"R1cP": 1, "R1pbP": 1}, t["b"] + i0, "b"),
            ge({"R1cP": 1, "R1pbP": 1, "R2pbP": 1}, t["c"] + i0, "c"),
        ]
    else:
        rows += [
            ge({"R1cP": 1}, i0, "a'"),
            ge({"R1pbP": 1}, t["b"], "b'"),
            ge({"R1pbP": 1, "R2pbP": 1}, t["c"], "c'"),
        ]
    one = lambda *names: {n: 1 for n in names}
    body = {
        "d": (one("R2c", "R2pa", "R1c", "R1cP", "R2pb", "R2pbP"), t["d"] + i0),
        "e": (one("R2pa", "R1c", "R1cP", "R2pb", "R2pbP"), t["e"] + i0),
        "f": (one("R2pa", "R2pb", "R2pbP"), t["f"] + i0),
        "g": (one("R1c", "R1cP", "R2pb", "R2pbP"), t["g"] + i0),
        "h": (one("R2pb", "R2pbP"), t["h"]),
        "i": (one("R2c", "R1c", "R1cP", "R1pb", "R1pbP"), t["i"]),
        "j": (one("R1c", "R1cP", "R1pb", "R1pbP"), t["j"]),
        "k": (one("R1pb", "R1pbP"), t["k"]),
    }
    for lab, (co, rhs) in body.items():
        if lab in DROPPABLE and DROPPABLE[lab] <= zero:
            continue
        rows.append(le(co, rhs, lab))
    sys = RateSystem(rows)
    return sys.substitute_zero(zero) if zero else sys


def inner_bound_rtd(ch: CifcChannel, a, binning: Binning = Binning.JOINT,
                    zero_rates: Iterable[str] = ()) -> RatePolytope2D:
    """Rate-split, superposition and binning inner bound at one distribution."""
    return project_to_r1_r2(rtd_rate_system(ch, a, binning, zero_rates))


BETTER_COGNITIVE_ZERO = ("R2pa", "R2pb", "R1cP", "R1pbP", "R2pbP")


def better_cognitive_rtd_assignment(a) -> AuxAssignment:
    """Embed ``p(u, x1, x2)`` as U1c = U, U1pb = X1, U2c = U2pb = X2."""
    a = as_assignment(a, Factorization.WU)
    p = a.pmf.marginal((R.U, R.X1, R.X2)).transpose((R.U, R.X1, R.X2))
    n1, n2 = p.card(R.X1), p.card(R.X2)
    p = p.rename({R.U: R.U1c})
    p = p.with_function(R.U1pb, (R.X1,), np.arange(n1), n1)
    p = p.with_function(R.U2c, (R.X2,), np.arange(n2), n2)
    p = p.with_function(R.U2pb, (R.X2,), np.arange(n2), n2)
    return AuxAssignment(p, Factorization.RTD)


def inner_bound_better_cognitive(ch: CifcChannel, a) -> RatePolytope2D:
    """The inner bound specialised to the better-cognitive-decoding embedding."""
    return inner_bound_rtd(ch, better_cognitive_rtd_assignment(a), Binning.JOINT,
                           BETTER_COGNITIVE_ZERO)
