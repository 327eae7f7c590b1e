"""Linear rate systems, Fourier-Motzkin projection and planar rate regions.

Coefficients are exact integers (rows are scaled to clear denominators and
divided by their gcd); only right-hand sides are floating point.  Every rate
variable is implicitly nonnegative.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, Unbounded, UnknownVariable

RATE_VARIABLES = ("R1", "R2", "R1c", "R1pb", "R2c", "R2pa", "R2pb", "R1cP", "R1pbP", "R2pbP")
_INDEX = {v: i for i, v in enumerate(RATE_VARIABLES)}
NVAR = len(RATE_VARIABLES)

SENSES = ("<=", ">=", "=")
FEAS_TOL = 1e-9
ZERO_TOL = 1e-12
BIG = 1e9

# split rates that recombine into the two user rates
SPLIT = {"R1": ("R1c", "R1pb"), "R2": ("R2c", "R2pa", "R2pb")}


def _check_var(name: str) -> str:
    if name not in _INDEX:
        raise UnknownVariable(f"unknown rate variable {name!r}")
    return name


def fmt(x: float) -> float:
    """Round to 12 significant digits (the package-wide output precision)."""
    x = float(f"{x:.12g}")
    return 0.0 if x == 0 else x


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeffs[v] * v)  sense  rhs`` over named rate variables."""

    coeffs: Mapping[str, Fraction]
    sense: str
    rhs: float
    label: str = ""

    def __post_init__(self):
        if self.sense not in SENSES:
            raise InputError(f"sense must be one of {SENSES}, got {self.sense!r}")
        clean = {}
        for v, c in dict(self.coeffs).items():
            _check_var(v)
            c = Fraction(c)
            if c != 0:
                clean[v] = c
        if not clean:
            raise InputError("constraint needs at least one nonzero coefficient")
        ordered = {v: clean[v] for v in RATE_VARIABLES if v in clean}
        object.__setattr__(self, "coeffs", ordered)
        object.__setattr__(self, "rhs", float(self.rhs))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self.coeffs)

    def lhs(self, point: Mapping[str, float]) -> float:
        return float(sum(float(c) * point.get(v, 0.0) for v, c in self.coeffs.items()))

    def slack(self, point: Mapping[str, float]) -> float:
        """Signed slack; negative means violated (for ``=`` the negative distance)."""
        d = self.lhs(point)
        if self.sense == "<=":
            return self.rhs - d
        if self.sense == ">=":
            return d - self.rhs
        return -abs(d - self.rhs)

    def as_le(self) -> list["LinearConstraint"]:
        """Equivalent list of ``<=`` constraints."""
        neg = {v: -c for v, c in self.coeffs.items()}
        if self.sense == "<=":
            return [self]
        if self.sense == ">=":
            return [LinearConstraint(neg, "<=", -self.rhs, self.label)]
        return [LinearConstraint(self.coeffs, "<=", self.rhs, self.label),
                LinearConstraint(neg, "<=", -self.rhs, self.label)]

    def to_dict(self) -> dict:
        co = {v: (int(c) if c.denominator == 1 else float(c)) for v, c in self.coeffs.items()}
        return {"coeffs": co, "sense": self.sense, "rhs": fmt(self.rhs)}

    def __str__(self):
        terms = []
        for v, c in self.coeffs.items():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            terms.append(f"{sign} {'' if mag == 1 else str(mag) + '*'}{v}")
        s = " ".join(terms).lstrip("+ ")
        return f"{s} {self.sense} {self.rhs:.12g}"


def le(coeffs, rhs, label="") -> LinearConstraint:
    return LinearConstraint(coeffs, "<=", rhs, label)


def ge(coeffs, rhs, label="") -> LinearConstraint:
    return LinearConstraint(coeffs, ">=", rhs, label)


def eq(coeffs, rhs, label="") -> LinearConstraint:
    return LinearConstraint(coeffs, "=", rhs, label)


@dataclass(frozen=True)
class RateSystem:
    """Conjunction of linear constraints over nonnegative rate variables.

    ``infeasible`` marks a system already known to be empty (for instance
    after elimination produced ``0 <= negative``).
    """

    constraints: tuple[LinearConstraint, ...]
    nonneg: bool = True
    infeasible: bool = False

    def __init__(self, constraints: Iterable[LinearConstraint] = (), nonneg=True, infeasible=False):
        object.__setattr__(self, "constraints", tuple(constraints))
        object.__setattr__(self, "nonneg", bool(nonneg))
        object.__setattr__(self, "infeasible", bool(infeasible))

    @property
    def variables(self) -> tuple[str, ...]:
        used = {v for c in self.constraints for v in c.coeffs}
        return tuple(v for v in RATE_VARIABLES if v in used)

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def satisfied(self, point: Mapping[str, float], tol: float = FEAS_TOL) -> bool:
        if self.infeasible:
            return False
        if self.nonneg and any(point.get(v, 0.0) < -tol for v in self.variables):
            return False
        return all(c.slack(point) >= -tol for c in self.constraints)

    def with_constraints(self, extra: Iterable[LinearConstraint]) -> "RateSystem":
        return RateSystem(self.constraints + tuple(extra), self.nonneg, self.infeasible)

    def substitute_zero(self, names: Iterable[str]) -> "RateSystem":
        """Fix the named rates to zero by deleting their columns."""
        names = {_check_var(n) for n in names}
        out = []
        for c in self.constraints:
            co = {v: a for v, a in c.coeffs.items() if v not in names}
            if co:
                out.append(LinearConstraint(co, c.sense, c.rhs, c.label))
            elif c.slack({}) < -ZERO_TOL:
                return RateSystem(out, self.nonneg, infeasible=True)
        return RateSystem(out, self.nonneg, self.infeasible)

    def __str__(self):
        if self.infeasible:
            return "<infeasible>"
        return "\n".join(f"{c}    [{c.label}]" if c.label else str(c) for c in self.constraints)


# ---------------------------------------------------------------------------
# Fourier-Motzkin elimination on integer rows


@dataclass(frozen=True)
class _Row:
    a: tuple[int, ...]
    b: float
    hist: frozenset = field(default_factory=frozenset)


def _normalize(a: Sequence[int], b: float, hist) -> _Row:
    g = 0
    for x in a:
        g = math.gcd(g, x)
    if g > 1:
        a = tuple(x // g for x in a)
        b = b / g
    return _Row(tuple(a), b, hist)


def _to_rows(sys: RateSystem) -> tuple[list[_Row], list[str]]:
    rows, labels = [], []
    for c in sys.constraints:
        for le_c in c.as_le():
            den = 1
            for q in le_c.coeffs.values():
                den = den * q.denominator // math.gcd(den, q.denominator)
            a = [0] * NVAR
            for v, q in le_c.coeffs.items():
                a[_INDEX[v]] = int(q * den)
            rows.append(_normalize(a, le_c.rhs * den, frozenset([len(labels)])))
            labels.append(le_c.label)
    return rows, labels


def _combine_label(hist, labels) -> str:
    parts = [labels[i] for i in sorted(hist) if 0 <= i < len(labels) and labels[i]]
    return "+".join(parts)


def _from_rows(rows: list[_Row], labels, nonneg: bool) -> RateSystem:
    out = []
    for r in rows:
        co = {RATE_VARIABLES[i]: x for i, x in enumerate(r.a) if x}
        out.append(LinearConstraint(co, "<=", r.b, _combine_label(r.hist, labels)))
    return RateSystem(out, nonneg)


def _tidy(rows: Iterable[_Row], nonneg: bool) -> tuple[list[_Row], bool]:
    """Deduplicate rows and drop trivial ones; returns (rows, feasible)."""
    best: dict[tuple, _Row] = {}
    for r in rows:
        if not any(r.a):
            if r.b < -ZERO_TOL:
                return [], False
            continue
        if nonneg and r.b >= -ZERO_TOL and all(x <= 0 for x in r.a):
            continue  # implied by nonnegativity
        old = best.get(r.a)
        if old is None or r.b < old.b or (r.b == old.b and len(r.hist) < len(old.hist)):
            best[r.a] = r
    return list(best.values()), True


def _eliminate_rows(rows: list[_Row], k: int, nonneg: bool, n_done: int,
                    chernikov: bool) -> tuple[list[_Row], bool]:
    if nonneg:
        a = [0] * NVAR
        a[k] = -1
        # the nonnegativity row gets its own history slot
        rows = rows + [_Row(tuple(a), 0.0, frozenset([-1 - k]))]
    pos = [r for r in rows if r.a[k] > 0]
    neg = [r for r in rows if r.a[k] < 0]
    out = [r for r in rows if r.a[k] == 0]
    limit = n_done + 2
    for p in pos:
        for n in neg:
            hist = p.hist | n.hist
            if chernikov and len(hist) > limit:
                continue
            cp, cn = -n.a[k], p.a[k]
            a = tuple(cp * x + cn * y for x, y in zip(p.a, n.a))
            out.append(_normalize(a, cp * p.b + cn * n.b, hist))
    return _tidy(out, nonneg)


def _order_key(rows, k):
    p = sum(1 for r in rows if r.a[k] > 0)
    n = sum(1 for r in rows if r.a[k] < 0)
    return p * n - p - n


def eliminate_many(sys: RateSystem, names: Iterable[str], *, greedy: bool = True,
                   chernikov: bool = True) -> RateSystem:
    """Project out several variables.

    With ``greedy`` the next variable is the one producing the fewest new
    rows; otherwise ``names`` are processed in the given order.
    """
    todo = [_check_var(n) for n in names]
    if sys.infeasible:
        return sys
    rows, labels = _to_rows(sys)
    rows, ok = _tidy(rows, sys.nonneg)
    if not ok:
        return RateSystem((), sys.nonneg, infeasible=True)
    done = 0
    todo = list(dict.fromkeys(todo))
    while todo:
        if greedy:
            todo.sort(key=lambda v: (_order_key(rows, _INDEX[v]), _INDEX[v]))
        k = _INDEX[todo.pop(0)]
        rows, ok = _eliminate_rows(rows, k, sys.nonneg, done, chernikov)
        if not ok:
            return RateSystem((), sys.nonneg, infeasible=True)
        done += 1
    rows.sort(key=lambda r: (sorted(r.hist), r.a))
    return _from_rows(rows, labels, sys.nonneg)


def fme_eliminate(sys: RateSystem, var: str) -> RateSystem:
    """Exact projection of ``sys`` onto the remaining variables."""
    _check_var(var)
    if var not in sys.variables:
        raise UnknownVariable(f"{var} does not appear in the system")
    return eliminate_many(sys, [var], greedy=False)


# ---------------------------------------------------------------------------
# redundancy


def _polygon_vertices(rows: Sequence[tuple[float, float, float]], tol=FEAS_TOL,
                      box: float | None = BIG) -> list[tuple[float, float]]:
    """Vertices of ``{a1 x + a2 y <= b} ∩ {x, y >= 0}`` (optionally boxed)."""
    lines = list(rows) + [(-1.0, 0.0, 0.0), (0.0, -1.0, 0.0)]
    if box is not None:
        lines += [(1.0, 0.0, box), (0.0, 1.0, box)]
    pts = []
    n = len(lines)
    for i in range(n):
        a1, a2, b = lines[i]
        for j in range(i + 1, n):
            c1, c2, d = lines[j]
            det = a1 * c2 - a2 * c1
            if det == 0:
                continue
            x = (b * c2 - a2 * d) / det
            y = (a1 * d - b * c1) / det
            if all(p * x + q * y <= r + tol * max(1.0, abs(r)) for p, q, r in lines):
                pts.append((x + 0.0, y + 0.0))
    return _dedupe(pts)


def _dedupe(pts, tol=FEAS_TOL):
    out: list[tuple[float, float]] = []
    for p in sorted(pts):
        if not any(abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol for q in out):
            out.append(p)
    return out


def _ccw(pts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    if len(pts) <= 1:
        return list(pts)
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    ring = sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    start = min(range(len(ring)), key=lambda i: (ring[i][0] + ring[i][1], ring[i][1]))
    return ring[start:] + ring[:start]


def _lp_max(c, A, b, n):
    from scipy.optimize import linprog
    res = linprog(-np.asarray(c, float), A_ub=A if len(A) else None, b_ub=b if len(b) else None,
                  bounds=[(0, BIG)] * n, method="highs")
    if res.status != 0:
        return None
    return -res.fun


def remove_redundant(sys: RateSystem, tol: float = FEAS_TOL) -> RateSystem:
    """Drop constraints implied by the others (and by nonnegativity).

    Each candidate row is maximized over the region cut out by the remaining
    rows; it is redundant when the maximum does not exceed its rhs by more
    than ``tol``.
    """
    if sys.infeasible:
        return sys
    rows: list[LinearConstraint] = []
    for c in sys.constraints:
        rows.extend(c.as_le())
    names = sys.variables
    n = len(names)
    idx = {v: i for i, v in enumerate(names)}

    def vec(c):
        a = np.zeros(n)
        for v, q in c.coeffs.items():
            a[idx[v]] = float(q)
        return a

    keep = list(rows)
    mats = {id(c): vec(c) for c in rows}
    if n <= 2:
        def support(cands, target):
            pad = lambda a: tuple(a) + (0.0,) * (2 - n)
            vs = _polygon_vertices([pad(mats[id(c)]) + (c.rhs,) for c in cands])
            if not vs:
                return None
            t = pad(mats[id(target)])
            return max(t[0] * x + t[1] * y for x, y in vs)
    else:
        def support(cands, target):
            A = np.array([mats[id(c)] for c in cands]).reshape(-1, n)
            b = np.array([c.rhs for c in cands])
            return _lp_max(mats[id(target)], A, b, n)

    # check full feasibility once: an empty system keeps its rows
    if n <= 2 and rows and support(rows, rows[0]) is None:
        return RateSystem(sys.constraints, sys.nonneg, infeasible=True)
    for c in reversed(rows):
        others = [r for r in keep if r is not c]
        m = support(others, c)
        if m is not None and m <= c.rhs + tol:
            keep = others
    return RateSystem(keep, sys.nonneg)


# ---------------------------------------------------------------------------
# planar regions


class RatePolytope2D:
    """Bounded region ``{(R1, R2) >= 0 : constraints}`` with cached vertices."""

    __slots__ = ("constraints", "_vertices", "empty")

    def __init__(self, constraints: Iterable[LinearConstraint] = (), empty: bool = False):
        cons = []
        for c in constraints:
            for v in c.coeffs:
                if v not in ("R1", "R2"):
                    raise UnknownVariable(f"planar region cannot use {v}")
            cons.extend(c.as_le())
        self.constraints: tuple[LinearConstraint, ...] = tuple(cons)
        self.empty = bool(empty)
        self._vertices = None

    @classmethod
    def from_system(cls, sys: RateSystem) -> "RatePolytope2D":
        return cls(sys.constraints, empty=sys.infeasible)

    def _lines(self):
        return [(float(c.coeffs.get("R1", 0)), float(c.coeffs.get("R2", 0)), c.rhs)
                for c in self.constraints]

    @property
    def vertices(self) -> list[tuple[float, float]]:
        if self._vertices is None:
            if self.empty:
                self._vertices = []
            else:
                vs = _polygon_vertices(self._lines())
                if any(max(v) > BIG / 10 for v in vs):
                    raise Unbounded("region is unbounded above")
                self._vertices = _ccw(vs)
                if not self._vertices:
                    self.empty = True
        return list(self._vertices)

    def is_empty(self) -> bool:
        return not self.vertices

    def bounded(self) -> bool:
        try:
            self.vertices
        except Unbounded:
            return False
        return True

    def contains_point(self, r1: float, r2: float, tol: float = FEAS_TOL) -> bool:
        if self.is_empty() or r1 < -tol or r2 < -tol:
            return False
        return all(c.slack({"R1": r1, "R2": r2}) >= -tol for c in self.constraints)

    def support(self, lam: float) -> tuple[float, tuple[float, float]]:
        """Maximum of ``lam*R1 + (1-lam)*R2`` and a first maximizing vertex."""
        best, arg = -math.inf, None
        for v in self.vertices:
            val = lam * v[0] + (1 - lam) * v[1]
            if val > best + 1e-15:
                best, arg = val, v
        return best, arg

    def rhs_of(self, coeffs: Mapping[str, int]) -> float | None:
        """Tightest rhs among rows with exactly these coefficients, if any."""
        want = {v: Fraction(c) for v, c in coeffs.items() if c}
        vals = [c.rhs for c in self.constraints if dict(c.coeffs) == want]
        return min(vals) if vals else None

    def reduced(self) -> "RatePolytope2D":
        if self.empty:
            return RatePolytope2D((), empty=True)
        return RatePolytope2D(remove_redundant(RateSystem(self.constraints)).constraints)

    def to_dict(self) -> dict:
        return {"constraints": [c.to_dict() for c in self.constraints],
                "vertices": [[fmt(x), fmt(y)] for x, y in self.vertices]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def __repr__(self):
        if self.empty:
            return "RatePolytope2D(<empty>)"
        return "RatePolytope2D(" + "; ".join(str(c) for c in self.constraints) + ")"


def box(r1: float, r2: float) -> RatePolytope2D:
    return RatePolytope2D([le({"R1": 1}, r1), le({"R2": 1}, r2)])


def _substitute_splits(sys: RateSystem) -> RateSystem:
    """Rewrite split rates in terms of the user rates R1, R2.

    One split variable per user is replaced by ``R - (other parts)`` and its
    nonnegativity becomes an explicit row.
    """
    cons = list(sys.constraints)
    for total, parts in SPLIT.items():
        present = [p for p in parts if p in sys.variables]
        if not present:
            continue
        pivot = present[0]
        repl = {total: Fraction(1)}
        for p in present[1:]:
            repl[p] = Fraction(-1)
        new = []
        for c in cons:
            a = c.coeffs.get(pivot)
            if a is None:
                new.append(c)
                continue
            co = {v: q for v, q in c.coeffs.items() if v != pivot}
            for v, q in repl.items():
                co[v] = co.get(v, 0) + a * q
            co = {v: q for v, q in co.items() if q != 0}
            if co:
                new.append(LinearConstraint(co, c.sense, c.rhs, c.label))
            elif c.slack({}) < -ZERO_TOL:
                return RateSystem((), sys.nonneg, infeasible=True)
        new.append(LinearConstraint(repl, ">=", 0.0, f"{pivot}>=0"))
        cons = new
    return RateSystem(cons, sys.nonneg, sys.infeasible)


def project_to_r1_r2(sys: RateSystem, *, order: Sequence[str] | None = None) -> RatePolytope2D:
    """Project a split/binning rate system onto the (R1, R2) plane.

    ``order`` fixes the elimination order (default: greedy).
    """
    sub = _substitute_splits(sys)
    if sub.infeasible:
        return RatePolytope2D((), empty=True)
    rest = [v for v in sub.variables if v not in ("R1", "R2")]
    if order is not None:
        order = [v for v in order if v in rest] + [v for v in rest if v not in order]
        proj = eliminate_many(sub, order, greedy=False)
    else:
        proj = eliminate_many(sub, rest)
    if proj.infeasible:
        return RatePolytope2D((), empty=True)
    red = remove_redundant(proj)
    poly = RatePolytope2D(red.constraints, empty=red.infeasible)
    poly.vertices  # raises Unbounded
    return poly


def vertices_2d(poly: RatePolytope2D) -> list[tuple[float, float]]:
    """Counterclockwise vertex list; empty for an empty region."""
    return poly.vertices


def contains(outer: RatePolytope2D, inner: RatePolytope2D, tol: float = FEAS_TOL) -> bool:
    """True iff every vertex of ``inner`` satisfies every row of ``outer``."""
    vin = inner.vertices
    if not vin:
        return True
    if outer.is_empty():
        return False
    return all(outer.contains_point(x, y, tol) for x, y in vin)


def hausdorff(a: RatePolytope2D, b: RatePolytope2D) -> float:
    va, vb = a.vertices, b.vertices
    if not va and not vb:
        return 0.0
    if not va or not vb:
        return math.inf
    A, B = np.array(va), np.array(vb)
    d = np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def regions_equal(a: RatePolytope2D, b: RatePolytope2D, tol: float = FEAS_TOL) -> bool:
    """Vertex sets agree up to ``tol`` in each coordinate."""
    return hausdorff(a, b) <= tol


@dataclass
class FrontierPoint:
    lam: float
    point: tuple[float, float]
    value: float
    source: int = 0
    assignment: object = None
    seed: int | None = None


def union_frontier(polys: Sequence[RatePolytope2D], weights: Sequence[float]) -> list[FrontierPoint]:
    """Weighted-sum frontier of the convex hull of a union of regions.

    Ties between regions go to the earliest one.
    """
    if not polys:
        raise InputError("union_frontier needs at least one region")
    out = []
    for lam in weights:
        lam = float(lam)
        if not 0.0 <= lam <= 1.0:
            raise InputError(f"weight {lam} outside [0, 1]")
        best = FrontierPoint(lam, (0.0, 0.0), -math.inf, -1)
        for i, p in enumerate(polys):
            if p.is_empty():
                continue
            val, arg = p.support(lam)
            if val > best.value + 1e-15:
                best = FrontierPoint(lam, arg, val, i)
        out.append(best)
    return out


def frontier_csv(points: Sequence[FrontierPoint]) -> str:
    lines = ["lambda,R1,R2,value"]
    for fp in points:
        lines.append(",".join(f"{fmt(x):.12g}" for x in (fp.lam, fp.point[0], fp.point[1], fp.value)))
    return "\n".join(lines) + "\n"


def polytope_from_dict(doc: Mapping) -> RatePolytope2D:
    cons = [LinearConstraint(c["coeffs"], c.get("sense", "<="), c["rhs"]) for c in doc["constraints"]]
    return RatePolytope2D(cons)
