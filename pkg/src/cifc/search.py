"""Weighted-sum frontier search over input and auxiliary distributions.

Every bound is a union over distributions of per-distribution regions.  We
approximate the union's frontier from three candidate pools: a deterministic
sweep of structured distributions (small alphabets only), seeded Dirichlet
samples, and coordinate-ascent refinement of the best candidate per weight.

All samples are drawn up front from the seed and evaluated with an ordered
map, so results do not depend on the number of worker threads.
"""
from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import bounds as B
from .bounds import Factorization
from .channel import CifcChannel, is_deterministic, is_semideterministic
from .errors import Unbounded, UnsupportedBound
from .polytope import FrontierPoint, RatePolytope2D
from .prob import JointPMF, RoleTag as R
from .sampling import STRUCTURES, default_cards, joint_from_tables, sample_tables

SWEEP_LIMIT = 4096
STEP_TOL = 1e-7
IMPROVE_TOL = 1e-12
REFINE_CAP = 60


class BoundKind(str, enum.Enum):
    RTD_INNER = "RTD_INNER"
    WU_OUTER = "WU_OUTER"
    BC_OUTER = "BC_OUTER"
    MARGINAL_OUTER = "MARGINAL_OUTER"
    SEMIDET = "SEMIDET"
    DET = "DET"
    BETTER_COGNITIVE = "BETTER_COGNITIVE"


@dataclass(frozen=True)
class BoundSpec:
    factorization: Factorization
    evaluate: Callable[[CifcChannel, JointPMF], RatePolytope2D]
    requires: Callable[[CifcChannel], bool] | None = None


def _trusted(kind: Factorization, f):
    # candidates satisfy their structure by construction; skip re-verification
    def run(ch, pmf):
        a = B.AuxAssignment.__new__(B.AuxAssignment)
        object.__setattr__(a, "pmf", pmf)
        object.__setattr__(a, "factorization", kind)
        return f(ch, a)
    return run


SPECS = {
    BoundKind.DET: BoundSpec(Factorization.GENERIC, B.capacity_det, is_deterministic),
    BoundKind.SEMIDET: BoundSpec(Factorization.WU, _trusted(Factorization.WU, B.capacity_semidet),
                                 is_semideterministic),
    BoundKind.WU_OUTER: BoundSpec(Factorization.WU, _trusted(Factorization.WU, B.outer_bound_wu)),
    BoundKind.BC_OUTER: BoundSpec(Factorization.BC, _trusted(Factorization.BC, B.outer_bound_bc)),
    BoundKind.MARGINAL_OUTER: BoundSpec(Factorization.GENERIC, B.outer_bound_marginal),
    BoundKind.RTD_INNER: BoundSpec(Factorization.RTD, _trusted(Factorization.RTD, B.inner_bound_rtd)),
    BoundKind.BETTER_COGNITIVE: BoundSpec(
        Factorization.WU, _trusted(Factorization.WU, B.capacity_better_cognitive)),
}


def thread_count() -> int:
    env = os.environ.get("CIFC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def weight_grid(n: int) -> list[float]:
    if n < 1:
        raise ValueError("need at least one weight")
    if n == 1:
        return [0.5]
    return [i / (n - 1) for i in range(n)]


# -- deterministic sweep -------------------------------------------------------

def _subsets(n: int):
    for k in range(1, n + 1):
        yield from itertools.combinations(range(n), k)


def _copy_rules(ch: CifcChannel):
    a, b = np.indices((ch.card_x1, ch.card_x2))
    rules = {"const": np.zeros_like(a), "x1": a, "x2": b, "x1x2": a * ch.card_x2 + b}
    m = ch.maps()
    if m is not None and m.f2 is not None:
        rules["y1"], rules["y2"] = m.f1, m.f2
    return rules


# aux role -> copy rule, per bound; every preset keeps the bound's structure
PRESETS = {
    Factorization.GENERIC: [{}],
    Factorization.WU: [{R.U: "const"}, {R.U: "x1"}, {R.U: "x2"}, {R.U: "x1x2"}],
    Factorization.BC: [{R.U1: "x1", R.U2: "x2", R.V: "const"},
                       {R.U1: "const", R.U2: "const", R.V: "x1x2"}],
    Factorization.RTD: [
        {R.U2c: "const", R.U1c: "const", R.U1pb: "const", R.U2pb: "const"},
        {R.U2c: "x2", R.U1c: "const", R.U1pb: "x1", R.U2pb: "x2"},
        {R.U2c: "x2", R.U1c: "x1", R.U1pb: "x1", R.U2pb: "x2"},
        # private layers carry the outputs (deterministic channels only)
        {R.U2c: "const", R.U1c: "const", R.U1pb: "y1", R.U2pb: "y2"},
    ],
}


def _sweep(kind: Factorization, ch: CifcChannel, cards: dict) -> list[JointPMF]:
    n1, n2 = ch.card_x1, ch.card_x2
    rules = _copy_rules(ch)
    presets = [p for p in PRESETS.get(kind, []) if all(r in rules for r in p.values())]
    count = (2 ** n1 - 1) * (2 ** n2 - 1) * len(presets)
    if not presets or count > SWEEP_LIMIT:
        return []
    out = []
    for s1 in _subsets(n1):
        for s2 in _subsets(n2):
            v = np.zeros((n1, n2))
            v[np.ix_(s1, s2)] = 1.0 / (len(s1) * len(s2))
            base = JointPMF(v, (R.X1, R.X2), _trusted=True)
            for preset in presets:
                p = base
                for role, rule in preset.items():
                    k = cards[role]
                    p = p.with_function(role, (R.X1, R.X2), rules[rule] % k, k)
                out.append(p)
    return out


# -- refinement ----------------------------------------------------------------

def tables_from_joint(factors, pmf: JointPMF) -> list[np.ndarray]:
    """Conditional tables of ``pmf`` (uniform rows where the condition has mass 0)."""
    out = []
    for targets, given in factors:
        order = tuple(given) + tuple(targets)
        m = pmf.marginal(order).transpose(order).values
        g_shape = m.shape[: len(given)]
        flat = m.reshape(int(np.prod(g_shape)) if given else 1, -1)
        tot = flat.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            rows = np.where(tot > 0, flat / np.where(tot > 0, tot, 1), 1.0 / flat.shape[1])
        out.append(rows.reshape(m.shape))
    return out


def _value(poly: RatePolytope2D | None, lam: float) -> tuple[float, tuple | None]:
    if poly is None or poly.is_empty():
        return -math.inf, None
    return poly.support(lam)


def _refine(ch, spec: BoundSpec, factors, cards, start: JointPMF, lam: float,
            max_evals: int) -> tuple[float, tuple | None, JointPMF, RatePolytope2D | None]:
    """Cyclic coordinate ascent over the rows of the conditional tables."""
    tables = tables_from_joint(factors, start)
    pmf = start
    poly = _safe_eval(ch, spec, pmf)
    val, arg = _value(poly, lam)
    step, used = 0.5, 1
    while step >= STEP_TOL and used < max_evals:
        improved = False
        for ti, t in enumerate(tables):
            n_given = int(np.prod(t.shape[: len(factors[ti][1])]))
            rows = t.reshape(n_given, -1)
            for r in range(rows.shape[0]):
                for c in range(rows.shape[1]):
                    if used >= max_evals:
                        break
                    new = rows.copy()
                    new[r] = new[r] * (1 - step)
                    new[r, c] += step
                    cand_tables = list(tables)
                    cand_tables[ti] = new.reshape(t.shape)
                    cand = joint_from_tables(factors, cand_tables, cards)
                    cp = _safe_eval(ch, spec, cand)
                    cv, ca = _value(cp, lam)
                    used += 1
                    if cv > val + IMPROVE_TOL:
                        tables, pmf, poly, val, arg = cand_tables, cand, cp, cv, ca
                        rows, t = new, cand_tables[ti]
                        improved = True
        if not improved:
            step /= 2
    return val, arg, pmf, poly


def _safe_eval(ch, spec: BoundSpec, pmf: JointPMF) -> RatePolytope2D | None:
    try:
        return spec.evaluate(ch, pmf)
    except Unbounded:
        return None


# -- driver --------------------------------------------------------------------

def _order_roles(pmf: JointPMF, factors) -> JointPMF:
    roles = []
    for t, g in factors:
        for r in tuple(g) + tuple(t):
            if r not in roles:
                roles.append(r)
    return pmf.transpose(roles)


def search_frontier(ch: CifcChannel, bound, aux_cards: dict | None = None,
                    weights: int | Sequence[float] = 33, budget: int = 200, seed: int = 0,
                    refine_evals: int | None = None, threads: int | None = None,
                    ) -> list[FrontierPoint]:
    """Sample the frontier of ``bound``'s region, one point per weight.

    ``weights`` is a count (evenly spaced in [0, 1]) or explicit values.
    ``budget`` is the number of random samples; ``refine_evals`` caps the
    coordinate-ascent evaluations per weight (default ``min(budget, 60)``).
    """
    kind = BoundKind(bound)
    spec = SPECS[kind]
    if spec.requires is not None and not spec.requires(ch):
        raise UnsupportedBound(f"{kind.value} does not apply to this channel")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    lams = weight_grid(weights) if isinstance(weights, int) else [float(w) for w in weights]
    n1, n2 = ch.card_x1, ch.card_x2
    fac = spec.factorization
    cards = default_cards(fac, n1, n2)
    for k, v in (aux_cards or {}).items():
        role = k if isinstance(k, R) else R(k)
        if role in (R.X1, R.X2):
            continue
        if int(v) < 1:
            raise ValueError(f"cardinality of {role} must be >= 1")
        cards[role] = int(v)
    factors = STRUCTURES[fac]

    rng = np.random.default_rng(seed)
    samples = [joint_from_tables(factors, sample_tables(factors, cards, rng), cards)
               for _ in range(budget)]
    sweep = [_order_roles(p, factors) for p in _sweep(fac, ch, cards)]
    cands = sweep + samples

    workers = threads if threads is not None else thread_count()
    ev = lambda p: _safe_eval(ch, spec, p)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            polys = list(ex.map(ev, cands))
    else:
        polys = [ev(p) for p in cands]

    starts = []
    for lam in lams:
        best_i, best_v, best_a = -1, -math.inf, None
        for i, poly in enumerate(polys):
            v, a = _value(poly, lam)
            if v > best_v + IMPROVE_TOL:
                best_i, best_v, best_a = i, v, a
        starts.append((best_i, best_v, best_a))

    n_ref = min(budget, REFINE_CAP) if refine_evals is None else int(refine_evals)

    def refine(job):
        lam, (i, v, a) = job
        if i < 0 or n_ref <= 1:
            return v, a, (cands[i] if i >= 0 else None)
        rv, ra, rp, _ = _refine(ch, spec, factors, cards, cands[i], lam, n_ref)
        if rv > v + IMPROVE_TOL:
            return rv, ra, rp
        return v, a, cands[i]

    jobs = list(zip(lams, starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            refined = list(ex.map(refine, jobs))
    else:
        refined = [refine(j) for j in jobs]

    out = []
    for lam, (i, _, _), (v, a, p) in zip(lams, starts, refined):
        point = (0.0, 0.0) if a is None else (float(a[0]), float(a[1]))
        assignment = None
        if p is not None:
            assignment = B.AuxAssignment.__new__(B.AuxAssignment)
            object.__setattr__(assignment, "pmf", p)
            object.__setattr__(assignment, "factorization", fac)
        out.append(FrontierPoint(lam, point, float(v) if a is not None else 0.0,
                                 source=i, assignment=assignment, seed=seed))
    return out
