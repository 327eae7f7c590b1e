"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 evaluation error, 4 a scheme that is
not zero-error.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bounds as B
from .channel import CifcChannel, builtin, load_channel
from .errors import CifcError, InputError, ParseError, SchemaViolation
from .polytope import fmt, frontier_csv
from .prob import JointPMF, RoleTag as R, pmf_from_table
from .regime import classify_regime
from .schemes import SCHEMES, scheme_from_csv, table_to_csv, emit_table, verify_zero_error
from .search import BoundKind, search_frontier, thread_count

EXIT_OK, EXIT_INPUT, EXIT_EVAL, EXIT_VERIFY = 0, 2, 3, 4

BOUND_NAMES = {
    "det": BoundKind.DET,
    "semidet": BoundKind.SEMIDET,
    "wu_outer": BoundKind.WU_OUTER,
    "bc_outer": BoundKind.BC_OUTER,
    "marginal_outer": BoundKind.MARGINAL_OUTER,
    "rtd_inner": BoundKind.RTD_INNER,
    "better_cognitive": BoundKind.BETTER_COGNITIVE,
}

# the input law of the symmetric clipper's capacity-achieving scheme
EXII = np.array([[1, 1, 1], [1, 1, 1], [1, 0, 0], [1, 0, 0]]) / 8.0


@dataclass
class RunConfig:
    command: str
    channel: str | None = None
    bound: str | None = None
    input: str | None = None
    assignment: str | None = None
    aux_cards: dict = field(default_factory=dict)
    weights: int = 33
    budget: int = 200
    seed: int = 0
    out: str | None = None
    format: str = "json"
    scheme: str | None = None
    binning: str = "JOINT"


class UsageError(InputError):
    pass


# -- argument decoding ---------------------------------------------------------

def resolve_channel(spec: str | None) -> CifcChannel:
    if not spec:
        raise UsageError("--channel is required")
    if spec.startswith("builtin:"):
        return builtin(spec.split(":", 1)[1])
    if not os.path.exists(spec) and not spec.lstrip().startswith("{"):
        raise UsageError(f"channel file {spec!r} not found")
    return load_channel(spec)


def _read_json(text: str):
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None


def _pmf_from_doc(doc) -> JointPMF:
    if not isinstance(doc, dict) or "roles" not in doc or "values" not in doc:
        raise SchemaViolation('a PMF document needs "roles" and "values"')
    return pmf_from_table(doc["values"], doc["roles"])


def resolve_input(spec: str | None, ch: CifcChannel) -> JointPMF:
    """``uniform:AxB``, ``table:exII``, ``pointmass:i,j`` or a JSON PMF."""
    n1, n2 = ch.card_x1, ch.card_x2
    if spec is None:
        spec = f"uniform:{n1}x{n2}"
    m = re.fullmatch(r"uniform:(\d+)x(\d+)", spec)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if a < 1 or b < 1 or a > n1 or b > n2:
            raise UsageError(f"uniform support {a}x{b} does not fit inputs {n1}x{n2}")
        v = np.zeros((n1, n2))
        v[:a, :b] = 1.0 / (a * b)
        return JointPMF(v, (R.X1, R.X2))
    if spec == "table:exII":
        if (n1, n2) != EXII.shape:
            raise UsageError("table:exII needs a 4x3 input alphabet")
        return JointPMF(EXII, (R.X1, R.X2))
    m = re.fullmatch(r"pointmass:(\d+),(\d+)", spec)
    if m:
        i, j = int(m.group(1)), int(m.group(2))
        if i >= n1 or j >= n2:
            raise UsageError("point mass outside the input alphabets")
        v = np.zeros((n1, n2))
        v[i, j] = 1.0
        return JointPMF(v, (R.X1, R.X2))
    if spec.startswith(("uniform:", "table:", "pointmass:")):
        raise UsageError(f"unrecognised input shorthand {spec!r}")
    return _pmf_from_doc(_read_json(spec))


AUX_ROLES = {
    B.Factorization.GENERIC: (),
    B.Factorization.WU: (R.U,),
    B.Factorization.BC: (R.U1, R.U2, R.V),
    B.Factorization.RTD: (R.U2c, R.U1c, R.U1pb, R.U2pb),
}


def _embed(p_in: JointPMF, ch: CifcChannel, roles, rules: dict) -> JointPMF:
    """Attach auxiliaries as functions of the inputs (``const`` by default)."""
    n1, n2 = ch.card_x1, ch.card_x2
    a, b = np.indices((n1, n2))
    table = {"const": np.zeros_like(a), "x1": a, "x2": b, "x1x2": a * n2 + b}
    maps = ch.maps()
    if maps is not None:
        table["y1"] = maps.f1
        if maps.f2 is not None:
            table["y2"] = maps.f2
    p = p_in.marginal((R.X1, R.X2)).transpose((R.X1, R.X2))
    for role in roles:
        rule = rules.get(role.value, "const")
        if rule not in table:
            raise UsageError(f"unknown embedding {rule!r} for {role}")
        f = table[rule]
        p = p.with_function(role, (R.X1, R.X2), f, int(f.max()) + 1)
    return p


def resolve_assignment(cfg: RunConfig, ch: CifcChannel, kind: B.Factorization) -> B.AuxAssignment:
    """JSON PMF over auxiliaries and inputs, or ``embed:ROLE=RULE,...`` on top of --input."""
    spec = cfg.assignment
    if spec and not spec.startswith("embed:"):
        doc = _read_json(spec)
        pmf = _pmf_from_doc(doc)
        tag = doc.get("factorization", kind.value) if isinstance(doc, dict) else kind.value
        a = B.AuxAssignment(pmf, tag)
        return B.as_assignment(a, kind)
    rules = {}
    if spec:
        for part in filter(None, spec[len("embed:"):].split(",")):
            if "=" not in part:
                raise UsageError(f"bad embedding {part!r}; expected ROLE=RULE")
            k, v = part.split("=", 1)
            rules[k.strip()] = v.strip()
    p_in = resolve_input(cfg.input, ch)
    return B.AuxAssignment(_embed(p_in, ch, AUX_ROLES[kind], rules), kind)


def parse_cards(items) -> dict:
    out = {}
    for item in items or ():
        for part in filter(None, item.split(",")):
            if "=" not in part:
                raise UsageError(f"bad cardinality {part!r}; expected ROLE=N")
            k, v = part.split("=", 1)
            try:
                n = int(v)
            except ValueError:
                raise UsageError(f"cardinality for {k} is not an integer") from None
            if n < 1:
                raise UsageError(f"cardinality for {k} must be >= 1")
            k = k.strip()
            if k not in R._value2member_map_:
                raise UsageError(f"unknown role {k!r} in --aux-cards")
            out[k] = n
    return out


# -- commands ------------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def evaluate(cfg: RunConfig, ch: CifcChannel):
    kind = BOUND_NAMES.get(cfg.bound or "")
    if kind is None:
        raise UsageError(f"--bound must be one of {sorted(BOUND_NAMES)}")
    if kind is BoundKind.DET:
        return B.capacity_det(ch, resolve_input(cfg.input, ch))
    if kind is BoundKind.MARGINAL_OUTER:
        return B.outer_bound_marginal(ch, resolve_input(cfg.input, ch))
    fac = {BoundKind.BC_OUTER: B.Factorization.BC,
           BoundKind.RTD_INNER: B.Factorization.RTD}.get(kind, B.Factorization.WU)
    a = resolve_assignment(cfg, ch, fac)
    if kind is BoundKind.RTD_INNER:
        return B.inner_bound_rtd(ch, a, cfg.binning)
    f = {BoundKind.SEMIDET: B.capacity_semidet, BoundKind.WU_OUTER: B.outer_bound_wu,
         BoundKind.BC_OUTER: B.outer_bound_bc,
         BoundKind.BETTER_COGNITIVE: B.capacity_better_cognitive}[kind]
    return f(ch, a)


def cmd_eval(cfg: RunConfig) -> int:
    ch = resolve_channel(cfg.channel)
    poly = evaluate(cfg, ch)
    if cfg.format == "csv":
        lines = ["R1,R2"] + [f"{fmt(x):.12g},{fmt(y):.12g}" for x, y in poly.vertices]
        _emit("\n".join(lines) + "\n", cfg.out)
    else:
        doc = {"bound": cfg.bound, "region": poly.to_dict()}
        _emit(json.dumps(doc, indent=1) + "\n", cfg.out)
    return EXIT_OK


def cmd_frontier(cfg: RunConfig) -> int:
    ch = resolve_channel(cfg.channel)
    kind = BOUND_NAMES.get(cfg.bound or "")
    if kind is None:
        raise UsageError(f"--bound must be one of {sorted(BOUND_NAMES)}")
    if cfg.weights < 2:
        raise UsageError("--weights must be at least 2")
    if cfg.budget < 1:
        raise UsageError("--budget must be at least 1")
    pts = search_frontier(ch, kind, aux_cards=cfg.aux_cards, weights=cfg.weights,
                          budget=cfg.budget, seed=cfg.seed, threads=thread_count())
    if cfg.format == "json":
        rows = [{"lambda": fmt(p.lam), "R1": fmt(p.point[0]), "R2": fmt(p.point[1]),
                 "value": fmt(p.value)} for p in pts]
        _emit(json.dumps(rows, indent=1) + "\n", cfg.out)
    else:
        _emit(frontier_csv(pts), cfg.out)
    if cfg.out:
        meta = {"channel": cfg.channel, "bound": cfg.bound, "seed": cfg.seed,
                "budget": cfg.budget, "weights": cfg.weights, "aux_cards": cfg.aux_cards,
                "cardinalities": {r.value: n for r, n in _cards_used(ch, kind, cfg).items()}}
        with open(cfg.out + ".meta.json", "w", encoding="utf-8") as fh:
            fh.write(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


def _cards_used(ch: CifcChannel, kind: BoundKind, cfg: RunConfig) -> dict:
    from .sampling import default_cards
    from .search import SPECS

    cards = default_cards(SPECS[kind].factorization, ch.card_x1, ch.card_x2)
    for k, v in cfg.aux_cards.items():
        if R(k) not in (R.X1, R.X2):
            cards[R(k)] = v
    return dict(sorted(cards.items(), key=lambda kv: kv[0].value))


def cmd_classify(cfg: RunConfig) -> int:
    ch = resolve_channel(cfg.channel)
    if cfg.budget < 1:
        raise UsageError("--budget must be at least 1")
    k = cfg.aux_cards.get("U")
    rep = classify_regime(ch, aux_card=k, budget=cfg.budget, seed=cfg.seed)
    _emit(json.dumps(rep.to_dict(), indent=1) + "\n", cfg.out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if not cfg.scheme:
        raise UsageError("--scheme is required")
    if cfg.scheme in SCHEMES:
        make, default_ch = SCHEMES[cfg.scheme]
        ch = resolve_channel(cfg.channel or f"builtin:{default_ch}")
        s = make()
    else:
        if not os.path.exists(cfg.scheme):
            raise UsageError(f"no built-in scheme or file {cfg.scheme!r}")
        ch = resolve_channel(cfg.channel)
        s = scheme_from_csv(cfg.scheme, ch)
    rep = verify_zero_error(ch, s)
    if cfg.format == "csv":
        _emit(table_to_csv(emit_table(ch, s)), cfg.out)
    else:
        doc = rep.to_dict()
        doc["rates"] = [fmt(r) for r in rep.rates]
        _emit(json.dumps(doc, indent=1) + "\n", cfg.out)
    return EXIT_OK if rep.ok else EXIT_VERIFY


COMMANDS = {"eval": cmd_eval, "frontier": cmd_frontier, "classify": cmd_classify,
            "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cifc", description="Rate regions of cognitive interference channels.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--channel", help="builtin:NAME or a channel JSON file")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--aux-cards", action="append", default=[], metavar="ROLE=N[,ROLE=N]")

    e = sub.add_parser("eval", parents=[common], help="evaluate one bound at one distribution")
    e.add_argument("--bound", required=True, choices=sorted(BOUND_NAMES))
    e.add_argument("--input", help="uniform:AxB, table:exII, pointmass:i,j or a JSON PMF")
    e.add_argument("--assignment", help="JSON PMF with auxiliaries, or embed:ROLE=RULE,...")
    e.add_argument("--binning", choices=("JOINT", "TWO_STEP"), default="JOINT")

    f = sub.add_parser("frontier", parents=[common], help="search the weighted-sum frontier")
    f.add_argument("--bound", required=True, choices=sorted(BOUND_NAMES))
    f.add_argument("--weights", type=int, default=33)

    sub.add_parser("classify", parents=[common], help="look for regime-condition violations")

    v = sub.add_parser("verify", parents=[common], help="check a zero-error scheme")
    v.add_argument("--scheme", required=True, help=f"one of {sorted(SCHEMES)} or a scheme CSV")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    default_budget = 1000 if ns.command == "classify" else 200
    return RunConfig(
        command=ns.command, channel=ns.channel, bound=getattr(ns, "bound", None),
        input=getattr(ns, "input", None), assignment=getattr(ns, "assignment", None),
        aux_cards=parse_cards(ns.aux_cards), weights=getattr(ns, "weights", 33),
        budget=ns.budget if ns.budget is not None else default_budget, seed=ns.seed,
        out=ns.out, format=ns.format or ("csv" if ns.command == "frontier" else "json"),
        scheme=getattr(ns, "scheme", None), binning=getattr(ns, "binning", "JOINT"))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (InputError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except CifcError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
