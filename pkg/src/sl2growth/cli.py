"""``sl2growth`` command line: construct, analyze, search, perturb, catalog, verify-all.

Results go to stdout (aligned text, or JSON with ``--json``); logs go to stderr.
Exit codes: 0 success, 1 a claim not reproduced (or a bad input set), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import constructions as cons
from .errors import (
    InterpretationMismatch,
    NoneFound,
    NotPrime,
    NotRealizable,
    SearchExhausted,
    Sl2GrowthError,
    SymmetryViolation,
)
from .field import is_prime
from .growth import analyze, format_set, psl_project, read_set_file
from .search import SearchConfig, backtrack_search, default_workers, published_optimum
from .sl2 import parse_matrix

log = logging.getLogger("sl2growth")

PRIME_CAP = 101
NAMED_SETS = ("optimal", "evdlt", "published")


class UsageError(Exception):
    pass


class ClaimFailed(Exception):
    pass


def _prime(args, default: int | None = None) -> int:
    p = args.p if args.p is not None else default
    if p is None:
        raise UsageError("--p is required")
    if not is_prime(p) or p == 2:
        raise UsageError(f"p = {p} is not an odd prime")
    if p > PRIME_CAP and not args.allow_large:
        raise UsageError(f"p = {p} exceeds {PRIME_CAP}; pass --allow-large to proceed")
    return p


def _emit(args, payload: dict, text: str) -> None:
    out = json.dumps(payload, indent=2, sort_keys=True) + "\n" if args.json else text
    sys.stdout.write(out)


def _table(rows: list[tuple], header: tuple) -> str:
    cells = [tuple(str(c) for c in r) for r in [header, *rows]]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in cells)


def _kv(d: dict) -> str:
    return _table([(k, v) for k, v in d.items()], ("field", "value"))


def _write_out(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
        log.info("wrote %s", args.out)


# ---------------------------------------------------------------- commands

def cmd_construct(args) -> int:
    p = _prime(args)
    kind, order = cons.parse_kind(args.kind)
    spec = cons.build_subgroup(kind, p, order, seed=args.seed)
    payload = {"subgroup": spec.to_dict(), "order": spec.order}
    S, c = spec.elements, None
    if args.with_x:
        if args.with_x == "auto":
            x, c = cons.find_good_x(spec)[0]
        else:
            x = parse_matrix(args.with_x, p)
        S = cons.coset_core_set(spec, x) if args.coset_core else cons.splus2(spec, x)
        rep = analyze(S)
        payload.update(x=str(x), c=c, set=rep.to_dict())
    elif args.coset_core:
        raise UsageError("--coset-core needs --with-x")
    _write_out(args, format_set(S))
    rows = {"kind": spec.tag, "p": p, "order": spec.order,
            "generators": " ".join(str(g) for g in spec.generators)}
    if args.with_x:
        rows.update(x=payload["x"], c=c, sizeS=payload["set"]["sizeS"], sizeS3=payload["set"]["sizeS3"],
                    delta=f"{payload['set']['delta_ratio']:.12f}")
    _emit(args, payload, _kv(rows))
    return 0


def _load_set(args):
    if args.set in NAMED_SETS:
        if args.set == "published":
            return published_optimum()
        p = _prime(args, 17)
        return cons.optimal_set(p) if args.set == "optimal" else cons.evdlt_set(p)
    S = read_set_file(args.set)
    if S.table.p > PRIME_CAP and not args.allow_large:
        raise UsageError(f"p = {S.table.p} exceeds {PRIME_CAP}; pass --allow-large to proceed")
    return S


def cmd_analyze(args) -> int:
    S = _load_set(args)
    if not S.is_symmetric():
        raise SymmetryViolation("input set is not closed under inversion")
    rep = analyze(S)
    payload = {"p": S.table.p, **rep.to_dict()}
    if args.psl:
        size, size3 = psl_project(S)
        payload["psl"] = {"size": size, "size3": size3}
    _write_out(args, format_set(S))
    rows = dict(payload)
    rows["delta_ratio"] = f"{rep.delta_ratio:.12f}"
    if args.psl:
        rows["psl"] = f"{payload['psl']['size']} / {payload['psl']['size3']}"
    _emit(args, payload, _kv(rows))
    return 0


def cmd_search(args) -> int:
    p = _prime(args, 5)
    half = {"both": None, "with-center": True, "without-center": False}[args.half]
    cfg = SearchConfig(p=p, include_minus_I=half, conjugacy_prune_depth=args.prune_depth,
                       delta_cap=args.delta_cap, worker_count=args.workers)
    res = backtrack_search(cfg)
    payload = res.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    rows = {"best_delta": f"{res.best_delta:.12f}", "best_size": res.best_size,
            "best_size3": res.best_size3, "witnesses": len(res.witnesses),
            "nodes_visited": res.nodes_visited, "wall_time": f"{res.wall_time:.1f}s"}
    _emit(args, payload, _kv(rows))
    return 0


def cmd_perturb(args) -> int:
    from .perturb import perturb_add, perturb_remove, perturb_swap

    p = _prime(args, 17)
    S = cons.optimal_set(p)
    if args.kind == "add":
        rep = perturb_add(S)
    elif args.kind == "remove":
        rep = perturb_remove(S)
    else:
        rep = perturb_swap(S, sample=None if args.exhaustive else args.samples, seed=args.seed,
                           workers=args.workers)
    payload = rep.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    rows = {k: v for k, v in payload.items() if k != "worst_case"}
    rows["min_delta_seen"] = f"{rep.min_delta_seen:.12f}"
    rows["margin"] = f"{rep.min_delta_seen - rep.base_delta:.12f}"
    _emit(args, {**payload, "margin": rep.min_delta_seen - rep.base_delta}, _kv(rows))
    ok = rep.all_exceed_base and rep.triple_unchanged is not False
    if args.kind == "swap":
        ok &= rep.min_size3 >= rep.base_size3 + 14
    if not ok:
        raise ClaimFailed(f"{args.kind} perturbation did not increase the growth ratio everywhere")
    return 0


def cmd_catalog(args) -> int:
    p = _prime(args)
    specs = cons.catalog(p, seed=args.seed)
    payload = {"p": p, "subgroups": [{**s.to_dict(), "order": s.order} for s in specs]}
    rows = [(s.tag, s.order, " ".join(str(g) for g in s.generators)) for s in specs]
    _emit(args, payload, _table(rows, ("kind", "order", "generators")))
    return 0


def cmd_verify_all(args) -> int:
    from .verify import verify_all

    res = verify_all(quick=args.quick, seed=args.seed, workers=args.workers,
                     exhaustive=args.exhaustive_swap)
    if args.out:
        Path(args.out).write_text(json.dumps(res, indent=2, sort_keys=True) + "\n")
    rows = []
    for name, body in res["checks"].items():
        status = "skip" if body["ok"] is None else ("pass" if body["ok"] else "FAIL")
        rows.append((name, status))
        if name in res["timing"]:
            log.info("%s took %.1fs", name, res["timing"][name])
    _emit(args, res, _table(rows, ("check", "result")))
    if not res["ok"]:
        raise ClaimFailed("some checks failed")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--allow-large", action="store_true", help=f"permit p > {PRIME_CAP}")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="sl2growth", description="Growth of small sets in SL(2,p).")
    sub = ap.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("construct", parents=[common], help="build a catalog subgroup and optional set")
    c.add_argument("--kind", required=True, help="e.g. two_dot_S4, cyclic:8, gen_quaternion:16")
    c.add_argument("--p", type=int)
    c.add_argument("--with-x", metavar="auto|MATRIX")
    c.add_argument("--coset-core", action="store_true")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", help="write the set in set-file format")
    c.set_defaults(fn=cmd_construct)

    a = sub.add_parser("analyze", parents=[common], help="sizes of S, S^2, S^3 and the growth ratio")
    a.add_argument("--set", required=True, help=f"set file, or one of {', '.join(NAMED_SETS)}")
    a.add_argument("--p", type=int)
    a.add_argument("--psl", action="store_true", help="also report the PSL(2,p) image")
    a.add_argument("--out")
    a.set_defaults(fn=cmd_analyze)

    s = sub.add_parser("search", parents=[common], help="exhaustive minimum-ratio search")
    s.add_argument("--p", type=int)
    s.add_argument("--half", choices=("both", "with-center", "without-center"), default="both")
    s.add_argument("--prune-depth", type=int, default=3)
    s.add_argument("--delta-cap", type=float, default=math.inf)
    s.add_argument("--workers", type=int, default=default_workers())
    s.add_argument("--out")
    s.set_defaults(fn=cmd_search)

    pt = sub.add_parser("perturb", parents=[common], help="one-pair perturbations of the size-64 set")
    pt.add_argument("--p", type=int)
    pt.add_argument("--kind", choices=("add", "remove", "swap"), required=True)
    pt.add_argument("--exhaustive", action="store_true", help="full swap cross product (minutes)")
    pt.add_argument("--samples", type=int, default=1000)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--workers", type=int, default=default_workers())
    pt.add_argument("--out")
    pt.set_defaults(fn=cmd_perturb)

    k = sub.add_parser("catalog", parents=[common], help="every realizable subgroup kind at p")
    k.add_argument("--p", type=int)
    k.add_argument("--seed", type=int, default=0)
    k.set_defaults(fn=cmd_catalog)

    v = sub.add_parser("verify-all", parents=[common], help="run every reproduction check")
    v.add_argument("--quick", action="store_true", help="skip the exhaustive SL(2,5) search")
    v.add_argument("--exhaustive-swap", action="store_true")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--workers", type=int, default=default_workers())
    v.add_argument("--out")
    v.set_defaults(fn=cmd_verify_all)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.fn(args)
    except (ClaimFailed, InterpretationMismatch, SymmetryViolation) as exc:
        print(f"sl2growth {args.verb}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (UsageError, NotPrime, NotRealizable, NoneFound, SearchExhausted, ValueError) as exc:
        print(f"sl2growth {args.verb}: error: {exc}", file=sys.stderr)
        return 2
    except Sl2GrowthError as exc:
        print(f"sl2growth {args.verb}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

if __name__ == "__main__":
    sys.exit(main())
