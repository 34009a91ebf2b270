"""Exhaustive search for the symmetric generating subset of SL(2,p) with least growth.

The search tree grows ``{I}`` (or ``{I, -I}``) by inverse-pairs ``{x, x^-1}`` taken
in increasing pair order, and backtracks as soon as ``S^3 = G`` (every
superset then also has ``S^3 = G``). At the first ``conjugacy_prune_depth``
levels a child is kept only if its pair is the smallest in its orbit under
the conjugation stabilizer of the current set. A child failing that test is
not lexicographically minimal in its conjugacy class, and neither is any of
its descendants, so the cut loses no conjugacy class of sets.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .errors import BudgetExceeded, InterpretationMismatch
from .growth import ElementSet, GrowthReport, analyze
from .sl2 import GroupElement, GroupTable, parse_matrix

log = logging.getLogger(__name__)

WORKERS_ENV = "SL2GROWTH_WORKERS"
MAX_STATES = 1 << 20
MAX_WITNESSES = 1 << 12


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@dataclass(frozen=True)
class SearchConfig:
    p: int = 5
    include_minus_I: bool | None = None  # None searches both halves
    conjugacy_prune_depth: int = 3
    delta_cap: float = math.inf
    worker_count: int = field(default_factory=default_workers)
    max_depth: int | None = None
    max_group_order: int = 120
    restrict_to: ElementSet | None = None

    def __post_init__(self) -> None:
        if self.conjugacy_prune_depth < 0:
            raise ValueError("conjugacy_prune_depth must be >= 0")
        if not self.delta_cap > 1:
            raise ValueError("delta_cap must exceed 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")

    @property
    def halves(self) -> tuple[bool, ...]:
        if self.include_minus_I is None:
            return (False, True)
        return (self.include_minus_I,)


@dataclass
class SearchResult:
    best_delta: float
    witnesses: list[ElementSet]
    nodes_visited: int
    wall_time: float
    best_size: int = 0
    best_size3: int = 0
    witnesses_truncated: bool = False

    def to_dict(self) -> dict:
        from .growth import format_set

        return {
            "best_delta": self.best_delta,
            "best_size": self.best_size,
            "best_size3": self.best_size3,
            "witnesses": [format_set(w) for w in self.witnesses],
            "nodes_visited": self.nodes_visited,
            "witnesses_truncated": self.witnesses_truncated,
            "timing": {"wall_time": self.wall_time},
        }


@dataclass(frozen=True)
class PairUniverse:
    """Inverse-pairs of non-central elements, ordered by their smaller index."""

    table: GroupTable
    pairs: np.ndarray  # (n, 2): element, inverse
    conj: np.ndarray  # (|G|, n): pair index of g^-1 P g

    @classmethod
    def build(cls, table: GroupTable, restrict_to: ElementSet | None = None) -> PairUniverse:
        inv = table.inverse
        central = {table.identity, table.minus_identity}
        reps = sorted({min(i, int(inv[i])) for i in range(table.order) if i not in central})
        if restrict_to is not None:
            reps = [r for r in reps if restrict_to.bits[r] and restrict_to.bits[inv[r]]]
        pairs = np.array([[r, inv[r]] for r in reps], dtype=np.int64).reshape(-1, 2)
        lookup = np.full(table.order, -1, dtype=np.int64)
        lookup[pairs[:, 0]] = np.arange(len(pairs))
        g = np.arange(table.order)[:, None]
        img = table.conj_idx(pairs[:, 0][None, :], g)
        conj = _closed_action(table, pairs, lookup, img, inv)
        return cls(table, pairs, conj)

    def __len__(self) -> int:
        return len(self.pairs)

    def to_set(self, mask: np.ndarray, start: list[int]) -> ElementSet:
        bits = np.zeros(self.table.order, dtype=bool)
        bits[start] = True
        bits[self.pairs[mask].ravel()] = True
        return ElementSet(self.table, bits)


def _closed_action(table, pairs, lookup, img, inv) -> np.ndarray:
    """Conjugation action restricted to elements preserving the pair universe.

    Elements that move some pair outside the universe act as the identity,
    which keeps the stabilizer a subgroup of the true symmetry group.
    """
    n = len(pairs)
    mapped = lookup[np.minimum(img, inv[img])]
    conj = np.tile(np.arange(n), (table.order, 1))
    closed = np.all(mapped >= 0, axis=1)
    conj[closed] = mapped[closed]
    return conj


def _top_level(universe: PairUniverse, prune_depth: int) -> list[int]:
    """Pairs allowed first: with pruning, the smallest pair of each conjugacy orbit."""
    ks = range(len(universe))
    if prune_depth >= 1:
        mins = universe.conj.min(axis=0)
        return [k for k in ks if mins[k] >= k]
    return list(ks)


def _run(args):
    cayley, pairs, conj, start, prefix, prune, max_depth, cap, record_depth = args
    return _kernel.run_subtree(cayley, pairs, conj, start, prefix, prune, max_depth, cap,
                               record_depth, MAX_STATES if record_depth >= 0 else 1, MAX_WITNESSES)


@dataclass
class _Half:
    best: float
    masks: list[np.ndarray]
    nodes: int
    truncated: bool
    states: list[np.ndarray]


def _search_half(universe: PairUniverse, cfg: SearchConfig, with_center: bool,
                 record_depth: int = -1) -> _Half:
    t = universe.table
    start = np.array([t.identity, t.minus_identity] if with_center else [t.identity], dtype=np.int64)
    max_depth = -1 if cfg.max_depth is None else cfg.max_depth
    cayley = t.cayley
    common = (cayley, universe.pairs, universe.conj, start)
    tail = (cfg.conjugacy_prune_depth, max_depth, float(cfg.delta_cap), record_depth)
    # the root on its own, then one subtree per admissible first pair
    jobs = [common + (np.zeros(0, dtype=np.int64),) + (cfg.conjugacy_prune_depth, 0, float(cfg.delta_cap), record_depth)]
    if max_depth != 0:
        jobs += [common + (np.array([k], dtype=np.int64),) + tail
                 for k in _top_level(universe, cfg.conjugacy_prune_depth)]
    if cfg.worker_count > 1:
        with ProcessPoolExecutor(cfg.worker_count) as pool:
            outs = list(pool.map(_run, jobs, chunksize=4))
    else:
        outs = [_run(j) for j in jobs]

    best = min(o[1] for o in outs)
    masks, states = [], []
    nodes, truncated = 0, False
    for nodes_i, best_i, wit, nwit, st, nst, _depths in outs:
        nodes += int(nodes_i)
        if nst > len(st) or (record_depth >= 0 and nst >= MAX_STATES):
            raise BudgetExceeded("state recording buffer overflow")
        states.extend(st[:nst])
        if best_i <= best + _kernel.TIE and nwit:
            truncated |= nwit > MAX_WITNESSES
            masks.extend(wit[:min(nwit, MAX_WITNESSES)])
    return _Half(best, masks, nodes, truncated, states)


def _table_for(cfg: SearchConfig) -> GroupTable:
    order = (cfg.p + 1) * cfg.p * (cfg.p - 1)
    if order > cfg.max_group_order:
        raise BudgetExceeded(f"|SL(2,{cfg.p})| = {order} exceeds the search budget {cfg.max_group_order}")
    if cfg.restrict_to is not None:
        return cfg.restrict_to.table
    return GroupTable(cfg.p, cayley=True)


def backtrack_search(config: SearchConfig | None = None) -> SearchResult:
    cfg = config or SearchConfig()
    t0 = time.perf_counter()
    table = _table_for(cfg)
    if table.cayley is None:
        table = GroupTable(cfg.p, cayley=True)
    universe = PairUniverse.build(table, cfg.restrict_to)
    halves = []
    for with_center in cfg.halves:
        h = _search_half(universe, cfg, with_center)
        log.info("half %s: best %.6f, %d witnesses, %d nodes",
                 "with -I" if with_center else "without -I", h.best, len(h.masks), h.nodes)
        halves.append((with_center, h))
    best = min(h.best for _, h in halves)
    witnesses = []
    truncated = False
    for with_center, h in halves:
        if h.best <= best + _kernel.TIE:
            start = [table.identity, table.minus_identity] if with_center else [table.identity]
            witnesses += [universe.to_set(m, start) for m in h.masks]
            truncated |= h.truncated
    witnesses.sort(key=set_key)
    res = SearchResult(
        best_delta=best,
        witnesses=witnesses,
        nodes_visited=sum(h.nodes for _, h in halves),
        wall_time=time.perf_counter() - t0,
        witnesses_truncated=truncated,
    )
    if witnesses:
        rep = analyze(witnesses[0])
        res.best_size, res.best_size3 = rep.sizeS, rep.sizeS3
    return res


def enumerate_states(config: SearchConfig, depth: int, with_center: bool = False) -> list[frozenset[int]]:
    """Pair-index sets of all expanded states with at most ``depth`` pairs."""
    cfg = SearchConfig(p=config.p, include_minus_I=with_center,
                       conjugacy_prune_depth=config.conjugacy_prune_depth,
                       delta_cap=config.delta_cap, worker_count=1, max_depth=depth,
                       max_group_order=config.max_group_order, restrict_to=config.restrict_to)
    table = _table_for(cfg)
    if table.cayley is None:
        table = GroupTable(cfg.p, cayley=True)
    universe = PairUniverse.build(table, cfg.restrict_to)
    h = _search_half(universe, cfg, with_center, record_depth=depth)
    return [frozenset(np.flatnonzero(s).tolist()) for s in h.states]


def set_key(S: ElementSet) -> tuple[int, ...]:
    return tuple(S.indices().tolist())


def gl_conjugacy_classes(witnesses: list[ElementSet]) -> int:
    """Number of orbits of the witness sets under conjugation by GL(2,p).

    GL(2,p) is enumerated as SL(2,p) times ``diag[t, 1]``.
    """
    if not witnesses:
        return 0
    return len({gl_canonical_key(w) for w in witnesses})


def _gl_elements(p: int) -> np.ndarray:
    mats = []
    for a in range(p):
        for b in range(p):
            for c in range(p):
                for d in range(p):
                    if (a * d - b * c) % p:
                        mats.append((a, b, c, d))
    return np.array(mats, dtype=np.int64)


def gl_canonical_key(S: ElementSet) -> tuple[int, ...]:
    """Lexicographically least sorted index tuple over the GL(2,p)-conjugates of ``S``."""
    t = S.table
    p = t.p
    X = t.entries[S.indices()]
    best = None
    for a, b, c, d in _gl_elements(p):
        det_inv = pow(int(a * d - b * c) % p, -1, p)
        # g^-1 X g with g^-1 = det^-1 [[d, -b], [-c, a]]
        ia, ib, ic, id_ = d * det_inv, -b * det_inv, -c * det_inv, a * det_inv
        m00 = ia * X[:, 0] + ib * X[:, 2]
        m01 = ia * X[:, 1] + ib * X[:, 3]
        m10 = ic * X[:, 0] + id_ * X[:, 2]
        m11 = ic * X[:, 1] + id_ * X[:, 3]
        r = t.index_arrays(m00 * a + m01 * c, m00 * b + m01 * d, m10 * a + m11 * c, m10 * b + m11 * d)
        key = tuple(np.sort(r).tolist())
        if best is None or key < best:
            best = key
    return best


PUBLISHED_PLAIN = (
    "[[2,0],[0,3]]", "[[3,0],[1,2]]", "[[0,3],[3,2]]", "[[4,3],[2,3]]",
    "[[3,3],[3,0]]", "[[2,3],[2,1]]",
)
PUBLISHED_CYCLIC = ("[[1,1],[4,0]]", "[[1,4],[1,0]]", "[[1,1],[1,2]]")


def published_optimum() -> ElementSet:
    """The listed size-30 optimum in SL(2,5).

    Bare matrices contribute themselves and their inverses; a bracketed
    matrix contributes the whole cyclic group it generates.
    """
    p = 5
    table = GroupTable(p, cayley=True)
    elems: list[GroupElement] = []
    for m in PUBLISHED_PLAIN:
        g = parse_matrix(m, p)
        elems += [g, g.inverse()]
    for m in PUBLISHED_CYCLIC:
        g = parse_matrix(m, p)
        elems += [g ** k for k in range(g.order())]
    S = ElementSet.from_elements(table, elems)
    if S.size != 30:
        raise InterpretationMismatch(f"published set has {S.size} elements, expected 30")
    return S


def verify_published_optimum() -> GrowthReport:
    rep = analyze(published_optimum())
    checks = {
        "|S| = 30": rep.sizeS == 30,
        "|S^3| = 114": rep.sizeS3 == 114,
        "symmetric": rep.symmetric,
        "generates": rep.generates,
        "contains I": rep.contains_identity,
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise InterpretationMismatch("published optimum fails: " + ", ".join(failed))
    return rep
