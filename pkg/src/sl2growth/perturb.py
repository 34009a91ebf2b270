"""Add / remove / swap one inverse-pair and compare growth against the base set."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .growth import ElementSet, _product_bits, delta_greater, delta_ratio
from .sl2 import GroupTable


@dataclass
class Trial:
    removed: tuple[int, ...]
    added: tuple[int, ...]
    size: int
    size3: int

    @property
    def delta(self) -> float:
        return delta_ratio(self.size, self.size3)


@dataclass
class PerturbationReport:
    base_delta: float
    base_size: int
    base_size3: int
    kind: str
    trials: int
    min_delta_seen: float
    all_exceed_base: bool
    worst_case: ElementSet | None
    min_size3: int
    triple_unchanged: bool | None = None  # removals only
    details: list[Trial] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        from .growth import format_set

        return {
            "kind": self.kind,
            "base_delta": self.base_delta,
            "base_size": self.base_size,
            "base_size3": self.base_size3,
            "trials": self.trials,
            "min_delta_seen": self.min_delta_seen,
            "min_size3": self.min_size3,
            "all_exceed_base": self.all_exceed_base,
            "triple_unchanged": self.triple_unchanged,
            "worst_case": format_set(self.worst_case) if self.worst_case is not None else None,
        }


def inner_pairs(S: ElementSet) -> list[tuple[int, ...]]:
    """Removable units of ``S``: inverse-pairs, and ``-I`` on its own; never ``I``."""
    t = S.table
    out = []
    for i in S.indices():
        i = int(i)
        if i == t.identity:
            continue
        j = int(t.inverse[i])
        if i == j:
            out.append((i,))
        elif i < j:
            out.append((i, j))
    return out


def outer_pairs(S: ElementSet) -> list[tuple[int, int]]:
    t = S.table
    out = []
    for i in np.flatnonzero(~S.bits):
        i = int(i)
        j = int(t.inverse[i])
        if i < j:
            out.append((i, j))
    return out


class _Cubes:
    """``S``, ``S^2`` and ``S^3`` of a fixed set, for cheap one-pair extensions."""

    def __init__(self, S: ElementSet):
        self.table = S.table
        self.idx = S.indices()
        self.s2 = _product_bits(self.table, self.idx, self.idx)
        self.s3 = _product_bits(self.table, np.flatnonzero(self.s2), self.idx)
        self.s2_idx = np.flatnonzero(self.s2)

    def extended(self, pair: tuple[int, ...]) -> np.ndarray:
        t: GroupTable = self.table
        P = np.array(pair, dtype=np.int64)
        T = np.concatenate([self.idx, P])
        fresh = np.concatenate([t.mul_idx(P[:, None], T[None, :]).ravel(),
                                t.mul_idx(T[:, None], P[None, :]).ravel()])
        fresh = np.unique(fresh)
        fresh = fresh[~self.s2[fresh]]
        out = self.s3.copy()
        out[t.mul_idx(self.s2_idx[:, None], P[None, :]).ravel()] = True
        if len(fresh):
            out[t.mul_idx(fresh[:, None], T[None, :]).ravel()] = True
        return out


def _summarise(S: ElementSet, kind: str, trials: list[Trial], base3: int,
               triple_unchanged: bool | None = None) -> PerturbationReport:
    base = delta_ratio(S.size, base3)
    worst = min(trials, key=lambda tr: (tr.delta, tr.removed, tr.added))
    bits = S.bits.copy()
    bits[list(worst.removed)] = False
    bits[list(worst.added)] = True
    return PerturbationReport(
        base_delta=base,
        base_size=S.size,
        base_size3=base3,
        kind=kind,
        trials=len(trials),
        min_delta_seen=worst.delta,
        all_exceed_base=all(delta_greater(tr.size, tr.size3, S.size, base3) for tr in trials),
        worst_case=ElementSet(S.table, bits),
        min_size3=min(tr.size3 for tr in trials),
        triple_unchanged=triple_unchanged,
        details=trials,
    )


def perturb_add(S: ElementSet) -> PerturbationReport:
    """``S | {y, y^-1}`` for every inverse-pair outside ``S``."""
    cubes = _Cubes(S)
    base3 = int(cubes.s3.sum())
    trials = [Trial((), pair, S.size + 2, int(cubes.extended(pair).sum())) for pair in outer_pairs(S)]
    return _summarise(S, "add", trials, base3)


def perturb_remove(S: ElementSet) -> PerturbationReport:
    """``S`` minus one inverse-pair (or minus ``-I``), for every choice.

    Also records whether every such removal leaves ``S^3`` unchanged as a set.
    """
    base = _Cubes(S)
    base3 = int(base.s3.sum())
    trials, unchanged = [], True
    for pair in inner_pairs(S):
        T = S.without_elements(*pair)
        c = _Cubes(T)
        unchanged &= bool(np.array_equal(c.s3, base.s3))
        trials.append(Trial(pair, (), T.size, int(c.s3.sum())))
    return _summarise(S, "remove", trials, base3, unchanged)


def _swap_chunk(args) -> list[Trial]:
    S, removed, added_list = args
    Z = S.without_elements(*removed)
    cubes = _Cubes(Z)
    return [Trial(removed, pair, Z.size + len(pair), int(cubes.extended(pair).sum()))
            for pair in added_list if not set(pair) & set(removed)]


def perturb_swap(S: ElementSet, sample: int | None = 1000, seed: int = 0,
                 workers: int = 1) -> PerturbationReport:
    """Remove one inner unit and add one outer pair.

    ``sample=None`` runs the full cross product; otherwise a seeded uniform
    sample of that many (inner, outer) combinations.
    """
    inner = inner_pairs(S)
    outer = outer_pairs(S)
    total = len(inner) * len(outer)
    if sample is None or sample >= total:
        picks = range(total)
    else:
        picks = sorted(random.Random(seed).sample(range(total), sample))
    by_inner: dict[int, list[tuple[int, int]]] = {}
    for n in picks:
        by_inner.setdefault(n // len(outer), []).append(outer[n % len(outer)])
    jobs = [(S, inner[i], adds) for i, adds in sorted(by_inner.items())]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_swap_chunk, jobs))
    else:
        chunks = [_swap_chunk(j) for j in jobs]
    trials = [tr for chunk in chunks for tr in chunk]
    base3 = int(_Cubes(S).s3.sum())
    return _summarise(S, "swap", trials, base3)
