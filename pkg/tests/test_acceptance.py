"""Acceptance gate: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import random
import time
import warnings

import numpy as np
import pytest

from sl2growth.constructions import (
    bound_estimate,
    build_subgroup,
    catalog,
    coset_core_set,
    evdlt_set,
    find_good_x,
    monotone_bounds,
    normalize_rep,
    optimal_construction,
    optimal_set,
    splus2,
)
from sl2growth.errors import InterpretationMismatch, NoneFound, SearchExhausted
from sl2growth.growth import (
    analyze,
    double_coset,
    double_cosets,
    frobenius_size,
    intersect_conjugate,
    psl_project,
    triple,
)
from sl2growth.perturb import perturb_add, perturb_remove, perturb_swap
from sl2growth.search import verify_published_optimum
from sl2growth.sl2 import enumerate_group

OPTIMAL_DELTA = (5 + math.log2(7)) / 6


@pytest.mark.parametrize("p", [17, 97, 113])
def test_criterion_1_optimal_set(p):
    enumerate_group.cache_clear()  # time the group enumeration too
    t0 = time.perf_counter()
    S = optimal_set(p)
    rep = analyze(S)
    elapsed = time.perf_counter() - t0
    assert (rep.sizeS, rep.sizeS3) == (64, 224)
    assert rep.generates and rep.sizeS3 < len(S.table)
    assert abs(rep.delta_ratio - OPTIMAL_DELTA) < 1e-9
    assert elapsed < 5.0


def test_criterion_2_structure():
    oc = optimal_construction(17)
    H, x, L = oc.H.elements, oc.x, oc.L
    assert H.size // L.size == 3 and L.size == 16
    HxH = double_coset(H, x)
    conj = H.conjugate(x)
    assert HxH.isdisjoint(conj)
    parts = [H, HxH, conj - L]
    assert [P.size for P in parts] == [48, 144, 32]
    assert all(parts[i].isdisjoint(parts[j]) for i in range(3) for j in range(i + 1, 3))
    S3 = triple(oc.S)
    assert S3 == parts[0] | parts[1] | parts[2] and S3.size == 224


def test_criterion_3_published_optimum():
    t0 = time.perf_counter()
    try:
        rep = verify_published_optimum()
    except InterpretationMismatch:  # pragma: no cover - fallback path
        pytest.fail("listed set does not reproduce; rely on the search witness instead")
    assert time.perf_counter() - t0 < 1.0
    assert (rep.sizeS, rep.sizeS3) == (30, 114)
    assert abs(rep.delta_ratio - 1.3925) < 1e-4


@pytest.mark.slow
def test_criterion_4_exhaustive_search(p5_search):
    res = p5_search
    assert abs(res.best_delta - math.log(114) / math.log(30)) < 1e-12
    assert len(res.witnesses) >= 1
    w = analyze(res.witnesses[0])
    assert (w.sizeS, w.sizeS3) == (30, 114) and w.generates


def test_criterion_5_psl_projection():
    size, size3 = psl_project(optimal_set(17))
    assert (size, size3) == (32, 112)
    assert abs(math.log(size3) / math.log(size) - 1.3614) < 1e-3


def test_criterion_6_eventual_delta():
    for p in (5, 13, 17):
        rep = analyze(evdlt_set(p))
        n = p * (p - 1)
        assert rep.sizeS == (n + 4) // 2
        assert (p + 1) * n // 2 <= rep.sizeS3 <= (p + 2) * n // 2
        assert rep.sizeS3 < (p + 1) * n and rep.generates
    ratios = {}
    for p in (13, 17, 29, 37, 41):
        rep = analyze(evdlt_set(p))
        ratios[p] = rep.sizeS3 / rep.sizeS ** 1.5
        assert 1 < ratios[p] < 2
    assert abs(ratios[41] - math.sqrt(2)) / math.sqrt(2) < 0.15


def test_criterion_7_bound_suites():
    checked = 0
    for p in (13, 17):
        for spec in catalog(p):
            try:
                found = find_good_x(spec)
            except NoneFound:
                continue
            for x, c in found:
                est = bound_estimate(spec.order, c)
                S = coset_core_set(spec, x)
                n3 = triple(S).size
                assert S.size == est.sizeS
                assert est.lower3 <= n3 <= est.upper3
                checked += 1
    assert checked > 0

    H = build_subgroup("two_dot_A4", 17)
    x, c = find_good_x(H)[0]
    rep = analyze(coset_core_set(H, x))
    assert rep.sizeS3 >= 96 and rep.sizeS <= 32
    for p in (11, 19):
        try:
            H = build_subgroup("two_dot_A5", p, seed=0)
        except SearchExhausted as exc:
            warnings.warn(f"2.A5 at p={p} skipped: {exc}")
            continue
        x, c = find_good_x(H)[0]
        rep = analyze(coset_core_set(H, x))
        assert rep.sizeS3 >= 720 and rep.sizeS <= 144


def test_criterion_8_local_minimum():
    S = optimal_set(17)
    rem = perturb_remove(S)
    assert rem.triple_unchanged and rem.all_exceed_base
    add = perturb_add(S)
    assert add.trials >= 2400 and add.all_exceed_base
    swap = perturb_swap(S, sample=1000, seed=0)
    assert swap.trials == 1000 and swap.all_exceed_base
    print(f"min margins: add {add.min_delta_seen - add.base_delta:.6f}, "
          f"swap {swap.min_delta_seen - swap.base_delta:.6f}, "
          f"remove {rem.min_delta_seen - rem.base_delta:.6f}")


@pytest.mark.slow
def test_criterion_8_exhaustive_swap():
    rep = perturb_swap(optimal_set(17), sample=None)
    assert rep.all_exceed_base
    assert rep.min_size3 >= 224 + 14


def test_criterion_9_property_suites():
    rng = random.Random(9)
    for p in (5, 13, 17):
        t = enumerate_group(p)
        specs = [s.elements for s in catalog(p) if s.order <= 2 * p * p]
        for _ in range(200):
            H, L = rng.choice(specs), rng.choice(specs)
            x = rng.randrange(len(t))
            assert double_coset(H, x, L).size == frobenius_size(H, L, x)

    t5 = enumerate_group(5)
    for spec in catalog(5):
        cover = sum(D.bits.astype(int) for D in double_cosets(spec.elements))
        assert (cover == 1).all() and cover.size == len(t5)

    t13 = enumerate_group(13)
    for kind in ("upper_triangular", "qr_index2", "unipotent"):
        H = build_subgroup(kind, 13).elements
        outside = np.flatnonzero(~build_subgroup("upper_triangular", 13).elements.bits).tolist()
        for xi in rng.sample(outside, 50):
            assert intersect_conjugate(H, xi).size * 13 == H.size

    for p in (13, 17):
        t = enumerate_group(p)
        for spec in catalog(p):
            H = spec.elements
            cands = np.flatnonzero(~H.bits).tolist()
            xs = rng.sample(cands, min(40, len(cands)))
            try:
                xs += [t.index(x) for x, _ in find_good_x(spec)[:5]]
            except NoneFound:
                pass
            for xi in xs:
                x = t[xi]
                D = double_coset(H, x)
                same = x.inverse() in D
                y = normalize_rep(spec, x)
                assert same == (y is not None)
                if y is None:
                    continue
                assert y * y in H and H.right(y) == H.right(x)
                if x.order() > 2 and y.order() > 2:
                    assert triple(splus2(spec, y)) <= triple(splus2(spec, x))

    for p in (3, 5, 7, 11, 13, 17):
        t = enumerate_group(p)
        idx = np.arange(len(t))
        invol = np.flatnonzero((t.mul_idx(idx, idx) == t.identity) & (idx != t.identity))
        assert invol.tolist() == [t.minus_identity]

    grid = np.arange(1, 50.5, 0.5)
    for l in (2, 4, 8):
        f, g = np.array([monotone_bounds(l, k) for k in grid]).T
        assert (np.diff(f) > 0).all() and (np.diff(g) > 0).all()


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
