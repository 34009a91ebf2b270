"""Compiled inner loop of the exhaustive backtrack search.

Sets are bool vectors over element indices; products go through the Cayley
table. A state is the start set (``{I}`` or ``{I, -I}``) plus an increasing
sequence of inverse-pairs; ``S^2`` and ``S^3`` are maintained incrementally:

    (S | P)^2 = S^2 | PS' | S'P            (S' = S | P)
    (S | P)^3 = S^3 | S^2 P | (S'^2 - S^2) S'
"""

from __future__ import annotations

import numpy as np
from numba import njit

TIE = 1e-12


@njit(cache=True)
def _generates(cayley, elems, m):
    n = cayley.shape[0]
    seen = np.zeros(n, np.bool_)
    stack = np.empty(n, np.int64)
    ident = -1
    # the identity is the unique e with e*e = e
    for i in range(n):
        if cayley[i, i] == i:
            ident = i
            break
    seen[ident] = True
    stack[0] = ident
    top = 1
    count = 1
    while top > 0:
        top -= 1
        g = stack[top]
        for j in range(m):
            h = cayley[g, elems[j]]
            if not seen[h]:
                seen[h] = True
                stack[top] = h
                top += 1
                count += 1
    return count == n


@njit(cache=True)
def _orbit_min(conjp, stab, nstab, k):
    for s in range(nstab):
        if conjp[stab[s], k] < k:
            return False
    return True


@njit(cache=True)
def run_subtree(cayley, pairs, conjp, start, prefix, prune_depth, max_depth,
                delta_cap, record_depth, max_states, max_witnesses):
    """Search every increasing extension of ``start + prefix``.

    Returns ``(nodes, best, wit, nwit, states, nstates, state_depths)`` where
    ``wit`` rows are pair masks of the sets achieving ``best``.
    """
    G = cayley.shape[0]
    npairs = pairs.shape[0]
    D = npairs + 2
    cap = np.int64(start.shape[0] + 2 * npairs + 2)

    elems = np.empty((D, cap), np.int64)
    ns = np.zeros(D, np.int64)
    S2 = np.zeros((D, G), np.bool_)
    S3 = np.zeros((D, G), np.bool_)
    chosen = np.zeros((D, npairs), np.bool_)
    last = np.full(D, -1, np.int64)
    nxt = np.zeros(D, np.int64)
    stab = np.zeros((D, G), np.int64)
    nstab = np.zeros(D, np.int64)
    newl = np.empty(G, np.int64)

    wit = np.zeros((max_witnesses, npairs), np.bool_)
    nwit = 0
    states = np.zeros((max_states, npairs), np.bool_)
    state_depths = np.zeros(max_states, np.int64)
    nstates = 0
    best = np.inf
    nodes = 0

    # root = start + prefix, built from scratch
    d = prefix.shape[0]
    m = 0
    for i in range(start.shape[0]):
        elems[d, m] = start[i]
        m += 1
    for t in range(d):
        k = prefix[t]
        chosen[d, k] = True
        elems[d, m] = pairs[k, 0]
        elems[d, m + 1] = pairs[k, 1]
        m += 2
    ns[d] = m
    if d > 0:
        last[d] = prefix[d - 1]
    for i in range(m):
        for j in range(m):
            S2[d, cayley[elems[d, i], elems[d, j]]] = True
    for a in range(G):
        if S2[d, a]:
            for j in range(m):
                S3[d, cayley[a, elems[d, j]]] = True
    nodes += 1
    c3 = 0
    for a in range(G):
        if S3[d, a]:
            c3 += 1
    if c3 == G:
        return nodes, best, wit, nwit, states, nstates, state_depths
    if m > 1:
        dl = np.log(c3) / np.log(m)
        if dl <= best + TIE and _generates(cayley, elems[d], m):
            best = dl
            for q in range(npairs):
                wit[0, q] = chosen[d, q]
            nwit = 1
    if d <= record_depth:
        for q in range(npairs):
            states[nstates, q] = chosen[d, q]
        state_depths[nstates] = d
        nstates += 1
    if max_depth >= 0 and d >= max_depth:
        return nodes, best, wit, nwit, states, nstates, state_depths

    base = d
    nxt[d] = last[d] + 1
    entered = True
    while d >= base:
        if entered:
            entered = False
            nstab[d] = 0
            if d < prune_depth:
                # elements whose conjugation action fixes the chosen pair-set
                for g in range(G):
                    ok = True
                    for q in range(npairs):
                        if chosen[d, q] and not chosen[d, conjp[g, q]]:
                            ok = False
                            break
                    if ok:
                        stab[d, nstab[d]] = g
                        nstab[d] += 1
        k = nxt[d]
        if k >= npairs:
            d -= 1
            continue
        nxt[d] = k + 1
        if d < prune_depth and not _orbit_min(conjp[:, :], stab[d], nstab[d], k):
            continue

        c = d + 1
        m = ns[d]
        for i in range(m):
            elems[c, i] = elems[d, i]
        x0 = pairs[k, 0]
        x1 = pairs[k, 1]
        elems[c, m] = x0
        elems[c, m + 1] = x1
        mc = m + 2
        ns[c] = mc
        for a in range(G):
            S2[c, a] = S2[d, a]
            S3[c, a] = S3[d, a]
        nn = 0
        for t in range(2):
            x = x0 if t == 0 else x1
            for i in range(mc):
                y = elems[c, i]
                a = cayley[x, y]
                if not S2[c, a]:
                    S2[c, a] = True
                    newl[nn] = a
                    nn += 1
                a = cayley[y, x]
                if not S2[c, a]:
                    S2[c, a] = True
                    newl[nn] = a
                    nn += 1
        for a in range(G):
            if S2[d, a]:
                S3[c, cayley[a, x0]] = True
                S3[c, cayley[a, x1]] = True
        for u in range(nn):
            a = newl[u]
            for i in range(mc):
                S3[c, cayley[a, elems[c, i]]] = True
        nodes += 1
        c3 = 0
        for a in range(G):
            if S3[c, a]:
                c3 += 1
        if c3 == G:
            continue

        for q in range(npairs):
            chosen[c, q] = chosen[d, q]
        chosen[c, k] = True
        last[c] = k

        dl = np.log(c3) / np.log(mc)
        if dl <= best + TIE and _generates(cayley, elems[c], mc):
            if dl < best - TIE:
                best = dl
                nwit = 0
            if nwit < max_witnesses:
                for q in range(npairs):
                    wit[nwit, q] = chosen[c, q]
            nwit += 1
        if c <= record_depth:
            if nstates < max_states:
                for q in range(npairs):
                    states[nstates, q] = chosen[c, q]
                state_depths[nstates] = c
            nstates += 1
        if max_depth >= 0 and c >= max_depth:
            continue
        if delta_cap < np.inf:
            # any S'' above S with S''^3 != G has |S''| <= |G| - |S''^2| <= |G| - |S^2|
            # and |S''| <= |S''^2|, while |S''^3| >= |S^3|
            c2 = 0
            for a in range(G):
                if S2[c, a]:
                    c2 += 1
            top = min(G // 2, G - c2)
            if top > 1 and np.log(c3) / np.log(top) > delta_cap:
                continue
        d = c
        nxt[d] = k + 1
        entered = True
    return nodes, best, wit, nwit, states, nstates, state_depths
