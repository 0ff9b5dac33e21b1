"""Numba kernels for the two inner loops that dominate runtime.

Both kernels are deterministic given their integer seed (the switching
chain) or their inputs (the discrepancy scan), so reproducibility is
preserved across the numba boundary.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def edge_switch_chain(adj, eu, ev, proposals, seed):
    """Run a double-edge-swap Markov chain in place for a fixed number of
    proposals.

    Picks two distinct edges uniformly, flips the orientation of the second
    with probability 1/2, and rewires {a,b},{c,e} to {a,c},{b,e} when the
    result stays simple.  The proposal is symmetric and rejections are
    self-loops, so running a fixed number of proposals preserves the uniform
    distribution exactly.  (Stopping after a fixed number of *accepted*
    swaps would not: that conditions on the jump chain, whose stationary law
    is uniform tilted by each state's acceptance rate.)

    Returns the number of accepted swaps, for diagnostics.
    """
    np.random.seed(seed)
    m = eu.shape[0]
    accepted = 0
    for _ in range(proposals):
        i = np.random.randint(0, m)
        j = np.random.randint(0, m)
        if i == j:
            continue
        a = eu[i]
        b = ev[i]
        c = eu[j]
        e = ev[j]
        if np.random.randint(0, 2) == 1:
            c, e = e, c
        if a == c or a == e or b == c or b == e:
            continue
        if adj[a, c] == 1 or adj[b, e] == 1:
            continue
        adj[a, b] = 0
        adj[b, a] = 0
        adj[c, e] = 0
        adj[e, c] = 0
        adj[a, c] = 1
        adj[c, a] = 1
        adj[b, e] = 1
        adj[e, b] = 1
        eu[i] = a
        ev[i] = c
        eu[j] = b
        ev[j] = e
        accepted += 1
    return accepted


@njit(cache=True)
def discrepancy_scan(M, delta, kappa1, kappa2, n, symmetric_skip):
    """Exhaustive discrepancy check over all nonempty (S, T) pairs.

    Both subsets are walked in binary-reflected Gray-code order: flipping one
    vertex of S refreshes the column-sum vector in O(n), and flipping one
    vertex of T updates the running edge count in O(1).  With symmetric_skip,
    pairs with int(T) < int(S) are skipped, which is sound when M is
    symmetric.

    Returns (found, S_mask, T_mask); masks identify the first violating pair.
    """
    full = (np.int64(1) << n) - 1
    col = np.zeros(n, dtype=np.float64)
    in_s = np.zeros(n, dtype=np.uint8)
    euler_n = np.e * n
    s_mask = np.int64(0)
    s_size = 0
    for gs in range(1, full + 1):
        # Gray code of gs differs from that of gs-1 in bit v.
        v = 0
        g = gs
        while g & 1 == 0:
            g >>= 1
            v += 1
        if in_s[v] == 0:
            in_s[v] = 1
            s_mask |= np.int64(1) << v
            s_size += 1
            for w in range(n):
                col[w] += M[v, w]
        else:
            in_s[v] = 0
            s_mask &= ~(np.int64(1) << v)
            s_size -= 1
            for w in range(n):
                col[w] -= M[v, w]
        e_st = 0.0
        t_mask = np.int64(0)
        t_size = 0
        in_t = np.zeros(n, dtype=np.uint8)
        for gt in range(1, full + 1):
            w = 0
            g = gt
            while g & 1 == 0:
                g >>= 1
                w += 1
            if in_t[w] == 0:
                in_t[w] = 1
                t_mask |= np.int64(1) << w
                t_size += 1
                e_st += col[w]
            else:
                in_t[w] = 0
                t_mask &= ~(np.int64(1) << w)
                t_size -= 1
                e_st -= col[w]
            if symmetric_skip and t_mask < s_mask:
                continue
            denom = delta * s_size * t_size
            if e_st <= kappa1 * denom:
                continue
            big = s_size if s_size > t_size else t_size
            if e_st * np.log(e_st / denom) <= kappa2 * big * np.log(euler_n / big):
                continue
            return True, s_mask, t_mask
    return False, np.int64(0), np.int64(0)
