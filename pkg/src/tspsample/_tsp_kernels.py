"""Compiled kernels for the path solvers.

All kernels work in any dimension; points live in ``[0, 1]^d``.  Candidate
generation uses a uniform bucket grid: a ring scan over cells at growing
Chebyshev offset ``R`` stops once the current best distance is at most
``R / g`` (any unscanned point is farther than that), which certifies
exactness of nearest-neighbour queries.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _dist(pts, a, b):
    s = 0.0
    for j in range(pts.shape[1]):
        dx = pts[a, j] - pts[b, j]
        s += dx * dx
    return np.sqrt(s)


@njit(cache=True)
def build_cells(pts, g):
    """Counting-sort point indices into g^d buckets (C-order flattening)."""
    n, d = pts.shape
    ncell = g ** d
    flat = np.empty(n, np.int64)
    for i in range(n):
        f = 0
        for j in range(d):
            c = int(pts[i, j] * g)
            if c < 0:
                c = 0
            if c >= g:
                c = g - 1
            f = f * g + c
        flat[i] = f
    start = np.zeros(ncell + 1, np.int64)
    for i in range(n):
        start[flat[i] + 1] += 1
    for c in range(ncell):
        start[c + 1] += start[c]
    order = np.empty(n, np.int64)
    fill = start[:ncell].copy()
    for i in range(n):
        order[fill[flat[i]]] = i
        fill[flat[i]] += 1
    return order, start


@njit(cache=True)
def knn(pts, g, order, start, k):
    """Exact k nearest neighbours per point, sorted by distance then index."""
    n, d = pts.shape
    nb = np.full((n, k), -1, np.int64)
    home = np.empty(d, np.int64)
    cell = np.empty(d, np.int64)
    kd = np.empty(k, np.float64)
    ki = np.empty(k, np.int64)
    for i in range(n):
        for j in range(d):
            c = int(pts[i, j] * g)
            if c < 0:
                c = 0
            if c >= g:
                c = g - 1
            home[j] = c
        for m in range(k):
            kd[m] = np.inf
            ki[m] = -1
        cnt = 0
        R = 0
        while True:
            w = 2 * R + 1
            ncombo = w ** d
            for t in range(ncombo):
                tt = t
                cheb = 0
                ok = True
                for j in range(d):
                    off = tt % w - R
                    tt //= w
                    if off < 0:
                        a = -off
                    else:
                        a = off
                    if a > cheb:
                        cheb = a
                    cc = home[j] + off
                    if cc < 0 or cc >= g:
                        ok = False
                        break
                    cell[j] = cc
                if not ok or cheb != R:
                    continue
                f = 0
                for j in range(d):
                    f = f * g + cell[j]
                for s in range(start[f], start[f + 1]):
                    p = order[s]
                    if p == i:
                        continue
                    d2 = 0.0
                    for j in range(d):
                        dx = pts[p, j] - pts[i, j]
                        d2 += dx * dx
                    last = k - 1
                    if d2 < kd[last] or (d2 == kd[last] and ki[last] != -1 and p < ki[last]):
                        m = last
                        while m > 0 and (kd[m - 1] > d2 or (kd[m - 1] == d2 and ki[m - 1] > p)):
                            kd[m] = kd[m - 1]
                            ki[m] = ki[m - 1]
                            m -= 1
                        kd[m] = d2
                        ki[m] = p
                        if cnt < k:
                            cnt += 1
            if cnt >= k:
                lim = R / g
                if kd[k - 1] <= lim * lim:
                    break
            if R >= g:
                break
            R += 1
        for m in range(k):
            nb[i, m] = ki[m]
    return nb


@njit(cache=True)
def nn_path(pts, g, order, start, first):
    """Greedy path: repeatedly hop to the nearest unvisited point."""
    n, d = pts.shape
    ncell = g ** d
    remaining = np.empty(ncell, np.int64)
    for c in range(ncell):
        remaining[c] = start[c + 1] - start[c]
    visited = np.zeros(n, np.bool_)
    tour = np.empty(n, np.int64)
    home = np.empty(d, np.int64)
    cell = np.empty(d, np.int64)
    cur = first
    for step in range(n):
        tour[step] = cur
        visited[cur] = True
        f = 0
        for j in range(d):
            c = int(pts[cur, j] * g)
            if c < 0:
                c = 0
            if c >= g:
                c = g - 1
            home[j] = c
            f = f * g + c
        remaining[f] -= 1
        if step == n - 1:
            break
        best = -1
        bestd = np.inf
        R = 0
        while True:
            w = 2 * R + 1
            ncombo = w ** d
            for t in range(ncombo):
                tt = t
                cheb = 0
                ok = True
                for j in range(d):
                    off = tt % w - R
                    tt //= w
                    if off < 0:
                        a = -off
                    else:
                        a = off
                    if a > cheb:
                        cheb = a
                    cc = home[j] + off
                    if cc < 0 or cc >= g:
                        ok = False
                        break
                    cell[j] = cc
                if not ok or cheb != R:
                    continue
                f = 0
                for j in range(d):
                    f = f * g + cell[j]
                if remaining[f] == 0:
                    continue
                for s in range(start[f], start[f + 1]):
                    p = order[s]
                    if visited[p]:
                        continue
                    d2 = 0.0
                    for j in range(d):
                        dx = pts[p, j] - pts[cur, j]
                        d2 += dx * dx
                    if d2 < bestd or (d2 == bestd and p < best):
                        bestd = d2
                        best = p
            if best >= 0:
                lim = R / g
                if bestd <= lim * lim:
                    break
            if R >= g:
                break
            R += 1
        cur = best
    return tour


@njit(cache=True)
def path_length(pts, tour):
    total = 0.0
    for i in range(tour.shape[0] - 1):
        total += _dist(pts, tour[i], tour[i + 1])
    return total


@njit(cache=True)
def _reverse(tour, pos, i, j):
    while i < j:
        a = tour[i]
        b = tour[j]
        tour[i] = b
        tour[j] = a
        pos[b] = i
        pos[a] = j
        i += 1
        j -= 1


@njit(cache=True)
def two_opt_pass(pts, tour, pos, nb, eps):
    """One first-improvement sweep over segment swaps and endpoint reversals.

    Mutates ``tour``/``pos`` in place and returns the number of applied
    moves.  Open-path variant: besides interior segment reversals it also
    tries reversing a prefix (new edge from the old first point) and a
    suffix (new edge to the old last point), which a cyclic formulation
    would miss.  Interior positions are visited longest-current-edge first
    (priorities frozen at the start of the sweep); attacking the worst
    edges early lands in measurably better local optima than an in-order
    scan, at identical asymptotic cost.
    """
    n = tour.shape[0]
    k = nb.shape[1]
    moves = 0
    improved = True
    while improved:
        improved = False
        first = tour[0]
        for m in range(k):
            c = nb[first, m]
            if c < 0:
                break
            q1 = pos[c]
            if q1 < 2:
                continue
            delta = _dist(pts, first, c) - _dist(pts, tour[q1 - 1], c)
            if delta < -eps:
                _reverse(tour, pos, 0, q1 - 1)
                moves += 1
                improved = True
                break
        last = tour[n - 1]
        for m in range(k):
            c = nb[last, m]
            if c < 0:
                break
            p = pos[c]
            if p > n - 3:
                continue
            delta = _dist(pts, last, c) - _dist(pts, c, tour[p + 1])
            if delta < -eps:
                _reverse(tour, pos, p + 1, n - 1)
                moves += 1
                improved = True
                break
    neg = np.empty(n - 1, np.float64)
    for i in range(n - 1):
        neg[i] = -_dist(pts, tour[i], tour[i + 1])
    eorder = np.argsort(neg)
    for oi in range(n - 1):
        i = eorder[oi]
        a = tour[i]
        b = tour[i + 1]
        d_ab = _dist(pts, a, b)
        applied = False
        # blocks [i+1 .. q] to the right: drop (a, b), rejoin via a or b
        for m in range(k):
            c = nb[a, m]
            if c < 0:
                break
            q = pos[c]
            if q <= i + 1:
                continue
            if q == n - 1:
                delta = _dist(pts, a, c) - d_ab
            else:
                delta = (_dist(pts, a, c) + _dist(pts, b, tour[q + 1])
                         - d_ab - _dist(pts, c, tour[q + 1]))
            if delta < -eps:
                _reverse(tour, pos, i + 1, q)
                moves += 1
                applied = True
                break
        if not applied:
            for m in range(k):
                e = nb[b, m]
                if e < 0:
                    break
                q = pos[e] - 1
                if q < i + 2 or q > n - 2:
                    continue
                cq = tour[q]
                delta = (_dist(pts, a, cq) + _dist(pts, b, e)
                         - d_ab - _dist(pts, cq, e))
                if delta < -eps:
                    _reverse(tour, pos, i + 1, q)
                    moves += 1
                    applied = True
                    break
        # mirrored blocks [p .. i] to the left of the same edge
        if not applied:
            for m in range(k):
                c = nb[a, m]
                if c < 0:
                    break
                p1 = pos[c]
                if p1 > i - 2:
                    continue
                tp = tour[p1 + 1]
                delta = (_dist(pts, c, a) + _dist(pts, tp, b)
                         - _dist(pts, c, tp) - d_ab)
                if delta < -eps:
                    _reverse(tour, pos, p1 + 1, i)
                    moves += 1
                    applied = True
                    break
        if not applied:
            for m in range(k):
                e = nb[b, m]
                if e < 0:
                    break
                p = pos[e]
                if p < 1 or p > i - 1:
                    continue
                tp = tour[p - 1]
                delta = (_dist(pts, tp, a) + _dist(pts, e, b)
                         - _dist(pts, tp, e) - d_ab)
                if delta < -eps:
                    _reverse(tour, pos, p, i)
                    moves += 1
                    break
    return moves


@njit(cache=True)
def held_karp(dist):
    """Subset DP table for shortest open paths: dp[mask, j] over sets ending at j."""
    n = dist.shape[0]
    full = (1 << n) - 1
    dp = np.full((full + 1, n), np.inf)
    for j in range(n):
        dp[1 << j, j] = 0.0
    for mask in range(1, full + 1):
        for j in range(n):
            if not (mask >> j) & 1:
                continue
            cur = dp[mask, j]
            if cur == np.inf:
                continue
            for t in range(n):
                if (mask >> t) & 1:
                    continue
                nd = cur + dist[j, t]
                nm = mask | (1 << t)
                if nd < dp[nm, t]:
                    dp[nm, t] = nd
    return dp
