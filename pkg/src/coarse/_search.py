"""Minimal-element searches outside finite forbidden sets.

Every construction choice is "the first element in canonical order outside
a finite set".  The sets are unions of double cosets P⁻¹·ball(k)·δ·ball(k)·Q,
which are too large to list in free groups, so each group family gets its
own membership strategy.
"""

from __future__ import annotations

import numpy as np

from .group_core import FreeGroup, IntegerLattice


# -- Z^d: dense boxes and l1 dilation ------------------------------------------

BOX_LIMIT = 60_000_000


def lattice_terms_min(G: IntegerLattice, terms, exclude=()):
    """Minimal x outside ⋃ (P ⊕ ball(r)) for (P, r) in ``terms``.

    ``P`` is an integer array of shape (N, d).  Returns (x, forbidden_count)
    where the count is exact when the dense path was used, else None.
    """
    d = G.dim
    M = 1
    for P, r in terms:
        if len(P):
            M = max(M, int(np.abs(P).max()) + r + 1)
    side = 2 * M + 1
    if side ** d <= BOX_LIMIT:
        return _lattice_dense(G, terms, M, exclude)
    return _lattice_scan(G, terms, exclude), None


def _lattice_dense(G, terms, M, exclude):
    d = G.dim
    side = 2 * M + 1
    forb = np.zeros((side,) * d, dtype=bool)
    by_radius: dict[int, list] = {}
    for P, r in terms:
        if len(P):
            by_radius.setdefault(r, []).append(P)
    for r, Ps in by_radius.items():
        layer = np.zeros_like(forb)
        pts = np.concatenate(Ps) + M
        layer[tuple(pts.T)] = True
        for _ in range(r):
            grown = layer.copy()
            for ax in range(d):
                lo = [slice(None)] * d
                hi = [slice(None)] * d
                lo[ax], hi[ax] = slice(1, None), slice(None, -1)
                grown[tuple(lo)] |= layer[tuple(hi)]
                grown[tuple(hi)] |= layer[tuple(lo)]
            layer = grown
        forb |= layer
    for x in exclude:
        forb[tuple(c + M for c in x)] = True
    count = int(forb.sum())
    free = np.argwhere(~forb) - M
    norms = np.abs(free).sum(axis=1)
    best = free[norms == norms.min()]
    keys = np.where(best > 0, 2 * best - 1, -2 * best)
    order = np.lexsort(keys.T[::-1])
    return tuple(int(c) for c in best[order[0]]), count


def _lattice_scan(G, terms, exclude):
    exclude = set(exclude)
    for x in G.canonical():
        if x in exclude:
            continue
        v = np.array(x)
        if not any(len(P) and int(np.abs(P - v).sum(axis=1).min()) <= r for P, r in terms):
            return x


def sumset(P, Q, sign=-1):
    """{p + sign·q} as a unique integer array."""
    P = np.asarray(P, dtype=np.int64)
    Q = np.asarray(Q, dtype=np.int64)
    out = (P[:, None, :] + sign * Q[None, :, :]).reshape(-1, P.shape[1])
    return unique_rows(out)


def unique_rows(M):
    """Distinct rows of an integer matrix, via a scalar encoding."""
    M = np.asarray(M, dtype=np.int64)
    if len(M) == 0:
        return M
    lo = M.min(axis=0)
    span = M.max(axis=0) - lo + 1
    if float(np.prod(span.astype(float))) >= 2 ** 62:
        return np.unique(M, axis=0)
    radix = np.concatenate(([1], np.cumprod(span[:-1])))
    codes = np.unique((M - lo) @ radix)
    out = np.empty((len(codes), M.shape[1]), dtype=np.int64)
    for i in range(M.shape[1]):
        out[:, i] = codes % span[i] + lo[i]
        codes = codes // span[i]
    return out


# -- free groups: factor characterisation of double balls ----------------------

class DeltaIndex:
    """Membership s ∈ ⋃_k ball(k)·δ_k·ball(k) over a list of (δ, k).

    s = β·μ·ζ and δ = α·μ·γ with |α|+|β| <= k and |γ|+|ζ| <= k; the common
    factor μ is looked up among the factors of each δ.
    """

    def __init__(self, deltas):
        self.deltas = list(deltas)
        idx: dict = {}
        self.kmax = 0
        for delta, k in self.deltas:
            self.kmax = max(self.kmax, k)
            n = len(delta)
            for a in range(min(k, n) + 1):
                for g in range(min(k, n - a) + 1):
                    idx.setdefault(delta[a:n - g], []).append((k, a, g))
        self.idx = idx
        self.min_len = min((len(dl) - 2 * k for dl, k in self.deltas), default=0)
        self.max_len = max((len(dl) + 2 * k for dl, k in self.deltas), default=-1)

    def contains(self, s) -> bool:
        ls = len(s)
        if ls > self.max_len:
            return False
        idx, K = self.idx, self.kmax
        for b in range(min(K, ls) + 1):
            for z in range(min(K, ls - b) + 1):
                hits = idx.get(s[b:ls - z])
                if hits:
                    for k, a, g in hits:
                        if a + b <= k and g + z <= k:
                            return True
        return False


def free_pairs_test(G: FreeGroup, P, Q, index: DeltaIndex):
    """Predicate x ↦ ∃ p ∈ P, q ∈ Q with p·x·q⁻¹ in the indexed set."""
    mul, inv = G._mul, G._inv
    Qinv = [inv(q) for q in Q]
    lo, hi = index.min_len, index.max_len
    contains = index.contains

    def test(x):
        for p in P:
            y = mul(p, x)
            for qi in Qinv:
                s = mul(y, qi)
                if lo <= len(s) <= hi and contains(s):
                    return True
        return False

    return test


class FactorIndex:
    """Factors μ = s[j:j+m] of words s, with Pareto-minimal (j, |s|-j-m)."""

    def __init__(self, words, K: int, L: int):
        idx: dict = {}
        for s in words:
            ls = len(s)
            if ls > L + 2 * K:
                continue
            mmin = max(1, -(-(L + ls - 2 * K) // 2))
            for j in range(min(K, ls) + 1):
                for m in range(mmin, ls - j + 1):
                    mu = s[j:j + m]
                    tail = ls - j - m
                    cur = idx.get(mu)
                    if cur is None:
                        idx[mu] = ((j, tail),)
                    elif not any(cj <= j and ct <= tail for cj, ct in cur):
                        idx[mu] = tuple(p for p in cur if not (j <= p[0] and tail <= p[1])) + ((j, tail),)
        self.idx = idx


def free_min_outside_double_ball(G: FreeGroup, S, K: int, start: int | None = None,
                                 max_length: int = 64):
    """Minimal x with x ∉ ball(K)·S·ball(K), S a finite set containing e.

    Depth-first over words of each length L in shortlex order.  A prefix is
    cut as soon as it contains a factor that forbids every completion: μ at
    position i with i + j <= K and (L - i - m) + tail <= K.
    """
    S = list(S)
    letters = [s for (s,) in G.generators]
    L = 2 * K + 1 if start is None else start
    stats = {"nodes": 0, "index": 0}
    while L <= max_length:
        fi = FactorIndex(S, K, L).idx
        stats["index"] += len(fi)
        found = _dfs(letters, fi, K, L, stats)
        if found is not None:
            return found, stats
        L += 1
    raise RuntimeError("no element found below the length cap")


def _dfs(letters, fi, K, L, stats):
    word = []

    def doomed(P):
        room = K - (L - P)
        if room < 0:
            return False
        w = tuple(word)
        for i in range(min(K, P - 1) + 1):
            pairs = fi.get(w[i:P])
            if pairs:
                for j, tail in pairs:
                    if i + j <= K and tail <= room:
                        return True
        return False

    def rec(last):
        P = len(word)
        stats["nodes"] += 1
        if P and doomed(P):
            return None
        if P == L:
            return tuple(word)
        for s in letters:
            if s != -last:
                word.append(s)
                got = rec(s)
                word.pop()
                if got is not None:
                    return got
        return None

    return rec(0)
