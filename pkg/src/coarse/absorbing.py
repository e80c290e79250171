"""Absorbing sets and certificates of non-absorption.

A is absorbing when every finite F has some g with F·g ⊆ A.  Positive
answers are therefore per-F; negative answers come as certificates: a pair
(T, d) with T·A ∩ d·T·A = ∅, or the subgroup argument with a finite S and
⋂_{s∈S} s·F·H = ∅.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ._search import DeltaIndex
from .group_core import FreeGroup
from .coarse_relations import subgroup_index_witness
from .lazy_sets import LazySet, _radius
from .verdict import GLOBAL, Verdict, no_witness, refuted, verified


def absorb_witness(A: LazySet, F, search_radius: int) -> Verdict:
    """Minimal-norm g (canonical tie-break) in ball(search_radius) with F·g ⊆ A."""
    G = A.group
    F = G.sorted(set(F))
    if not F:
        raise ValueError("F must be nonempty")
    inA = A.contains_fn(search_radius + G.norm(F))
    for g in G.ball(search_radius):
        if all(inA(G._mul(f, g)) for f in F):
            return verified(search_radius, g, detail=f"F·g ⊆ A for |F| = {len(F)}")
    return no_witness(search_radius, {"search_radius": search_radius},
                      detail="no g with F·g ⊆ A")


def absorbing_up_to(A: LazySet, r_max: int, search_radius: int) -> Verdict:
    """Per-F absorption for every F ⊆ ball(r).  Checking F = ball(r) suffices,
    since any g with ball(r)·g ⊆ A works for all of its subsets."""
    G = A.group
    found = {}
    for r in range(r_max + 1):
        v = absorb_witness(A, G.ball(r), search_radius)
        if not v.ok:
            v.detail = f"ball({r}) is not absorbed within the search radius"
            v.witness = found
            return v
        found[r] = v.witness
    return verified(search_radius, found, detail=f"every F ⊆ ball({r_max}) is absorbed")


@dataclass
class AntiAbsorbingCertificate:
    """Pairs (T, d) with T·A ∩ d·T·A = ∅.  ``status[i]`` is the checked
    radius or GLOBAL when backed by a construction."""

    pairs: list = field(default_factory=list)
    status: list = field(default_factory=list)

    def add(self, T, d, status=GLOBAL):
        self.pairs.append((tuple(T), d))
        self.status.append(status)

    def to_json(self, group) -> dict:
        return {"pairs": [{"T_size": len(T), "T_radius": max(map(group.word_length, T)),
                           "d": group.format(d), "status": s}
                          for (T, d), s in zip(self.pairs, self.status)]}


def _is_ball(G, T):
    r = G.norm(T)
    return len(T) == len(G.ball(r)) and set(T) == set(G.ball(r)), r


class _Neighbourhood:
    """Membership in T·A for finite A.  For a ball T = ball(k) in a free
    group, x ∈ T·A iff some a ∈ A shares a suffix s with x such that
    (|x| - |s|) + (|a| - |s|) <= k, so suffixes of A are indexed once,
    keyed to the shortest cut |a| - |s|."""

    def __init__(self, G, T, A_elems):
        self.G = G
        is_ball, k = _is_ball(G, T)
        self.k = k
        if isinstance(G, FreeGroup) and is_ball:
            idx: dict = {}
            for a in A_elems:
                n = len(a)
                for cut in range(min(k, n) + 1):
                    s = a[cut:]
                    if idx.get(s, k + 1) > cut:
                        idx[s] = cut
            self._idx = idx
        else:
            Tinv = [G._inv(t) for t in T]
            Aset = set(A_elems)
            self._members = None
            if len(T) * len(Aset) <= 4_000_000:
                self._members = {G._mul(t, a) for t in T for a in Aset}
            self._Tinv, self._A = Tinv, Aset

    def _free_contains(self, x):
        n, k, idx = len(x), self.k, self._idx
        for i in range(min(k, n) + 1):
            w = idx.get(x[i:])
            if w is not None and w + i <= k:
                return True
        return False

    def contains(self, x):
        if hasattr(self, "_idx"):
            return self._free_contains(x)
        if self._members is not None:
            return x in self._members
        mul = self.G._mul
        return any(mul(ti, x) in self._A for ti in self._Tinv)


def _overlap_intersection(G, T, A_elems, d, R):
    """First x ∈ T·A ∩ d·T·A with |x| <= R, by explicit enumeration."""
    nb = _Neighbourhood(G, T, A_elems)
    dinv = G._inv(d)
    wl, mul = G.word_length, G._mul
    best = None
    for a in A_elems:
        for t in T:
            x = mul(t, a)
            if wl(x) <= R and nb.contains(mul(dinv, x)):
                if best is None or G.sort_key(x) < G.sort_key(best):
                    best = x
    return best


def _quotients(G, A_elems):
    """{a·b⁻¹ : a, b ∈ A} with one (a, b) per quotient."""
    inv, mul = G._inv, G._mul
    out: dict = {}
    for a in A_elems:
        for b in A_elems:
            out.setdefault(mul(a, inv(b)), (a, b))
    return out


def _overlap_pairs(G, T, quotients, d):
    """Quotients s = a·b⁻¹ with d ∈ T·s·T⁻¹, as (a, b) pairs."""
    is_ball, k = _is_ball(G, T)
    inv, mul, wl = G._inv, G._mul, G.word_length
    if is_ball and isinstance(G, FreeGroup):
        # d ∈ ball(k)·s·ball(k) iff s ∈ ball(k)·d·ball(k)
        test = DeltaIndex([(d, k)]).contains
    elif is_ball:
        ld = wl(d)
        test = lambda s: abs(wl(s) - ld) <= 2 * k and G.in_double_ball(d, s, k)
    else:
        D = {mul(mul(inv(t), d), u) for t in T for u in T}
        test = D.__contains__
    return [ab for s, ab in quotients.items() if test(s)]


def _overlap_from_pairs(G, T, A_elems, d, R, quotients, pairs):
    """First x ∈ T·A ∩ d·T·A with |x| <= R.  Every such x is t·a = d·u·b with
    a·b⁻¹ among the flagged quotients, so only those are expanded."""
    if not pairs:
        return None
    flagged = {G._mul(a, G._inv(b)) for a, b in pairs}
    Tset = set(T)
    dinv, inv, mul, wl = G._inv(d), G._inv, G._mul, G.word_length
    best = None
    by_a: dict = {}
    for a in A_elems:
        for b in A_elems:
            if mul(a, inv(b)) in flagged:
                by_a.setdefault(a, []).append(inv(b))
    for a, binvs in by_a.items():
        for t in T:
            x = mul(t, a)
            if wl(x) > R or (best is not None and G.sort_key(x) >= G.sort_key(best)):
                continue
            y = mul(dinv, x)
            if any(mul(y, bi) in Tset for bi in binvs):
                best = x
    return best


def check_anti_absorbing(A: LazySet, cert: AntiAbsorbingCertificate, W,
                         cross_check: bool = False) -> Verdict:
    """Verified iff (T·A) ∩ (d·T·A) ∩ W = ∅ for every pair.

    A is read on W padded by |T| + |d|.  Overlaps t·a = d·u·b correspond to
    quotients a·b⁻¹ ∈ T⁻¹·d·T, so the quotient set is screened first and only
    flagged pairs are expanded into elements.  ``cross_check`` also runs the
    direct enumeration of T·A against d·T·A and requires the same answer.
    """
    G = A.group
    R = _radius(W)
    checked = []
    cache: dict = {}
    for i, (T, d) in enumerate(cert.pairs):
        T = G.sorted(T)
        pad = R + G.norm(T) + G.word_length(d)
        A_elems = A.restrict(pad)
        if pad not in cache:
            cache[pad] = _quotients(G, A_elems)
        quotients = cache[pad]
        pairs = _overlap_pairs(G, T, quotients, d)
        x = _overlap_from_pairs(G, T, A_elems, d, R, quotients, pairs)
        if cross_check and _overlap_intersection(G, T, A_elems, d, R) != x:
            raise RuntimeError("anti-absorbing formulations disagree")
        if x is not None:
            return refuted(R, x, detail=f"pair {i}: T·A meets d·T·A",
                           witness={"pair": i, "d": d}, padded_radius=pad)
        checked.append(i)
    return verified(R, {"pairs": checked}, detail=f"{len(checked)} pair(s) disjoint on window")


def subgroup_nonabsorbing_cert(H: LazySet, F, W, index_budget: int = 64):
    """For a subgroup H of infinite index and finite F, find x ∉ F·H and
    S = {e} ∪ {f·x⁻¹ : f ∈ F}; then ⋂_{s∈S} s·F·H = ∅, so F·H is not absorbing.

    The emptiness follows for every subgroup (g ∈ F·H gives g = f·h, and
    g ∈ f·x⁻¹·F·H then forces x ∈ F·H), so the verdict is Global once the
    window recheck passes.
    """
    G = H.group
    R = _radius(W)
    F = G.sorted(set(F))
    if not F:
        raise ValueError("F must be nonempty")
    idx = subgroup_index_witness(H, W, budget=index_budget)
    if idx.ok and idx.is_global:
        raise ValueError(f"{H.tag} has finite index {len(idx.witness.F)}; "
                         "F·H is absorbing for suitable F")
    pad = R + 2 * G.norm(F) + R
    inH = H.contains_fn(pad)
    inv, mul = G._inv, G._mul

    def in_FH(y):
        return any(inH(mul(inv(f), y)) for f in F)

    x = next((y for y in G.ball(R) if not in_FH(y)), None)
    if x is None:
        return None, no_witness(R, {"radius": R}, detail="F·H covers the window")
    S = [G.identity] + [mul(f, inv(x)) for f in F]
    S = G.sorted(set(S))
    for y in G.ball(R):
        if all(in_FH(mul(inv(s), y)) for s in S):
            return S, refuted(R, y, witness={"x": x, "S": S})
    scope = GLOBAL if H.subgroup else "window"
    return S, verified(R, {"x": x, "S": S}, scope=scope,
                       detail="⋂ s·F·H is empty")
