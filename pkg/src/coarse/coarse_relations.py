"""Semi-decisions for coarse containment A ∝ B and coarse equivalence A ≈ B.

A ∝ B means A ⊆ F·B for a finite F.  On a window W we can verify a given F,
or search for one greedily: every a ∈ A∩W needs a translator t with
t⁻¹a ∈ B, and the cheapest such t has norm d(a, B).
"""

from __future__ import annotations

import itertools

import numpy as np

from .group_core import IntegerLattice
from .lazy_sets import LazySet, _radius, _same_group
from .verdict import (GLOBAL, BoundingWitness, Verdict, consistent, no_witness,
                      refuted, verified)


class EmptyRestriction(ValueError):
    pass


def covered_by(G, a, F, contains_B) -> bool:
    return any(contains_B(G._mul(G._inv(f), a)) for f in F)


def check_witness(A: LazySet, B: LazySet, F, W) -> Verdict:
    """Verified iff every a ∈ A∩W lies in F·B; B is read on the padded window."""
    G = _same_group(A, B)
    F = list(dict.fromkeys(F))
    if not F:
        raise ValueError("F must be nonempty")
    R = _radius(W)
    wit = BoundingWitness(tuple(F), R)
    elems = A.restrict(R)
    if isinstance(G, IntegerLattice) and B.finite is not None and len(F) > 64:
        T = np.asarray(F, dtype=np.int64).reshape(-1, G.dim)
        pad = R + int(np.abs(T).sum(axis=1).max())
        bad = _uncovered_lattice(G, elems, _rows(A, R), B.restrict(pad), T)
    elif B.finite is not None:
        pad = R + G.norm(F)
        mul = G._mul
        cover = {mul(t, b) for b in B.restrict(pad) for t in F}
        bad = next((a for a in elems if a not in cover), None)
    else:
        pad = R + G.norm(F)
        inB = B.contains_fn(pad)
        bad = next((a for a in elems if not covered_by(G, a, F, inB)), None)
    if bad is not None:
        return refuted(R, bad, witness=wit, padded_radius=pad)
    return verified(R, wit, padded_radius=pad)


def _rows(A: LazySet, R: int):
    key = ("rows", R)
    got = A._cache.get(key)
    if got is None:
        got = A._cache[key] = np.asarray(A.restrict(R), dtype=np.int64).reshape(-1, A.group.dim)
    return got


def _uncovered_lattice(G, elems, X, B_elems, T):
    """First a in elems (rows X) outside T + B_elems, by array arithmetic."""
    if not elems:
        return None
    if not B_elems:
        return elems[0]
    P = np.asarray(B_elems, dtype=np.int64).reshape(-1, G.dim)
    S = (P[:, None, :] + T[None, :, :]).reshape(-1, G.dim)
    lo = min(X.min(), S.min())
    base = max(X.max(), S.max()) - lo + 1
    enc = lambda M: ((M - lo) * base ** np.arange(G.dim, dtype=np.int64)).sum(axis=1)
    miss = ~np.isin(enc(X), enc(S))
    return elems[int(np.argmax(miss))] if miss.any() else None


def nearest_translator(G, a, inB, max_norm: int):
    """Minimal-norm t (canonical tie-break) with t⁻¹a ∈ B, or None."""
    for t in G.ball(max_norm):
        if inB(G._mul(G._inv(t), a)):
            return t
    return None


EXACT_BUDGET = 250_000


def exact_cover(G, elems, inB, max_norm: int, max_size: int):
    """Smallest F ⊆ ball(max_norm), |F| <= max_size, covering elems.

    Iterative deepening; each level branches on the translators covering the
    first uncovered element.  None if there is no such F, False if the search
    visits more than EXACT_BUDGET nodes.
    """
    T = G.ball(max_norm)
    masks = []
    for t in T:
        ti = G._inv(t)
        m = 0
        for i, a in enumerate(elems):
            if inB(G._mul(ti, a)):
                m |= 1 << i
        masks.append(m)
    full = (1 << len(elems)) - 1
    by_bit = [[j for j, m in enumerate(masks) if m >> i & 1] for i in range(len(elems))]
    nodes = 0

    def rec(covered, depth, chosen):
        nonlocal nodes
        nodes += 1
        if nodes > EXACT_BUDGET:
            raise OverflowError
        if covered == full:
            return chosen
        if depth == 0:
            return None
        free = ~covered & full
        i = (free & -free).bit_length() - 1
        for j in by_bit[i]:
            got = rec(covered | masks[j], depth - 1, chosen + [j])
            if got is not None:
                return got
        return None

    try:
        for k in range(1, max_size + 1):
            got = rec(0, k, [])
            if got is not None:
                return G.sorted(T[j] for j in got)
    except OverflowError:
        return False
    return None


def find_witness(A: LazySet, B: LazySet, W, max_norm: int, max_size: int) -> Verdict:
    """Greedy search for F with A∩W ⊆ F·B, falling back to an exact cover
    when the greedy choice uses more than max_size translators."""
    G = _same_group(A, B)
    if max_norm < 0 or max_size < 1:
        raise ValueError("budgets must be positive")
    R = _radius(W)
    pad = R + max_norm
    if not B.restrict(pad):
        raise EmptyRestriction(f"{B.tag} is empty on ball({pad})")
    inB = B.contains_fn(pad)
    F = []
    worst_norm, worst_elem, missing = 0, None, []
    for a in A.restrict(R):
        t = nearest_translator(G, a, inB, max_norm)
        if t is None:
            missing.append(a)
            continue
        n = G.word_length(t)
        if n > worst_norm or worst_elem is None:
            worst_norm, worst_elem = n, a
        if t not in F:
            F.append(t)
    budget = {"max_norm": max_norm, "max_size": max_size}
    if missing:
        return no_witness(R, budget, counterexample=missing[0], padded_radius=pad,
                          detail=f"d(a, B) > {max_norm} for {len(missing)} element(s)")
    if not F:
        # A∩W empty: any F works
        return verified(R, BoundingWitness((G.identity,), R), padded_radius=pad)
    F = G.sorted(F)
    if len(F) > max_size:
        exact = exact_cover(G, A.restrict(R), inB, max_norm, max_size)
        if exact is None:
            return no_witness(R, budget, padded_radius=pad,
                              detail=f"no cover by {max_size} translators of norm <= {max_norm}")
        if exact is not False:
            return verified(R, BoundingWitness(tuple(exact), R), padded_radius=pad,
                            detail="exact cover")
        return no_witness(R, budget, padded_radius=pad,
                          detail=f"greedy witness needs {len(F)} translators; exact search over budget")
    return verified(R, BoundingWitness(tuple(F), R), padded_radius=pad,
                    detail=f"max observed d(a, B) = {worst_norm}")


def set_distance(G, x, S) -> int | None:
    """min over s ∈ S of d(x, s); None for empty S."""
    return min((G.distance(x, s) for s in S), default=None)


def hausdorff_window(A: LazySet, B: LazySet, W, padding: int | None = None) -> tuple:
    """Directed distances (sup_a d(a, B), sup_b d(b, A)) on W.

    The far side is read on ball(radius + padding); padding defaults to the
    window radius, so any partner within that distance is seen.
    """
    G = _same_group(A, B)
    R = _radius(W)
    pad = R if padding is None else padding
    Aw, Bw = A.restrict(R), B.restrict(R)
    if not Aw or not Bw:
        raise EmptyRestriction("empty restriction on window")
    Ap, Bp = A.restrict(R + pad), B.restrict(R + pad)
    return (max(set_distance(G, a, Bp) for a in Aw),
            max(set_distance(G, b, Ap) for b in Bw))


def check_equiv(A: LazySet, B: LazySet, W, max_norm: int, max_size: int) -> Verdict:
    """A ≈ B on W: find_witness in both directions."""
    _same_group(A, B)
    R = _radius(W)
    ab = find_witness(A, B, W, max_norm, max_size)
    ba = find_witness(B, A, W, max_norm, max_size)
    wit = {"a_in_b": ab.witness, "b_in_a": ba.witness}
    if ab.ok and ba.ok:
        return verified(R, wit, padded_radius=ab.padded_radius)
    failed = "a_in_b" if not ab.ok else "b_in_a"
    bad = ab if not ab.ok else ba
    return no_witness(R, bad.budget, witness=wit, counterexample=bad.counterexample,
                      detail=f"{failed}: {bad.detail}")


def compose_witnesses(G, F1, F2) -> tuple:
    """A ⊆ F1·B and B ⊆ F2·C give A ⊆ (F1·F2)·C."""
    return tuple(G.sorted(G._mul(f, g) for f in F1 for g in F2))


def check_subgroup(H: LazySet, W) -> Verdict:
    """Closure of H∩W under x·y⁻¹, checked where the product stays in W."""
    G = H.group
    R = _radius(W)
    elems = H.restrict(R)
    if G.identity not in elems:
        return refuted(R, G.identity, detail="identity missing")
    inH = H.contains_fn(2 * R)
    for x, y in itertools.product(elems, repeat=2):
        z = G._mul(x, G._inv(y))
        if not inH(z):
            return refuted(R, z, detail=f"{G.format(x)}·{G.format(y)}⁻¹ not in H")
    return verified(R)


def coset_representatives(H: LazySet, R: int) -> list:
    """Left coset representatives of H met by ball(R), chosen greedily."""
    G = H.group
    inH = H.contains_fn(2 * R)
    reps: list = []
    for g in G.ball(R):
        if not any(inH(G._mul(G._inv(r), g)) for r in reps):
            reps.append(g)
    return reps


def subgroup_index_witness(H: LazySet, W, budget: int = 64) -> Verdict:
    """Coset enumeration.  If ball(R) and ball(R+1) meet the same cosets then
    every element lies in one of them (induct on length: g = s·g'), so the
    representatives are a global witness for G ⊆ F·H.
    """
    R = _radius(W)
    if not H.subgroup:
        raise ValueError(f"{H.tag} is not tagged as a subgroup")
    chk = check_subgroup(H, W)
    if not chk.ok:
        raise ValueError(f"{H.tag} fails the subgroup check: {chk.detail}")
    prev = None
    history = []
    for r in range(0, R + 1):
        reps = coset_representatives(H, r)
        history.append(len(reps))
        if prev is not None and len(reps) == len(prev):
            return verified(r, BoundingWitness(tuple(reps), GLOBAL), scope=GLOBAL,
                            detail=f"index {len(reps)}", budget={"counts": history})
        if len(reps) > budget:
            break
        prev = reps
    return consistent(R, BoundingWitness(tuple(reps), R),
                      budget={"counts": history},
                      detail=f"{len(reps)} cosets met by ball({R}) and still growing")
