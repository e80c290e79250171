"""n-divisibility, isolation gaps, principal O-sets and paradoxical witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field

from .coarse_relations import check_witness
from .lazy_sets import (INF, Frontier, FrontierError, LazySet, _radius, _same_group,
                   right_translate)
from .verdict import (BoundingWitness, MalformedWitness, Verdict, no_witness,
                      refuted, verified)


@dataclass
class DivisionWitness:
    """Pairwise disjoint parts of A, each with translators F_j such that A ⊆ F_j·part_j."""

    parts: list
    witnesses: list

    def __post_init__(self):
        if len(self.parts) != len(self.witnesses):
            raise MalformedWitness("one bounding witness per part is required")
        if not self.parts:
            raise MalformedWitness("a division needs at least one part")
        self.witnesses = [w if isinstance(w, BoundingWitness) else BoundingWitness(tuple(w), 0)
                          for w in self.witnesses]

    @property
    def n(self) -> int:
        return len(self.parts)


def _first_overlap(G, restricted):
    owner = {}
    for j, elems in enumerate(restricted):
        for x in elems:
            if x in owner:
                return owner[x], j, x
            owner[x] = j
    return None


def check_division(A: LazySet, witness: DivisionWitness, W) -> Verdict:
    G = _same_group(A, *witness.parts)
    R = _radius(W)
    restricted = [p.restrict(R) for p in witness.parts]
    clash = _first_overlap(G, restricted)
    if clash:
        i, j, x = clash
        raise MalformedWitness(f"parts {i} and {j} overlap at {G.format(x)}", x)
    inA = A.contains_fn(R)
    for j, elems in enumerate(restricted):
        for x in elems:
            if not inA(x):
                return refuted(R, x, detail=f"part {j} is not contained in A")
    for j, (part, w) in enumerate(zip(witness.parts, witness.witnesses)):
        v = check_witness(A, part, w.F, R)
        if not v.ok:
            v.detail = f"A is not covered by F·part {j}"
            return v
    return verified(R, {"n": witness.n, "F": [w.F for w in witness.witnesses]})


@dataclass(frozen=True)
class Isolation:
    element: object
    isolation: int
    exact: bool = True


def isolation_of(A: LazySet, g, max_radius: int, inA=None):
    """(d(g, A∖{g}), exact).  When nothing is found within max_radius the
    value max_radius + 1 is a lower bound and exact is False."""
    G = A.group
    inA = inA or A.contains_fn(G.word_length(g) + max_radius)
    e = G.identity
    for t in G.ball(max_radius):
        if t != e and inA(G._mul(t, g)):
            return G.word_length(t), True
    return max_radius + 1, False


def isolation_profile(A: LazySet, W, padding: int | None = None) -> list:
    """Isolation of every a ∈ A∩W, most isolated first."""
    R = _radius(W)
    pad = R if padding is None else padding
    elems = A.restrict(R)
    if not elems:
        raise ValueError("A is empty on the window")
    inA = A.contains_fn(R + pad)
    out = [Isolation(a, *isolation_of(A, a, pad, inA)) for a in elems]
    order = {a: i for i, a in enumerate(elems)}
    out.sort(key=lambda p: (-p.isolation, order[p.element]))
    return out


@dataclass
class GapCertificate:
    """Elements of A with strictly increasing isolation; unbounded isolation
    rules out 2-divisibility."""

    pairs: list = field(default_factory=list)
    frontier: float = INF
    targets: tuple = ()

    def to_json(self, group) -> dict:
        return {"pairs": [{"g": group.format(p.element), "isolation": p.isolation,
                           "exact": p.exact} for p in self.pairs],
                "frontier": None if self.frontier == INF else self.frontier,
                "targets": list(self.targets)}

    def recheck(self, A: LazySet) -> bool:
        last = -1
        for p in self.pairs:
            iso, exact = isolation_of(A, p.element, p.isolation if p.exact else p.isolation - 1)
            if exact and iso != p.isolation or iso < p.isolation or p.isolation <= last:
                return False
            last = p.isolation
        return True


def certify_not_2_divisible(A: LazySet, targets, max_radius: int = 256,
                            max_isolation: int = 256):
    """For each target C find g ∈ A with certified isolation > C.

    Returns a GapCertificate, or a NoWitnessWithinBudget verdict when the
    scan (elements up to ``max_radius``) or A's frontier runs out first.
    """
    G = A.group
    targets = tuple(targets)
    if list(targets) != sorted(targets):
        raise ValueError("targets must be increasing")
    cert = GapCertificate(targets=targets, frontier=A.frontier)
    pending = list(targets)
    last_iso = -1
    budget = {"max_radius": max_radius}
    wl = G.word_length
    for x in A.stream():
        if not pending:
            break
        if isinstance(x, Frontier):
            if x.length >= max_radius:
                break
            continue
        if wl(x) > max_radius:
            break
        need = max(pending[0], last_iso)
        try:
            inA = A.contains_fn(wl(x) + need)
        except FrontierError:
            return no_witness(wl(x), budget, detail=f"frontier {A.frontier} reached before target {pending[0]}")
        if isolation_of(A, x, need, inA)[1]:
            continue
        # certified: nothing within distance need.  Pin the exact value if the set is known far enough.
        reach = min(max_isolation, (A.frontier - wl(x)) if A.frontier != INF else max_isolation)
        try:
            iso, exact = isolation_of(A, x, int(reach), A.contains_fn(wl(x) + int(reach)))
        except FrontierError:
            iso, exact = need + 1, False
        cert.pairs.append(Isolation(x, iso, exact))
        last_iso = iso
        while pending and pending[0] < iso:
            pending.pop(0)
    if pending:
        return no_witness(max_radius, budget, detail=f"no element with isolation > {pending[0]} found")
    return cert


def o_set(A: LazySet, h) -> LazySet:
    """O(A, h) = {g : g·h ∈ A} = A·h⁻¹ for the principal point h."""
    G = A.group
    return right_translate(A, G._inv(h))


def check_paradoxical_witness(A: LazySet, first: list, second: list, W) -> Verdict:
    """``first`` and ``second`` are lists of (piece, translator).  Verified iff
    on W all pieces are pairwise disjoint subsets of A and each family's
    translates cover A∩W.  Pieces are read on W padded by the largest
    translator norm."""
    if not first or not second:
        raise MalformedWitness("both families need at least one piece")
    G = _same_group(A, *[p for p, _ in first + second])
    R = _radius(W)
    pad = R + G.norm([g for _, g in first + second])
    pieces = [p for p, _ in first + second]
    restricted = [p.restrict(pad) for p in pieces]
    clash = _first_overlap(G, restricted)
    if clash:
        i, j, x = clash
        raise MalformedWitness(f"pieces {i} and {j} overlap at {G.format(x)}", x)
    inA = A.contains_fn(pad)
    for j, elems in enumerate(restricted):
        for x in elems:
            if not inA(x):
                return refuted(R, x, detail=f"piece {j} leaves A", padded_radius=pad)
    for name, fam in (("first", first), ("second", second)):
        tests = [(G._inv(g), p.contains_fn(pad)) for p, g in fam]
        for x in A.restrict(R):
            if not any(inP(G._mul(gi, x)) for gi, inP in tests):
                return refuted(R, x, detail=f"{name} family does not cover", padded_radius=pad)
    return verified(R, {"first": [g for _, g in first], "second": [g for _, g in second]},
                    padded_radius=pad)
