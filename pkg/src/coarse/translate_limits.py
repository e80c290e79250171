"""Translate limits: finite shadows of the orbit closure of a set.

A translate is A·g = {x : x·g⁻¹ ∈ A}.  Its R-pattern is the bitmask of
ball(R) ∩ A·g in canonical ball order.  A ≿ B holds when translates of A
converge pointwise to some B' ≈ B; on finite data this becomes evidence
(R, g_R) with matching R-patterns, and is never refuted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .group_core import GroupModel
from .lazy_sets import LazySet, _same_group, finite_product
from .verdict import BoundingWitness, Verdict, no_witness, refuted, verified

BALL_ORDER = "shortlex-zigzag/1"


@dataclass(frozen=True)
class Pattern:
    radius: int
    bits: int
    source: object = None

    @property
    def hex(self) -> str:
        return format(self.bits, "x")

    def support(self, G: GroupModel) -> list:
        return [x for i, x in enumerate(G.ball(self.radius)) if self.bits >> i & 1]

    def restrict(self, G: GroupModel, r: int) -> "Pattern":
        if r > self.radius:
            raise ValueError("cannot restrict to a larger radius")
        n = len(G.ball(r))
        return Pattern(r, self.bits & ((1 << n) - 1), self.source)

    def to_json(self, G) -> dict:
        return {"radius": self.radius, "bits": self.hex, "order": BALL_ORDER,
                "source": None if self.source is None else G.format(self.source)}


def _mask(G, members, R) -> int:
    bits = 0
    for i, x in enumerate(G.ball(R)):
        if x in members:
            bits |= 1 << i
    return bits


def pattern_of(A: LazySet, g, R: int) -> Pattern:
    """Bit i set iff ball(R)[i]·g⁻¹ ∈ A."""
    G = A.group
    G.check(g)
    gi = G._inv(g)
    inA = A.contains_fn(R + G.word_length(g))
    mul = G._mul
    bits = 0
    for i, x in enumerate(G.ball(R)):
        if inA(mul(x, gi)):
            bits |= 1 << i
    return Pattern(R, bits, g)


def set_pattern(B: LazySet, R: int) -> Pattern:
    """B ∩ ball(R) as a pattern (the translate by e)."""
    return Pattern(R, _mask(B.group, set(B.restrict(R)), R), B.group.identity)


@dataclass
class PatternClass:
    pattern: Pattern
    count: int
    samples: list


def enumerate_patterns(A: LazySet, R: int, g_range: int, samples: int = 3,
                       max_patterns: int | None = None) -> list:
    """Distinct R-patterns of A·g over g ∈ ball(g_range), in order of first occurrence."""
    G = A.group
    seen: dict[int, PatternClass] = {}
    for g in G.ball(g_range):
        p = pattern_of(A, g, R)
        cls = seen.get(p.bits)
        if cls is None:
            if max_patterns is not None and len(seen) >= max_patterns:
                raise OverflowError(f"more than {max_patterns} patterns")
            seen[p.bits] = PatternClass(p, 1, [g])
        else:
            cls.count += 1
            if len(cls.samples) < samples:
                cls.samples.append(g)
    return list(seen.values())


@dataclass
class PreorderEvidence:
    """A ≿ B on finite data: for each radius R a g_R whose translate matches B'."""

    a_tag: str
    b_tag: str
    entries: list = field(default_factory=list)
    missing: list = field(default_factory=list)
    b_prime: str | None = None
    b_witness: BoundingWitness | None = None

    @property
    def radius(self):
        return self.entries[-1][0] if self.entries else None

    def g_at(self, R):
        return dict(self.entries)[R]

    def to_json(self, G) -> dict:
        out = {"direction": f"{self.a_tag} ≿ {self.b_tag}", "status": "consistent_up_to",
               "radius": self.radius,
               "entries": [{"R": R, "g": G.format(g)} for R, g in self.entries]}
        if self.missing:
            out["missing"] = self.missing
        if self.b_prime:
            out["b_prime"] = self.b_prime
        return out


def _search(A, target: Pattern, g_range: int):
    G = A.group
    for g in G.ball(g_range):
        if pattern_of(A, g, target.radius).bits == target.bits:
            return g
    return None


def preorder_evidence(A: LazySet, B: LazySet, R_schedule, g_range: int,
                      B_prime: LazySet | None = None,
                      B_witness: BoundingWitness | None = None):
    """Search g ∈ ball(g_range) with (A·g) ∩ ball(R) = B' ∩ ball(R) for each R.

    B' defaults to B; a caller-supplied B' must come with a witness for
    B ≈ B'.  Radii without a match are listed as missing; with no match at
    all the result is a NoWitnessWithinBudget verdict.
    """
    _same_group(A, B)
    Bp = B if B_prime is None else B_prime
    if B_prime is not None and B_witness is None:
        raise ValueError("a substitute B' needs a witness for B ≈ B'")
    schedule = sorted(set(R_schedule))
    ev = PreorderEvidence(A.tag, B.tag, b_prime=None if B_prime is None else Bp.tag,
                          b_witness=B_witness)
    for R in schedule:
        g = _search(A, set_pattern(Bp, R), g_range)
        if g is None:
            ev.missing.append(R)
        else:
            ev.entries.append((R, g))
    if not ev.entries:
        return no_witness(max(schedule), {"g_range": g_range, "schedule": schedule},
                          detail="no translate matched at any scheduled radius")
    return ev


def recheck_evidence(A: LazySet, B: LazySet, ev: PreorderEvidence) -> bool:
    return all(pattern_of(A, g, R).bits == set_pattern(B, R).bits for R, g in ev.entries)


def compose_evidence(e1: PreorderEvidence, e2: PreorderEvidence, R: int,
                     A: LazySet, C: LazySet) -> PreorderEvidence:
    """A ≿ B and B ≿ C give A ≿ C through f = g·h.

    With (B·h) ∩ ball(R) = C ∩ ball(R) and (A·g) ∩ ball(R1) = B ∩ ball(R1)
    for R1 >= R + |h|, every x ∈ ball(R) has x·h⁻¹ ∈ ball(R1), so
    x ∈ A·(g·h) iff x ∈ C.  The composed pattern is re-checked directly.
    """
    G = A.group
    h_by_r = dict(e2.entries)
    h = h_by_r.get(R)
    if h is None:
        cands = [r for r in h_by_r if r >= R]
        if not cands:
            raise ValueError(f"second evidence has no radius >= {R}")
        h = h_by_r[min(cands)]
    need = R + G.word_length(h)
    src = [(r, g) for r, g in e1.entries if r >= need]
    if not src:
        raise ValueError(f"first evidence needs a radius >= {need}")
    _, g = src[0]
    f = G._mul(g, h)
    if pattern_of(A, f, R).bits != set_pattern(C, R).bits:
        raise ArithmeticError("composed translate does not match")
    return PreorderEvidence(e1.a_tag, e2.b_tag, [(R, f)])


def translate_action_compat(F, A: LazySet, g, R: int) -> Verdict:
    """pattern_of(F·A, g, R) against F·(support of A's pattern at g), both on ball(R)."""
    G = A.group
    F = G.sorted(F)
    direct = pattern_of(finite_product(F, A), g, R)
    pad = R + G.norm(F)
    supp = pattern_of(A, g, pad).support(G)
    spread = {G._mul(f, x) for f in F for x in supp}
    other = _mask(G, spread, R)
    if direct.bits == other:
        return verified(R, {"pattern": direct.hex}, padded_radius=pad)
    diff = direct.bits ^ other
    i = (diff & -diff).bit_length() - 1
    return refuted(R, G.ball(R)[i], detail="translate and product disagree", padded_radius=pad)


@dataclass
class ProbeReport:
    radius: int
    probe_radius: int
    consistent: list = field(default_factory=list)
    flagged: list = field(default_factory=list)

    @property
    def minimal_consistent(self) -> bool:
        return not self.flagged

    def to_json(self, G) -> dict:
        enc = lambda rows: [{"pattern": p.hex, "g": G.format(p.source),
                             "h": None if h is None else G.format(h)} for p, h in rows]
        return {"radius": self.radius, "probe_radius": self.probe_radius,
                "consistent": enc(self.consistent), "flagged": enc(self.flagged),
                "order": BALL_ORDER}


def minimal_type_probe(A: LazySet, R: int, g_range: int, probe_radius: int | None = None,
                       h_range: int | None = None) -> ProbeReport:
    """For each R-pattern P of A, take B = support of P (empty outside ball(R))
    and look for h with (B·h) ∩ ball(r) = A ∩ ball(r), r = R // 2 by default.
    Patterns without such h are flagged as candidates against minimal type."""
    G = A.group
    r = R // 2 if probe_radius is None else probe_radius
    if r > R:
        raise ValueError("probe radius must not exceed the pattern radius")
    hr = R - r if h_range is None else h_range
    target = set_pattern(A, r)
    rep = ProbeReport(R, r)
    for cls in enumerate_patterns(A, R, g_range):
        B = LazySet.from_finite(G, cls.pattern.support(G), tag="pattern")
        h = _search(B, target, hr)
        (rep.consistent if h is not None else rep.flagged).append((cls.pattern, h))
    return rep
