"""Possibly infinite subsets of a group, evaluated on finite windows.

A :class:`LazySet` knows how to restrict itself to a ball.  It may also have
a decidable membership predicate.  Every set declares a *frontier*: the
largest radius on which its restriction is known to be complete (``inf`` for
sets given by a predicate or for complete finite sets).  Streams interleave
elements with :class:`Frontier` markers in nondecreasing word length.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, NamedTuple

from .group_core import GroupError, GroupModel
from .verdict import Verdict, no_witness

INF = math.inf


class Frontier(NamedTuple):
    """Marker: every element of word length <= ``length`` has been emitted."""

    length: float


class FrontierError(LookupError):
    """The set is not known far enough out to answer."""


class UndecidableMembership(TypeError):
    pass


@dataclass(frozen=True)
class Window:
    group: GroupModel
    radius: int

    @property
    def elements(self) -> tuple:
        return self.group.ball(self.radius)

    def padded(self, pad: int) -> "Window":
        return Window(self.group, self.radius + pad)

    def __contains__(self, x):
        return self.group.word_length(x) <= self.radius


def window(group: GroupModel, radius: int) -> Window:
    return Window(group, radius)


def _radius(W) -> int:
    return W.radius if isinstance(W, Window) else int(W)


class LazySet:
    """A subset of ``group`` with windowed evaluation.

    Use the ``from_*`` constructors or the set operations below rather than
    calling ``__init__`` directly.
    """

    def __init__(self, group: GroupModel, *, contains: Callable | None = None,
                 restrict: Callable[[int], list] | None = None,
                 finite: Iterable | None = None, frontier: float = INF,
                 tag: str = "", subgroup: bool = False, meta: dict | None = None):
        self.group = group
        self.tag = tag
        self.subgroup = subgroup
        self.meta = dict(meta or {})
        self.frontier = frontier
        self.finite: frozenset | None = None
        if finite is not None:
            self.finite = frozenset(finite)
            self._sorted_finite = group.sorted(self.finite)
        if contains is None and restrict is None and finite is None:
            raise ValueError("a LazySet needs membership, a restriction rule, or elements")
        self._contains = contains
        self._restrict = restrict
        self._cache: dict[int, list] = {}

    # -- constructors ----------------------------------------------------
    @classmethod
    def from_predicate(cls, group, pred, tag="", subgroup=False, meta=None):
        return cls(group, contains=pred, tag=tag, subgroup=subgroup, meta=meta)

    @classmethod
    def from_finite(cls, group, elements, tag="", frontier=INF, meta=None):
        return cls(group, finite=elements, tag=tag, frontier=frontier, meta=meta)

    @classmethod
    def from_stream(cls, group, factory: Callable[[], Iterator], tag="", meta=None):
        """``factory()`` returns a fresh cursor yielding elements and Frontier markers."""
        seen: list = []
        state = {"frontier": -1, "cursor": None, "done": False}

        def advance(radius):
            if state["cursor"] is None:
                state["cursor"] = iter(factory())
            while state["frontier"] < radius and not state["done"]:
                try:
                    item = next(state["cursor"])
                except StopIteration:
                    state["done"] = True
                    state["frontier"] = INF
                    break
                if isinstance(item, Frontier):
                    if item.length < state["frontier"]:
                        raise ValueError("stream frontier went backwards")
                    state["frontier"] = item.length
                else:
                    seen.append(item)
            if state["frontier"] < radius:
                raise FrontierError(f"stream complete only up to {state['frontier']}")

        def restrict(radius):
            advance(radius)
            wl = group.word_length
            return [x for x in seen if wl(x) <= radius]

        s = cls(group, restrict=restrict, tag=tag, meta=meta)
        s._stream_factory = factory
        return s

    # -- queries -----------------------------------------------------------
    @property
    def has_membership(self) -> bool:
        return self._contains is not None or (self.finite is not None and self.frontier == INF)

    @property
    def is_finite(self) -> bool:
        return self.finite is not None and self.frontier == INF

    def __contains__(self, x) -> bool:
        if self.finite is not None:
            if self.frontier != INF and self.group.word_length(x) > self.frontier:
                raise FrontierError(f"{self.tag or 'set'} known only up to radius {self.frontier}")
            return x in self.finite
        if self._contains is not None:
            return bool(self._contains(x))
        r = self.group.word_length(x)
        return x in self._restrict_set(r)

    def _restrict_set(self, radius):
        key = ("set", radius)
        got = self._cache.get(key)
        if got is None:
            got = set(self.restrict(radius))
            self._cache[key] = got
        return got

    def contains_fn(self, radius: int) -> Callable:
        """A membership test valid for elements of length <= radius."""
        if self.has_membership:
            return self.__contains__
        if radius > self.frontier:
            raise FrontierError(f"{self.tag or 'set'} known only up to radius {self.frontier}")
        return self._restrict_set(radius).__contains__

    def restrict(self, W) -> list:
        """A ∩ ball(radius) in canonical order."""
        radius = _radius(W)
        got = self._cache.get(radius)
        if got is not None:
            return list(got)
        if radius > self.frontier:
            raise FrontierError(f"{self.tag or 'set'} known only up to radius {self.frontier}")
        g = self.group
        if self.finite is not None:
            wl = g.word_length
            out = [x for x in self._sorted_finite if wl(x) <= radius]
        elif self._restrict is not None:
            out = g.sorted(self._restrict(radius))
        else:
            out = [x for x in g.ball(radius) if self._contains(x)]
        self._cache[radius] = out
        return list(out)

    def stream(self) -> Iterator:
        """Elements in canonical order interleaved with Frontier markers."""
        if self.finite is not None:
            wl = self.group.word_length
            last = 0
            for x in self._sorted_finite:
                l = wl(x)
                if l > self.frontier:
                    break
                while last < l:
                    yield Frontier(last)
                    last += 1
                yield x
            yield Frontier(self.frontier)
            return
        if getattr(self, "_stream_factory", None) is not None:
            yield from self._stream_factory()
            return
        for r in itertools.count():
            if r > self.frontier:
                return
            wl = self.group.word_length
            for x in self.restrict(r):
                if wl(x) == r:
                    yield x
            yield Frontier(r)

    def elements(self, limit: int | None = None) -> Iterator:
        """Elements only, in canonical order."""
        it = (x for x in self.stream() if not isinstance(x, Frontier))
        return itertools.islice(it, limit) if limit is not None else it

    def __repr__(self):
        return f"LazySet({self.tag or '?'} in {self.group.name})"


def _same_group(*sets):
    g = sets[0].group
    for s in sets[1:]:
        if s.group != g:
            raise GroupError(f"operands live in different groups: {g.name} vs {s.group.name}")
    return g


def restrict(A: LazySet, W) -> list:
    return A.restrict(W)


def translate(g, A: LazySet) -> LazySet:
    """Left translate gA = {g·a}."""
    G = A.group
    G.check(g)
    if g == G.identity:
        return A
    gi = G._inv(g)
    n = G.word_length(g)
    tag = f"{G.format(g)}·{A.tag}"
    if A.finite is not None:
        frontier = A.frontier - n if A.frontier != INF else INF
        return LazySet.from_finite(G, (G._mul(g, a) for a in A.finite), tag=tag,
                                   frontier=frontier)
    contains = (lambda x: G._mul(gi, x) in A) if A.has_membership else None

    def restrict_(r):
        wl = G.word_length
        return [y for y in (G._mul(g, a) for a in A.restrict(r + n)) if wl(y) <= r]

    return LazySet(G, contains=contains, restrict=restrict_, tag=tag,
                   frontier=A.frontier - n if A.frontier != INF else INF,
                   subgroup=False)


def right_translate(A: LazySet, g) -> LazySet:
    """Right translate A·g = {x : x·g⁻¹ ∈ A}."""
    G = A.group
    G.check(g)
    if g == G.identity:
        return A
    gi = G._inv(g)
    n = G.word_length(g)
    tag = f"{A.tag}·{G.format(g)}"
    if A.finite is not None:
        frontier = A.frontier - n if A.frontier != INF else INF
        return LazySet.from_finite(G, (G._mul(a, g) for a in A.finite), tag=tag,
                                   frontier=frontier)
    contains = (lambda x: G._mul(x, gi) in A) if A.has_membership else None

    def restrict_(r):
        wl = G.word_length
        return [y for y in (G._mul(a, g) for a in A.restrict(r + n)) if wl(y) <= r]

    return LazySet(G, contains=contains, restrict=restrict_, tag=tag,
                   frontier=A.frontier - n if A.frontier != INF else INF)


def finite_product(F: Iterable, A: LazySet) -> LazySet:
    """F·A, the union of the left translates f·A."""
    G = A.group
    F = G.sorted(F)
    if not F:
        raise ValueError("F must be nonempty")
    if F == [G.identity]:
        return A
    return union(*[translate(f, A) for f in F], tag=f"F·{A.tag}")


def union(*sets: LazySet, tag: str | None = None) -> LazySet:
    G = _same_group(*sets)
    tag = tag or "∪".join(s.tag for s in sets)
    if all(s.finite is not None for s in sets):
        return LazySet.from_finite(G, set().union(*(s.finite for s in sets)), tag=tag,
                                   frontier=min(s.frontier for s in sets))
    contains = None
    if all(s.has_membership for s in sets):
        contains = lambda x: any(x in s for s in sets)
    return LazySet(G, contains=contains, tag=tag,
                   restrict=lambda r: set().union(*(s.restrict(r) for s in sets)),
                   frontier=min(s.frontier for s in sets))


def intersection(A: LazySet, B: LazySet) -> LazySet:
    G = _same_group(A, B)
    tag = f"{A.tag}∩{B.tag}"
    if A.is_finite and B.has_membership:
        return LazySet.from_finite(G, (x for x in A.finite if x in B), tag=tag)
    if B.is_finite and A.has_membership:
        return LazySet.from_finite(G, (x for x in B.finite if x in A), tag=tag)
    contains = (lambda x: x in A and x in B) if A.has_membership and B.has_membership else None
    return LazySet(G, contains=contains, tag=tag,
                   restrict=lambda r: set(A.restrict(r)) & set(B.restrict(r)),
                   frontier=min(A.frontier, B.frontier))


def difference(A: LazySet, B: LazySet) -> LazySet:
    G = _same_group(A, B)
    tag = f"{A.tag}∖{B.tag}"
    if A.is_finite and B.has_membership:
        return LazySet.from_finite(G, (x for x in A.finite if x not in B), tag=tag)
    contains = (lambda x: x in A and x not in B) if A.has_membership and B.has_membership else None
    return LazySet(G, contains=contains, tag=tag,
                   restrict=lambda r: set(A.restrict(r)) - set(B.restrict(r)),
                   frontier=min(A.frontier, B.frontier))


def inverse(A: LazySet) -> LazySet:
    G = A.group
    tag = f"({A.tag})⁻¹"
    if A.finite is not None:
        return LazySet.from_finite(G, (G._inv(a) for a in A.finite), tag=tag,
                                   frontier=A.frontier)
    contains = (lambda x: G._inv(x) in A) if A.has_membership else None
    return LazySet(G, contains=contains, tag=tag, subgroup=A.subgroup,
                   restrict=lambda r: [G._inv(a) for a in A.restrict(r)],
                   frontier=A.frontier)


def product_set(A: LazySet, B: LazySet) -> LazySet:
    """A·B⁻¹.  One operand must be a complete finite set."""
    G = _same_group(A, B)
    tag = f"{A.tag}·({B.tag})⁻¹"
    if A.is_finite and B.is_finite:
        return LazySet.from_finite(
            G, {G._mul(a, G._inv(b)) for a in A.finite for b in B.finite}, tag=tag)
    if B.is_finite:
        binv = [G._inv(b) for b in B.finite]
        # x ∈ A·B⁻¹ iff x·b ∈ A for some b ∈ B
        contains = (lambda x: any(G._mul(x, b) in A for b in B.finite)) if A.has_membership else None
        n = G.norm(B.finite)
        restrict_ = lambda r: [y for a in A.restrict(r + n) for b in binv
                               if G.word_length(y := G._mul(a, b)) <= r]
        return LazySet(G, contains=contains, restrict=restrict_, tag=tag,
                       frontier=A.frontier - n if A.frontier != INF else INF)
    if A.is_finite:
        # x ∈ A·B⁻¹ iff x⁻¹·a ∈ B for some a ∈ A
        n = G.norm(A.finite)
        contains = (lambda x: any(G._mul(G._inv(x), a) in B for a in A.finite)) if B.has_membership else None
        restrict_ = lambda r: [y for a in A.finite for b in B.restrict(r + n)
                               if G.word_length(y := G._mul(a, G._inv(b))) <= r]
        return LazySet(G, contains=contains, restrict=restrict_, tag=tag,
                       frontier=B.frontier - n if B.frontier != INF else INF)
    raise ValueError("product set needs at least one complete finite operand")


_OPS = {
    "union": union,
    "intersection": intersection,
    "difference": difference,
    "product": product_set,
}


def set_algebra(A: LazySet, B: LazySet | None, op: str) -> LazySet:
    if op == "inverse":
        return inverse(A)
    if B is None:
        raise ValueError(f"{op} needs two operands")
    try:
        return _OPS[op](A, B)
    except KeyError:
        raise ValueError(f"unknown set operation {op!r}") from None


# -- left G-ideals generated by sets --------------------------------------------

class IdealSpec:
    """The left ideal generated by A_1, A_2, ...: all B with B ∝ A_n for some n.

    Only the generators are stored, so closure under subsets, finite unions
    and left translation holds by construction.
    """

    def __init__(self, generators: Iterable[LazySet], tag: str = ""):
        self.generators = list(generators)
        if not self.generators:
            raise ValueError("an ideal needs at least one generator")
        _same_group(*self.generators)
        self.group = self.generators[0].group
        self.tag = tag

    def __repr__(self):
        return f"IdealSpec({self.tag or [g.tag for g in self.generators]})"


def ideal_contains(M: IdealSpec, B: LazySet, W, max_norm: int = 4,
                   max_size: int = 16) -> Verdict:
    """Semi-decide B ∈ M by searching B ∝ A_n on W for each generator in turn."""
    from .coarse_relations import find_witness

    best = None
    for n, A in enumerate(M.generators, start=1):
        if not A.restrict(_radius(W) + max_norm):
            continue
        v = find_witness(B, A, W, max_norm, max_size)
        if v.ok:
            v.witness = {"generator": n, "F": v.witness.F}
            return v
        best = v
    budget = {"max_norm": max_norm, "max_size": max_size, "generators": len(M.generators)}
    if best is None:
        return no_witness(_radius(W), budget, detail="all generators empty on window")
    return no_witness(_radius(W), budget, detail=best.detail)
