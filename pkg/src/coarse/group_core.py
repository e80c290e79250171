"""Finitely generated groups with a word metric.

Elements are plain hashable canonical forms so that sets of elements stay
cheap: integer tuples for Z^d and reduced letter tuples for free groups
(letter ``i`` is the i-th generator, ``-i`` its inverse).

Canonical order is shortlex: word length first, then lexicographic on a
per-coordinate key in which 0 < 1 < -1 < 2 < -2 < ...  For free groups the
letter order is a < a^-1 < b < b^-1 < ...  The metric is right-invariant:
``distance(g, h) = word_length(g * h^-1)``.
"""

from __future__ import annotations

import re
import threading
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

Element = Hashable

LETTERS = "abcdefghijklmnopqrstuvwxyz"


class GroupError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def _zigzag(n: int) -> int:
    return 2 * n - 1 if n > 0 else -2 * n


class GroupModel:
    """Base class. Subclasses provide the group operations and syntax.

    Generic word length and balls are computed by breadth-first search over
    left multiplication by generators and memoized; concrete models override
    them with closed forms.
    """

    name: str = "G"
    max_ball_size: int = 2_000_000

    def __init__(self):
        self._lock = threading.Lock()
        self._balls: dict[int, tuple] = {}
        self._lengths: dict = {}
        self._bfs_radius = -1
        self._bfs_frontier: list = []

    # -- operations every model must supply --------------------------------
    @property
    def identity(self) -> Element:
        raise NotImplementedError

    @property
    def generators(self) -> list:
        raise NotImplementedError

    def _mul(self, a, b):
        raise NotImplementedError

    def _inv(self, a):
        raise NotImplementedError

    def is_element(self, x) -> bool:
        raise NotImplementedError

    def element_key(self, x) -> tuple:
        """Tie-break key within a sphere; must be a total order."""
        raise NotImplementedError

    def format(self, x) -> str:
        return repr(x)

    def parse(self, text: str):
        raise NotImplementedError

    # -- public checked operations -----------------------------------------
    def check(self, *xs):
        for x in xs:
            if not self.is_element(x):
                raise GroupError(f"{x!r} is not an element of {self.name}")

    def mul(self, a, b):
        self.check(a, b)
        return self._mul(a, b)

    def inv(self, a):
        self.check(a)
        return self._inv(a)

    def product(self, *xs):
        out = self.identity
        for x in xs:
            out = self._mul(out, x)
        return out

    def power(self, g, n: int):
        base = g if n >= 0 else self._inv(g)
        out = self.identity
        for _ in range(abs(n)):
            out = self._mul(out, base)
        return out

    def sort_key(self, x) -> tuple:
        return (self.word_length(x), self.element_key(x))

    def sorted(self, xs: Iterable) -> list:
        return sorted(set(xs), key=self.sort_key)

    # -- metric --------------------------------------------------------------
    def word_length(self, g) -> int:
        if g in self._lengths:
            return self._lengths[g]
        r = self._bfs_radius
        while g not in self._lengths:
            r += 1
            if r > 64:
                raise BudgetExceeded(f"word length of {g!r} exceeds BFS budget")
            self.ball(r)
        return self._lengths[g]

    def distance(self, g, h) -> int:
        return self.word_length(self._mul(g, self._inv(h)))

    def norm(self, xs: Iterable) -> int:
        return max((self.word_length(x) for x in xs), default=0)

    def ball(self, radius: int) -> tuple:
        """Elements of word length <= radius in canonical order."""
        if radius < 0:
            raise ValueError("radius must be non-negative")
        cached = self._balls.get(radius)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._balls.get(radius)
            if cached is None:
                cached = self._compute_ball(radius)
                self._balls[radius] = cached
        return cached

    def sphere(self, radius: int) -> tuple:
        return tuple(x for x in self.ball(radius) if self.word_length(x) == radius)

    def sphere_iter(self, radius: int):
        """Elements of word length exactly ``radius`` in canonical order, lazily
        where the model allows it."""
        yield from self.sphere(radius)

    def canonical(self, start: int = 0, stop: int | None = None):
        """All elements with start <= length (<= stop) in canonical order."""
        r = start
        while stop is None or r <= stop:
            yield from self.sphere_iter(r)
            r += 1

    def _compute_ball(self, radius):
        # generic BFS; extends the memoized length table
        if self._bfs_radius < 0:
            e = self.identity
            self._lengths[e] = 0
            self._bfs_frontier = [e]
            self._bfs_radius = 0
        while self._bfs_radius < radius:
            nxt = []
            for x in self._bfs_frontier:
                for s in self.generators:
                    y = self._mul(s, x)
                    if y not in self._lengths:
                        self._lengths[y] = self._bfs_radius + 1
                        nxt.append(y)
            self._bfs_radius += 1
            self._bfs_frontier = nxt
            if len(self._lengths) > self.max_ball_size:
                raise BudgetExceeded(f"ball({radius}) in {self.name} is too large")
        members = [x for x, l in self._lengths.items() if l <= radius]
        return tuple(sorted(members, key=self.sort_key))

    # -- double balls: x in ball(n) * s * ball(n) -----------------------------
    def in_double_ball(self, x, s, n: int) -> bool:
        """Whether x = u s v with |u|, |v| <= n."""
        for u in self.ball(n):
            if self.word_length(self._mul(self._mul(self._inv(s), self._inv(u)), x)) <= n:
                return True
        return False

    def has_infinite_order(self, g, budget: int = 64) -> bool:
        x = g
        for _ in range(budget):
            if x == self.identity:
                return False
            x = self._mul(x, g)
        return True

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"

    def __eq__(self, other):
        return type(self) is type(other) and self.name == other.name

    def __hash__(self):
        return hash((type(self).__name__, self.name))


class IntegerLattice(GroupModel):
    """Z^d with the standard generators; word length is the l1 norm."""

    def __init__(self, dim: int):
        if not 1 <= dim <= 4:
            raise GroupError("Z^d is supported for 1 <= d <= 4")
        super().__init__()
        self.dim = dim
        self.name = "Z" if dim == 1 else f"Z^{dim}"
        self._e = (0,) * dim
        gens = []
        for i in range(dim):
            for sgn in (1, -1):
                v = [0] * dim
                v[i] = sgn
                gens.append(tuple(v))
        self._gens = sorted(gens, key=self.sort_key)

    @property
    def identity(self):
        return self._e

    @property
    def generators(self):
        return list(self._gens)

    def _mul(self, a, b):
        if self.dim == 1:
            return (a[0] + b[0],)
        return tuple(x + y for x, y in zip(a, b))

    def _inv(self, a):
        return tuple(-x for x in a)

    def is_element(self, x):
        return (isinstance(x, tuple) and len(x) == self.dim
                and all(type(c) is int for c in x))

    def word_length(self, g):
        return sum(abs(c) for c in g)

    def element_key(self, x):
        return tuple(_zigzag(c) for c in x)

    def sorted(self, xs):
        xs = xs if isinstance(xs, (list, tuple, set, frozenset)) else list(xs)
        if len(xs) < 512:
            return super().sorted(xs)
        return self.sorted_array(np.asarray(list(set(xs)), dtype=np.int64))

    def sorted_array(self, arr) -> list:
        """Canonical order of the distinct rows of an (N, d) integer array."""
        from ._search import unique_rows
        arr = unique_rows(np.asarray(arr, dtype=np.int64).reshape(-1, self.dim))
        zig = np.where(arr > 0, 2 * arr - 1, -2 * arr)
        keys = [zig[:, i] for i in range(self.dim - 1, -1, -1)] + [np.abs(arr).sum(axis=1)]
        arr = arr[np.lexsort(keys)]
        if self.dim == 1:
            return [(x,) for x in arr[:, 0].tolist()]
        return list(map(tuple, arr.tolist()))

    def _compute_ball(self, radius):
        pts = [()]
        for _ in range(self.dim):
            pts = [p + (c,) for p in pts for c in range(-radius, radius + 1)
                   if sum(map(abs, p)) + abs(c) <= radius]
        return tuple(sorted(pts, key=self.sort_key))

    def in_double_ball(self, x, s, n):
        return sum(abs(a - b) for a, b in zip(x, s)) <= 2 * n

    def sphere_iter(self, radius):
        if radius in self._balls or radius <= 8:
            yield from self.sphere(radius)
            return
        pts = [()]
        for i in range(self.dim):
            rest = self.dim - i - 1
            nxt = []
            for p in pts:
                used = sum(map(abs, p))
                lo = radius - used if rest == 0 else 0
                for c in range(lo, radius - used + 1):
                    nxt.append(p + (c,))
                    if c:
                        nxt.append(p + (-c,))
            pts = nxt
        yield from sorted(pts, key=self.element_key)

    def has_infinite_order(self, g, budget=64):
        return any(g)

    def format(self, x):
        if self.dim == 1:
            return str(x[0])
        return "(" + ",".join(str(c) for c in x) + ")"

    def parse(self, text):
        t = text.strip()
        if t.startswith("(") and t.endswith(")"):
            t = t[1:-1]
        try:
            parts = tuple(int(p) for p in t.split(","))
        except ValueError:
            raise GroupError(f"cannot parse {text!r} as an element of {self.name}") from None
        if len(parts) != self.dim:
            raise GroupError(f"{text!r} has {len(parts)} coordinates, {self.name} needs {self.dim}")
        return parts


_FREE_TOKEN = re.compile(r"\(([a-z])\^(-?\d+)\)|([a-z])(?:\^(-?\d+))?|([A-Z])")


class FreeGroup(GroupModel):
    """Free group F_k on letters a, b, c, ... as reduced words."""

    def __init__(self, rank: int):
        if not 1 <= rank <= 3:
            raise GroupError("F_k is supported for 1 <= k <= 3")
        super().__init__()
        self.rank = rank
        self.name = f"F_{rank}"
        self._gens = [(s * i,) for i in range(1, rank + 1) for s in (1, -1)]

    @property
    def identity(self):
        return ()

    @property
    def generators(self):
        return list(self._gens)

    def _mul(self, a, b):
        if not a:
            return b
        if not b:
            return a
        i, j = len(a), 0
        nb = len(b)
        while i > 0 and j < nb and a[i - 1] == -b[j]:
            i -= 1
            j += 1
        return a[:i] + b[j:]

    def _inv(self, a):
        return tuple(-x for x in reversed(a))

    def is_element(self, x):
        if not isinstance(x, tuple):
            return False
        prev = 0
        for c in x:
            if type(c) is not int or c == 0 or abs(c) > self.rank or c == -prev:
                return False
            prev = c
        return True

    def word_length(self, g):
        return len(g)

    def element_key(self, x):
        return tuple(_zigzag(c) for c in x)

    def _compute_ball(self, radius):
        out = [()]
        layer = [()]
        for _ in range(radius):
            nxt = []
            for w in layer:
                last = w[-1] if w else 0
                for (s,) in self._gens:
                    if s != -last:
                        nxt.append(w + (s,))
            if len(out) + len(nxt) > self.max_ball_size:
                raise BudgetExceeded(f"ball({radius}) in {self.name} is too large")
            out.extend(nxt)
            layer = nxt
        return tuple(out)

    def in_double_ball(self, x, s, n):
        # x = u s v with |u|,|v| <= n iff x = alpha mu gamma, s = beta mu zeta
        # (mu a common factor, possibly empty) with |alpha|+|beta| <= n and
        # |gamma|+|zeta| <= n.
        lx, ls = len(x), len(s)
        if lx + ls <= 2 * n:
            return True
        if abs(lx - ls) > 2 * n:
            return False
        for i in range(min(n, lx) + 1):
            for j in range(min(n - i, ls) + 1):
                m = 0
                while i + m < lx and j + m < ls and x[i + m] == s[j + m]:
                    m += 1
                if lx + ls - i - j - 2 * m <= n:
                    return True
        return False

    def has_infinite_order(self, g, budget=64):
        return bool(g)

    def sphere_iter(self, radius):
        # depth-first in letter order a < a^-1 < b < ... is shortlex order
        letters = [s for (s,) in self._gens]

        def rec(prefix, last, left):
            if not left:
                yield prefix
                return
            for s in letters:
                if s != -last:
                    yield from rec(prefix + (s,), s, left - 1)

        yield from rec((), 0, radius)

    def format(self, x):
        if not x:
            return "e"
        return "".join(LETTERS[c - 1] if c > 0 else f"({LETTERS[-c - 1]}^-1)" for c in x)

    def parse(self, text):
        t = text.replace(" ", "")
        if t in ("", "e", "1"):
            return ()
        word = ()
        pos = 0
        while pos < len(t):
            m = _FREE_TOKEN.match(t, pos)
            if not m:
                raise GroupError(f"cannot parse {text!r} as an element of {self.name}")
            if m.group(1):
                letter, exp = m.group(1), int(m.group(2))
            elif m.group(3):
                letter, exp = m.group(3), int(m.group(4) or 1)
            else:
                letter, exp = m.group(5).lower(), -1
            idx = LETTERS.index(letter) + 1
            if idx > self.rank:
                raise GroupError(f"letter {letter!r} not in {self.name}")
            sym = idx if exp > 0 else -idx
            for _ in range(abs(exp)):
                word = self._mul(word, (sym,))
            pos = m.end()
        return word


class CustomGroup(GroupModel):
    """User-supplied group: multiplication, inversion and generators.

    ``key`` orders elements of equal word length; it defaults to ``repr``.
    Word lengths come from memoized BFS.
    """

    def __init__(self, name: str, identity, generators: Sequence, mul: Callable,
                 inv: Callable, contains: Callable | None = None,
                 key: Callable | None = None, fmt: Callable | None = None,
                 parse: Callable | None = None):
        super().__init__()
        self.name = name
        self._e = identity
        self._mulf, self._invf = mul, inv
        self._contains = contains
        self._key = key or (lambda x: (repr(x),))
        self._fmt, self._parse = fmt, parse
        gens = list(dict.fromkeys(generators))
        if identity in gens:
            raise GroupError("generating set must exclude the identity")
        for s in gens:
            if inv(s) not in gens:
                raise GroupError(f"generating set is not symmetric: {s!r} has no inverse in it")
        self._gens = gens
        self._gens.sort(key=self._key)

    @property
    def identity(self):
        return self._e

    @property
    def generators(self):
        return list(self._gens)

    def _mul(self, a, b):
        return self._mulf(a, b)

    def _inv(self, a):
        return self._invf(a)

    def is_element(self, x):
        return self._contains(x) if self._contains else True

    def element_key(self, x):
        return tuple(self._key(x))

    def format(self, x):
        return self._fmt(x) if self._fmt else repr(x)

    def parse(self, text):
        if not self._parse:
            raise GroupError(f"{self.name} has no element syntax")
        return self._parse(text)


def infinite_dihedral() -> CustomGroup:
    """D_inf as pairs (n, s) meaning x -> (-1)^s x + n; handy extension example."""

    def mul(a, b):
        n, s = a
        m, t = b
        return (n + (-m if s else m), s ^ t)

    def inv(a):
        n, s = a
        return (n if s else -n, s)

    return CustomGroup(
        "D_inf", (0, 0), [(0, 1), (1, 1)], mul, inv,
        contains=lambda x: isinstance(x, tuple) and len(x) == 2 and x[1] in (0, 1),
        key=lambda x: (_zigzag(x[0]), x[1]),
    )


_GROUP_SPEC = re.compile(r"^\s*(Z|F)\s*(?:[\^_]?\s*(\d+))?\s*$")
_registry: dict[str, GroupModel] = {}


def parse_group(spec: str) -> GroupModel:
    """Parse "Z", "Z^2", "F_2" (also "F2", "Z2")."""
    m = _GROUP_SPEC.match(spec)
    if not m:
        raise GroupError(f"unknown group spec {spec!r}")
    kind, n = m.group(1), int(m.group(2) or (1 if m.group(1) == "Z" else 2))
    key = f"{kind}{n}"
    if key not in _registry:
        _registry[key] = IntegerLattice(n) if kind == "Z" else FreeGroup(n)
    return _registry[key]
