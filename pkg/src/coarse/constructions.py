"""Deterministic inductive constructions with re-checked invariants.

Every existential choice "pick x outside the finite set S" takes the first
element of the canonical order outside S.  The exhaustion is T_n = ball(n).
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import _search
from .absorbing import AntiAbsorbingCertificate
from .divisibility import DivisionWitness, GapCertificate, Isolation
from .group_core import BudgetExceeded, FreeGroup, GroupModel, IntegerLattice
from .lazy_sets import LazySet
from .verdict import GLOBAL, BoundingWitness

log = logging.getLogger(__name__)


class InvariantViolation(AssertionError):
    """A construction invariant failed; this is always an implementation bug."""

    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data


def first_outside(G: GroupModel, forbidden, start: int = 0):
    """First element in canonical order for which ``forbidden`` is false."""
    for x in G.canonical(start):
        if not forbidden(x):
            return x


# -- injective products ----------------------------------------------------------

def cantor(n: int, j: int) -> int:
    return (n + j) * (n + j + 1) // 2 + j


@dataclass
class InjectiveProductFamily:
    """Sets I_1..I_n of powers of g, each containing e, with injective product maps.

    Elements are kept as exponents; g has infinite order, so m ↦ g^m is
    injective and injectivity of products reduces to exponent sums.
    """

    group: GroupModel
    g: object
    exponents: list
    max_length: int = 100_000

    def level(self, n: int) -> list:
        G = self.group
        out = []
        for m in self.exponents[n - 1]:
            if abs(m) * G.word_length(self.g) > self.max_length:
                raise BudgetExceeded(f"g^{m} is longer than {self.max_length}")
            out.append(G.power(self.g, m))
        return out

    @property
    def levels(self) -> list:
        return [self.level(n) for n in range(1, len(self.exponents) + 1)]

    def exponent_sums(self, n: int) -> list:
        return [sum(c) for c in itertools.product(*self.exponents[:n])]

    def products(self, n: int) -> list:
        G = self.group
        return [G.product(*c) for c in itertools.product(*(self.level(k) for k in range(1, n + 1)))]

    def is_injective(self, n: int) -> bool:
        sums = self.exponent_sums(n)
        return len(set(sums)) == len(sums)


def build_injective_products(G: GroupModel, g, n_max: int, size: int = 3,
                             order_budget: int = 64) -> InjectiveProductFamily:
    """I_n = {e} ∪ {g^(2^k(n,j)) : 2 <= j <= size} with k the Cantor pairing.

    Distinct k give distinct binary digits, so the exponent of a product
    determines its factors.  Injectivity is still checked exhaustively.
    """
    G.check(g)
    if not G.has_infinite_order(g, order_budget):
        raise ValueError(f"{G.format(g)} has finite order within {order_budget} powers")
    exps = [[0] + [2 ** cantor(n, j) for j in range(2, size + 1)] for n in range(1, n_max + 1)]
    fam = InjectiveProductFamily(G, g, exps)
    for n in range(1, n_max + 1):
        if not fam.is_injective(n):
            raise InvariantViolation(f"product map at level {n} is not injective")
    return fam


# -- sparse chains -------------------------------------------------------------

@dataclass
class SparseChain:
    group: GroupModel
    elements: list

    def level(self, n: int) -> list:
        """A_n: indices i (1-based) with i not divisible by 2^n, so that
        A_1 ⊆ A_2 ⊆ ... and each A_{n+1} ∖ A_n takes every other remaining element."""
        return [g for i, g in enumerate(self.elements, start=1) if i % (2 ** n)]

    def level_set(self, n: int) -> LazySet:
        return LazySet.from_finite(self.group, self.level(n), tag=f"A_{n}",
                                   frontier=self.frontier)

    @property
    def frontier(self):
        # later elements are at distance >= N+1 from e
        return len(self.elements)

    def check(self):
        G = self.group
        for (i, x), (j, y) in itertools.combinations(enumerate(self.elements, 1), 2):
            if G.distance(x, y) < max(i, j):
                raise InvariantViolation(f"g_{i}, g_{j} too close", (x, y))


def build_sparse_chain(G: GroupModel, n_max: int) -> SparseChain:
    """g_1 = e, g_n the first element with d(g_n, g_m) >= n for m < n."""
    out = [G.identity]
    for n in range(2, n_max + 1):
        out.append(first_outside(G, lambda x: any(G.distance(x, y) < n for y in out)))
    chain = SparseChain(G, out)
    chain.check()
    return chain


# -- product-block constructions ---------------------------------------------------

def _blocks(G, a_seq, c_seq):
    """F_n and A_n for every stage from the a and c sequences."""
    F = [G.identity]
    A: list = []
    Fs, As = [], []
    for a, c in zip(a_seq, c_seq):
        F = F + [G._mul(f, a) for f in F]
        A = A + [G._mul(f, c) for f in F]
        Fs.append(F)
        As.append(A)
    return Fs, As


def division_witness(G, a_seq, c_seq, n: int, N: int | None = None):
    """The 2^n-division of the stage-N prefix of A = ⋃ F_m·c_m.

    With G_m = {e,a_{n+1}}···{e,a_m} we have F_m = F_n·G_m, so the parts
    f·B, B = ⋃_{m>n} G_m·c_m, are disjoint and cover A ∖ A_n.  Part f·B
    absorbs A through F_n·f⁻¹ plus r·b0⁻¹·f⁻¹ for the finite remainder A_n.
    """
    N = len(a_seq) if N is None else N
    if not 1 <= n < N:
        raise ValueError("need 1 <= n < N")
    mul, inv = G._mul, G._inv
    Fs, As = _blocks(G, a_seq[:N], c_seq[:N])
    Fn, An = Fs[n - 1], As[n - 1]
    Gm = [G.identity]
    B: list = []
    for m in range(n + 1, N + 1):
        Gm = Gm + [mul(g, a_seq[m - 1]) for g in Gm]
        B += [mul(g, c_seq[m - 1]) for g in Gm]
    b0 = B[0]
    parts, wits = [], []
    T0 = list(Fn) + [mul(r, inv(b0)) for r in An]
    if isinstance(G, IntegerLattice):
        T0a = np.asarray(T0, dtype=np.int64)
    for f in Fn:
        part = [mul(f, b) for b in B]
        if isinstance(G, IntegerLattice):
            T = G.sorted_array(T0a - np.asarray(f, dtype=np.int64))
        else:
            fi = inv(f)
            T = G.sorted(mul(t, fi) for t in T0)
        parts.append(LazySet.from_finite(G, part, tag=f"{G.format(f)}·B"))
        wits.append(BoundingWitness(tuple(T), GLOBAL))
    remainder = set(As[N - 1]) - set(itertools.chain.from_iterable(p.finite for p in parts))
    return DivisionWitness(parts, wits), G.sorted(remainder)


@dataclass
class InfDivState:
    group: GroupModel
    a: list = field(default_factory=list)
    c: list = field(default_factory=list)

    @property
    def n(self):
        return len(self.a)

    def blocks(self):
        return _blocks(self.group, self.a, self.c)

    def prefix(self) -> LazySet:
        _, As = self.blocks()
        return LazySet.from_finite(self.group, As[-1], tag=f"A[{self.n}]",
                                   meta={"stage": self.n})

    def check(self):
        Fs, As = self.blocks()
        for n, (F, A) in enumerate(zip(Fs, As), start=1):
            if len(set(F)) != 2 ** n:
                raise InvariantViolation(f"|F_{n}| != 2^{n}", n)
            if len(set(A)) != len(A):
                raise InvariantViolation(f"blocks overlap at stage {n}", n)


def build_infdiv(G: GroupModel, n_max: int):
    """a_{n+1} first outside F_n⁻¹F_n, c_n first outside F_n⁻¹A_{n-1} (c_1 = e).

    Returns (state, prefix set, {n: (DivisionWitness, remainder)} for n < n_max).
    """
    mul, inv = G._mul, G._inv
    lattice = isinstance(G, IntegerLattice)
    st = InfDivState(G)
    F, A = [G.identity], []
    for n in range(1, n_max + 1):
        if lattice:
            a = _search.lattice_terms_min(G, [(_search.sumset(F, F, -1), 0)])[0]
        else:
            FinvF = {mul(inv(p), q) for p in F for q in F}
            a = first_outside(G, FinvF.__contains__)
        F = F + [mul(f, a) for f in F]
        if n == 1:
            c = G.identity
        elif lattice:
            c = _search.lattice_terms_min(G, [(_search.sumset(A, F, -1), 0)])[0]
        else:
            FinvA = {mul(inv(f), x) for f in F for x in A}
            c = first_outside(G, FinvA.__contains__)
        A = A + [mul(f, c) for f in F]
        st.a.append(a)
        st.c.append(c)
    st.check()
    wits = {n: division_witness(G, st.a, st.c, n) for n in range(1, n_max)}
    return st, st.prefix(), wits


# -- isolated points plus absorbing blocks -----------------------------------------

@dataclass
class IsolatedAbsorbing:
    group: GroupModel
    g: list
    h: list
    set: LazySet
    isolations: list
    certificate: GapCertificate

    @property
    def frontier(self):
        return self.set.frontier


def build_isolated_absorbing(G: GroupModel, n_max: int) -> IsolatedAbsorbing:
    """A = {g_1, g_2, ...} ∪ ⋃ ball(n)·h_n with d(g_n, A∖{g_n}) >= n.

    g_1 = e; g_n keeps distance n from earlier g's and from the blocks
    ball(m)·h_m, m < n; h_n keeps ball(n)·h_n at distance n + 1 from
    g_1..g_n and from earlier blocks, so blocks never merge and ball(n)·g ⊆ A
    only inside a single block.  In a word metric ball(a)·ball(b) =
    ball(a+b), so the conditions read d(g_n, h_m) >= n + m,
    d(h_n, g_i) >= 2n + 1 and d(h_n, h_m) >= 2n + m + 1.
    """
    dist = G.distance
    gs, hs = [G.identity], []
    for n in range(1, n_max + 1):
        if n > 1:
            gs.append(first_outside(G, lambda x: any(dist(x, y) < n for y in gs)
                                    or any(dist(x, h) < n + m for m, h in enumerate(hs, 1))))
        hs.append(first_outside(G, lambda x: any(dist(x, y) <= 2 * n for y in gs)
                                or any(dist(x, h) <= 2 * n + m for m, h in enumerate(hs, 1))))
    wl = G.word_length
    N = n_max
    frontier = max(N + 1, min(wl(gs[-1]), -(-wl(hs[-1]) // 2))) - 1
    elems = set(gs)
    for m, h in enumerate(hs, 1):
        elems.update(G._mul(f, h) for f in G.ball(m))
    A = LazySet.from_finite(G, elems, tag=f"isolated-absorbing[{N}]", frontier=frontier,
                            meta={"stages": N})
    isos = []
    for n, x in enumerate(gs, 1):
        reach = frontier - wl(x)
        if reach < n:
            break
        inA = A.contains_fn(frontier)
        t = next((t for t in G.ball(reach) if t != G.identity and inA(G._mul(t, x))), None)
        iso = Isolation(x, wl(t), True) if t is not None else Isolation(x, reach + 1, False)
        if iso.isolation < n:
            raise InvariantViolation(f"isolation of g_{n} is {iso.isolation}", x)
        isos.append(iso)
    cert = GapCertificate(frontier=frontier)
    for iso in isos:
        if not cert.pairs or iso.isolation > cert.pairs[-1].isolation:
            cert.pairs.append(iso)
    return IsolatedAbsorbing(G, gs, hs, A, isos, cert)


# -- the non-absorbing infinitely divisible set ------------------------------------------

@dataclass
class ThmAState:
    group: GroupModel
    a: list = field(default_factory=list)
    c: list = field(default_factory=list)
    d: list = field(default_factory=list)
    log: list = field(default_factory=list)

    @property
    def n(self):
        return len(self.d)

    def blocks(self):
        return _blocks(self.group, self.a, self.c)

    @property
    def F(self):
        return self.blocks()[0][-1]

    @property
    def A(self):
        return self.blocks()[1][-1]

    def T(self, k):
        return self.group.ball(k)

    def to_json(self) -> dict:
        fmt = self.group.format
        return {"group": self.group.name, "stage": self.n,
                "a": [fmt(x) for x in self.a], "c": [fmt(x) for x in self.c],
                "d": [fmt(x) for x in self.d], "log": self.log}

    @classmethod
    def from_json(cls, G, data) -> "ThmAState":
        if data["group"] != G.name:
            raise ValueError(f"checkpoint is for {data['group']}, not {G.name}")
        st = cls(G, [G.parse(x) for x in data["a"]], [G.parse(x) for x in data["c"]],
                 [G.parse(x) for x in data["d"]], list(data.get("log", [])))
        if not len(st.a) == len(st.c) == len(st.d):
            raise ValueError("checkpoint sequences have different lengths")
        return st

    def prefix(self) -> LazySet:
        return LazySet.from_finite(self.group, self.A, tag=f"thmA[{self.n}]",
                                   meta={"stage": self.n})

    def certificate(self) -> AntiAbsorbingCertificate:
        cert = AntiAbsorbingCertificate()
        for k, d in enumerate(self.d, 1):
            cert.add(self.T(k), d, GLOBAL)
        return cert

    def division_witnesses(self) -> dict:
        return {n: division_witness(self.group, self.a, self.c, n) for n in range(1, self.n)}


def check_thmA(st: ThmAState, stages=None):
    """Independent re-check of (b), (c), (d) using plain set algebra and the
    group's own double-ball test, not the search machinery."""
    G = st.group
    mul, inv, ball_test = G._mul, G._inv, G.in_double_ball
    Fs, As = st.blocks()
    stages = range(1, st.n + 1) if stages is None else stages
    for n in stages:
        F, A = Fs[n - 1], As[n - 1]
        prevF = Fs[n - 2] if n > 1 else [G.identity]
        prevA = As[n - 2] if n > 1 else []
        shifted = [mul(f, st.a[n - 1]) for f in prevF]
        if set(F) != set(prevF) | set(shifted) or len(set(F)) != 2 ** n:
            raise InvariantViolation(f"(b) fails at stage {n}", n)
        block = [mul(f, st.c[n - 1]) for f in F]
        if len(set(block)) != len(block) or set(block) & set(prevA) or len(set(A)) != len(A):
            raise InvariantViolation(f"(c) fails at stage {n}", n)
    n = max(stages)
    A = As[n - 1]
    S = {mul(x, inv(y)) for x in A for y in A}
    wl = G.word_length
    for k in range(1, n + 1):
        d = st.d[k - 1]
        ld = wl(d)
        for s in S:
            if abs(wl(s) - ld) <= 2 * k and ball_test(d, s, k):
                raise InvariantViolation(f"(d) fails: d_{k} ∈ T_{k}·A_{n}·A_{n}⁻¹·T_{k}⁻¹",
                                         (k, n, G.format(s)))
    return True


class _Searcher:
    """Group-specific minimal-element searches for the three choices."""

    def __init__(self, G):
        self.G = G
        self.kind = ("lattice" if isinstance(G, IntegerLattice)
                     else "free" if isinstance(G, FreeGroup) else "generic")

    # x ∉ F⁻¹F ∪ ⋃_k F⁻¹ T_k⁻¹ {d_k, d_k⁻¹} T_k F
    def choose_a(self, F, ds):
        G = self.G
        mul, inv = G._mul, G._inv
        if self.kind == "lattice":
            D = _search.sumset(F, F, -1)
            terms = [(D, 0)]
            for k, d in enumerate(ds, 1):
                v = np.asarray(d)
                terms += [(D + v, 2 * k), (D - v, 2 * k)]
            return _search.lattice_terms_min(G, terms)
        FinvF = {mul(inv(p), q) for p in F for q in F}
        if self.kind == "free":
            idx = _search.DeltaIndex([(dd, k) for k, d in enumerate(ds, 1) for dd in (d, inv(d))])
            test = _search.free_pairs_test(G, F, F, idx)
        else:
            test = self._generic_test(F, F, [(dd, k) for k, d in enumerate(ds, 1) for dd in (d, inv(d))])
        x = first_outside(G, lambda x: x in FinvF or test(x))
        return x, None

    # x ∉ F⁻¹A ∪ ⋃_k F⁻¹ T_k⁻¹ {d_k, d_k⁻¹} T_k A.  The cross terms of
    # A_{n+1}·A_{n+1}⁻¹ are F·c·A⁻¹ and A·c⁻¹·F⁻¹; keeping d_k out of
    # T_k·(both)·T_k⁻¹ is exactly this condition on c.
    def choose_c(self, F, A, ds):
        G = self.G
        mul, inv = G._mul, G._inv
        if self.kind == "lattice":
            AF = _search.sumset(A, F, -1)
            terms = [(AF, 0)]
            for k, d in enumerate(ds, 1):
                v = np.asarray(d)
                terms += [(AF + v, 2 * k), (AF - v, 2 * k)]
            return _search.lattice_terms_min(G, terms)
        FinvA = {mul(inv(f), x) for f in F for x in A}
        pairs = [(dd, k) for k, d in enumerate(ds, 1) for dd in (d, inv(d))]
        if self.kind == "free":
            test = _search.free_pairs_test(G, F, A, _search.DeltaIndex(pairs))
        else:
            test = self._generic_test(F, A, pairs)
        x = first_outside(G, lambda x: x in FinvA or test(x))
        return x, None

    # x ∉ T_K A A⁻¹ T_K⁻¹
    def choose_d(self, A, K):
        G = self.G
        mul, inv = G._mul, G._inv
        if self.kind == "lattice":
            return _search.lattice_terms_min(G, [(_search.sumset(A, A, -1), 2 * K)])
        S = {mul(x, inv(y)) for x in A for y in A}
        if self.kind == "free":
            x, stats = _search.free_min_outside_double_ball(G, S, K)
            return x, None
        x = first_outside(G, lambda x: any(G.in_double_ball(x, s, K) for s in S))
        return x, None

    def _generic_test(self, P, Q, deltas):
        G = self.G
        mul, inv = G._mul, G._inv
        Qinv = [inv(q) for q in Q]

        def test(x):
            for p in P:
                y = mul(p, x)
                for qi in Qinv:
                    s = mul(y, qi)
                    if any(G.in_double_ball(dl, s, k) for dl, k in deltas):
                        return True
            return False

        return test


def _atomic_write(path, text):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def build_thmA(G: GroupModel, n_max: int, *, verify: bool = True,
               checkpoint: str | None = None, resume: ThmAState | None = None):
    """Stagewise construction of an infinitely divisible set that is not
    coarsely equivalent to an absorbing set.

    Stage 1: a_1 the first non-identity element, c_1 = e, A_1 = F_1 = {e, a_1}.
    Stage n+1 chooses a_{n+1}, c_{n+1}, d_{n+1} as the first elements outside
    the forbidden sets that keep (b), (c), (d) true; see :class:`_Searcher`.
    Returns (state, prefix set, anti-absorbing certificate, division witnesses).
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    mul = G._mul
    srch = _Searcher(G)
    st = resume if resume is not None else ThmAState(G)
    if resume is not None:
        check_thmA(st)
    F, A = (st.F, st.A) if st.n else ([G.identity], [])
    while st.n < n_max:
        n = st.n
        t0 = time.perf_counter()
        entry = {"stage": n + 1}
        if n == 0:
            a = first_outside(G, lambda x: x == G.identity)
            c = G.identity
        else:
            a, cnt = srch.choose_a(F, st.d)
            entry["a_forbidden"] = cnt if cnt is not None else {"bound": len(F) ** 2 * (1 + sum(
                2 * len(G.ball(k)) ** 2 for k in range(1, n + 1)))}
        F = F + [mul(f, a) for f in F]
        if n > 0:
            c, cnt = srch.choose_c(F, A, st.d)
            entry["c_forbidden"] = cnt if cnt is not None else {"bound": len(F) * len(A) * (1 + sum(
                2 * len(G.ball(k)) ** 2 for k in range(1, n + 1)))}
        A = A + [mul(f, c) for f in F]
        d, cnt = srch.choose_d(A, n + 1)
        entry["d_forbidden"] = cnt if cnt is not None else {"bound": len(A) ** 2 * len(G.ball(n + 1)) ** 2}
        st.a.append(a)
        st.c.append(c)
        st.d.append(d)
        secs = time.perf_counter() - t0
        if verify:
            check_thmA(st, [st.n])
        # timings stay out of the state so that outputs are reproducible
        st.log.append(entry)
        log.info("thmA stage %d: a=%s c=%s d=%s %s (%.2fs)", st.n, G.format(a), G.format(c),
                 G.format(d), entry, secs)
        if checkpoint:
            _atomic_write(checkpoint, json.dumps(st.to_json(), indent=1, sort_keys=True))
    return st, st.prefix(), st.certificate(), st.division_witnesses()
