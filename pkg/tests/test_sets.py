import math

import pytest
from hypothesis import given, strategies as st

from coarse import (Frontier, FrontierError, IdealSpec, LazySet, Status, difference,
                    finite_product, ideal_contains, intersection, inverse, product_set,
                    right_translate, set_algebra, translate, union, window)
from coarse.store import parse_set


def pred(G, f, tag="", subgroup=False):
    return LazySet.from_predicate(G, lambda x: f(x[0]), tag=tag, subgroup=subgroup)


def ints(xs):
    return [x[0] for x in xs]


def test_restrict_examples(Z):
    evens = parse_set(Z, "Z:evens")
    assert sorted(ints(evens.restrict(5))) == [-4, -2, 0, 2, 4]
    assert LazySet.from_predicate(Z, lambda x: False).restrict(7) == []
    sq = LazySet.from_predicate(Z, lambda x: x[0] >= 0 and math.isqrt(x[0]) ** 2 == x[0])
    assert ints(sq.restrict(10)) == [0, 1, 4, 9]


def test_restrict_canonical_order(Z):
    A = parse_set(Z, "Z:odds")
    assert ints(A.restrict(window(Z, 4))) == [1, -1, 3, -3]


def test_translate_examples(Z, F2):
    odd = translate((3,), parse_set(Z, "Z:evens"))
    assert sorted(ints(odd.restrict(4))) == [-3, -1, 1, 3]
    b_sub = parse_set(F2, "F:cyclic:b")
    got = translate(F2.parse("a"), b_sub).restrict(2)
    assert set(got) == {F2.parse(w) for w in ("a", "ab", "aB")}


def test_finite_product_examples(Z):
    assert set(ints(finite_product([(0,), (1,)], parse_set(Z, "Z:evens")).restrict(30))) == \
        set(range(-30, 31))
    A = LazySet.from_finite(Z, [(0,), (10,), (20,)])
    got = finite_product([(0,), (1,), (2,)], A).restrict(25)
    assert sorted(ints(got)) == [0, 1, 2, 10, 11, 12, 20, 21, 22]


def test_product_set_example(Z):
    F = LazySet.from_finite(Z, [(0,), (1,)])
    assert sorted(ints(product_set(F, F).finite)) == [-1, 0, 1]


def test_frontier_enforced(Z):
    A = LazySet.from_finite(Z, [(0,), (5,)], frontier=6)
    assert (5,) in A
    with pytest.raises(FrontierError):
        A.restrict(7)
    with pytest.raises(FrontierError):
        (9,) in A


def test_stream_frontiers(Z):
    def cursor():
        for r in range(4):
            for x in ((r,), (-r,)) if r else ((0,),):
                yield x
            yield Frontier(r)

    A = LazySet.from_stream(Z, cursor)
    assert sorted(ints(A.restrict(3))) == [-3, -2, -1, 0, 1, 2, 3]
    # an exhausted cursor means the set is complete
    assert sorted(ints(A.restrict(9))) == [-3, -2, -1, 0, 1, 2, 3]


def test_stream_is_lazy(Z):
    import itertools
    pulled = []

    def cursor():
        for r in itertools.count():
            pulled.append(r)
            yield (r,)
            yield Frontier(r)

    A = LazySet.from_stream(Z, cursor)
    assert ints(A.restrict(3)) == [0, 1, 2, 3]
    assert max(pulled) == 3


def test_stream_rejects_backwards_frontier(Z):
    def cursor():
        yield (0,)
        yield Frontier(2)
        yield Frontier(1)
    A = LazySet.from_stream(Z, cursor)
    with pytest.raises(ValueError):
        A.restrict(3)


def test_stream_of_predicate_set(Z):
    A = parse_set(Z, "Z:mult:3")
    got = []
    for item in A.stream():
        if isinstance(item, Frontier) and item.length >= 6:
            break
        if not isinstance(item, Frontier):
            got.append(item[0])
    assert got == [0, 3, -3, 6, -6]


def test_set_algebra_dispatch(Z):
    A, B = parse_set(Z, "Z:evens"), parse_set(Z, "Z:mult:3")
    assert ints(set_algebra(A, B, "intersection").restrict(6)) == [0, 6, -6]
    assert ints(set_algebra(A, None, "inverse").restrict(2)) == [0, 2, -2]
    with pytest.raises(ValueError):
        set_algebra(A, B, "xor")
    with pytest.raises(ValueError):
        set_algebra(A, None, "union")


def test_mismatched_groups_rejected(Z, Z2):
    with pytest.raises(Exception):
        union(parse_set(Z, "Z:evens"), parse_set(Z2, "all"))


small_sets = st.frozensets(st.integers(-8, 8), max_size=8)


@given(small_sets, small_sets, st.integers(-5, 5))
def test_set_ops_match_python_sets(a, b, g):
    from coarse import parse_group
    Z = parse_group("Z")
    A = LazySet.from_finite(Z, [(x,) for x in a])
    Bp = pred(Z, lambda x: x in b)
    R = 14
    assert set(ints(union(A, Bp).restrict(R))) == a | b
    assert set(ints(intersection(A, Bp).restrict(R))) == a & b
    assert set(ints(difference(A, Bp).restrict(R))) == a - b
    assert set(ints(inverse(Bp).restrict(R))) == {-x for x in b}
    assert set(ints(translate((g,), Bp).restrict(R))) == {x + g for x in b if abs(x + g) <= R}
    assert set(ints(right_translate(Bp, (g,)).restrict(R))) == {x + g for x in b if abs(x + g) <= R}
    if a:
        assert set(ints(product_set(Bp, A).restrict(R))) == \
            {x - y for x in b for y in a if abs(x - y) <= R}


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.integers(2, 4))
def test_free_translates_are_bijective(word, r):
    from coarse import parse_group
    F2 = parse_group("F_2")
    g = F2.parse("".join("abAB"[i - 1] for i in word))
    A = parse_set(F2, "F:first:a")
    T = translate(g, A)
    n = F2.word_length(g)
    for x in F2.ball(r):
        assert (x in T) == (F2.mul(F2.inv(g), x) in A)
    assert len(T.restrict(r)) <= len(A.restrict(r + n))


def test_right_translate_is_right_action(F2):
    A = parse_set(F2, "F:first:b")
    g, h = F2.parse("a"), F2.parse("B")
    lhs = right_translate(right_translate(A, g), h)
    rhs = right_translate(A, F2.mul(g, h))
    assert lhs.restrict(4) == rhs.restrict(4)


# -- ideals ---------------------------------------------------------------------

def test_ideal_subset_case(Z):
    M = IdealSpec([parse_set(Z, "Z:evens")])
    v = ideal_contains(M, parse_set(Z, "Z:mult:4"), 20)
    assert v.status is Status.VERIFIED
    assert v.witness["F"] == ((0,),)


def test_ideal_of_finite_sets_misses_naturals(Z):
    M = IdealSpec([LazySet.from_finite(Z, [(k,) for k in range(n)]) for n in (1, 2, 4, 8)])
    # with translators of norm <= 4, F·{0..7} stays inside [-4, 11]
    for R in (12, 20, 40):
        v = ideal_contains(M, parse_set(Z, "Z:naturals"), R, max_norm=4)
        assert v.status is Status.NO_WITNESS


def test_ideal_contains_identity(Z, F2):
    for G, spec in ((Z, "Z:squares"), (F2, "F:first:a")):
        v = ideal_contains(IdealSpec([parse_set(G, spec)]), parse_set(G, "e"), 6)
        assert v.ok


def test_ideal_closed_under_translation(Z):
    M = IdealSpec([parse_set(Z, "Z:naturals")])
    B = translate((-7,), parse_set(Z, "Z:squares"))
    assert ideal_contains(M, B, 30, max_norm=8).ok


def test_ideal_needs_generators():
    with pytest.raises(ValueError):
        IdealSpec([])
