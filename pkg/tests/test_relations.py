import pytest
from hypothesis import given, settings, strategies as st

from coarse import LazySet, Status, parse_group, translate, union
from coarse.coarse_relations import (EmptyRestriction, check_equiv, check_subgroup, check_witness,
                              compose_witnesses, coset_representatives, find_witness,
                              hausdorff_window, subgroup_index_witness)
from coarse.store import parse_set
from oracles import brute_cover


def ints(xs):
    return [x[0] for x in xs]


def test_check_witness_examples(Z):
    allZ, evens = parse_set(Z, "all"), parse_set(Z, "Z:evens")
    for R in (1, 10, 50):
        assert check_witness(allZ, evens, [(0,), (1,)], R).ok
    v = check_witness(allZ, evens, [(0,)], 1)
    assert v.status is Status.REFUTED and v.counterexample == (1,)


def test_check_witness_first_counterexample_matches_brute_force(Z):
    A, B = parse_set(Z, "Z:naturals-negsquares"), parse_set(Z, "Z:naturals")
    F = Z.ball(5)
    v = check_witness(A, B, F, 100)
    assert v.status is Status.REFUTED
    expected = next(a for a in Z.ball(100) if a in A
                    and not any((a[0] - f[0]) >= 1 for f in F))
    assert v.counterexample == expected == (-9,)
    assert v.padded_radius == 105


def test_find_witness_examples(Z):
    odds, evens = parse_set(Z, "Z:odds"), parse_set(Z, "Z:evens")
    v = find_witness(odds, evens, 30, 4, 4)
    assert v.ok and v.witness.F == ((1,),)
    v = find_witness(evens, evens, 30, 4, 4)
    assert v.witness.F == ((0,),)


def test_find_witness_even_squares_needs_norm_17(Z):
    A = parse_set(Z, "Z:squares")
    B = LazySet.from_predicate(Z, lambda x: x[0] >= 0 and x[0] ** 0.5 % 2 == 0
                               and round(x[0] ** 0.5) ** 2 == x[0])
    # oracle: largest distance from a square in ball(100) to an even square
    sq = [n * n for n in range(11)]
    even = [n * n for n in range(0, 14, 2)]
    need = max(min(abs(a - b) for b in even) for a in sq)
    assert need == 17
    assert find_witness(A, B, 100, need - 1, 64).status is Status.NO_WITNESS
    v = find_witness(A, B, 100, need, 64)
    assert v.ok and Z.norm(v.witness.F) == need


def test_find_witness_exact_cover_fallback(Z):
    # greedy takes nearest translators 0, 1, 2; {1, -2}... the exact search finds 2
    A = LazySet.from_finite(Z, [(0,), (3,)])
    B = LazySet.from_finite(Z, [(0,), (1,), (3,)])
    v = find_witness(A, B, 3, 2, 1)
    assert v.ok and v.witness.F == ((0,),)


def test_find_witness_empty_target(Z):
    with pytest.raises(EmptyRestriction):
        find_witness(parse_set(Z, "all"), LazySet.from_finite(Z, [(99,)]), 3, 2, 4)


def test_hausdorff_examples(Z):
    assert hausdorff_window(parse_set(Z, "all"), parse_set(Z, "Z:evens"), 10) == (1, 0)
    E = parse_set(Z, "Z:evens")
    assert hausdorff_window(E, E, 10) == (0, 0)
    assert hausdorff_window(LazySet.from_finite(Z, [(0,)]), LazySet.from_finite(Z, [(5,)]),
                            5) == (5, 5)


def test_equiv_examples(Z):
    v = check_equiv(parse_set(Z, "Z:evens"), parse_set(Z, "all"), 20, 4, 16)
    assert v.ok
    assert v.witness["a_in_b"].F == ((0,),)
    assert v.witness["b_in_a"].F == ((0,), (1,))
    v = check_equiv(parse_set(Z, "Z:naturals"), parse_set(Z, "Z:naturals-negsquares"),
                    100, 4, 16)
    assert v.status is Status.NO_WITNESS
    assert v.detail.startswith("b_in_a")


def test_subgroup_index_examples(Z, Z2, F2):
    v = subgroup_index_witness(parse_set(Z, "Z:evens"), 10)
    assert v.ok and v.is_global and v.witness.F == ((0,), (1,))
    v = subgroup_index_witness(parse_set(Z, "Z:mult:3"), 10)
    assert v.ok and v.is_global and len(v.witness.F) == 3
    assert sorted(x[0] % 3 for x in v.witness.F) == [0, 1, 2]
    v = subgroup_index_witness(parse_set(Z2, "all"), 5)
    assert v.ok and v.witness.F == (Z2.identity,)
    counts = []
    for R in (2, 3, 4):
        v = subgroup_index_witness(parse_set(Z2, "Zd:axis:0"), R)
        assert v.status is Status.CONSISTENT
        counts.append(len(v.witness.F))
    assert counts == sorted(counts) and counts[0] < counts[-1]
    assert (0, 3) in subgroup_index_witness(parse_set(Z2, "Zd:axis:0"), 3).witness.F


def test_subgroup_check(Z, F2):
    assert check_subgroup(parse_set(Z, "Z:mult:5"), 20).ok
    assert check_subgroup(parse_set(F2, "F:cyclic:ab"), 6).ok
    v = check_subgroup(parse_set(Z, "Z:odds"), 5)
    assert v.status is Status.REFUTED and v.counterexample == (0,)
    with pytest.raises(ValueError):
        subgroup_index_witness(parse_set(Z, "Z:naturals"), 4)


def test_coset_representatives_free(F2):
    H = parse_set(F2, "F:cyclic:a")
    reps = coset_representatives(H, 2)
    for g in F2.ball(2):
        hits = [r for r in reps if F2.mul(F2.inv(r), g) in H]
        assert len(hits) == 1


# -- properties ------------------------------------------------------------------

NAMED_Z = ["Z:evens", "Z:odds", "Z:mult:3", "Z:naturals", "all", "Z:coset:4:1"]
NAMED_F = ["F:first:a", "F:first:b", "F:cyclic:a", "all", "F:first:B"]


def z_sets():
    base = st.sampled_from(NAMED_Z)
    return st.tuples(base, st.integers(-4, 4), st.one_of(st.none(), base))


def build_z(spec):
    Z = parse_group("Z")
    name, shift, extra = spec
    A = translate((shift,), parse_set(Z, name))
    return union(A, parse_set(Z, extra)) if extra else A


@given(z_sets(), z_sets(), z_sets())
def test_transitivity_of_witnesses_z(a, b, c):
    Z = parse_group("Z")
    A, B, C = build_z(a), build_z(b), build_z(c)
    R = 12
    v1 = find_witness(A, B, R + 6, 6, 32)
    if not v1.ok:
        return
    v2 = find_witness(B, C, R + 6 + 6, 6, 32)
    if not v2.ok:
        return
    F = compose_witnesses(Z, v1.witness.F, v2.witness.F)
    assert check_witness(A, C, F, R).ok


@given(z_sets(), z_sets())
def test_equiv_symmetric_z(a, b):
    A, B = build_z(a), build_z(b)
    v1 = check_equiv(A, B, 10, 4, 16)
    v2 = check_equiv(B, A, 10, 4, 16)
    assert v1.status == v2.status
    if v1.ok:
        assert v1.witness["a_in_b"] == v2.witness["b_in_a"]
        assert v1.witness["b_in_a"] == v2.witness["a_in_b"]


@settings(max_examples=25)
@given(st.sampled_from(NAMED_F), st.sampled_from(NAMED_F), st.sampled_from(NAMED_F))
def test_transitivity_of_witnesses_free(a, b, c):
    F2 = parse_group("F_2")
    A, B, C = (parse_set(F2, s) for s in (a, b, c))
    R = 3
    v1 = find_witness(A, B, R + 2, 2, 8)
    v2 = find_witness(B, C, R + 4, 2, 8)
    if v1.ok and v2.ok:
        F = compose_witnesses(F2, v1.witness.F, v2.witness.F)
        assert check_witness(A, C, F, R).ok


@given(st.frozensets(st.integers(-4, 4), max_size=6),
       st.frozensets(st.integers(-6, 6), min_size=1, max_size=6),
       st.integers(0, 4), st.integers(1, 3))
def test_find_witness_agrees_with_brute_force(a, b, R, size):
    Z = parse_group("Z")
    A = LazySet.from_finite(Z, [(x,) for x in a])
    B = LazySet.from_finite(Z, [(x,) for x in b])
    if not B.restrict(R + 2):
        with pytest.raises(EmptyRestriction):
            find_witness(A, B, R, 2, size)
        return
    v = find_witness(A, B, R, 2, size)
    elems = A.restrict(R)
    ref = brute_cover(elems, lambda x: x in B, Z.mul, Z.inv, list(Z.ball(2)), size)
    assert v.ok == (ref is not None)
    if v.ok:
        assert check_witness(A, B, v.witness.F, R).ok
