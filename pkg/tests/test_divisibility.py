import pytest
from hypothesis import given, strategies as st

from coarse import LazySet, MalformedWitness, Status, parse_group
from coarse.divisibility import (DivisionWitness, GapCertificate, certify_not_2_divisible,
                                 check_division, check_paradoxical_witness, isolation_of,
                                 isolation_profile, o_set)
from coarse.store import parse_set
from oracles import isolation


def ints(xs):
    return [x[0] for x in xs]


def test_two_and_four_divisibility_of_z(Z):
    A = parse_set(Z, "all")
    w = DivisionWitness([parse_set(Z, "Z:evens"), parse_set(Z, "Z:odds")],
                        [[(0,), (1,)], [(0,), (1,)]])
    assert check_division(A, w, 40).ok
    parts = [parse_set(Z, f"Z:coset:4:{r}") for r in range(4)]
    w4 = DivisionWitness(parts, [[(k,) for k in range(4)]] * 4)
    v = check_division(A, w4, 40)
    assert v.ok and v.witness["n"] == 4


def test_squares_split_by_parity_refuted(Z):
    A = parse_set(Z, "Z:squares")
    even = LazySet.from_finite(Z, [((2 * n) ** 2,) for n in range(8)])
    odd = LazySet.from_finite(Z, [((2 * n + 1) ** 2,) for n in range(8)])
    v = check_division(A, DivisionWitness([even, odd], [Z.ball(5), Z.ball(5)]), 100)
    assert v.status is Status.REFUTED
    # oracle: first square (canonical order) farther than 5 from every even square
    evens = [(2 * n) ** 2 for n in range(8)]
    first = next(x for x in ints(Z.ball(100)) if x in {n * n for n in range(11)}
                 and min(abs(x - e) for e in evens) > 5)
    assert v.counterexample == (first,)


def test_division_errors(Z):
    with pytest.raises(MalformedWitness):
        DivisionWitness([parse_set(Z, "Z:evens")], [])
    with pytest.raises(MalformedWitness):
        DivisionWitness([], [])
    w = DivisionWitness([parse_set(Z, "Z:evens"), parse_set(Z, "Z:mult:4")],
                        [[(0,)], [(0,)]])
    with pytest.raises(MalformedWitness) as exc:
        check_division(parse_set(Z, "Z:evens"), w, 10)
    assert exc.value.element == (0,)


def test_part_outside_set_refuted(Z):
    w = DivisionWitness([parse_set(Z, "Z:odds")], [[(1,)]])
    v = check_division(parse_set(Z, "Z:evens"), w, 10)
    assert v.status is Status.REFUTED and v.counterexample == (1,)


def test_isolation_examples(Z):
    prof = isolation_profile(parse_set(Z, "Z:evens"), 10)
    assert {p.isolation for p in prof} == {2}
    A = LazySet.from_finite(Z, [(n * n,) for n in range(11)])
    assert isolation_of(A, (100,), 30) == (19, True)
    assert {p.isolation for p in isolation_profile(parse_set(Z, "all"), 6)} == {1}
    with pytest.raises(ValueError):
        isolation_profile(LazySet.from_finite(Z, [(50,)]), 4)


@given(st.frozensets(st.integers(-20, 20), min_size=2, max_size=10))
def test_isolation_profile_matches_oracle(xs):
    Z = parse_group("Z")
    A = LazySet.from_finite(Z, [(x,) for x in xs])
    prof = isolation_profile(A, 20, padding=40)
    assert {p.element[0]: p.isolation for p in prof} == {x: isolation(xs, x) for x in xs}
    assert [p.isolation for p in prof] == sorted((p.isolation for p in prof), reverse=True)


def test_gap_certificate_squares(Z):
    A = parse_set(Z, "Z:squares")
    cert = certify_not_2_divisible(A, [1, 5, 10])
    assert isinstance(cert, GapCertificate)
    got = [(p.element[0], p.isolation) for p in cert.pairs]
    # oracle: isolation of n^2 among squares is 2n - 1
    for g, iso in got:
        n = round(g ** 0.5)
        assert iso == 2 * n - 1
    assert [g for g, _ in got] == [4, 16, 36]
    assert cert.recheck(A)
    js = cert.to_json(Z)
    assert js["pairs"][0] == {"g": "4", "isolation": 3, "exact": True}


def test_gap_certificate_evens_exhausts_budget(Z):
    v = certify_not_2_divisible(parse_set(Z, "Z:evens"), [3], max_radius=64)
    assert v.status is Status.NO_WITNESS


def test_gap_targets_must_increase(Z):
    with pytest.raises(ValueError):
        certify_not_2_divisible(parse_set(Z, "Z:squares"), [5, 1])


def test_o_set(Z):
    O = o_set(parse_set(Z, "Z:naturals"), (3,))
    assert ints(O.restrict(3)) == [0, 1, -1, 2, -2, 3]
    A, B = parse_set(Z, "Z:evens"), parse_set(Z, "Z:odds")
    h = (5,)
    OA, OB = set(o_set(A, h).restrict(20)), set(o_set(B, h).restrict(20))
    assert not OA & OB
    assert OA | OB == set(Z.ball(20))


# -- paradoxical decompositions --------------------------------------------------------

def first_letter_witness(F2):
    pieces = {c: parse_set(F2, f"F:first:{c}") for c in "aAbB"}
    a, b, e = F2.parse("a"), F2.parse("b"), F2.identity
    first = [(pieces["a"], e), (pieces["A"], a)]
    second = [(pieces["b"], e), (pieces["B"], b)]
    return first, second


def test_first_letter_decomposition(F2):
    first, second = first_letter_witness(F2)
    v = check_paradoxical_witness(parse_set(F2, "all"), first, second, 6)
    assert v.ok


def test_paradoxical_z_refuted(Z):
    A = parse_set(Z, "all")
    first = [(parse_set(Z, "Z:mult:4"), (0,)), (parse_set(Z, "Z:coset:4:1"), (1,))]
    second = [(parse_set(Z, "Z:coset:4:2"), (0,)), (parse_set(Z, "Z:coset:4:3"), (1,))]
    v = check_paradoxical_witness(A, first, second, 10)
    assert v.status is Status.REFUTED
    assert v.counterexample in Z.ball(10)


def test_paradoxical_overlap_is_error(F2):
    first, second = first_letter_witness(F2)
    second[0] = (parse_set(F2, "F:first:a"), F2.identity)
    with pytest.raises(MalformedWitness):
        check_paradoxical_witness(parse_set(F2, "all"), first, second, 4)
