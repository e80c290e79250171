import pytest
from hypothesis import given, strategies as st

from coarse import LazySet, Status, parse_group
from coarse.absorbing import (AntiAbsorbingCertificate, absorb_witness, absorbing_up_to,
                              check_anti_absorbing, subgroup_nonabsorbing_cert)
from coarse.store import parse_set
from coarse.verdict import GLOBAL


def test_absorb_examples(Z, F2):
    F = [(k,) for k in range(-3, 4)]
    v = absorb_witness(parse_set(Z, "Z:naturals"), F, 20)
    assert v.ok and v.witness == (4,)
    v = absorb_witness(parse_set(Z, "Z:evens"), [(0,), (1,)], 50)
    assert v.status is Status.NO_WITNESS
    for G in (Z, F2):
        assert absorb_witness(parse_set(G, "all"), G.ball(2), 3).witness == G.identity


def test_absorbing_up_to(Z):
    v = absorbing_up_to(parse_set(Z, "Z:naturals"), 5, 10)
    assert v.ok and v.witness[5] == (6,)
    v = absorbing_up_to(parse_set(Z, "Z:naturals"), 5, 4)
    assert v.status is Status.NO_WITNESS


@given(st.frozensets(st.integers(-12, 12), max_size=16),
       st.frozensets(st.integers(-2, 2), min_size=1, max_size=3))
def test_absorb_witness_matches_brute_force(a, f):
    Z = parse_group("Z")
    A = LazySet.from_finite(Z, [(x,) for x in a])
    v = absorb_witness(A, [(x,) for x in f], 8)
    cands = sorted(range(-8, 9), key=lambda g: (abs(g), g < 0))
    ref = next((g for g in cands if all(x + g in a for x in f)), None)
    if ref is None:
        assert v.status is Status.NO_WITNESS
    else:
        assert v.witness == (ref,)


def test_anti_absorbing_examples(Z):
    cert = AntiAbsorbingCertificate()
    cert.add([(0,)], (1,), "window")
    assert check_anti_absorbing(parse_set(Z, "Z:evens"), cert, 30).ok
    for d in (1, 5, -7):
        c = AntiAbsorbingCertificate()
        c.add([(0,)], (d,), "window")
        v = check_anti_absorbing(parse_set(Z, "Z:naturals"), c, 20)
        assert v.status is Status.REFUTED
        x = v.counterexample
        # oracle: x ∈ ℕ and x ∈ d + ℕ
        assert x[0] >= 1 and x[0] - d >= 1


@given(st.frozensets(st.integers(-10, 10), min_size=1, max_size=8),
       st.integers(0, 2), st.integers(-15, 15))
def test_anti_absorbing_matches_brute_force(a, k, d):
    Z = parse_group("Z")
    A = LazySet.from_finite(Z, [(x,) for x in a])
    cert = AntiAbsorbingCertificate()
    cert.add(Z.ball(k), (d,), "window")
    R = 20
    TA = {x + t for x in a for t in range(-k, k + 1)}
    overlap = sorted((y for y in TA & {x + d for x in TA} if abs(y) <= R),
                     key=lambda y: (abs(y), y < 0))
    v = check_anti_absorbing(A, cert, R, cross_check=True)
    if overlap:
        assert v.status is Status.REFUTED and v.counterexample == (overlap[0],)
    else:
        assert v.ok


@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=4),
       st.integers(0, 1), st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=5))
def test_anti_absorbing_free_matches_brute_force(aw, k, dw):
    from oracles import free_reduce
    F2 = parse_group("F_2")
    base = [(), (1,), (2, 2)]
    A_el = {F2.mul(free_reduce(aw), x) for x in base}
    A = LazySet.from_finite(F2, A_el)
    d = free_reduce(dw)
    cert = AntiAbsorbingCertificate()
    cert.add(F2.ball(k), d, "window")
    R = 8
    TA = {F2.mul(t, x) for t in F2.ball(k) for x in A_el}
    dTA = {F2.mul(d, y) for y in TA}
    clash = [y for y in TA & dTA if len(y) <= R]
    v = check_anti_absorbing(A, cert, R, cross_check=True)
    assert v.ok == (not clash)


def test_certificate_json(Z):
    cert = AntiAbsorbingCertificate()
    cert.add(Z.ball(2), (9,))
    assert cert.to_json(Z) == {"pairs": [{"T_size": 5, "T_radius": 2, "d": "9",
                                          "status": GLOBAL}]}


def test_subgroup_nonabsorbing_examples(Z, Z2, F2):
    S, v = subgroup_nonabsorbing_cert(parse_set(Z2, "Zd:axis:0"), [Z2.identity], 6)
    assert v.ok and v.is_global
    assert v.witness["x"] == (0, 1) and S == [(0, 0), (0, -1)]
    S, v = subgroup_nonabsorbing_cert(parse_set(F2, "F:cyclic:a"), [F2.identity], 6)
    assert v.ok and v.witness["x"] == F2.parse("b") and S == [F2.identity, F2.parse("B")]
    with pytest.raises(ValueError):
        subgroup_nonabsorbing_cert(parse_set(Z, "Z:evens"), [(0,)], 6)


def test_subgroup_nonabsorbing_larger_F(Z2):
    F = [(0, 0), (1, 0), (0, 1)]
    S, v = subgroup_nonabsorbing_cert(parse_set(Z2, "Zd:axis:0"), F, 6)
    assert v.ok
    H = lambda y: y[1] == 0
    for y in Z2.ball(6):
        in_all = all(any(H((y[0] - s[0] - f[0], y[1] - s[1] - f[1])) for f in F) for s in S)
        assert not in_all
