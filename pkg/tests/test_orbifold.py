import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from campana.arith import INF, is_mfull, primitive_rep
from campana.densities import stratum_counts
from campana.orbifold import (
    MODEL_NAMES,
    BoundaryDivisor,
    build_model,
    intersection_multiplicity,
    is_campana,
    parse_m,
    predict_invariants,
)

P3 = build_model("p3-heisenberg")


def pt(*c):
    return primitive_rep(c)


def test_builtins():
    assert MODEL_NAMES == ("p3-heisenberg", "p2-unipotent", "p1-vector")
    d = P3.single_divisor()
    assert (d.kappa, d.lam, d.epsilon, d.m) == (4, 1, 0, 1)
    assert build_model("P2_UNIPOTENT").ambient_dim == 2
    with pytest.raises(ValueError, match="unknown model"):
        build_model("p4")


def test_divisor_validation():
    with pytest.raises(ValueError):
        BoundaryDivisor("D", 1, 1, 0, 1)
    with pytest.raises(ValueError):
        BoundaryDivisor("D", 4, 1, Fraction(1, 3), 2)
    with pytest.raises(ValueError):
        BoundaryDivisor("D", 4, 1, 1, 3)
    assert BoundaryDivisor("D", 4, 1, 1, INF).klt is False
    assert parse_m("infinity") == INF and parse_m("3") == 3
    with pytest.raises(ValueError):
        parse_m(0)


def test_multiplicity_examples():
    assert intersection_multiplicity(P3, pt(4, 1, 1, 1), "D", 2) == 2
    assert intersection_multiplicity(P3, pt(1, 5, 7, 9), "D", 3) == 0
    assert intersection_multiplicity(P3, pt(9, 2, 1, 1), "D", 3) == 2
    assert intersection_multiplicity(P3, pt(9, 2, 1, 1), "D", 2) == 0
    with pytest.raises(ValueError, match="point lies in boundary"):
        intersection_multiplicity(P3, pt(0, 1, 0, 0), "D", 2)


def test_campana_examples():
    M2 = build_model("p3-heisenberg", m=2)
    assert is_campana(M2, pt(4, 1, 1, 1))
    assert not is_campana(M2, pt(2, 1, 1, 1))
    assert is_campana(M2, pt(2, 1, 1, 1), [2])
    assert is_campana(P3, pt(6, 1, 1, 1))
    integral = build_model("p3-heisenberg", m="inf")
    assert is_campana(integral, pt(1, 9, 9, 9))
    assert not is_campana(integral, pt(8, 1, 1, 1))
    with pytest.raises(ValueError, match="point lies in boundary"):
        is_campana(M2, pt(0, 1, 1, 1))


def test_campana_matches_mfull():
    rng = random.Random(7)
    for m in (2, 3):
        M = build_model("p3-heisenberg", m=m)
        for _ in range(10_000):
            c = [rng.randint(1, 5000)] + [rng.randint(-5000, 5000) for _ in range(3)]
            P = primitive_rep(c)
            assert is_campana(M, P) == is_mfull(P[0], m)


@given(st.integers(1, 10**5), st.integers(-99, 99), st.sampled_from([2, 3]), st.sampled_from([(), (2,), (3,), (2, 3)]))
def test_campana_scale_and_monotone(a, b, m, S):
    M = build_model("p3-heisenberg", m=m)
    P = pt(a, b, 1, 0)
    assert is_campana(M, primitive_rep([Fraction(5, 7) * x for x in P])) == is_campana(M, P)
    if is_campana(M, P):
        assert is_campana(M, P, S)
    assert is_campana(M, P, S) <= is_campana(M, P, S + (5,))


def test_invariants_examples():
    inv = predict_invariants(build_model("p3-heisenberg", m=2))
    assert (inv.a_bar, inv.b_bar, inv.b_prime) == (Fraction(7, 2), 1, None)
    assert predict_invariants(P3).as_dict() == {"a": 4, "b": 1}
    dlt = predict_invariants(build_model("p3-heisenberg", m="inf", lam=3))
    assert (dlt.a_bar, dlt.b_prime) == (1, 1)
    assert predict_invariants(build_model("p3-heisenberg", m="inf", lam=3), [2, 3]).b_prime == 3
    assert predict_invariants(build_model("p3-heisenberg", m="inf", lam=2)).b_prime is None
    with pytest.raises(ValueError, match="effective-cone"):
        predict_invariants(build_model("p3-heisenberg", lam=-1))


@given(st.fractions(min_value=Fraction(1, 10), max_value=10), st.sampled_from([1, 2, 3, "inf"]))
def test_a_bar_scaling(c, m):
    M = build_model("p3-heisenberg", m=m)
    base = predict_invariants(M)
    scaled = predict_invariants(M.with_weights(lam=c))
    assert scaled.a_bar == base.a_bar / c
    assert scaled.A_eps == base.A_eps


@pytest.mark.parametrize("name", MODEL_NAMES)
@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_stratum_partition(name, p):
    M = build_model(name)
    counts = stratum_counts(M, p)
    assert sum(counts.values()) == M.point_count(p)
    for B, c in counts.items():
        assert M.stratum_count(p, B) == c


def test_stratum_examples():
    assert stratum_counts(P3, 5) == {frozenset(): 125, frozenset({"D"}): 31}
    assert stratum_counts(P3, 2) == {frozenset(): 8, frozenset({"D"}): 7}
