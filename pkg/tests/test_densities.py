import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from campana.arith import INF, primes_up_to
from campana.densities import (
    archimedean_density,
    archimedean_quadrature,
    decay_exponent,
    euler_product,
    leading_constant,
    local_density_closed,
    local_density_oracle,
    regularized_local_factor,
    stratum_counts,
    twisted_local_density,
    twisted_local_oracle,
    twisted_stratum_terms,
    twisted_unipotent_density,
)
from campana.orbifold import MODEL_NAMES, build_model

P3 = build_model("p3-heisenberg")
P3m2 = build_model("p3-heisenberg", m=2)
ZETA4 = math.pi**4 / 90


def test_closed_examples():
    f = local_density_closed(P3m2, 2)
    assert str(f) == "(1 - t + 7/8*t^2) / (1 - t)"
    assert f.series(5) == [1, 0, Fraction(7, 8), Fraction(7, 8), Fraction(7, 8), Fraction(7, 8)]
    for p in (3, 5):
        g = local_density_closed(P3, p)
        assert g.series(3) == [1] + [1 - Fraction(1, p**3)] * 3
    assert local_density_closed(P3, 7, m="inf").numerator == (1,)
    assert local_density_closed(P3m2, 5, counts=stratum_counts(P3m2, 5)) == local_density_closed(P3m2, 5)
    with pytest.raises(ValueError):
        local_density_closed(P3, 4)


def test_oracle_examples():
    assert local_density_oracle(P3m2, 2, N=5) == [1, 0, Fraction(7, 8), Fraction(7, 8), Fraction(7, 8), Fraction(7, 8)]
    assert local_density_oracle(P3, 3, N=0) == [1]
    assert local_density_oracle(P3, 3, m="inf", N=4) == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("name", MODEL_NAMES)
@pytest.mark.parametrize("m", [1, 2, 3, "inf"])
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_oracle_matches_closed(name, m, p):
    M = build_model(name, m=m)
    assert local_density_oracle(M, p, N=8) == local_density_closed(M, p).series(8)


def test_regularized_examples():
    for p in (2, 3, 5):
        reg = regularized_local_factor(P3m2, p)
        c = 1 - Fraction(1, p**3)
        expected = (local_density_closed(P3m2, p).series(8))
        prod = [expected[k] - (expected[k - 2] if k >= 2 else 0) for k in range(9)]
        assert reg.series(8) == prod
        assert reg.numerator == (1, 0, c - 1, c)
        assert reg(0) == 1
    assert regularized_local_factor(P3, 7).numerator == (1, -Fraction(1, 343))


def test_regularized_at_a_bar_is_close_to_one():
    vals = []
    for p in primes_up_to(1000):
        t = p ** -0.5
        vals.append((p, abs(regularized_local_factor(P3m2, p)(t) - 1)))
    C = max(p * v for p, v in vals)
    assert all(v <= C / p for p, v in vals)
    tail = [v for p, v in vals if p > 100]
    assert tail == sorted(tail, reverse=True)


def test_decay_exponents():
    assert decay_exponent(P3m2, 3.5) == pytest.approx(1.5)
    assert decay_exponent(P3, 4) == pytest.approx(4)
    assert decay_exponent(P3, 4, m="inf") == math.inf


def test_euler_product_consistency():
    r3 = euler_product(P3m2, 4, 10**3)
    r4 = euler_product(P3m2, 4, 10**4)
    assert abs(math.log(r4.value / r3.value)) <= r3.tail_bound
    assert r4.tail_bound < r3.tail_bound
    assert euler_product(P3m2, 4, 1).value == 1.0
    d = json.loads(r3.to_json())
    assert set(d) == {"model", "m", "s", "prime_bound", "value", "tail_bound", "factors"}
    assert d["factors"][0][0] == 2


def test_euler_product_m1_two_paths():
    r = euler_product(P3, 5, 500)
    direct, zeta_trunc = 1.0, 1.0
    for p in primes_up_to(500):
        t = p**-2.0
        direct *= local_density_closed(P3, p)(t)
        zeta_trunc *= 1 / (1 - t)
    assert r.value == pytest.approx(direct / zeta_trunc, rel=1e-13)


def test_euler_product_workers_identical():
    a = euler_product(P3m2, 3.5, 20000)
    b = euler_product(P3m2, 3.5, 20000, workers=2)
    assert a.to_json() == b.to_json()


def test_euler_product_window():
    with pytest.raises(ValueError, match="divergent"):
        euler_product(P3m2, 3.0, 100)
    with pytest.raises(ValueError, match="divergent"):
        euler_product(P3m2, 3.3, 100)
    assert euler_product(P3m2, 3.4, 100).decay_exponent == pytest.approx(1.2)


def test_archimedean():
    assert archimedean_density(P3, 3.5) == 56
    assert archimedean_density(P3, 4) == 32
    assert archimedean_density(P3, 1e9) == pytest.approx(8)
    with pytest.raises(ValueError, match="divergent archimedean"):
        archimedean_density(P3, 3)
    for dim, model in ((1, build_model("p1-vector")), (2, build_model("p2-unipotent"))):
        for sigma in (dim + 0.5, dim + 2):
            val, err = archimedean_quadrature(dim, sigma)
            assert val == pytest.approx(archimedean_density(model, sigma), abs=1e-6)


def test_leading_constant_m1_is_classical():
    c = leading_constant(P3, P_max=10**4)
    assert c.c_bar == pytest.approx(4 * 8 / ZETA4, rel=1e-9)
    assert c.tauberian == pytest.approx(8 / ZETA4, rel=1e-9)


def test_leading_constant_properties():
    c3 = leading_constant(P3m2, P_max=10**3)
    c4 = leading_constant(P3m2, P_max=10**4)
    assert c4.c_bar > 0
    assert abs(c4.c_bar / c3.c_bar - 1) <= c3.tail_bound
    assert c4.prefactor == 0.5 and c4.archimedean == 56
    assert c4.tauberian == pytest.approx(c4.c_bar / 3.5)
    S2 = leading_constant(P3m2, S=[2], P_max=10**3)
    assert S2.s_factors == pytest.approx(0.5 * local_density_closed(P3, 2)(2**-0.5))
    dlt = leading_constant(build_model("p3-heisenberg", m="inf", lam=3))
    assert (dlt.branch, dlt.c_bar, dlt.tauberian, dlt.b) == ("dlt", 8, 8, 1)
    dlt2 = leading_constant(build_model("p3-heisenberg", m="inf", lam=3), S=[2])
    assert dlt2.b == 2 and dlt2.c_bar == pytest.approx(8 * (7 / 8) / (3 * math.log(2)))


def test_twisted_examples():
    assert str(twisted_local_density(P3, 5, (1, 0))) == "1 - 1/125*t"
    assert str(twisted_local_density(P3m2, 5, (1, 0))) == "1"
    assert twisted_local_density(P3, 5, (0, 0)) == local_density_closed(P3, 5)
    assert twisted_local_density(P3, 5, (5, 0)).series(3) == [1, Fraction(124, 125), Fraction(-1, 125), 0]
    with pytest.raises(ValueError):
        twisted_local_density(P3, 5, (Fraction(1, 5), 0))
    with pytest.raises(ValueError):
        twisted_local_density(P3, 5, (1,))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_twisted_strata(p):
    for a in ((1, 0), (0, 1), (2, 3)):
        terms = twisted_stratum_terms(P3, p, a)
        assert terms["generic_value"] == Fraction(-1, p**3)
        assert terms["off_E"] + terms["on_E"] == p**2 + p + 1
        assert terms["t_coefficient"] == twisted_local_density(P3, p, a).series(1)[1]
        assert twisted_stratum_terms(P3m2, p, a)["t_coefficient"] == 0


@settings(max_examples=40)
@given(st.sampled_from([3, 5, 7]), st.integers(-60, 60), st.integers(-60, 60), st.sampled_from([1, 2, 3]))
def test_twisted_bounded_by_untwisted(p, a1, a2, m):
    M = build_model("p3-heisenberg", m=m)
    if a1 == a2 == 0:
        return
    tw = twisted_local_oracle(M, p, (a1, a2), N=5)
    assert tw == twisted_local_density(M, p, (a1, a2)).series(5)
    untw = local_density_closed(M, p).series(5)
    assert all(abs(x) <= y for x, y in zip(tw, untw))


def test_unipotent():
    U = build_model("p2-unipotent")
    assert twisted_unipotent_density(U, 3, 1) == [1, Fraction(-1, 9)] + [0] * 7
    assert twisted_unipotent_density(U, 3, 1, m=2) == [1] + [0] * 8
    assert twisted_unipotent_density(U, 5, 0, N=6) == local_density_closed(U, 5).series(6)
    with pytest.raises(ValueError):
        twisted_unipotent_density(P3, 3, 1)


def test_cyclotomic_reduction_rejects_irrational():
    from campana.densities import _cyclotomic_value
    import numpy as np

    with pytest.raises(ArithmeticError):
        _cyclotomic_value(np.array([0, 1, 0]), 3, 1)
    assert _cyclotomic_value(np.array([1, 1, 1]), 3, 1) == 0
    assert _cyclotomic_value(np.array([4, 1, 1]), 3, 1) == 3
