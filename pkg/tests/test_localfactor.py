from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from campana.localfactor import LocalFactor, frac_str, poly_divmod, poly_gcd, poly_mul, series_div

coeffs = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=1, max_size=5)


def test_geometric_series():
    f = LocalFactor((Fraction(1),), (Fraction(1), Fraction(-1)))
    assert f.series(4) == [1, 1, 1, 1, 1]
    assert f(0.5) == pytest.approx(2.0)
    assert f.minus_one(0.5) == pytest.approx(1.0)


def test_normalisation_and_equality():
    f = LocalFactor((Fraction(2), Fraction(2)), (Fraction(2), Fraction(-2)))
    assert f.denominator[0] == 1
    g = LocalFactor((Fraction(1), Fraction(2), Fraction(1)), (Fraction(1), Fraction(0), Fraction(-1)))
    assert f == g and hash(f) == hash(g)
    assert g.reduced().denominator == (1, -1)
    with pytest.raises(ValueError):
        LocalFactor((Fraction(1),), (Fraction(0), Fraction(1)))


def test_string_and_dict():
    f = LocalFactor((Fraction(1), Fraction(-1), Fraction(7, 8)), (Fraction(1), Fraction(-1)), 2, 3)
    assert str(f) == "(1 - t + 7/8*t^2) / (1 - t)"
    d = f.to_dict()
    assert d["numerator"] == ["1", "-1", "7/8"] and d["variable"] == "t = p^-(s - 3)"
    assert f.t_at(4) == 0.5
    assert frac_str(Fraction(-3, 4)) == "-3/4"


@given(coeffs, coeffs.filter(lambda c: any(c)))
def test_divmod(f, g):
    q, r = poly_divmod(f, g)
    lhs = poly_mul(q, g)
    lhs = [lhs[i] if i < len(lhs) else 0 for i in range(max(len(lhs), len(r), len(f)))]
    rr = [r[i] if i < len(r) else 0 for i in range(len(lhs))]
    ff = [f[i] if i < len(f) else 0 for i in range(len(lhs))]
    assert [a + b for a, b in zip(lhs, rr)] == ff


@given(coeffs.filter(lambda c: c[0] != 0), coeffs.filter(lambda c: c[0] != 0), st.integers(0, 8))
def test_product_series(f, g, N):
    F = LocalFactor(tuple(f), (Fraction(1), Fraction(-1, 2)))
    G = LocalFactor(tuple(g), (Fraction(1), Fraction(1, 3)))
    a, b, c = F.series(N), G.series(N), (F * G).series(N)
    assert c == [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(N + 1)]
    assert (F * G).reduced() == F * G


def test_gcd_monic():
    g = poly_gcd(poly_mul((1, -1), (2, 1)), poly_mul((1, -1), (3, 0, 1)))
    assert g == (-1, 1)
    assert series_div((1,), (1, -1), 3) == [1, 1, 1, 1]
