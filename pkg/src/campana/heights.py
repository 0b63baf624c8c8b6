"""Local and global heights for the built-in models, max-norm metrization at every place."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .arith import INF, PrimitivePoint, as_rational, factorize, padic_valuation
from .orbifold import OrbifoldModel


@dataclass(frozen=True)
class HeightParams:
    """Exponent vector s = (s_alpha) on Pic(X), keyed by divisor id."""

    s: Mapping[str, Fraction] = field(default_factory=dict)

    def __add__(self, other: "HeightParams") -> "HeightParams":
        keys = set(self.s) | set(other.s)
        return HeightParams({k: self.s.get(k, 0) + other.s.get(k, 0) for k in keys})

    @classmethod
    def from_model(cls, model: OrbifoldModel) -> "HeightParams":
        return cls({d.id: d.lam for d in model.divisors})


def local_height(model: OrbifoldModel, P: PrimitivePoint, alpha: str, v) -> Fraction | float:
    """||f_alpha(P)||_v = |x_alpha|_v / max_i |x_i|_v.

    Exact at every place on integer coordinates: at a finite prime the value is
    p^(-n_p(D_alpha, P)), at infinity |x_alpha| / max |x_i|.
    """
    div = model.divisor(alpha)
    x = P[div.coordinate]
    if x == 0:
        raise ValueError(f"point lies in boundary: {P} is on {alpha}")
    if v == INF or (isinstance(v, str) and v.lower() in ("inf", "infinity")):
        return Fraction(abs(x), max(abs(c) for c in P))
    return Fraction(1, v ** padic_valuation(x, v))


def _exponents(model: OrbifoldModel, lam) -> dict[str, Fraction]:
    if lam is None:
        return {d.id: d.lam for d in model.divisors}
    if isinstance(lam, HeightParams):
        return {k: as_rational(v) for k, v in lam.s.items()}
    if isinstance(lam, Mapping):
        return {k: as_rational(v) for k, v in lam.items()}
    return {d.id: as_rational(lam) for d in model.divisors}


def height(model: OrbifoldModel, P: PrimitivePoint, lam=None) -> Fraction | float:
    """H_L(P) = prod_alpha (prod_v ||f_alpha(P)||_v)^(-lambda_alpha).

    Exact (a rational) when every lambda is an integer; otherwise a float.
    """
    result = Fraction(1)
    floating = 1.0
    exact = True
    for alpha, s in _exponents(model, lam).items():
        div = model.divisor(alpha)
        x = P[div.coordinate]
        if x == 0:
            raise ValueError(f"point lies in boundary: {P} is on {alpha}")
        inv = local_height(model, P, alpha, INF)
        for p in factorize(x):
            inv *= local_height(model, P, alpha, p)
        if s.denominator == 1:
            result *= inv ** -int(s)
        else:
            exact = False
            floating *= float(inv) ** -float(s)
    if exact:
        return result
    return float(result) * floating


def height_bound(T, lam) -> int:
    """Largest integer B with B^lam <= T, so that max|coords| <= B iff H_{lam H} <= T."""
    lam = as_rational(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if isinstance(T, float):
        if not math.isfinite(T):
            raise ValueError("T must be finite")
        T = Fraction(T)
    T = as_rational(T)
    if T < 1:
        return 0
    # B^(a/b) <= T  <=>  B^a <= T^b
    a, b = lam.numerator, lam.denominator
    lhs_num, lhs_den = (T**b).numerator, (T**b).denominator
    guess = int(float(T) ** (1 / float(lam)))
    B = max(guess - 2, 0)
    while (B + 1) ** a * lhs_den <= lhs_num:
        B += 1
    while B > 0 and B**a * lhs_den > lhs_num:
        B -= 1
    return B
