"""Rational functions in one formal variable t with exact rational coefficients.

Coefficient sequences are stored lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Poly = tuple[Fraction, ...]


def _trim(c: Sequence) -> Poly:
    c = [x if type(x) is Fraction else Fraction(x) for x in c]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c) if c else (Fraction(0),)


def poly_add(f: Sequence, g: Sequence) -> Poly:
    n = max(len(f), len(g))
    return _trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def poly_sub(f: Sequence, g: Sequence) -> Poly:
    return poly_add(f, [-x for x in g])


def poly_mul(f: Sequence, g: Sequence) -> Poly:
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return _trim(out)


def poly_scale(f: Sequence, c) -> Poly:
    return _trim([c * x for x in f])


def _degree(f: Sequence) -> int:
    f = _trim(f)
    return -1 if f == (0,) else len(f) - 1


def poly_divmod(f: Sequence, g: Sequence) -> tuple[Poly, Poly]:
    f, g = list(_trim(f)), _trim(g)
    dg = _degree(g)
    if dg < 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(f) - dg, 1)
    while _degree(f) >= dg:
        shift = _degree(f) - dg
        c = f[-1] / g[-1]
        q[shift] = c
        for i, b in enumerate(g):
            f[i + shift] -= c * b
        f = list(_trim(f))
    return _trim(q), _trim(f)


def poly_gcd(f: Sequence, g: Sequence) -> Poly:
    f, g = _trim(f), _trim(g)
    while _degree(g) >= 0:
        f, g = g, poly_divmod(f, g)[1]
    if _degree(f) < 0:
        return (Fraction(1),)
    return poly_scale(f, 1 / f[-1])


def poly_eval(f: Sequence, t):
    acc = 0
    for c in reversed(f):
        acc = acc * t + (float(c) if isinstance(t, (float, complex)) else c)
    return acc


def series_div(num: Sequence, den: Sequence, N: int) -> list[Fraction]:
    """Taylor coefficients 0..N of num/den about t = 0 (den(0) != 0)."""
    if den[0] == 0:
        raise ZeroDivisionError("denominator vanishes at t = 0")
    out: list[Fraction] = []
    for k in range(N + 1):
        acc = Fraction(num[k]) if k < len(num) else Fraction(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out.append(acc / den[0])
    return out


def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class LocalFactor:
    """numerator(t) / denominator(t) with t = p^(-(s - shift)), shift = kappa - 1.

    The denominator is normalised so that denominator(0) = 1.
    """

    numerator: Poly
    denominator: Poly = (Fraction(1),)
    prime: int | None = None
    shift: int | None = None

    def __post_init__(self):
        num, den = _trim(self.numerator), _trim(self.denominator)
        if den[0] == 0:
            raise ValueError("denominator must not vanish at t = 0")
        c = den[0]
        object.__setattr__(self, "numerator", poly_scale(num, 1 / c))
        object.__setattr__(self, "denominator", poly_scale(den, 1 / c))

    @classmethod
    def constant(cls, c=1, prime=None, shift=None) -> "LocalFactor":
        return cls((Fraction(c),), (Fraction(1),), prime, shift)

    def series(self, N: int) -> list[Fraction]:
        return series_div(self.numerator, self.denominator, N)

    def __call__(self, t):
        return poly_eval(self.numerator, t) / poly_eval(self.denominator, t)

    def minus_one(self, t):
        """factor(t) - 1, evaluated without cancellation near 1."""
        return poly_eval(poly_sub(self.numerator, self.denominator), t) / poly_eval(self.denominator, t)

    def t_at(self, s_alpha: float) -> float:
        return float(self.prime) ** -(s_alpha - self.shift)

    def at_s(self, s_alpha: float) -> float:
        return self(self.t_at(s_alpha))

    def __mul__(self, other: "LocalFactor") -> "LocalFactor":
        return LocalFactor(
            poly_mul(self.numerator, other.numerator),
            poly_mul(self.denominator, other.denominator),
            self.prime if self.prime is not None else other.prime,
            self.shift if self.shift is not None else other.shift,
        )

    def __eq__(self, other):
        if not isinstance(other, LocalFactor):
            return NotImplemented
        lhs = poly_mul(self.numerator, other.denominator)
        rhs = poly_mul(other.numerator, self.denominator)
        return lhs == rhs

    def __hash__(self):
        r = self.reduced()
        return hash((r.numerator, r.denominator))

    def reduced(self) -> "LocalFactor":
        g = poly_gcd(self.numerator, self.denominator)
        if _degree(g) <= 0:
            return self
        num, _ = poly_divmod(self.numerator, g)
        den, _ = poly_divmod(self.denominator, g)
        return LocalFactor(num, den, self.prime, self.shift)

    def to_dict(self) -> dict:
        return {
            "numerator": [frac_str(c) for c in self.numerator],
            "denominator": [frac_str(c) for c in self.denominator],
            "prime": self.prime,
            "variable": f"t = p^-(s - {self.shift})" if self.shift is not None else "t",
        }

    def __str__(self):
        def show(f):
            terms = []
            for i, c in enumerate(f):
                if c == 0:
                    continue
                mon = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                coef = frac_str(c)
                if mon and c == 1:
                    coef = ""
                elif mon and c == -1:
                    coef = "-"
                terms.append(f"{coef}{'*' if coef not in ('', '-') and mon else ''}{mon}")
            return " + ".join(terms).replace("+ -", "- ") or "0"

        if self.denominator == (1,):
            return show(self.numerator)
        return f"({show(self.numerator)}) / ({show(self.denominator)})"
