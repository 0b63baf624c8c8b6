"""Exact integer/rational helpers: valuations, primitive representatives, m-full integers.

Rationals are ``fractions.Fraction`` throughout; nothing in this module rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

INF = math.inf

_INF_TOKENS = {"inf", "infinity", "oo", "∞"}


def as_rational(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, float):
        raise TypeError("floats are not exact rationals; pass int, str or Fraction")
    return Fraction(q)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not prime")


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).tolist()


def finite_places(S: Iterable | None) -> frozenset[int]:
    """Drop archimedean markers from a place set and validate the primes."""
    out = set()
    for v in S or ():
        if isinstance(v, str) and v.strip().lower() in _INF_TOKENS:
            continue
        if isinstance(v, float) and math.isinf(v):
            continue
        v = int(v)
        _check_prime(v)
        out.add(v)
    return frozenset(out)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of |n|, n != 0."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    f: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            f[p] = f.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        for q in (d, d + 2):
            while n % q == 0:
                f[q] = f.get(q, 0) + 1
                n //= q
        d += 6
    if n > 1:
        f[n] = f.get(n, 0) + 1
    return f


def _vp_int(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def padic_valuation(q, p: int) -> int:
    """Exponent of p in the nonzero rational q."""
    _check_prime(p)
    q = as_rational(q)
    if q == 0:
        raise ValueError("valuation undefined for 0")
    return _vp_int(q.numerator, p) - _vp_int(q.denominator, p)


def padic_fractional_part(q, p: int) -> Fraction:
    """The p-power-denominator rational {q}_p in [0, 1) with q - {q}_p in Z_p."""
    _check_prime(p)
    q = as_rational(q)
    k = _vp_int(q.denominator, p)
    if k == 0:
        return Fraction(0)
    pk = p**k
    rest = q.denominator // pk
    r = q.numerator * pow(rest, -1, pk) % pk
    return Fraction(r, pk)


def residue_mod(q, p: int, k: int) -> int:
    """q mod p^k for q in Z_p (denominator prime to p)."""
    q = as_rational(q)
    pk = p**k
    if q.denominator % p == 0:
        raise ValueError(f"{q} is not a {p}-adic integer")
    return q.numerator * pow(q.denominator, -1, pk) % pk


@dataclass(frozen=True)
class PrimitivePoint:
    """Integer projective coordinates with gcd 1 and first nonzero entry positive."""

    coords: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coords)
        object.__setattr__(self, "coords", c)
        if len(c) < 2:
            raise ValueError("projective points need at least two coordinates")
        if not any(c):
            raise ValueError("all-zero coordinates")
        if math.gcd(*c) != 1:
            raise ValueError(f"{c} is not primitive")
        if next(x for x in c if x) < 0:
            raise ValueError(f"{c}: first nonzero coordinate must be positive")

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __str__(self):
        return "[" + ":".join(map(str, self.coords)) + "]"


def primitive_rep(coords: Sequence) -> PrimitivePoint:
    qs = [as_rational(c) for c in coords]
    if len(qs) < 2:
        raise ValueError("projective points need at least two coordinates")
    if not any(qs):
        raise ValueError("all-zero coordinates")
    den = math.lcm(*(q.denominator for q in qs))
    ints = [q.numerator * (den // q.denominator) for q in qs]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    if next(x for x in ints if x) < 0:
        ints = [-x for x in ints]
    return PrimitivePoint(tuple(ints))


def is_mfull(n: int, m, S: Iterable = ()) -> bool:
    """True iff v_p(n) is 0 or >= m at every prime p outside S (m may be INF)."""
    if n < 1:
        raise ValueError("n must be positive")
    if m == 1:
        return True
    S = finite_places(S)
    return all(p in S or e >= m for p, e in factorize(n).items())


def _mfull_factored(X: int, m, S: frozenset[int]) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Yield (n, primes dividing n) for every m-full n <= X (unsorted, no repeats).

    Each n is produced exactly once: S-part first (any exponent >= 1), then the
    prime-to-S part as a product over increasing primes with exponents >= m.
    """
    s_primes = sorted(S)

    def s_parts(i: int, cur: int, used: tuple[int, ...]):
        yield cur, used
        for j in range(i, len(s_primes)):
            p = s_primes[j]
            v = cur * p
            while v <= X:
                yield from s_parts(j + 1, v, used + (p,))
                v *= p

    if m == INF:
        yield from s_parts(0, 1, ())
        return

    m = int(m)
    primes = [p for p in primes_up_to(integer_root_floor(X, m)) if p not in S]

    def rest(i: int, cur: int, used: tuple[int, ...]):
        yield cur, used
        for j in range(i, len(primes)):
            p = primes[j]
            v = cur * p**m
            if v > X:
                break
            while v <= X:
                yield from rest(j + 1, v, used + (p,))
                v *= p

    for s, used in s_parts(0, 1, ()):
        yield from rest(0, s, used)


def mfull_up_to(X: int, m, S: Iterable = ()) -> list[int]:
    """All m-full integers n <= X (relative to S), ascending.

    Built from prime-power products rather than by filtering 1..X.
    """
    if X < 1:
        return []
    if m == 1:
        return list(range(1, X + 1))
    return sorted(n for n, _ in _mfull_factored(X, m, finite_places(S)))


def mfull_with_radical(X: int, m, S: Iterable = ()) -> list[tuple[int, tuple[int, ...]]]:
    """Like mfull_up_to but each entry carries the primes dividing it."""
    if X < 1:
        return []
    S = finite_places(S)
    if m == 1:
        spf = smallest_prime_factors(X)
        return [(n, _distinct_primes(n, spf)) for n in range(1, X + 1)]
    return sorted(_mfull_factored(X, m, S))


def smallest_prime_factors(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in primes_up_to(math.isqrt(n)):
        block = spf[p * p :: p]
        block[block == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    return spf


def _distinct_primes(n: int, spf: np.ndarray) -> tuple[int, ...]:
    out = []
    while n > 1:
        p = int(spf[n])
        out.append(p)
        while n % p == 0:
            n //= p
    return tuple(out)


def integer_root_floor(x: int, k: int) -> int:
    """Largest integer r >= 0 with r**k <= x."""
    if x < 0:
        raise ValueError("negative radicand")
    if x < 2 or k == 1:
        return x
    r = 1 << (x.bit_length() // k + 1)
    while True:
        s = ((k - 1) * r + x // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r
