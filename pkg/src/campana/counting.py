"""Counting Campana points of bounded height and checking the predicted asymptotics.

Points of G(Q) are counted through the fundamental domain of primitive integer
tuples whose boundary coordinate a is positive.  For height L = lambda H the
condition H_L(P) <= T is max|x_i| <= B with B = height_bound(T, lambda).
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .arith import INF, PrimitivePoint, finite_places, mfull_with_radical
from .densities import leading_constant
from .heights import height, height_bound
from .orbifold import OrbifoldModel, is_campana, predict_invariants

DEFAULT_GRID = (100, 141, 200, 283, 400, 566, 800)
BRUTE_FORCE_CAP = 120  # largest coordinate bound B accepted by enumerate_campana


def _boundary_first(model: OrbifoldModel) -> None:
    if model.single_divisor().coordinate != 0:
        raise ValueError("counting assumes the boundary is the first coordinate hyperplane")


# --------------------------------------------------------------------------
# Brute force


@lru_cache(maxsize=4)
def _slab_data(n: int, B: int) -> tuple[np.ndarray, np.ndarray]:
    """gcd and max of |coordinates| over the cube [-B, B]^n, flattened."""
    axis = np.abs(np.arange(-B, B + 1, dtype=np.int64))
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    g = grids[0].ravel().copy()
    mx = grids[0].ravel().copy()
    for other in grids[1:]:
        g = np.gcd(g, other.ravel())
        mx = np.maximum(mx, other.ravel())
    return g, mx


@lru_cache(maxsize=4)
def _height_histogram(n: int, B: int) -> np.ndarray:
    """hist[a, h] = #{v in [-B, B]^n : gcd(a, v) = 1, max(a, |v|) = h} for 1 <= a <= B."""
    g, mx = _slab_data(n, B)
    hist = np.zeros((B + 1, B + 1), dtype=np.int64)
    for a in range(1, B + 1):
        keep = np.gcd(g, a) == 1
        hist[a] = np.bincount(np.maximum(mx[keep], a), minlength=B + 1)
    return hist


def _slab_is_campana(model: OrbifoldModel, a: int, S) -> bool:
    # Boundary multiplicities read only the boundary coordinate, so one
    # primitive point of the slab decides the whole slab.
    P = PrimitivePoint((a, 1) + (0,) * (model.ambient_dim - 1))
    return is_campana(model, P, S)


def brute_force_counts(model: OrbifoldModel, Ts: Sequence, S: Iterable = (), cap: int = BRUTE_FORCE_CAP) -> list[int]:
    """N(T) for every T in Ts from one exhaustive pass over primitive tuples."""
    _boundary_first(model)
    lam = model.single_divisor().lam
    Bs = [height_bound(T, lam) for T in Ts]
    Bmax = max(Bs, default=0)
    if Bmax > cap:
        raise ValueError(f"coordinate bound {Bmax} exceeds brute-force cap {cap}; use count_fast")
    if Bmax == 0:
        return [0] * len(Ts)
    hist = _height_histogram(model.ambient_dim, Bmax)
    good = np.array([a > 0 and _slab_is_campana(model, a, S) for a in range(Bmax + 1)])
    per_height = hist[good].sum(axis=0)
    cum = np.cumsum(per_height)
    return [int(cum[B]) if B > 0 else 0 for B in Bs]


def enumerate_campana(model: OrbifoldModel, T, S: Iterable = (), cap: int = BRUTE_FORCE_CAP) -> int:
    """Exact N(T) by exhaustive enumeration of primitive tuples with max |x_i| <= B."""
    return brute_force_counts(model, [T], S, cap)[0]


def iter_campana_points(model: OrbifoldModel, T, S: Iterable = ()) -> Iterator[PrimitivePoint]:
    """Stream every Campana point of height <= T, testing each point individually (slow)."""
    _boundary_first(model)
    B = height_bound(T, model.single_divisor().lam)
    n = model.ambient_dim
    rng = range(-B, B + 1)
    for a in range(1, B + 1):
        for rest in np.ndindex(*([2 * B + 1] * n)):
            coords = (a,) + tuple(rng[i] for i in rest)
            if math.gcd(*coords) != 1:
                continue
            P = PrimitivePoint(coords)
            if is_campana(model, P, S) and height(model, P) <= T:
                yield P


# --------------------------------------------------------------------------
# Mobius-accelerated count


def _radical_sum(entries, B: int, n: int) -> int:
    total = 0
    for _, primes in entries:
        # sum over squarefree e | rad(a) of mu(e) (2 floor(B/e) + 1)^n
        divs = [(1, 1)]
        for p in primes:
            divs += [(e * p, -mu) for e, mu in divs]
        total += sum(mu * (2 * (B // e) + 1) ** n for e, mu in divs)
    return total


def _admissible_a(model: OrbifoldModel, B: int, S) -> list[tuple[int, tuple[int, ...]]]:
    return mfull_with_radical(B, model.single_divisor().m, S)


def count_fast(model: OrbifoldModel, T, S: Iterable = (), workers: int = 1) -> int:
    """N(T) = sum over admissible a <= B of #{v in [-B, B]^n : gcd(a, v) = 1}, by Mobius inversion."""
    _boundary_first(model)
    B = height_bound(T, model.single_divisor().lam)
    if B < 1:
        return 0
    entries = _admissible_a(model, B, finite_places(S))
    n = model.ambient_dim
    if workers and workers > 1 and len(entries) > 20000:
        chunks = [entries[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_radical_sum, chunks, [B] * workers, [n] * workers))
        return sum(parts)
    return _radical_sum(entries, B, n)


def mobius(N: int) -> np.ndarray:
    mu = np.ones(N + 1, dtype=np.int64)
    is_comp = np.zeros(N + 1, dtype=bool)
    for p in range(2, N + 1):
        if is_comp[p]:
            continue
        is_comp[2 * p :: p] = True
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    mu[0] = 0
    return mu


def count_rational_classical(model: OrbifoldModel, T) -> int:
    """Points of G(Q) of height <= T with no Campana condition: sum_e mu(e) floor(B/e) (2 floor(B/e) + 1)^n."""
    B = height_bound(T, model.single_divisor().lam)
    if B < 1:
        return 0
    mu = mobius(B)
    n = model.ambient_dim
    return sum(int(mu[e]) * (B // e) * (2 * (B // e) + 1) ** n for e in range(1, B + 1) if mu[e])


def count_by_height(model: OrbifoldModel, B: int, S: Iterable = ()) -> np.ndarray:
    """out[h] = number of Campana points with max |x_i| = h exactly, 0 <= h <= B."""
    cum = [0] + [count_fast(model.with_weights(lam=1), h, S) for h in range(1, B + 1)]
    return np.diff(np.array(cum, dtype=object), prepend=0)


def partial_zeta(model: OrbifoldModel, s: float, T, S: Iterable = (), exact: bool = False):
    """sum of H_L(P)^-s over Campana points with H_L(P) <= T."""
    lam = model.single_divisor().lam
    B = height_bound(T, lam)
    per = count_by_height(model, B, S)
    if exact:
        s = Fraction(s)
        if (s * lam).denominator != 1:
            raise ValueError("exact partial sums need s * lambda integral")
        k = int(s * lam)
        return sum(Fraction(int(c), h**k) for h, c in enumerate(per) if h and c)
    e = float(s) * float(lam)
    return math.fsum(int(c) * float(h) ** -e for h, c in enumerate(per) if h and c)


# --------------------------------------------------------------------------
# Fits


def _law(T: np.ndarray, a_bar: float, b_bar: int) -> np.ndarray:
    return T**a_bar * np.log(T) ** (b_bar - 1)


def fit_leading_constant(pairs: Sequence[tuple[float, float]], a_bar, b_bar: int) -> tuple[float, float]:
    """Least-squares c with N ~ c T^a (log T)^(b-1); returns (c, max relative residual)."""
    if len(pairs) < 3:
        raise ValueError("degenerate input: need at least 3 (T, N) pairs")
    T = np.array([float(t) for t, _ in pairs])
    N = np.array([float(n) for _, n in pairs])
    if np.any(np.diff(T) <= 0) or T[0] < 1:
        raise ValueError("degenerate input: T must be increasing and >= 1")
    if b_bar < 1:
        raise ValueError("b must be >= 1")
    g = _law(T, float(a_bar), int(b_bar))
    if not np.any(g > 0):
        raise ValueError("degenerate input: growth law vanishes on the grid")
    c = float(np.dot(N, g) / np.dot(g, g))
    fitted = c * g
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(fitted > 0, np.abs(N - fitted) / fitted, np.inf)
    return c, float(np.max(rel))


def loglog_slope(pairs: Sequence[tuple[float, float]]) -> float:
    T = np.log([float(t) for t, _ in pairs])
    N = np.log([float(n) for _, n in pairs])
    return float(np.polyfit(T, N, 1)[0])


@dataclass
class CountReport:
    model: str
    m: object
    S: list
    T: list
    N: list
    a_bar: str
    b: int
    c_bar: float
    predicted_constant: float
    fitted_constant: float | None
    rel_err: float | None
    slope: float | None
    max_residual: float | None
    wall: list = field(default_factory=list)

    def predicted(self) -> list[float]:
        a = _frac_float(self.a_bar)
        return [self.predicted_constant * float(x) for x in _law(np.array(self.T, float), a, self.b)]

    def fitted(self) -> list[float | None]:
        if self.fitted_constant is None:
            return [None] * len(self.T)
        a = _frac_float(self.a_bar)
        return [self.fitted_constant * float(x) for x in _law(np.array(self.T, float), a, self.b)]

    def to_dict(self, timings: bool = False) -> dict:
        d = {
            "model": self.model,
            "m": "infinity" if self.m == INF else self.m,
            "S": self.S,
            "a": self.a_bar,
            "b": self.b,
            "c_bar": self.c_bar,
            "predicted_constant": self.predicted_constant,
            "fitted_constant": self.fitted_constant,
            "rel_err": self.rel_err,
            "slope": self.slope,
            "max_residual": self.max_residual,
            "rows": [
                {"T": t, "N": n, "predicted": p, "fitted": f, "rel_err": abs(n - p) / p}
                for t, n, p, f in zip(self.T, self.N, self.predicted(), self.fitted())
            ],
        }
        if timings:
            d["wall_seconds"] = self.wall
        return d

    def to_json(self, timings: bool = False, **kw) -> str:
        return json.dumps(self.to_dict(timings), **kw)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["T", "N", "predicted", "fitted", "rel_err"])
        for row in self.to_dict()["rows"]:
            w.writerow([row["T"], row["N"]] + ["" if row[k] is None else f"{row[k]:.12g}" for k in ("predicted", "fitted", "rel_err")])
        return buf.getvalue()


def _frac_float(s: str) -> float:
    num, _, den = s.partition("/")
    return int(num) / int(den or 1)


def verify_asymptotic(
    model: OrbifoldModel,
    grid: Sequence = DEFAULT_GRID,
    S: Iterable = (),
    P_max: int = 10**5,
    workers: int = 1,
    brute: bool = False,
) -> CountReport:
    """Count on the grid, fit the constant, and compare with the predicted Tauberian constant.

    The fit needs at least three grid points; with fewer, the fitted fields are None.
    """
    Sf = finite_places(S)
    inv = predict_invariants(model, Sf)
    const = leading_constant(model, Sf, P_max, workers=workers)
    b = const.b
    counts, wall = [], []
    if brute:
        t0 = time.perf_counter()
        counts = brute_force_counts(model, grid, Sf)
        wall = [time.perf_counter() - t0] * len(grid)
    for T in grid if not brute else ():
        t0 = time.perf_counter()
        counts.append(count_fast(model, T, Sf, workers=workers))
        wall.append(time.perf_counter() - t0)
    pairs = list(zip(grid, counts))
    c_hat = resid = slope = rel = None
    if len(pairs) >= 3:
        c_hat, resid = fit_leading_constant(pairs, inv.a_bar, b)
        slope = loglog_slope(pairs)
        rel = abs(c_hat - const.tauberian) / const.tauberian
    a = inv.a_bar
    return CountReport(
        model=model.name,
        m=model.single_divisor().m,
        S=["inf"] + sorted(Sf),
        T=list(grid),
        N=counts,
        a_bar=str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}",
        b=b,
        c_bar=const.c_bar,
        predicted_constant=const.tauberian,
        fitted_constant=c_hat,
        rel_err=rel,
        slope=slope,
        max_residual=resid,
        wall=wall,
    )
