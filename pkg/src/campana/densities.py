"""Local height integrals, their brute-force oracles, Euler products and the leading constant.

Good-reduction local factors are rational functions of the formal variable
t = p^-(s_alpha - kappa + 1), so closed forms and oracles can be compared
coefficient by coefficient in exact arithmetic.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .arith import (
    INF,
    as_rational,
    finite_places,
    is_prime,
    padic_valuation,
    primes_up_to,
    primitive_rep,
    residue_mod,
)
from .localfactor import LocalFactor, frac_str
from .orbifold import (
    LINEAR_FORM_POLE_ORDER,
    OrbifoldModel,
    is_campana,
    predict_invariants,
)


def _weighted(model: OrbifoldModel, m) -> OrbifoldModel:
    return model if m is None else model.with_weights(m=m)


def _check_good(model: OrbifoldModel, p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p in model.bad_primes:
        raise ValueError(f"p = {p} is a bad prime for {model.name}; no closed form available")


def projective_points(n: int, p: int) -> Iterable[tuple[int, ...]]:
    """Canonical representatives of P^n(F_p): first nonzero coordinate equal to 1."""
    for lead in range(n + 1):
        for tail in itertools.product(range(p), repeat=n - lead):
            yield (0,) * lead + (1,) + tail


# --------------------------------------------------------------------------
# Strata and the untwisted local factor


def stratum_counts(model: OrbifoldModel, p: int) -> dict[frozenset[str], int]:
    """Brute-force #D°_{p,B}(F_p) for every B, by classifying all points of X(F_p)."""
    _check_good(model, p)
    counts: dict[frozenset[str], int] = {}
    for x in projective_points(model.ambient_dim, p):
        B = frozenset(d.id for d in model.divisors if x[d.coordinate] == 0)
        counts[B] = counts.get(B, 0) + 1
    return counts


def local_density_closed(model: OrbifoldModel, p: int, m=None, counts=None) -> LocalFactor:
    """Good-reduction local factor Z_{0,eps,p} as a rational function of t.

    Sum over strata B of #D°_B(F_p) / p^(n - #B) times, per divisor in B,
    (1 - 1/p) t^m / (1 - t); the boundary term vanishes when epsilon = 1.
    ``counts`` defaults to the model's stratum enumerator.
    """
    model = _weighted(model, m)
    _check_good(model, p)
    div = model.single_divisor()
    n = model.ambient_dim
    shift = div.kappa - 1
    if counts is None:
        c_open = model.stratum_count(p, ())
        c_bdry = model.stratum_count(p, {div.id})
    else:
        c_open = counts.get(frozenset(), 0)
        c_bdry = counts.get(frozenset({div.id}), 0)
    open_term = Fraction(c_open, p**n)
    if div.m == INF:
        return LocalFactor.constant(open_term, p, shift)
    coeff = Fraction(c_bdry, p ** (n - 1)) * (1 - Fraction(1, p))
    mm = int(div.m)
    # open_term + coeff t^m / (1 - t)
    num = [open_term, -open_term] + [Fraction(0)] * max(mm - 1, 0)
    num = num + [Fraction(0)] * (mm + 1 - len(num))
    num[mm] += coeff
    return LocalFactor(tuple(num), (Fraction(1), Fraction(-1)), p, shift)


def _admissible(model: OrbifoldModel, p: int, k: int) -> bool:
    """Whether a point with n_p(D) = k (and no other bad primes) is a Campana point."""
    div = model.single_divisor()
    coords = [0] * (model.ambient_dim + 1)
    coords[div.coordinate] = p**k
    coords[(div.coordinate + 1) % len(coords)] = 1
    return is_campana(model, primitive_rep(coords), ())


def local_density_oracle(model: OrbifoldModel, p: int, m=None, N: int = 12) -> list[Fraction]:
    """Coefficients 0..N of the local factor, from p-adic volumes counted on residues.

    For each k, the ball p^-k Z_p^n is cut into residue classes u mod p; the
    point [p^k : u] is reduced to its primitive representative and the model's
    own multiplicity rule and Campana predicate decide whether the class lies
    in {n_p = k} and counts.  n_p is constant on every class where it can equal
    k (the classes with u not divisible by p), so one representative per class
    is exact.  Coefficient of t^k = vol_dg{n_p = k, admissible} * p^(-k(kappa-1)).
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    model = _weighted(model, m)
    _check_good(model, p)
    div = model.single_divisor()
    n = model.ambient_dim
    others = [i for i in range(n + 1) if i != div.coordinate]
    out = []
    for k in range(N + 1):
        hits = 0
        for u in itertools.product(range(p), repeat=n):
            coords = [0] * (n + 1)
            coords[div.coordinate] = p**k
            for i, val in zip(others, u):
                coords[i] = val
            P = primitive_rep(coords)
            if model.multiplicity(P, div.id, p) != k:
                continue
            if is_campana(model, P, ()):
                hits += 1
        vol = Fraction(p ** (n * k) * hits, p**n)
        out.append(vol / p ** (k * (div.kappa - 1)))
    return out


def regularized_local_factor(model: OrbifoldModel, p: int, m=None, reduce: bool = True) -> LocalFactor:
    """Local factor times zeta_p(m(s - kappa + 1))^-1 = (1 - t^m); unchanged when epsilon = 1.

    With ``reduce`` the common factor (1 - t) is cancelled, leaving a polynomial
    for the built-in models.
    """
    model = _weighted(model, m)
    z = local_density_closed(model, p)
    div = model.single_divisor()
    if div.m == INF:
        return z
    mm = int(div.m)
    reg = LocalFactor(tuple([Fraction(1)] + [Fraction(0)] * (mm - 1) + [Fraction(-1)]), (Fraction(1),), p, z.shift)
    prod = z * reg
    return prod.reduced() if reduce else prod


# --------------------------------------------------------------------------
# Euler products


@dataclass
class DensityReport:
    model: str
    m: object
    s: float
    prime_bound: int
    value: float
    tail_bound: float
    factors: list[tuple[int, float]] = field(default_factory=list)
    decay_exponent: float = math.inf
    tail_constant: float = 0.0

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "m": "infinity" if self.m == INF else self.m,
            "s": self.s,
            "prime_bound": self.prime_bound,
            "value": self.value,
            "tail_bound": self.tail_bound,
            "factors": [[p, v] for p, v in self.factors],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _reduced_variable(model: OrbifoldModel, s: float) -> float:
    """s_alpha - kappa + 1 along s L."""
    div = model.single_divisor()
    return s * float(div.lam) - div.kappa + 1


def decay_exponent(model: OrbifoldModel, s: float, m=None) -> float:
    """delta with regularized factor - 1 = O(p^-delta) at s.

    The p-order of each Taylor coefficient is read off from two large primes
    (coefficients are Laurent polynomials in p, so the ratio pins the degree).
    """
    model = _weighted(model, m)
    if model.single_divisor().m == INF:
        return math.inf
    sig = _reduced_variable(model, s)
    p1, p2 = 10007, 100003
    c1 = regularized_local_factor(model, p1).series(12)
    c2 = regularized_local_factor(model, p2).series(12)
    best = math.inf
    for j in range(1, 13):
        if c1[j] == 0 and c2[j] == 0:
            continue
        e = round(math.log(abs(c2[j]) / abs(c1[j])) / math.log(p2 / p1))
        best = min(best, j * sig - e)
    return best


def _log_factor(args) -> tuple[int, float]:
    model, p, sig = args
    f = regularized_local_factor(model, p, reduce=False)
    return p, math.log1p(f.minus_one(float(p) ** -sig))


def euler_product(model: OrbifoldModel, s: float, P_max: int, m=None, S: Iterable = (), workers: int = 1) -> DensityReport:
    """prod_{p <= P_max, p not in S} of the regularized factor at t_p = p^-(s lambda - kappa + 1)."""
    model = _weighted(model, m)
    div = model.single_divisor()
    sig = _reduced_variable(model, s)
    if sig <= 0:
        raise ValueError(f"divergent: s = {s} is not in the window s * lambda > kappa - 1")
    delta = decay_exponent(model, s)
    if delta <= 1:
        raise ValueError(f"divergent: regularized factors are only O(p^-{delta:.4g}) at s = {s}")
    S = finite_places(S)
    primes = [p for p in primes_up_to(P_max) if p not in S and p not in model.bad_primes]
    tasks = [(model, p, sig) for p in primes]
    if workers and workers > 1 and len(tasks) > 1000:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            logs = list(ex.map(_log_factor, tasks, chunksize=256))
    else:
        logs = [_log_factor(t) for t in tasks]
    # Serial, ordered reduction: identical output for any worker count.
    total = math.fsum(v for _, v in logs)

    tail, C = 0.0, 0.0
    if math.isfinite(delta) and primes:
        decade = [(p, v) for p, v in logs if p > P_max / 10] or logs
        C = max(abs(v) * p**delta for p, v in decade)
        if P_max >= 3:
            # sum_{p > P} p^-delta <= 1.25506 P^(1-delta) / ((delta-1) log P)
            tail = C * 1.25506 * P_max ** (1 - delta) / ((delta - 1) * math.log(P_max))
    return DensityReport(
        model=model.name,
        m=div.m,
        s=s,
        prime_bound=P_max,
        value=math.exp(total),
        tail_bound=tail,
        factors=[(p, math.exp(v)) for p, v in logs],
        decay_exponent=delta,
        tail_constant=C,
    )


# --------------------------------------------------------------------------
# Archimedean factor


def archimedean_density(model: OrbifoldModel, sigma: float) -> float:
    """int_{G(R)} max(1, |x_1|, ..., |x_n|)^-sigma dx = 2^n sigma / (sigma - n)."""
    n = model.ambient_dim
    if sigma <= model.single_divisor().kappa - 1:
        raise ValueError(f"divergent archimedean integral: sigma = {sigma} <= {n}")
    return 2**n * sigma / (sigma - n)


def archimedean_quadrature(dim: int, sigma: float) -> tuple[float, float]:
    """Nested adaptive quadrature of the same integral, returning (value, abserr).

    Uses only the permutation/sign symmetry of the integrand: the domain is
    folded onto 0 <= x_1 <= ... <= x_n and split at x_n = 1.
    """
    if sigma <= dim:
        raise ValueError(f"divergent archimedean integral: sigma = {sigma} <= {dim}")

    def f(*xs):
        return max(1.0, xs[-1]) ** -sigma

    def inner(*outer):
        return (0.0, outer[0])

    total, err = 0.0, 0.0
    for lo, hi in ((0.0, 1.0), (1.0, math.inf)):
        val, e = integrate.nquad(f, [inner] * (dim - 1) + [(lo, hi)], opts={"limit": 200})
        total += val
        err += e
    sym = 2**dim * math.factorial(dim)
    return sym * total, sym * err


# --------------------------------------------------------------------------
# Leading constant


@dataclass
class ConstantReport:
    model: str
    m: object
    S: list
    prime_bound: int
    branch: str
    a_bar: Fraction
    b: int
    prefactor: float
    archimedean: float
    euler: float
    s_factors: float
    c_bar: float
    tail_bound: float
    tauberian: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["a_bar"] = frac_str(self.a_bar)
        d["m"] = "infinity" if self.m == INF else self.m
        return d


def leading_constant(model: OrbifoldModel, S: Iterable = (), P_max: int = 10**5, m=None, workers: int = 1) -> ConstantReport:
    """Residue c_bar of Z_0(sL) at s = a_bar and the Tauberian constant c_bar / (a_bar (b-1)!).

    klt: c_bar = prod 1/(m lambda) * Z_inf(a_bar lambda) * prod_{p not in S} regularized(a_bar)
         * prod_{p in S} (1 - 1/p) Z_p^untwisted(a_bar).
    dlt (epsilon = 1): the pole at a_bar = (kappa - 1)/lambda comes from the real place and the
    finite places of S; c_bar = 2^n a_bar prod_{p in S} (1 - p^-n) / (lambda log p).
    """
    model = _weighted(model, m)
    div = model.single_divisor()
    Sf = finite_places(S)
    inv = predict_invariants(model, Sf)
    lam = float(div.lam)
    n = model.ambient_dim
    a_bar = inv.a_bar

    if div.klt:
        sigma = float(a_bar) * lam
        arch = archimedean_density(model, sigma)
        prefactor = 1.0 / (float(div.m) * lam)
        rep = euler_product(model, float(a_bar), P_max, S=Sf, workers=workers)
        s_fac = 1.0
        untwisted = model.with_weights(m=1)
        for p in sorted(Sf):
            t = float(p) ** -_reduced_variable(model, float(a_bar))
            s_fac *= (1 - 1 / p) * local_density_closed(untwisted, p)(t)
        c_bar = prefactor * arch * rep.value * s_fac
        tail = math.expm1(rep.tail_bound)
        b, euler, branch = inv.b_bar, rep.value, "klt"
    else:
        b = 1 + len(Sf)
        prefactor = 1.0
        arch = 2**n * float(a_bar)  # residue of 2^n s lambda / (s lambda - n) at s = a_bar
        s_fac = 1.0
        for p in sorted(Sf):
            s_fac *= (1 - float(p) ** -n) / (lam * math.log(p))
        euler, tail, branch = 1.0, 0.0, "dlt"
        c_bar = arch * s_fac
    tauberian = c_bar / (float(a_bar) * math.factorial(b - 1))
    return ConstantReport(
        model=model.name,
        m=div.m,
        S=["inf"] + sorted(Sf),
        prime_bound=P_max,
        branch=branch,
        a_bar=a_bar,
        b=b,
        prefactor=prefactor,
        archimedean=arch,
        euler=euler,
        s_factors=s_fac,
        c_bar=c_bar,
        tail_bound=tail,
        tauberian=tauberian,
    )


# --------------------------------------------------------------------------
# Twisted local factors


def _character_valuation(model: OrbifoldModel, p: int, a: Sequence) -> tuple[list[Fraction], float]:
    a = [as_rational(x) for x in a]
    if len(a) != len(model.character_coords):
        raise ValueError(f"{model.name} expects {len(model.character_coords)} character coefficients")
    vals = [padic_valuation(x, p) for x in a if x != 0]
    if any(v < 0 for v in vals):
        raise ValueError("character coefficients must be p-adic integers (j_p(a) >= 0)")
    return a, (min(vals) if vals else math.inf)


def twisted_local_density(model: OrbifoldModel, p: int, a: Sequence, m=None) -> LocalFactor:
    """int_{G(Q_p)} H_p^-1 delta_eps psi_p(a . x) dx for a linear character of level j = j_p(a).

    On the ball p^-k Z_p^n the character integrates to p^(nk) when k <= j and to
    0 otherwise; shells are differences of balls.  For primitive a (j = 0) this
    is 1 - p^-n t when m = 1 and 1 when m >= 2.
    """
    model = _weighted(model, m)
    _check_good(model, p)
    a, j = _character_valuation(model, p, a)
    if j == math.inf:
        return local_density_closed(model, p)
    div = model.single_divisor()
    n = model.ambient_dim

    def ball(k):
        return p ** (n * k) if 0 <= k <= j else 0

    coeffs = []
    for k in range(j + 2):
        shell = ball(k) - (ball(k - 1) if k > 0 else 0)
        coef = Fraction(shell, p ** (k * (div.kappa - 1)))
        coeffs.append(coef if _admissible(model, p, k) else Fraction(0))
    return LocalFactor(tuple(coeffs), (Fraction(1),), p, div.kappa - 1)


def twisted_stratum_terms(model: OrbifoldModel, p: int, a: Sequence, m=None) -> dict:
    """Stratum-by-stratum assembly of the twisted factor for primitive a (j_p(a) = 0).

    Residue discs over D°(F_p) split into points off E(f_a) (generic) and on it.
    Off E the disc integral is -(1/p^n) t exactly when d = m = 1, else 0; on E
    only the first shell survives, with volume (p - 1) p^-n.  Counts of the two
    kinds of boundary points are enumerated over F_p.
    """
    model = _weighted(model, m)
    _check_good(model, p)
    a, j = _character_valuation(model, p, a)
    if j != 0:
        raise ValueError("stratum assembly implemented for primitive characters only")
    div = model.single_divisor()
    n = model.ambient_dim
    residues = [residue_mod(x, p, 1) for x in a]
    on_E = off_E = 0
    for x in projective_points(n, p):
        if x[div.coordinate] != 0:
            continue
        val = sum(r * x[c] for r, c in zip(residues, model.character_coords)) % p
        if val == 0:
            on_E += 1
        else:
            off_E += 1
    d = LINEAR_FORM_POLE_ORDER
    first = div.m == 1 and d == 1
    generic = Fraction(-1, p**n) if first else Fraction(0)
    special = Fraction(p - 1, p**n) if first else Fraction(0)
    return {
        "open": Fraction(1),
        "generic_value": generic,
        "special_value": special,
        "off_E": off_E,
        "on_E": on_E,
        "t_coefficient": off_E * generic + on_E * special,
    }


def _cyclotomic_value(counts: np.ndarray, p: int, k: int) -> int:
    """sum_j counts[j] zeta^j for a primitive p^k-th root of unity zeta, as an exact integer.

    Reduces modulo Phi_{p^k}(x) = sum_{i<p} x^(i p^(k-1)); the sum is rational iff
    every non-constant coefficient of the reduction vanishes.
    """
    if k == 0:
        return int(counts.sum())
    q = p ** (k - 1)
    blocks = counts.reshape(p, q).astype(object if counts.max() > 2**62 else np.int64)
    reduced = blocks[:-1] - blocks[-1]
    flat = reduced.reshape(-1)
    if np.any(flat[1:] != 0):
        raise ArithmeticError("character sum is not rational")
    return int(flat[0])


@lru_cache(maxsize=None)
def _linear_character_sum(a_res: int, p: int, k: int) -> int:
    """sum_{u mod p^k} exp(2 pi i a u / p^k), exactly."""
    pk = p**k
    if k == 0:
        return 1
    counts = np.bincount((a_res * np.arange(pk, dtype=np.int64)) % pk, minlength=pk)
    return _cyclotomic_value(counts, p, k)


def twisted_local_oracle(model: OrbifoldModel, p: int, a: Sequence, m=None, N: int = 8) -> list[Fraction]:
    """Coefficients 0..N of the twisted factor from exact residue character sums.

    Shell k is p^-k (Z_p^n minus p Z_p^n); its integral is the character sum
    over u mod p^k not all divisible by p, taken as (all u) - (u = p w).  Each full
    sum factors over coordinates into one-variable sums evaluated in Z[zeta_{p^k}].
    """
    model = _weighted(model, m)
    _check_good(model, p)
    a, _ = _character_valuation(model, p, a)
    div = model.single_divisor()
    n = model.ambient_dim
    free = n - len(a)
    out = []
    for k in range(N + 1):
        if k == 0:
            shell = 1
        else:
            res_k = [residue_mod(x, p, k) for x in a]
            res_k1 = [residue_mod(x, p, k - 1) if k > 1 else 0 for x in a]
            full = math.prod(_linear_character_sum(r, p, k) for r in res_k) * p ** (k * free)
            inner = math.prod(_linear_character_sum(r, p, k - 1) for r in res_k1) * p ** ((k - 1) * free)
            shell = full - inner
        coef = Fraction(shell, p ** (k * (div.kappa - 1)))
        out.append(coef if _admissible(model, p, k) else Fraction(0))
    return out


def twisted_unipotent_density(model: OrbifoldModel, p: int, a, m=None, N: int = 8) -> list[Fraction]:
    """int_{U(Q_p)} H_p^-1 psi_a(z) delta_eps du on the plane model, to depth N."""
    if model.name != "p2-unipotent":
        raise ValueError("twisted_unipotent_density is defined on the p2-unipotent model")
    return twisted_local_oracle(model, p, (a,), m=m, N=N)
