"""Campana orbifold models, the Campana point predicate and the log-Manin invariants."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable

from .arith import INF, PrimitivePoint, as_rational, factorize, finite_places, padic_valuation

__all__ = [
    "BoundaryDivisor",
    "OrbifoldModel",
    "Invariants",
    "MODEL_NAMES",
    "build_model",
    "intersection_multiplicity",
    "is_campana",
    "predict_invariants",
]


def weight_from_m(m) -> Fraction | int:
    if m == INF:
        return 1
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer or INF")
    return 1 - Fraction(1, m)


def parse_m(value) -> float | int:
    """Accept 1, 2, ..., 'inf'/'infinity' and return an int or INF."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "oo", "∞"):
            return INF
        value = int(value)
    if value == INF:
        return INF
    if int(value) != value or value < 1:
        raise ValueError(f"invalid multiplicity {value!r}")
    return int(value)


@dataclass(frozen=True)
class BoundaryDivisor:
    id: str
    kappa: int
    lam: Fraction
    epsilon: Fraction
    m: float | int
    coordinate: int = 0  # D = {x_coordinate = 0}

    def __post_init__(self):
        object.__setattr__(self, "lam", as_rational(self.lam))
        object.__setattr__(self, "epsilon", as_rational(self.epsilon))
        if self.kappa < 2:
            raise ValueError(f"kappa must be >= 2, got {self.kappa}")
        eps = self.epsilon
        if eps == 1:
            if self.m != INF:
                raise ValueError("epsilon = 1 requires m = INF")
        else:
            if self.m == INF or Fraction(1) / (1 - eps) != self.m:
                raise ValueError(f"epsilon {eps} and m {self.m} disagree")

    @property
    def klt(self) -> bool:
        return self.epsilon < 1


def _coordinate_stratum_count(model: "OrbifoldModel", p: int, B: frozenset[str]) -> int:
    """#{x in P^n(F_p): x_i = 0 exactly for the divisors in B} for coordinate hyperplanes."""
    n = model.ambient_dim
    zero = {d.coordinate for d in model.divisors if d.id in B}
    nonzero = {d.coordinate for d in model.divisors if d.id not in B}
    k, w = len(zero), len(nonzero)
    if zero & nonzero:
        return 0
    affine = (p - 1) ** w * p ** (n + 1 - k - w)
    if w == 0:
        affine -= 1
    return affine // (p - 1)


def _coordinate_multiplicity(model: "OrbifoldModel", P: PrimitivePoint, alpha: str, p: int) -> int:
    div = model.divisor(alpha)
    x = P[div.coordinate]
    if x == 0:
        raise ValueError(f"point lies in boundary: {P} is on {alpha}")
    return padic_valuation(x, p)


@dataclass(frozen=True)
class OrbifoldModel:
    """A compactification X of G with weighted coordinate-hyperplane boundary.

    ``stratum_enumerator(model, p, B)`` gives #D°_{p,B}(F_p) and
    ``multiplicity_rule(model, P, alpha, p)`` gives n_p(D_alpha, P).
    ``character_coords`` lists the projective coordinates carrying the
    linear forms used by the twisted local integrals.
    """

    name: str
    ambient_dim: int
    divisors: tuple[BoundaryDivisor, ...]
    bad_primes: frozenset[int] = frozenset()
    stratum_enumerator: Callable = field(default=_coordinate_stratum_count, repr=False)
    multiplicity_rule: Callable = field(default=_coordinate_multiplicity, repr=False)
    character_coords: tuple[int, ...] = ()

    def divisor(self, alpha: str) -> BoundaryDivisor:
        for d in self.divisors:
            if d.id == alpha:
                return d
        raise KeyError(alpha)

    @property
    def divisor_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.divisors)

    def stratum_count(self, p: int, B: Iterable[str]) -> int:
        return self.stratum_enumerator(self, p, frozenset(B))

    def multiplicity(self, P: PrimitivePoint, alpha: str, p: int) -> int:
        return self.multiplicity_rule(self, P, alpha, p)

    def point_count(self, p: int) -> int:
        n = self.ambient_dim
        return (p ** (n + 1) - 1) // (p - 1)

    def with_weights(self, m=None, lam=None) -> "OrbifoldModel":
        """Same geometry with every divisor given multiplicity m and/or L-coefficient lam."""
        divs = []
        for d in self.divisors:
            new_m = d.m if m is None else parse_m(m)
            divs.append(
                replace(
                    d,
                    m=new_m,
                    epsilon=weight_from_m(new_m),
                    lam=d.lam if lam is None else as_rational(lam),
                )
            )
        return replace(self, divisors=tuple(divs))

    @property
    def m(self):
        ms = {d.m for d in self.divisors}
        if len(ms) != 1:
            raise ValueError("divisors carry different multiplicities")
        return ms.pop()

    @property
    def lam(self) -> Fraction:
        ls = {d.lam for d in self.divisors}
        if len(ls) != 1:
            raise ValueError("divisors carry different L-coefficients")
        return ls.pop()

    def single_divisor(self) -> BoundaryDivisor:
        if len(self.divisors) != 1:
            raise ValueError(f"{self.name}: operation implemented for single-divisor models only")
        return self.divisors[0]


# Built-in models.  All three are coordinate-hyperplane compactifications with
# good reduction at every finite prime.

_BUILTIN = {
    # X = P^3 with G embedded as [1:x:y:z]; D = {a = 0}; -K = 4H.
    "p3-heisenberg": dict(ambient_dim=3, kappa=4, character_coords=(1, 2)),
    # Y = closure of U = {g(0,z,y)} = {b = 0} in P^3, coordinates [a:c:d]; -K_Y = 3 D^Y.
    "p2-unipotent": dict(ambient_dim=2, kappa=3, character_coords=(2,)),
    # P^1 with G_a embedded as [1:x]; -K = 2 D.
    "p1-vector": dict(ambient_dim=1, kappa=2, character_coords=(1,)),
}

MODEL_NAMES = tuple(_BUILTIN)

# Pole order of a linear form along the hyperplane at infinity.
LINEAR_FORM_POLE_ORDER = 1


def build_model(name: str, m=1, lam=1) -> OrbifoldModel:
    key = name.strip().lower().replace("_", "-")
    if key not in _BUILTIN:
        raise ValueError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
    entry = _BUILTIN[key]
    m = parse_m(m)
    div = BoundaryDivisor(
        id="D",
        kappa=entry["kappa"],
        lam=as_rational(lam),
        epsilon=weight_from_m(m),
        m=m,
        coordinate=0,
    )
    return OrbifoldModel(
        name=key,
        ambient_dim=entry["ambient_dim"],
        divisors=(div,),
        character_coords=entry["character_coords"],
    )


def intersection_multiplicity(model: OrbifoldModel, P: PrimitivePoint, alpha: str, p: int) -> int:
    if p in model.bad_primes:
        raise ValueError(f"p = {p} is a bad prime for {model.name}")
    return model.multiplicity(P, alpha, p)


def is_campana(model: OrbifoldModel, P: PrimitivePoint, S: Iterable = ()) -> bool:
    """Campana O_S-point test: n_p is 0 or >= m_alpha (0 when epsilon_alpha = 1) for p outside S."""
    S = finite_places(S)
    for div in model.divisors:
        if div.epsilon == 0:
            continue
        x = P[div.coordinate]
        if x == 0:
            raise ValueError(f"point lies in boundary: {P} is on {div.id}")
        for p in factorize(x):
            if p in S:
                continue
            n = intersection_multiplicity(model, P, div.id, p)
            if n > 0 and (div.m == INF or n < div.m):
                return False
    return True


@dataclass(frozen=True)
class Invariants:
    a_bar: Fraction
    b_bar: int
    b_prime: int | None
    A_eps: frozenset[str]

    def as_dict(self) -> dict:
        out = {"a": self.a_bar, "b": self.b_bar}
        if self.b_prime is not None:
            out["b_prime"] = self.b_prime
        return out


def predict_invariants(model: OrbifoldModel, S: Iterable = ()) -> Invariants:
    if any(d.lam <= 0 for d in model.divisors):
        raise ValueError("L not in effective-cone interior: some lambda <= 0")
    ratios = {d.id: (d.kappa - d.epsilon) / d.lam for d in model.divisors}
    a_bar = max(ratios.values())
    A_eps = frozenset(k for k, r in ratios.items() if r == a_bar)

    b_prime = None
    nklt = [d for d in model.divisors if not d.klt]
    anticanonical = all(d.lam == d.kappa - d.epsilon for d in model.divisors)
    if nklt and anticanonical:
        n_places = 1 + len(finite_places(S))  # the real place is always in S
        # Coordinate hyperplanes: any <= n of them meet in a rational point.
        per_place = min(len(nklt), model.ambient_dim)
        klt_count = sum(1 for d in model.divisors if d.klt)
        b_prime = klt_count + n_places * per_place
    return Invariants(a_bar=a_bar, b_bar=len(A_eps), b_prime=b_prime, A_eps=A_eps)
