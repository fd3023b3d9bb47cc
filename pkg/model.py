from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Tuple

from errors import ValidationError

Point = Tuple[int, ...]


@dataclass(frozen=True)
class MultiIndex:
    """An element x of X_{h,n}: n nonnegative integers summing to h."""
    coords: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coords', tuple(int(c) for c in self.coords))
        if not self.coords:
            raise ValidationError("MultiIndex needs at least one coordinate")
        if any(c < 0 for c in self.coords):
            raise ValidationError(f"MultiIndex coordinates must be nonnegative: {self.coords}")

    @property
    def h(self) -> int:
        return sum(self.coords)

    @property
    def n(self) -> int:
        return len(self.coords)

    def support(self) -> List[int]:
        return [i for i, c in enumerate(self.coords) if c]

    def as_multiset(self, elements):
        """The h-multiset of `elements` this index selects, in element order."""
        out = []
        for c, a in zip(self.coords, elements):
            out.extend([a] * c)
        return out

    def __repr__(self):
        return f"<MultiIndex(coords={self.coords})>"


@dataclass(frozen=True)
class DifferenceVector:
    """Canonical x - y for x != y in X_{h,n}; the first nonzero coordinate is positive."""
    coords: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coords', tuple(int(c) for c in self.coords))
        if sum(self.coords) != 0:
            raise ValidationError(f"Difference vector must sum to 0: {self.coords}")
        nonzero = [c for c in self.coords if c]
        if not nonzero:
            raise ValidationError("Difference vector must be nonzero")
        if nonzero[0] < 0:
            raise ValidationError(f"Difference vector is not canonical (first nonzero negative): {self.coords}")

    @classmethod
    def from_pair(cls, x, y):
        xs = x.coords if isinstance(x, MultiIndex) else tuple(x)
        ys = y.coords if isinstance(y, MultiIndex) else tuple(y)
        if len(xs) != len(ys):
            raise ValidationError(f"Length mismatch: {len(xs)} vs {len(ys)}")
        return cls(canonical_sign(tuple(a - b for a, b in zip(xs, ys))))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def l1_norm(self) -> int:
        return sum(abs(c) for c in self.coords)

    @property
    def positive_part(self) -> int:
        return sum(c for c in self.coords if c > 0)

    def realization(self, h: int) -> Tuple[MultiIndex, MultiIndex]:
        """One (x, y) in X_{h,n} with x - y = self: the positive and negative parts padded on the first coordinate."""
        p = self.positive_part
        if p > h:
            raise ValidationError(f"{self.coords} is not a difference of elements of X_{{{h},{self.n}}}")
        pos = [max(c, 0) for c in self.coords]
        neg = [max(-c, 0) for c in self.coords]
        pos[0] += h - p
        neg[0] += h - p
        return MultiIndex(tuple(pos)), MultiIndex(tuple(neg))

    def __repr__(self):
        return f"<DifferenceVector(coords={self.coords})>"


def canonical_sign(coords):
    for c in coords:
        if c > 0:
            return tuple(coords)
        if c < 0:
            return tuple(-v for v in coords)
    return tuple(coords)


@dataclass(frozen=True)
class EpsilonBound:
    """Rigorous enclosure [lo, hi] of the separation constant epsilon_{h,n}."""
    lo: Fraction
    hi: Fraction
    argmin: DifferenceVector
    h: int
    n: int
    precision_bits_used: int
    tied: Tuple[DifferenceVector, ...] = ()
    theta_norm_hi: Optional[Fraction] = None

    def __post_init__(self):
        if not self.lo > 0:
            raise ValidationError(f"epsilon lower bound must be positive, got {self.lo}")
        if self.lo > self.hi:
            raise ValidationError(f"epsilon enclosure inverted: lo={self.lo} > hi={self.hi}")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __repr__(self):
        return f"<EpsilonBound(h={self.h}, n={self.n}, lo~{float(self.lo):.12g}, argmin={self.argmin.coords}, bits={self.precision_bits_used})>"


@dataclass(frozen=True)
class ConstructionParams:
    h: int
    m: int
    q: int
    positivity_mode: bool = False
    # q > 2hm / eps.lo was checked
    q_checked: bool = False

    def __post_init__(self):
        if self.h < 2:
            raise ValidationError(f"h must be >= 2, got {self.h}")
        if self.m < 1:
            raise ValidationError(f"m must be >= 1, got {self.m}")
        if self.q < 1:
            raise ValidationError(f"q must be >= 1, got {self.q}")

    def to_dict(self):
        return {"h": self.h, "m": self.m, "q": self.q,
                "positivity_mode": self.positivity_mode, "q_checked": self.q_checked}


@dataclass(frozen=True)
class DigitCandidates:
    """The 2m integers a with 0 < |a - q*theta_{i,j}| <= m, per (i, j), ascending."""
    q: int
    m: int
    values: Tuple[Tuple[Tuple[int, ...], ...], ...]
    # theta_{i,j} >= 0 proven
    nonnegative: Tuple[Tuple[bool, ...], ...]
    theta_norm_hi: Fraction

    def __post_init__(self):
        for row in self.values:
            for cands in row:
                if len(cands) != 2 * self.m:
                    raise ValidationError(f"expected {2 * self.m} candidates, got {len(cands)}")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def d(self) -> int:
        return len(self.values[0]) if self.values else 0

    @property
    def family_size(self) -> int:
        return (2 * self.m) ** (self.d * self.n)

    def nearest_below_code(self) -> Tuple[int, ...]:
        return tuple([self.m - 1] * (self.d * self.n))


@dataclass(frozen=True)
class LatticeSet:
    """A constructed set A_{h,n}(q,m) of n distinct points in Z^d."""
    points: Tuple[Point, ...]
    params: ConstructionParams
    choice_code: Tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.points[0]) if self.points else 0

    def scalars(self):
        """Points as plain integers when d = 1."""
        if self.d != 1:
            raise ValidationError(f"scalars() needs d = 1, set has d = {self.d}")
        return [p[0] for p in self.points]

    def to_dict(self):
        return {"points": [list(p) for p in self.points],
                "choice_code": render_choice_code(self.choice_code, self.params.m)}

    def __repr__(self):
        return f"<LatticeSet(points={[list(p) for p in self.points]}, q={self.params.q}, m={self.params.m})>"


def render_choice_code(code, m):
    base = 2 * m
    if base <= 36:
        return ''.join("0123456789abcdefghijklmnopqrstuvwxyz"[c] for c in code)
    return '.'.join(str(c) for c in code)


SINGLETON_BASIS = "singleton"


@dataclass(frozen=True)
class ConstructionCertificate:
    # None for a one-point set, which is B_h without any epsilon
    eps_bound: Optional[EpsilonBound]
    params: ConstructionParams
    separation_lower_bound: Optional[Fraction]
    # which argument certifies the set: "lattice-construction", "g-adic-truncation", "g-adic-extension" or "singleton"
    basis: str = "lattice-construction"
    # the caller asserted Q-independence of the thetas
    independence_claimed: bool = True

    @property
    def certified(self) -> bool:
        if not self.independence_claimed:
            return False
        if self.basis == SINGLETON_BASIS:
            return True
        return self.separation_lower_bound is not None and self.separation_lower_bound > 0

    def to_dict(self):
        from realnum import render_decimal
        separation = self.separation_lower_bound
        return {
            "params": self.params.to_dict(),
            "separation_lower_bound": None if separation is None else render_decimal(separation, rounding="floor"),
            "certified": self.certified,
            "basis": self.basis,
            "independence_claimed": self.independence_claimed,
        }


@dataclass
class VerificationReport:
    h: int
    set_size: int
    sumset_size: int
    expected_max: int
    is_bh: bool
    max_representation_count: int
    collisions: List[Tuple[object, List[MultiIndex]]] = field(default_factory=list)
    counts: Dict[object, int] = field(default_factory=dict, repr=False)

    def check_invariants(self):
        assert self.expected_max == comb(self.set_size + self.h - 1, self.h)
        assert sum(self.counts.values()) == self.expected_max
        assert self.is_bh == (self.sumset_size == self.expected_max) == (self.max_representation_count <= 1)

    def to_dict(self, elements=None, limit=20):
        out = {
            "h": self.h,
            "set_size": self.set_size,
            "sumset_size": self.sumset_size,
            "expected_max": self.expected_max,
            "is_bh": self.is_bh,
            "max_representation_count": self.max_representation_count,
            "collision_count": len(self.collisions),
        }
        shown = []
        for s, reps in self.collisions[:limit]:
            entry = {"sum": list(s) if isinstance(s, tuple) else s,
                     "multi_indices": [list(x.coords) for x in reps]}
            if elements is not None:
                entry["multisets"] = [x.as_multiset(elements) for x in reps]
            shown.append(entry)
        out["collisions"] = shown
        return out


@dataclass(frozen=True)
class GadicParams:
    g: int
    level: int

    def __post_init__(self):
        if self.g < 2:
            raise ValidationError(f"g must be >= 2, got {self.g}")
        if self.level < 1:
            raise ValidationError(f"level must be >= 1, got {self.level}")

    @property
    def q(self) -> int:
        return self.g ** self.level
