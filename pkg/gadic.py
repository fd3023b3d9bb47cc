"""Sidon sets from g-adic truncations a_{i,l} = floor(g^l * theta_i).

With q = g^l the truncations are the all-lower digit choice of the lattice
construction at m = 1, so the set is certified once g^l > 4 / epsilon_{2,n}
(2h / epsilon_{h,n} for the general-h extension).
"""
import logging
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

from construct import digit_candidates, floor_multiple, sign_of
from epsilon import compute_epsilon
from errors import DuplicatePointError, ValidationError
from model import SINGLETON_BASIS, ConstructionCertificate, ConstructionParams, EpsilonBound, GadicParams, LatticeSet
from realnum import RealExpr, ThetaSystem
from verify import is_bh_set

logger = logging.getLogger(__name__)


class GadicDigits(NamedTuple):
    truncation: int
    integer_digits: Tuple[int, ...]
    fraction_digits: Tuple[int, ...]


def _check_positive(theta: RealExpr, precision_max=None):
    if sign_of(theta, precision_max=precision_max) <= 0:
        raise ValidationError(f"theta must be positive, got {theta.render()}")


def gadic_truncation(theta: RealExpr, g: int, level: int, precision_max=None) -> int:
    params = GadicParams(g, level)
    _check_positive(theta, precision_max)
    a, _ = floor_multiple(theta, params.q, precision_max=precision_max)
    return a


def _base_digits(value: int, g: int) -> List[int]:
    digits = []
    while value:
        value, r = divmod(value, g)
        digits.append(r)
    return digits[::-1] or [0]


def gadic_digits(theta: RealExpr, g: int, level: int, precision_max=None) -> GadicDigits:
    """Base-g digits of floor(g^l * theta): the integer part and the first l fractional digits."""
    a = gadic_truncation(theta, g, level, precision_max)
    q = g ** level
    integer_part, frac = divmod(a, q)
    fraction = _base_digits(frac, g) if frac else []
    # left-pad so the fraction has exactly l digits
    fraction = [0] * (level - len(fraction)) + fraction
    return GadicDigits(a, tuple(_base_digits(integer_part, g)), tuple(fraction))


def _check_system(system: ThetaSystem, precision_max=None):
    if system.d != 1:
        raise ValidationError(f"g-adic sets need scalar thetas (d = 1), got d = {system.d}")
    for v in system.vectors:
        _check_positive(v[0], precision_max)


def level_threshold(eps: EpsilonBound, h: int = 2) -> Fraction:
    return Fraction(2 * h) / eps.lo


def min_level(system: ThetaSystem, g: int, h: int = 2, eps: Optional[EpsilonBound] = None,
              precision_max=None) -> int:
    """Smallest l with g^l > 2h / eps.lo; 1 for a single theta."""
    GadicParams(g, 1)
    _check_system(system, precision_max)
    if system.n == 1:
        return 1
    if eps is None:
        eps = compute_epsilon(system, h, precision_max=precision_max)
    threshold = level_threshold(eps, h)
    level, q = 1, g
    while q <= threshold:
        level += 1
        q *= g
    logger.info(f"min level for g={g}: {level} (g^l = {q})")
    return level


def gadic_sidon_set(system: ThetaSystem, g: int, level: int, h: int = 2, eps: Optional[EpsilonBound] = None,
                    precision_max=None) -> Tuple[LatticeSet, ConstructionCertificate]:
    """The truncation set at level l and its certificate.

    Below the certified level, or for a system not claimed Q-independent, the
    set is still returned with an invalid certificate. h other than 2 is
    labelled as the extension basis.
    """
    params = GadicParams(g, level)
    _check_system(system, precision_max)
    if not isinstance(h, int) or h < 2:
        raise ValidationError(f"h must be an integer >= 2, got {h!r}")
    q = params.q
    floors = [floor_multiple(v[0], q, precision_max=precision_max) for v in system.vectors]
    points = tuple((a,) for a, _ in floors)
    seen = {}
    for idx, p in enumerate(points):
        if p in seen:
            raise DuplicatePointError(p, seen[p], idx)
        seen[p] = idx

    claimed = system.independence_claim
    cparams = ConstructionParams(h=h, m=1, q=q, q_checked=True)
    if system.n == 1:
        cert = ConstructionCertificate(eps_bound=None, params=cparams, separation_lower_bound=None,
                                       basis=SINGLETON_BASIS, independence_claimed=claimed)
    else:
        if eps is None:
            eps = compute_epsilon(system, h, precision_max=precision_max)
        # same margin as the lattice construction with m = 1
        separation = q * eps.lo - 2 * h
        basis = "g-adic-truncation" if h == 2 else "g-adic-extension"
        cert = ConstructionCertificate(eps_bound=eps, params=cparams, separation_lower_bound=separation,
                                       basis=basis, independence_claimed=claimed)
    if not claimed:
        logger.warning("theta system is not claimed Q-independent; set returned uncertified")
    elif not cert.certified:
        logger.warning(f"level {level} is below the certified level for g={g}; set returned uncertified")

    # a non-integer g^l*theta has the truncation as its lower digit candidate
    if all(not exact for _, exact in floors):
        candidates = digit_candidates(system, q, 1, precision_max=precision_max)
        for i, (a, _) in enumerate(floors):
            if candidates.values[i][0][0] != a:
                raise ValidationError(f"truncation {a} is not the lower digit candidate {candidates.values[i][0][0]}")
    else:
        logger.info("some g^l*theta is an exact integer; the truncation set differs from the lower digit choice")
    lattice = LatticeSet(points=points, params=cparams, choice_code=(0,) * system.n)
    return lattice, cert


def scan_levels(system: ThetaSystem, g: int, levels: Sequence[int], h: int = 2,
                eps: Optional[EpsilonBound] = None, precision_max=None) -> List[dict]:
    """Truncation set, certification and measured B_h status for each level; certifies nothing new."""
    if eps is None and system.n > 1:
        eps = compute_epsilon(system, h, precision_max=precision_max)
    rows = []
    for level in levels:
        row = {"level": level, "q": g ** level}
        try:
            lattice, cert = gadic_sidon_set(system, g, level, h=h, eps=eps, precision_max=precision_max)
        except DuplicatePointError as e:
            # colliding truncations: no set at this level
            row.update(points=None, certified=False, is_bh=False, duplicate=list(e.point))
            rows.append(row)
            continue
        # measured independently of the certificate
        ok, _ = is_bh_set(lattice.points, h)
        row.update(points=lattice.scalars(), certified=cert.certified, is_bh=ok)
        rows.append(row)
    logger.info(f"Scanned {len(rows)} levels for g={g}")
    return rows
