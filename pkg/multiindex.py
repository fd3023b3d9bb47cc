"""The multi-index set X_{h,n} and its difference vectors.

X_{h,n} is the set of weak compositions of h into n parts; it indexes the
h-multisets of an n-element set, so |hA| <= |X_{h,n}| = binom(n+h-1, h).
"""
import logging
import os
from math import comb, gcd
from typing import Iterator, List, Tuple

from errors import CapExceededError, DimensionTooSmallError, ValidationError
from model import DifferenceVector, MultiIndex

logger = logging.getLogger(__name__)

ENUMERATION_CAP = 10 ** 7
if 'SIDON_ENUMERATION_CAP' in os.environ:
    try:
        ENUMERATION_CAP = int(os.environ['SIDON_ENUMERATION_CAP'])
    except ValueError:
        pass


def _check_hn(h, n):
    if not isinstance(h, int) or h < 1:
        raise ValidationError(f"h must be a positive integer, got {h!r}")
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")


def count_multiindices(h: int, n: int) -> int:
    _check_hn(h, n)
    return comb(n + h - 1, h)


def iter_compositions(h: int, n: int, prefix: Tuple[int, ...] = ()) -> Iterator[Tuple[int, ...]]:
    """Weak compositions of h into n parts, lexicographically descending, each prefixed by `prefix`."""
    if n == 1:
        yield prefix + (h,)
        return
    for first in range(h, -1, -1):
        yield from iter_compositions(h - first, n - 1, prefix + (first,))


def enumerate_multiindices(h: int, n: int, cap: int = None) -> List[MultiIndex]:
    cap = ENUMERATION_CAP if cap is None else cap
    count = count_multiindices(h, n)
    if count > cap:
        raise CapExceededError(f"|X_{{{h},{n}}}|", count, cap)
    logger.debug(f"Enumerating X_{{{h},{n}}} ({count} elements)")
    return [MultiIndex(x) for x in iter_compositions(h, n)]


def _iter_zero_sum(h, n):
    # Coordinates are chosen left to right; pos/neg track the positive and negative
    # mass so far. Until a nonzero coordinate appears only nonnegative values are
    # allowed, which yields exactly the canonical representative of each {z, -z}.
    coords = [0] * n

    def rec(i, pos, neg, started):
        if i == n - 1:
            v = neg - pos
            if not started and v < 0:
                return
            if v == 0 and not started:
                return
            coords[i] = v
            yield tuple(coords)
            return
        low = 0 if not started else -(h - neg)
        for v in range(h - pos, low - 1, -1):
            if v > 0:
                np, nn = pos + v, neg
            else:
                np, nn = pos, neg - v
            # the remaining coordinates must be able to balance the mass
            if abs(np - nn) > h:
                continue
            coords[i] = v
            yield from rec(i + 1, np, nn, started or v != 0)
        coords[i] = 0

    yield from rec(0, 0, 0, False)


def enumerate_difference_vectors(h: int, n: int, cap: int = None) -> List[DifferenceVector]:
    """All canonical x - y with x != y in X_{h,n}, generated directly as zero-sum vectors.

    A zero-sum nonzero z is a difference of X_{h,n} exactly when its positive
    part sums to at most h; the realization pads both parts on one coordinate.
    """
    _check_hn(h, n)
    cap = ENUMERATION_CAP if cap is None else cap
    size = count_multiindices(h, n)
    if size > cap:
        raise CapExceededError(f"X_{{{h},{n}}} behind the difference vectors", size, cap)
    out = []
    for z in _iter_zero_sum(h, n):
        out.append(DifferenceVector(z))
        if len(out) > cap:
            raise CapExceededError(f"difference vectors of X_{{{h},{n}}}", len(out), cap)
    logger.debug(f"Generated {len(out)} difference vectors for h={h}, n={n}")
    return out


def reduced_difference_vectors(h: int, n: int, cap: int = None) -> List[DifferenceVector]:
    """Primitive difference vectors only (coordinate gcd 1).

    k*z with k >= 2 has k times the norm of the difference vector z, so it is
    never the minimizer of the separation constant.
    """
    return [z for z in enumerate_difference_vectors(h, n, cap) if gcd(*z.coords) == 1]


def pairwise_difference_vectors(h: int, n: int) -> List[DifferenceVector]:
    """Brute-force oracle: canonicalized x - y over all pairs, deduplicated, in the direct generator's order."""
    xs = list(iter_compositions(h, n))
    seen = set()
    for a in range(len(xs)):
        for b in range(a + 1, len(xs)):
            seen.add(DifferenceVector.from_pair(xs[a], xs[b]))
    return sorted(seen, key=lambda z: z.coords, reverse=True)


def lower_witness(h: int, n: int) -> Tuple[MultiIndex, MultiIndex]:
    """(x, y) in X_{h,n} with sum |x_i - y_i| = 2."""
    _check_hn(h, n)
    if h == 1:
        if n < 2:
            raise DimensionTooSmallError("lower", h, n, 2)
        return MultiIndex((1, 0) + (0,) * (n - 2)), MultiIndex((0, 1) + (0,) * (n - 2))
    if n < h:
        raise DimensionTooSmallError("lower", h, n, h)
    tail = (1,) * (h - 2) + (0,) * (n - h)
    return MultiIndex((2, 0) + tail), MultiIndex((1, 1) + tail)


def upper_witness(h: int, n: int) -> Tuple[MultiIndex, MultiIndex]:
    """(x, y) in X_{h,n} with sum |x_i - y_i| = 2h."""
    _check_hn(h, n)
    if n < 2 * h:
        raise DimensionTooSmallError("upper", h, n, 2 * h)
    rest = (0,) * (n - 2 * h)
    return MultiIndex((1,) * h + (0,) * h + rest), MultiIndex((0,) * h + (1,) * h + rest)


def extremal_witnesses(h: int, n: int):
    return lower_witness(h, n), upper_witness(h, n)


def l1_distance(x: MultiIndex, y: MultiIndex) -> int:
    return sum(abs(a - b) for a, b in zip(x.coords, y.coords))
