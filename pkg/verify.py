"""Brute-force B_h oracle: representation counts over every h-multiset of A."""
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import psutil

from errors import CapExceededError, DuplicatePointError, ValidationError
from model import MultiIndex, VerificationReport

logger = logging.getLogger(__name__)

VERIFY_CAP = 10 ** 8
if 'SIDON_VERIFY_CAP' in os.environ:
    try:
        VERIFY_CAP = int(os.environ['SIDON_VERIFY_CAP'])
    except ValueError:
        pass

NUM_WORKERS = psutil.cpu_count(logical=False) or 1
if 'CPU_CORES' in os.environ:
    try:
        NUM_WORKERS = int(os.environ['CPU_CORES'])
    except ValueError:
        pass

PARALLEL_THRESHOLD = 200000
if 'SIDON_PARALLEL_THRESHOLD' in os.environ:
    try:
        PARALLEL_THRESHOLD = int(os.environ['SIDON_PARALLEL_THRESHOLD'])
    except ValueError:
        pass


def normalize_points(points) -> Tuple[Tuple[Tuple[int, ...], ...], bool]:
    """Points as equal-length int tuples, plus whether the input was scalar."""
    points = list(points)
    if not points:
        raise ValidationError("point set is empty")
    scalar = all(isinstance(p, int) for p in points)
    if scalar:
        pts = tuple((p,) for p in points)
    else:
        try:
            pts = tuple(tuple(int(c) for c in p) for p in points)
        except (TypeError, ValueError):
            raise ValidationError(f"malformed point set: {points!r}")
        d = len(pts[0])
        if d == 0 or any(len(p) != d for p in pts):
            raise ValidationError("points must all have the same positive dimension")
    seen = {}
    for i, p in enumerate(pts):
        if p in seen:
            raise DuplicatePointError(p, seen[p], i)
        seen[p] = i
    return pts, scalar


def _walk(points, h, first_values=None) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    # (composition, sum) over X_{h,n} in lexicographically descending order,
    # restricted to the given first coordinates; sums are built incrementally
    n, d = len(points), len(points[0])
    x = [0] * n

    def rec(i, remaining, acc):
        p = points[i]
        if i == n - 1:
            x[i] = remaining
            yield tuple(x), tuple(a + remaining * c for a, c in zip(acc, p))
            return
        for k in range(remaining, -1, -1):
            x[i] = k
            yield from rec(i + 1, remaining - k, tuple(a + k * c for a, c in zip(acc, p)) if k else acc)

    zero = (0,) * d
    if n == 1:
        yield (h,), tuple(h * c for c in points[0])
        return
    firsts = range(h, -1, -1) if first_values is None else first_values
    for k in firsts:
        x[0] = k
        yield from rec(1, h - k, tuple(k * c for c in points[0]) if k else zero)


def _count_chunk(points, h, first_values) -> Counter:
    counts = Counter()
    for _, s in _walk(points, h, first_values):
        counts[s] += 1
    return counts


def _partition(h, workers) -> List[List[int]]:
    # round-robin over first coordinate values; small values carry the most compositions
    chunks = [[] for _ in range(min(workers, h + 1))]
    for k in range(h + 1):
        chunks[k % len(chunks)].append(k)
    return chunks


def _check_cap(n, h, cap):
    if not isinstance(h, int) or h < 1:
        raise ValidationError(f"h must be a positive integer, got {h!r}")
    cap = VERIFY_CAP if cap is None else cap
    count = comb(n + h - 1, h)
    if count > cap:
        raise CapExceededError(f"h-multisets of a {n}-element set", count, cap)
    return count


def _counts(pts, h, workers=None) -> Counter:
    total = comb(len(pts) + h - 1, h)
    workers = NUM_WORKERS if workers is None else workers
    if workers > 1 and total >= PARALLEL_THRESHOLD and len(pts) > 1:
        # chunks share no composition, so the merged counts equal the sequential ones
        chunks = _partition(h, workers)
        logger.debug(f"Splitting {total} multisets over {len(chunks)} processes: {chunks}")
        counts = Counter()
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            for part in pool.map(_count_chunk, [pts] * len(chunks), [h] * len(chunks), chunks):
                counts.update(part)
        return counts
    return _count_chunk(pts, h, None)


def _unwrap(s, scalar):
    return s[0] if scalar else s


def representation_counts(points, h: int, cap: Optional[int] = None, workers: Optional[int] = None) -> Dict:
    """r_{A,h}: sum -> number of h-multisets of A with that sum."""
    pts, scalar = normalize_points(points)
    _check_cap(len(pts), h, cap)
    counts = _counts(pts, h, workers)
    return {_unwrap(s, scalar): c for s, c in counts.items()}


def is_bh_set(points, h: int, cap: Optional[int] = None):
    """(True, None) or (False, (sum, x, y)) for the first collision met in enumeration order."""
    pts, scalar = normalize_points(points)
    _check_cap(len(pts), h, cap)
    # stops at the first repeated sum, without building the full count map
    first = {}
    for x, s in _walk(pts, h):
        other = first.get(s)
        if other is not None:
            return False, (_unwrap(s, scalar), MultiIndex(other), MultiIndex(x))
        first[s] = x
    return True, None


def sumset(points, h: int, cap: Optional[int] = None) -> set:
    pts, scalar = normalize_points(points)
    _check_cap(len(pts), h, cap)
    return {_unwrap(s, scalar) for _, s in _walk(pts, h)}


def verify_set(points, h: int, cap: Optional[int] = None, workers: Optional[int] = None) -> VerificationReport:
    pts, scalar = normalize_points(points)
    expected = _check_cap(len(pts), h, cap)
    counts = _counts(pts, h, workers)
    # B_h exactly when every sum has one representation
    colliding = {s for s, c in counts.items() if c > 1}
    collisions = []
    if colliding:
        # second pass collects every representation of the colliding sums only
        reps = {s: [] for s in colliding}
        for x, s in _walk(pts, h):
            if s in reps:
                reps[s].append(MultiIndex(x))
        collisions = [(_unwrap(s, scalar), reps[s]) for s in sorted(reps)]
    report = VerificationReport(
        h=h,
        set_size=len(pts),
        sumset_size=len(counts),
        expected_max=expected,
        is_bh=not colliding,
        max_representation_count=max(counts.values()),
        collisions=collisions,
        counts={_unwrap(s, scalar): c for s, c in counts.items()},
    )
    logger.debug(f"Verified {len(pts)} points at h={h}: |hA| = {report.sumset_size} of {expected}")
    return report


def verify_many(point_sets: Sequence, h: int, cap: Optional[int] = None) -> List[VerificationReport]:
    return [verify_set(points, h, cap) for points in point_sets]
