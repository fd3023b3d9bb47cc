"""Rigorous enclosure of the separation constant epsilon_{h,n}.

epsilon_{h,n} = min over x != y in X_{h,n} of || sum_i (x_i - y_i) theta_i ||_inf.
The minimum runs over the primitive difference vectors only (a multiple k*z
has k times the norm of z).
"""
import logging
import os
from fractions import Fraction

from sortedcontainers import SortedList

from errors import IndependenceUnresolvedError, ValidationError
from model import DifferenceVector, EpsilonBound
from multiindex import reduced_difference_vectors
from realnum import (ThetaSystem, enclose_system, norm_enclosure, rational_relation,
                     render_decimal, theta_norm_interval)

logger = logging.getLogger(__name__)

PRECISION_START = 64
PRECISION_MAX = 16384
if 'SIDON_PRECISION_START' in os.environ:
    try:
        PRECISION_START = int(os.environ['SIDON_PRECISION_START'])
    except ValueError:
        pass
if 'SIDON_PRECISION_MAX' in os.environ:
    try:
        PRECISION_MAX = int(os.environ['SIDON_PRECISION_MAX'])
    except ValueError:
        pass


def precision_ladder(start=None, maximum=None):
    """start, 2*start, 4*start, ... up to and including maximum."""
    p = PRECISION_START if start is None else start
    top = PRECISION_MAX if maximum is None else maximum
    if p < 8 or top < p:
        raise ValidationError(f"bad precision ladder: start={p}, max={top}")
    while p < top:
        yield p
        p *= 2
    yield top


class CandidateBook:
    """Enclosures of every candidate norm, ordered by lower and by upper bound.

    Re-evaluations are intersected with what is already known, so bounds only
    tighten and a candidate once excluded from the minimum stays excluded.
    """

    def __init__(self):
        self._by_lo = SortedList()
        self._by_hi = SortedList()
        self._bounds = {}

    def __len__(self):
        return len(self._bounds)

    def update(self, coords, lo, hi):
        old = self._bounds.get(coords)
        if old is not None:
            self._by_lo.remove((old[0], coords))
            self._by_hi.remove((old[1], coords))
            lo, hi = max(lo, old[0]), min(hi, old[1])
        self._bounds[coords] = (lo, hi)
        self._by_lo.add((lo, coords))
        self._by_hi.add((hi, coords))

    def bounds(self, coords):
        return self._bounds[coords]

    def best_hi(self):
        return self._by_hi[0][0]

    def unresolved(self):
        """Candidates whose enclosure still touches 0."""
        out = []
        for lo, coords in self._by_lo:
            if lo > 0:
                break
            out.append(coords)
        return out

    def contenders(self):
        """Candidates that may still be the minimum."""
        best = self.best_hi()
        out = []
        for lo, coords in self._by_lo:
            if lo > best:
                break
            out.append(coords)
        return out


def compute_epsilon(system: ThetaSystem, h: int, precision_start=None, precision_max=None,
                    cap=None, check_rational=True) -> EpsilonBound:
    if not isinstance(system, ThetaSystem):
        raise ValidationError("compute_epsilon needs a ThetaSystem")
    if system.n < 2:
        raise ValidationError(f"epsilon needs at least two theta vectors, got n={system.n}")
    if check_rational:
        relation = rational_relation(system)
        if relation is not None:
            raise IndependenceUnresolvedError(
                relation, None,
                reason=f"independence unresolved: Q-dependent input, exact relation {list(relation)} vanishes")

    diffs = reduced_difference_vectors(h, system.n, cap)
    logger.info(f"Computing epsilon_{{{h},{system.n}}} over {len(diffs)} primitive difference vectors (d={system.d})")
    extra = (2 * h).bit_length()
    book = CandidateBook()
    live = [z.coords for z in diffs]
    unresolved, contenders = [], []
    p = None
    for p in precision_ladder(precision_start, precision_max):
        rows, e = enclose_system(system, p - 1 + extra)
        denom = 1 << e
        for coords in live:
            lo, hi = norm_enclosure(rows, coords)
            book.update(coords, Fraction(lo, denom), Fraction(hi, denom))
        unresolved = book.unresolved()
        contenders = book.contenders()
        logger.debug(f"precision {p}: {len(live)} evaluated, {len(unresolved)} unresolved, {len(contenders)} contenders")
        if not unresolved and len(contenders) == 1:
            break
        live = sorted(set(unresolved) | set(contenders))

    if unresolved:
        worst = min(unresolved)
        logger.warning(f"Combination {list(worst)} not separated from 0 at {p} bits")
        raise IndependenceUnresolvedError(worst, p)

    contenders = sorted(contenders)
    argmin = contenders[0]
    lo = min(book.bounds(c)[0] for c in contenders)
    hi = max(book.bounds(c)[1] for c in contenders)
    if len(contenders) > 1:
        logger.info(f"{len(contenders)} minimizers remain tied at {p} bits; reporting {list(argmin)}")
    norm_hi = theta_norm_interval(system, p).hi
    if hi > 2 * h * norm_hi:
        logger.warning(f"epsilon upper bound {float(hi)} exceeds 2h*||Theta|| = {float(2 * h * norm_hi)}")
    eps = EpsilonBound(lo=lo, hi=hi, argmin=DifferenceVector(argmin), h=h, n=system.n,
                       precision_bits_used=p,
                       tied=tuple(DifferenceVector(c) for c in contenders[1:]),
                       theta_norm_hi=norm_hi)
    logger.info(f"epsilon_{{{h},{system.n}}} in [{render_decimal(lo, 12)}, {render_decimal(hi, 12, 'ceil')}] "
                f"argmin {list(argmin)} at {p} bits")
    return eps


def modulus_threshold(eps: EpsilonBound, h: int, m: int) -> Fraction:
    """2hm / eps.lo, the proven-safe side of the bound q > 2hm / epsilon."""
    if h < 1 or m < 1:
        raise ValidationError(f"h and m must be positive, got h={h}, m={m}")
    return Fraction(2 * h * m) / eps.lo


def min_modulus(eps: EpsilonBound, h: int, m: int) -> int:
    """Least integer q with q > 2hm / eps.lo."""
    threshold = modulus_threshold(eps, h, m)
    return threshold.numerator // threshold.denominator + 1


def epsilon_to_dict(eps: EpsilonBound, digits=15, m=None):
    out = {
        "h": eps.h,
        "n": eps.n,
        "lo": render_decimal(eps.lo, digits, "floor"),
        "hi": render_decimal(eps.hi, digits, "ceil"),
        "lo_exact": f"{eps.lo.numerator}/{eps.lo.denominator}",
        "hi_exact": f"{eps.hi.numerator}/{eps.hi.denominator}",
        "argmin": list(eps.argmin.coords),
        "tied": [list(z.coords) for z in eps.tied],
        "precision_bits": eps.precision_bits_used,
    }
    if m is not None:
        out["m"] = m
        out["threshold_upper"] = render_decimal(modulus_threshold(eps, eps.h, m), digits, "ceil")
        out["q_min"] = min_modulus(eps, eps.h, m)
    return out
