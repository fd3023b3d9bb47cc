"""Lattice-point B_h-sets from Q-independent theta vectors.

For q > 2hm / epsilon_{h,n} every choice of integers a_{i,j} with
0 < |a_{i,j} - q*theta_{i,j}| <= m gives a B_h-set; there are exactly 2m
choices per coordinate, so (2m)^{dn} sets per (q, m).
"""
import itertools
import logging
import random
from fractions import Fraction
from typing import List, Optional, Tuple

from epsilon import PRECISION_START, compute_epsilon, min_modulus, modulus_threshold, precision_ladder
from errors import (CapExceededError, DuplicatePointError, PrecisionExhaustedError, SidonError,
                    UncertifiedParametersError, ValidationError)
from model import (SINGLETON_BASIS, ConstructionCertificate, ConstructionParams, DigitCandidates, EpsilonBound,
                   LatticeSet, render_choice_code)
from realnum import RealExpr, ThetaSystem, eval_interval, render_decimal, theta_norm_interval

logger = logging.getLogger(__name__)

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def floor_multiple(expr: RealExpr, factor: int, precision_start=None, precision_max=None) -> Tuple[int, bool]:
    """(floor(factor * value), whether factor * value is exactly that integer).

    Exact values are handled with Fractions; otherwise precision doubles until
    the enclosure of factor * value sits strictly inside (k, k + 1).
    """
    value = expr.exact()
    if value is not None:
        x = factor * value
        return x.numerator // x.denominator, x.denominator == 1
    bits = None
    for p in precision_ladder(precision_start, precision_max):
        bits = p + max(abs(factor).bit_length(), 1)
        lo, hi, e = expr.enclose(bits)
        if factor < 0:
            lo, hi = hi, lo
        a, b = factor * lo, factor * hi
        k = a >> e
        if k == (b >> e) and a > (k << e):
            return k, False
    raise PrecisionExhaustedError(f"cannot decide floor({factor} * {expr.render()})", bits, expression=expr)


def sign_of(expr: RealExpr, precision_start=None, precision_max=None) -> int:
    value = expr.exact()
    if value is not None:
        return (value > 0) - (value < 0)
    bits = None
    for bits in precision_ladder(precision_start, precision_max):
        lo, hi, _ = expr.enclose(bits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
    raise PrecisionExhaustedError(f"cannot decide the sign of {expr.render()}", bits, expression=expr)


def _check_qm(q, m):
    if not isinstance(q, int) or q < 1:
        raise ValidationError(f"q must be a positive integer, got {q!r}")
    if not isinstance(m, int) or m < 1:
        raise ValidationError(f"m must be a positive integer, got {m!r}")


def digit_candidates(system: ThetaSystem, q: int, m: int, precision_max=None) -> DigitCandidates:
    _check_qm(q, m)
    values, nonnegative = [], []
    for v in system.vectors:
        row_values, row_nonneg = [], []
        for theta in v:
            k, exact = floor_multiple(theta, q, precision_max=precision_max)
            # k = q*theta exactly fails 0 < |a - q*theta|, so it is skipped
            if exact:
                cands = tuple(range(k - m, k)) + tuple(range(k + 1, k + m + 1))
                logger.debug(f"q*{theta.render()} = {k} exactly; excluding it from the candidates")
            else:
                cands = tuple(range(k - m + 1, k + m + 1))
            row_values.append(cands)
            row_nonneg.append(sign_of(theta, precision_max=precision_max) >= 0)
        values.append(tuple(row_values))
        nonnegative.append(tuple(row_nonneg))
    norm_hi = theta_norm_interval(system, PRECISION_START).hi
    return DigitCandidates(q=q, m=m, values=tuple(values), nonnegative=tuple(nonnegative), theta_norm_hi=norm_hi)


def parse_choice_code(code, m: int, length: int) -> Tuple[int, ...]:
    """A choice code from text (base-2m digits, or '.'-separated integers) or a sequence of ints."""
    base = 2 * m
    if isinstance(code, str):
        text = code.strip().lower()
        try:
            if '.' in text or base > 36:
                digits = tuple(int(part) for part in text.split('.'))
            else:
                digits = tuple(_DIGITS.index(c) for c in text)
        except ValueError:
            raise ValidationError(f"malformed choice code {code!r}")
    else:
        digits = tuple(int(c) for c in code)
    if len(digits) != length:
        raise ValidationError(f"choice code must have {length} digits, got {len(digits)}")
    for c in digits:
        if not 0 <= c < base:
            raise ValidationError(f"choice code digit {c} out of range for base {base}")
    return digits


def allowed_digits(candidates: DigitCandidates, positivity_mode=False) -> List[Tuple[int, ...]]:
    """Digits usable at each code position (point-major)."""
    out = []
    for i in range(candidates.n):
        for j in range(candidates.d):
            cands = candidates.values[i][j]
            if positivity_mode and candidates.nonnegative[i][j]:
                out.append(tuple(k for k, a in enumerate(cands) if a > 0))
            else:
                out.append(tuple(range(len(cands))))
    return out


def default_choice_code(candidates: DigitCandidates, positivity_mode=False) -> Tuple[int, ...]:
    """Nearest candidate below q*theta everywhere; in positivity mode the first positive one when that is not positive."""
    code = list(candidates.nearest_below_code())
    if positivity_mode:
        for pos, allowed in enumerate(allowed_digits(candidates, True)):
            if code[pos] not in allowed:
                if not allowed:
                    raise ValidationError(f"no positive candidate at code position {pos}")
                code[pos] = next((k for k in allowed if k >= code[pos]), allowed[-1])
    return tuple(code)


def set_norm_inf(lattice) -> int:
    points = lattice.points if isinstance(lattice, LatticeSet) else lattice
    return max((abs(c) for p in points for c in p), default=0)


def build_set(candidates: DigitCandidates, choice_code, h: int = 2, positivity_mode=False,
              q_checked=False) -> LatticeSet:
    n, d, m = candidates.n, candidates.d, candidates.m
    code = parse_choice_code(choice_code, m, n * d)
    if positivity_mode:
        for pos, (c, allowed) in enumerate(zip(code, allowed_digits(candidates, True))):
            if c not in allowed:
                i, j = divmod(pos, d)
                raise ValidationError(f"positivity mode: digit {candidates.values[i][j][c]} chosen for theta_{{{i + 1},{j + 1}}} is not positive")
    # code position i*d + j picks the candidate for theta_{i,j}
    points = tuple(tuple(candidates.values[i][j][code[i * d + j]] for j in range(d)) for i in range(n))
    seen = {}
    for idx, p in enumerate(points):
        if p in seen:
            raise DuplicatePointError(p, seen[p], idx)
        seen[p] = idx
    params = ConstructionParams(h=h, m=m, q=candidates.q, positivity_mode=positivity_mode, q_checked=q_checked)
    lattice = LatticeSet(points=points, params=params, choice_code=code)
    # every candidate lies within m of q*theta, hence ||A|| <= q*||Theta|| + m
    bound = candidates.q * candidates.theta_norm_hi + m
    if set_norm_inf(lattice) > bound:
        raise SidonError(f"norm bound violated: ||A|| = {set_norm_inf(lattice)} > {render_decimal(bound, 12, 'ceil')}")
    return lattice


def certify(system: ThetaSystem, h: int, m: int, q: Optional[int] = None, force=False,
            eps: Optional[EpsilonBound] = None, positivity_mode=False, precision_max=None, cap=None):
    """(ConstructionParams, ConstructionCertificate, q_min) for the given or minimal q.

    A q that does not exceed 2hm / eps.lo raises UncertifiedParametersError
    unless force is set, in which case the certificate is returned invalid.
    A system not claimed Q-independent is refused the same way. A single
    theta vector needs no epsilon: every q certifies it and q_min is 1.
    """
    if not isinstance(h, int) or h < 2:
        raise ValidationError(f"h must be an integer >= 2, got {h!r}")
    claimed = system.independence_claim
    if not claimed:
        message = "theta system is not claimed Q-independent; nothing can be certified"
        if not force:
            raise ValidationError(message)
        logger.warning(f"{message} (forced)")

    if system.n == 1:
        q = 1 if q is None else q
        _check_qm(q, m)
        params = ConstructionParams(h=h, m=m, q=q, positivity_mode=positivity_mode, q_checked=True)
        cert = ConstructionCertificate(eps_bound=None, params=params, separation_lower_bound=None,
                                       basis=SINGLETON_BASIS, independence_claimed=claimed)
        return params, cert, 1

    if eps is None:
        eps = compute_epsilon(system, h, precision_max=precision_max, cap=cap)
    q_min = min_modulus(eps, h, m)
    if q is None:
        q = q_min
        logger.info(f"Chose q = {q} (2hm/epsilon < {render_decimal(modulus_threshold(eps, h, m), 12, 'ceil')})")
    _check_qm(q, m)
    # positive exactly when q > 2hm / eps.lo
    separation = q * eps.lo - 2 * h * m
    if separation <= 0:
        message = (f"uncertified q: q={q} does not exceed 2hm/epsilon = "
                   f"{render_decimal(modulus_threshold(eps, h, m), 12, 'ceil')}; smallest certified q is {q_min}")
        if not force:
            raise UncertifiedParametersError(message, q=q, q_min=q_min)
        logger.warning(f"{message} (forced)")
    params = ConstructionParams(h=h, m=m, q=q, positivity_mode=positivity_mode, q_checked=True)
    cert = ConstructionCertificate(eps_bound=eps, params=params, separation_lower_bound=separation,
                                   independence_claimed=claimed)
    return params, cert, q_min


def construct_certified(system: ThetaSystem, h: int, m: int, q: Optional[int] = None, force=False,
                        choice_code=None, positivity_mode=False, eps=None, precision_max=None):
    params, cert, _ = certify(system, h, m, q, force=force, eps=eps,
                              positivity_mode=positivity_mode, precision_max=precision_max)
    candidates = digit_candidates(system, params.q, m, precision_max=precision_max)
    if choice_code is None:
        choice_code = default_choice_code(candidates, positivity_mode)
    lattice = build_set(candidates, choice_code, h=h, positivity_mode=positivity_mode, q_checked=True)
    logger.info(f"Built A_{{{h},{system.n}}}({params.q},{m}) with code {render_choice_code(lattice.choice_code, m)}"
                f"{'' if cert.certified else ' (uncertified)'}")
    return lattice, cert


def family_total(candidates: DigitCandidates, positivity_mode=False) -> int:
    """Number of usable choice codes; (2m)^{dn} unless positivity mode drops digits."""
    total = 1
    for choices in allowed_digits(candidates, positivity_mode):
        total *= len(choices)
    return total


def _decode(index, allowed):
    # mixed radix over the allowed digits, last code position least significant
    digits = []
    for choices in reversed(allowed):
        index, r = divmod(index, len(choices))
        digits.append(choices[r])
    return tuple(reversed(digits))


def enumerate_certified_sets(system: ThetaSystem, h: int, m: int, q: Optional[int], limit: int,
                             seed=None, force=False, positivity_mode=False, eps=None,
                             precision_max=None, certificate=None) -> List[LatticeSet]:
    """Sets of the (2m)^{dn} family in base-2m counting order.

    Over `limit` sets, a seed switches to uniform sampling of `limit` distinct
    codes without replacement, returned in counting order.
    """
    if certificate is None:
        params, certificate, _ = certify(system, h, m, q, force=force, eps=eps,
                                         positivity_mode=positivity_mode, precision_max=precision_max)
    else:
        params = certificate.params
    candidates = digit_candidates(system, params.q, m, precision_max=precision_max)
    allowed = allowed_digits(candidates, positivity_mode)
    total = family_total(candidates, positivity_mode)
    if total <= limit:
        # product order is the base-2m counting order restricted to allowed digits
        codes = itertools.product(*allowed)
    elif seed is None:
        raise CapExceededError("choice codes in the (2m)^(dn) family", total, limit)
    else:
        rng = random.Random(seed)
        picked = set()
        # indices into the allowed family, drawn without replacement
        while len(picked) < limit:
            picked.add(rng.randrange(total))
        codes = (_decode(i, allowed) for i in sorted(picked))
        logger.info(f"Sampling {limit} of {total} choice codes with seed {seed}")
    sets = [build_set(candidates, code, h=h, positivity_mode=positivity_mode, q_checked=True) for code in codes]
    logger.info(f"Built {len(sets)} sets for q={params.q}, m={m}")
    return sets


def approximation_error(candidates: DigitCandidates, system: ThetaSystem, precision_bits=PRECISION_START):
    """Upper bound on max |a/q - theta_{i,j}| over every candidate a, as a Fraction."""
    worst = Fraction(0)
    for i, v in enumerate(system.vectors):
        for j, theta in enumerate(v):
            iv = eval_interval(theta, precision_bits)
            for a in candidates.values[i][j]:
                x = Fraction(a, candidates.q)
                worst = max(worst, x - iv.lo, iv.hi - x)
    return worst

