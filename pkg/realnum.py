"""Symbolic real numbers and rigorous dyadic interval enclosures.

Every RealExpr can produce an enclosure (lo, hi, e) of integers meaning
[lo / 2^e, hi / 2^e], with width at most 2^-bits for the requested bits.
Square roots use math.isqrt on scaled rationals, so all endpoints are exact
and bit-reproducible; nothing here touches floating point.

Text grammar (EBNF) used by parse_theta and the CLI:

    expr     = [ sign ] term { sign term } ;
    term     = [ integer "*" ] atom ;
    atom     = "sqrt:" ratio | "rat:" [ "-" ] integer [ "/" integer ]
             | "dec:" [ "-" ] digits [ "." digits ] ;
    ratio    = integer [ "/" integer ] | digits "." digits ;
    sign     = "+" | "-" ;

Whitespace is allowed between tokens. Decimal literals are exact rationals.
"""
import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from decimal import Decimal, ROUND_CEILING, ROUND_FLOOR, localcontext
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import List, Optional, Sequence, Tuple

from errors import ThetaParseError, ValidationError
from model import DifferenceVector, canonical_sign

logger = logging.getLogger(__name__)

MIN_PRECISION_BITS = 8


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise ValidationError("floats are not accepted; use a string or Fraction")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"not a rational number: {value!r} ({e})")


def _render_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RealExpr(ABC):
    @abstractmethod
    def enclose(self, bits: int) -> Tuple[int, int, int]:
        """(lo, hi, e) with lo/2^e <= value <= hi/2^e and (hi - lo)/2^e <= 2^-bits."""

    @abstractmethod
    def exact(self) -> Optional[Fraction]:
        """The value as a Fraction when it is provably rational, else None."""

    @abstractmethod
    def render(self) -> str:
        pass

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Rational(RealExpr):
    num: int
    den: int = 1

    def __post_init__(self):
        if self.den == 0:
            raise ValidationError("rational with zero denominator")
        f = Fraction(int(self.num), int(self.den))
        object.__setattr__(self, 'num', f.numerator)
        object.__setattr__(self, 'den', f.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    def enclose(self, bits):
        scaled = self.num << bits
        return scaled // self.den, -((-scaled) // self.den), bits

    def exact(self):
        return self.value

    def render(self):
        return f"rat:{_render_fraction(self.value)}"


def decimal_literal(text: str) -> Rational:
    """A decimal digit string as the exact rational it denotes."""
    if not re.fullmatch(r'-?\d+(\.\d+)?', text or ''):
        raise ValidationError(f"malformed decimal literal: {text!r}")
    f = Fraction(text)
    return Rational(f.numerator, f.denominator)


@dataclass(frozen=True)
class SqrtRational(RealExpr):
    radicand: Fraction

    def __post_init__(self):
        r = _as_fraction(self.radicand)
        if r < 0:
            raise ValidationError(f"square root of negative rational {r}")
        object.__setattr__(self, 'radicand', r)

    def enclose(self, bits):
        a, b = self.radicand.numerator, self.radicand.denominator
        scaled = a << (2 * bits)
        s = isqrt(scaled // b)
        if s * s * b == scaled:
            return s, s, bits
        return s, s + 1, bits

    def exact(self):
        a, b = self.radicand.numerator, self.radicand.denominator
        ra, rb = isqrt(a), isqrt(b)
        if ra * ra == a and rb * rb == b:
            return Fraction(ra, rb)
        return None

    def render(self):
        return f"sqrt:{_render_fraction(self.radicand)}"


@dataclass(frozen=True)
class Sum(RealExpr):
    """Integer linear combination of non-Sum expressions."""
    terms: Tuple[Tuple[int, RealExpr], ...]

    def __post_init__(self):
        terms = tuple((int(c), e) for c, e in self.terms)
        if not terms:
            raise ValidationError("Sum needs at least one term")
        for c, e in terms:
            if c == 0:
                raise ValidationError("Sum coefficients must be nonzero")
            if isinstance(e, Sum):
                raise ValidationError("nested Sum; build it with linear_combination")
        object.__setattr__(self, 'terms', terms)

    def enclose(self, bits):
        t = sum(abs(c) for c, _ in self.terms).bit_length()
        parts = [(c, e.enclose(bits + t)) for c, e in self.terms]
        top = max(p[2] for _, p in parts)
        lo = hi = 0
        for c, (plo, phi, pe) in parts:
            shift = top - pe
            plo, phi = plo << shift, phi << shift
            if c > 0:
                lo += c * plo
                hi += c * phi
            else:
                lo += c * phi
                hi += c * plo
        return lo, hi, top

    def exact(self):
        total = Fraction(0)
        for c, e in self.terms:
            v = e.exact()
            if v is None:
                return None
            total += c * v
        return total

    def render(self):
        out = []
        for k, (c, e) in enumerate(self.terms):
            body = e.render() if abs(c) == 1 else f"{abs(c)}*{e.render()}"
            if k == 0:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f"{'+' if c > 0 else '-'} {body}")
        return ' '.join(out)


def exact_value(expr: RealExpr) -> Optional[Fraction]:
    return expr.exact()


def linear_combination(terms) -> RealExpr:
    """Flatten (coefficient, expr) pairs into a Sum; a lone unit term is returned as itself."""
    flat = []
    for c, e in terms:
        if c == 0:
            continue
        if isinstance(e, Sum):
            flat.extend((c * ic, ie) for ic, ie in e.terms)
        else:
            flat.append((c, e))
    if not flat:
        raise ValidationError("empty linear combination")
    if len(flat) == 1 and flat[0][0] == 1:
        return flat[0][1]
    return Sum(tuple(flat))


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    precision_bits: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValidationError(f"inverted interval [{self.lo}, {self.hi}]")

    @classmethod
    def from_scaled(cls, lo, hi, e, precision_bits):
        return cls(Fraction(lo, 1 << e), Fraction(hi, 1 << e), precision_bits)

    @classmethod
    def point(cls, x, precision_bits=MIN_PRECISION_BITS):
        x = _as_fraction(x)
        return cls(x, x, precision_bits)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        x = _as_fraction(x)
        return self.lo <= x <= self.hi

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def __add__(self, other):
        return Interval(self.lo + other.lo, self.hi + other.hi, min(self.precision_bits, other.precision_bits))

    def __neg__(self):
        return Interval(-self.hi, -self.lo, self.precision_bits)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        k = _as_fraction(k)
        if k >= 0:
            return Interval(k * self.lo, k * self.hi, self.precision_bits)
        return Interval(k * self.hi, k * self.lo, self.precision_bits)

    def abs(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(Fraction(0), max(-self.lo, self.hi), self.precision_bits)

    def to_dict(self, digits=15):
        return {
            "lo": render_decimal(self.lo, digits, "floor"),
            "hi": render_decimal(self.hi, digits, "ceil"),
            "lo_exact": _render_fraction(self.lo),
            "hi_exact": _render_fraction(self.hi),
            "precision_bits": self.precision_bits,
        }


def interval_max(intervals: Sequence[Interval]) -> Interval:
    if not intervals:
        raise ValidationError("max of no intervals")
    return Interval(max(i.lo for i in intervals), max(i.hi for i in intervals),
                    min(i.precision_bits for i in intervals))


def render_decimal(x: Fraction, digits: int = 15, rounding: str = "floor") -> str:
    """Correctly rounded decimal with `digits` significant digits, rounded toward -inf or +inf."""
    x = _as_fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_FLOOR if rounding == "floor" else ROUND_CEILING
        return str(Decimal(x.numerator) / Decimal(x.denominator))


def eval_interval(expr: RealExpr, precision_bits: int) -> Interval:
    if precision_bits < MIN_PRECISION_BITS:
        raise ValidationError(f"precision_bits must be >= {MIN_PRECISION_BITS}, got {precision_bits}")
    lo, hi, e = expr.enclose(precision_bits - 1)
    return Interval.from_scaled(lo, hi, e, precision_bits)


# ---------------------------------------------------------------------------
# Theta systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaSystem:
    """Theta_n: n vectors in R^d. independence_claim is the caller's assertion, never verified here."""
    vectors: Tuple[Tuple[RealExpr, ...], ...]
    independence_claim: bool = True

    def __post_init__(self):
        vectors = tuple(tuple(v) for v in self.vectors)
        if not vectors:
            raise ValidationError("a theta system needs at least one vector")
        d = len(vectors[0])
        if d < 1:
            raise ValidationError("theta vectors need dimension >= 1")
        for i, v in enumerate(vectors):
            if len(v) != d:
                raise ValidationError(f"theta vector {i} has dimension {len(v)}, expected {d}")
            for x in v:
                if not isinstance(x, RealExpr):
                    raise ValidationError(f"theta vector {i} holds {x!r}, not a RealExpr")
        object.__setattr__(self, 'vectors', vectors)

    @classmethod
    def from_scalars(cls, exprs, independence_claim=True):
        return cls(tuple((e,) for e in exprs), independence_claim)

    @classmethod
    def parse(cls, specs: Sequence[str], independence_claim=True):
        """One spec per vector; coordinates of a vector are separated by ','."""
        return cls(tuple(tuple(parse_theta(part) for part in spec.split(',')) for spec in specs),
                   independence_claim)

    @property
    def n(self) -> int:
        return len(self.vectors)

    @property
    def d(self) -> int:
        return len(self.vectors[0])

    def render(self) -> List[str]:
        return [','.join(x.render() for x in v) for v in self.vectors]


def enclose_system(system: ThetaSystem, bits: int):
    """All theta_{i,j} enclosed at `bits`, as integer (lo, hi) pairs over a common 2^E."""
    raw = [[x.enclose(bits) for x in v] for v in system.vectors]
    top = max(e for row in raw for _, _, e in row)
    rows = [[(lo << (top - e), hi << (top - e)) for lo, hi, e in row] for row in raw]
    return rows, top


def norm_enclosure(rows, coeffs) -> Tuple[int, int]:
    """Scaled enclosure of || sum_i coeffs_i theta_i ||_inf from enclose_system rows."""
    best_lo = best_hi = 0
    for j in range(len(rows[0])):
        lo = hi = 0
        for c, row in zip(coeffs, rows):
            if c > 0:
                lo += c * row[j][0]
                hi += c * row[j][1]
            elif c < 0:
                lo += c * row[j][1]
                hi += c * row[j][0]
        if lo >= 0:
            alo, ahi = lo, hi
        elif hi <= 0:
            alo, ahi = -hi, -lo
        else:
            alo, ahi = 0, max(-lo, hi)
        if alo > best_lo:
            best_lo = alo
        if ahi > best_hi:
            best_hi = ahi
    return best_lo, best_hi


def combination_norm_interval(system: ThetaSystem, z, precision_bits: int) -> Interval:
    if precision_bits < MIN_PRECISION_BITS:
        raise ValidationError(f"precision_bits must be >= {MIN_PRECISION_BITS}, got {precision_bits}")
    if not isinstance(z, DifferenceVector):
        z = DifferenceVector(canonical_sign(tuple(z)))
    if z.n != system.n:
        raise ValidationError(f"difference vector has length {z.n}, system has n={system.n}")
    t = z.l1_norm.bit_length()
    rows, e = enclose_system(system, precision_bits - 1 + t)
    lo, hi = norm_enclosure(rows, z.coords)
    return Interval.from_scaled(lo, hi, e, precision_bits)


def theta_norm_interval(system: ThetaSystem, precision_bits: int) -> Interval:
    """Enclosure of ||Theta_n||_inf."""
    return interval_max([eval_interval(x, precision_bits).abs() for v in system.vectors for x in v])


def rational_relation(system: ThetaSystem) -> Optional[Tuple[int, ...]]:
    """A primitive integer relation among the exactly-rational vectors of the system, if one exists.

    Only vectors whose every coordinate is provably rational take part; a
    relation among them is a Q-dependence of the whole system. Returns None
    when that rational subsystem is independent (which proves nothing about
    the rest).
    """
    idx, cols = [], []
    for i, v in enumerate(system.vectors):
        vals = [x.exact() for x in v]
        if all(val is not None for val in vals):
            idx.append(i)
            cols.append(vals)
    if not idx:
        return None
    sol = _nullspace_vector(cols)
    if sol is None:
        return None
    scale = lcm(*(f.denominator for f in sol))
    ints = [int(f * scale) for f in sol]
    g = gcd(*ints)
    ints = [c // g for c in ints]
    full = [0] * system.n
    for i, c in zip(idx, ints):
        full[i] = c
    return canonical_sign(tuple(full))


def _nullspace_vector(columns):
    # reduced row echelon form over Q; the first free column gives a kernel vector
    k, d = len(columns), len(columns[0])
    rows = [[Fraction(columns[c][r]) for c in range(k)] for r in range(d)]
    pivots = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, d) if rows[i][c] != 0), None)
        if piv is None:
            x = [Fraction(0)] * k
            x[c] = Fraction(1)
            for pr, pc in pivots:
                x[pc] = -rows[pr][c]
            return x
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(d):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
    return None


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_INT = re.compile(r'\d+')
_RATIO = re.compile(r'(\d+)(?:/(\d+)|\.(\d+))?')
_SIGNED_RATIO = re.compile(r'(-?\d+)(?:/(\d+))?')
_DECIMAL = re.compile(r'-?\d+(?:\.\d+)?')
_KIND = re.compile(r'(sqrt|rat|dec):')


class _ThetaParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None):
        raise ThetaParseError(message, self.text, self.pos if pos is None else pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ''

    def parse(self):
        self.skip_ws()
        if not self.peek():
            self.error("empty expression")
        sign = 1
        if self.peek() in '+-':
            sign = -1 if self.peek() == '-' else 1
            self.pos += 1
            self.skip_ws()
        terms = [self.term(sign)]
        while True:
            self.skip_ws()
            if not self.peek():
                break
            if self.peek() not in '+-':
                self.error(f"expected '+' or '-', found {self.peek()!r}")
            sign = -1 if self.peek() == '-' else 1
            self.pos += 1
            self.skip_ws()
            terms.append(self.term(sign))
        return linear_combination(terms)

    def term(self, sign):
        coef = 1
        m = _INT.match(self.text, self.pos)
        if m:
            start = self.pos
            self.pos = m.end()
            self.skip_ws()
            if self.peek() != '*':
                self.error("expected '*' after coefficient")
            coef = int(m.group())
            if coef == 0:
                self.error("zero coefficient", start)
            self.pos += 1
            self.skip_ws()
        return sign * coef, self.atom()

    def atom(self):
        start = self.pos
        m = _KIND.match(self.text, self.pos)
        if not m:
            self.error("expected 'sqrt:', 'rat:' or 'dec:'")
        kind = m.group(1)
        self.pos = m.end()
        if kind == 'sqrt':
            if self.peek() == '-':
                self.error("square root of negative rational")
            r = _RATIO.match(self.text, self.pos)
            if not r:
                self.error("expected a nonnegative rational")
            self.pos = r.end()
            if r.group(2) is not None:
                if int(r.group(2)) == 0:
                    self.error("zero denominator", start)
                return SqrtRational(Fraction(int(r.group(1)), int(r.group(2))))
            return SqrtRational(Fraction(r.group()))
        if kind == 'rat':
            r = _SIGNED_RATIO.match(self.text, self.pos)
            if not r:
                self.error("expected an integer ratio p/q")
            self.pos = r.end()
            den = int(r.group(2)) if r.group(2) is not None else 1
            if den == 0:
                self.error("zero denominator", start)
            return Rational(int(r.group(1)), den)
        r = _DECIMAL.match(self.text, self.pos)
        if not r:
            self.error("expected decimal digits")
        self.pos = r.end()
        value = decimal_literal(r.group())
        logger.warning(f"decimal literal {r.group()} is the rational {_render_fraction(value.value)}; "
                       f"rational thetas are never Q-independent in groups of two or more")
        return value


def parse_theta(spec: str) -> RealExpr:
    if not isinstance(spec, str):
        raise ValidationError(f"theta spec must be text, got {type(spec).__name__}")
    return _ThetaParser(spec).parse()


def render_theta(expr: RealExpr) -> str:
    return expr.render()
