import random
import sys
from fractions import Fraction

from support import raises, run_tests, sqrt_system

from errors import ThetaParseError, ValidationError
from model import DifferenceVector
from realnum import (Interval, Rational, SqrtRational, Sum, ThetaSystem, combination_norm_interval, decimal_literal,
                     eval_interval, exact_value, interval_max, linear_combination, parse_theta, rational_relation,
                     render_decimal, render_theta, theta_norm_interval)

ROOTS = [SqrtRational(r) for r in (2, 3, 5, 7)]


def _random_sum(rng):
    terms = []
    for atom in rng.sample(ROOTS, rng.randint(1, 4)):
        c = rng.choice([k for k in range(-5, 6) if k])
        terms.append((c, atom))
    return linear_combination(terms)


def test_sqrt_two_enclosure():
    iv = eval_interval(SqrtRational(2), 32)
    assert iv.lo <= Fraction(14142, 10000) + Fraction(1, 10000) and iv.lo > Fraction(14142, 10000)
    assert iv.lo * iv.lo <= 2 <= iv.hi * iv.hi
    assert iv.width <= Fraction(1, 2 ** 31)


def test_rational_is_exact():
    for p in (8, 64, 300):
        iv = eval_interval(Rational(3, 2), p)
        assert iv.lo == iv.hi == Fraction(3, 2)
    assert Rational(6, -4).num == -3 and Rational(6, -4).den == 2
    raises(ValidationError, Rational, 1, 0)


def test_difference_of_roots():
    iv = eval_interval(Sum(((1, SqrtRational(3)), (-1, SqrtRational(2)))), 64)
    assert Fraction(3178, 10000) < iv.lo < iv.hi < Fraction(3179, 10000)
    assert iv.width < Fraction(1, 2 ** 60)


def test_perfect_square_root_is_exact():
    iv = eval_interval(SqrtRational(Fraction(9, 4)), 40)
    assert iv.lo == iv.hi == Fraction(3, 2)
    assert exact_value(SqrtRational(Fraction(9, 4))) == Fraction(3, 2)
    assert exact_value(SqrtRational(2)) is None
    raises(ValidationError, SqrtRational, -1)
    raises(ValidationError, eval_interval, SqrtRational(2), 7)


def test_combination_norms():
    system = sqrt_system(2, 3)
    iv = combination_norm_interval(system, DifferenceVector((1, -1)), 64)
    assert Fraction(3178, 10000) < iv.lo <= iv.hi < Fraction(3179, 10000)
    system3 = sqrt_system(2, 3, 5)
    iv = combination_norm_interval(system3, (1, -2, 1), 64)
    assert Fraction(1861, 10000) < iv.lo <= iv.hi < Fraction(1862, 10000)
    raises(ValidationError, combination_norm_interval, system3, (1, -1), 64)
    raises(ValidationError, combination_norm_interval, system, (0, 0), 64)


def test_vector_norm_takes_max_over_coordinates():
    system = ThetaSystem.parse(["sqrt:2,rat:1", "sqrt:3,rat:5"])
    iv = combination_norm_interval(system, (1, -1), 64)
    assert iv.lo == iv.hi == 4
    norm = theta_norm_interval(system, 64)
    assert norm.lo == norm.hi == 5


def test_parse_and_render():
    assert parse_theta("sqrt:2") == SqrtRational(2)
    expr = parse_theta("sqrt:2 - 2*sqrt:3 + sqrt:5")
    assert expr == Sum(((1, SqrtRational(2)), (-2, SqrtRational(3)), (1, SqrtRational(5))))
    assert render_theta(expr) == "sqrt:2 - 2*sqrt:3 + sqrt:5"
    assert parse_theta("dec:1.4142") == Rational(7071, 5000)
    assert parse_theta("rat:-1/2") == Rational(-1, 2)
    assert parse_theta("-sqrt:2") == Sum(((-1, SqrtRational(2)),))
    assert parse_theta("sqrt:1/3") == SqrtRational(Fraction(1, 3))
    assert parse_theta("  sqrt:2+sqrt:3 ") == Sum(((1, SqrtRational(2)), (1, SqrtRational(3))))


def test_parse_round_trip():
    rng = random.Random(11)
    for _ in range(200):
        expr = _random_sum(rng)
        assert parse_theta(render_theta(expr)) == expr
    for text in ["rat:3/2", "rat:-7", "sqrt:5/7", "3*rat:1/2 - sqrt:2"]:
        assert render_theta(parse_theta(render_theta(parse_theta(text)))) == render_theta(parse_theta(text))


def test_parse_errors_carry_position():
    e = raises(ThetaParseError, parse_theta, "sqrt:2 * sqrt:3")
    assert e.position == 7
    e = raises(ThetaParseError, parse_theta, "rat:1/0")
    assert e.position == 0
    raises(ThetaParseError, parse_theta, "")
    raises(ThetaParseError, parse_theta, "cbrt:2")
    raises(ThetaParseError, parse_theta, "sqrt:-2")
    raises(ThetaParseError, parse_theta, "0*sqrt:2")
    raises(ValidationError, decimal_literal, "1.")


def test_soundness_and_nested_refinement():
    rng = random.Random(2024)
    for _ in range(1000):
        expr = _random_sum(rng)
        coarse = eval_interval(expr, 128)
        fine = eval_interval(expr, 512)
        assert coarse.lo <= fine.lo <= fine.hi <= coarse.hi
        assert coarse.width <= Fraction(1, 2 ** 127)


def test_monotone_refinement():
    expr = parse_theta("sqrt:2 + sqrt:7 - sqrt:3 - sqrt:5")
    previous = None
    for p in (8, 16, 32, 64, 128, 256, 512, 1024):
        iv = eval_interval(expr, p)
        if previous is not None:
            assert iv.width <= previous.width
            assert previous.lo <= iv.lo and iv.hi <= previous.hi
        previous = iv


def test_interval_arithmetic_on_dyadic_grid():
    grid = [Fraction(k, 4) for k in range(-6, 7)]
    pairs = [(a, b) for a in grid for b in grid if a <= b]
    for a_lo, a_hi in pairs[::7]:
        a = Interval(a_lo, a_hi, 8)
        for b_lo, b_hi in pairs[::11]:
            b = Interval(b_lo, b_hi, 8)
            xs = [x for x in grid if a_lo <= x <= a_hi]
            ys = [y for y in grid if b_lo <= y <= b_hi]
            for x in xs:
                for y in ys:
                    assert (a + b).contains(x + y)
                    assert (a - b).contains(x - y)
                    assert interval_max([a, b]).contains(max(x, y))
                assert a.abs().contains(abs(x))
                assert a.scale(-3).contains(-3 * x)


def test_rational_relation():
    system = ThetaSystem.parse(["rat:1", "rat:2"])
    assert rational_relation(system) == (2, -1)
    assert rational_relation(sqrt_system(2, 3)) is None
    assert rational_relation(ThetaSystem.parse(["rat:1", "sqrt:2"])) is None
    mixed = ThetaSystem.parse(["rat:1/2,rat:1", "sqrt:2,rat:0", "rat:1,rat:2"])
    assert rational_relation(mixed) == (2, 0, -1)


def test_render_decimal_directed():
    x = Fraction(1, 3)
    assert render_decimal(x, 4, "floor") == "0.3333"
    assert render_decimal(x, 4, "ceil") == "0.3334"
    assert render_decimal(Fraction(-1, 3), 3, "floor") == "-0.334"


def main():
    return run_tests(globals(), "realnum tests")


if __name__ == "__main__":
    sys.exit(main())
