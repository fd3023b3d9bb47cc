import sys
import time
from fractions import Fraction

from support import raises, run_tests, sqrt_system

from epsilon import (PRECISION_MAX, CandidateBook, compute_epsilon, epsilon_to_dict, min_modulus, modulus_threshold,
                     precision_ladder)
from errors import IndependenceUnresolvedError, ValidationError
from realnum import Rational, SqrtRational, ThetaSystem, linear_combination, theta_norm_interval

WORKED_CASES = [
    ((2, 3), Fraction(3178, 10000), (1, -1), 13),
    ((2, 3, 5), Fraction(1861, 10000), (1, -2, 1), 22),
    ((2, 3, 5, 7), Fraction(918, 10000), (1, -1, -1, 1), 44),
]


def test_epsilon_matches_worked_examples():
    for radicands, prefix, argmin, _ in WORKED_CASES:
        start = time.perf_counter()
        eps = compute_epsilon(sqrt_system(*radicands), 2)
        assert time.perf_counter() - start < 1.0
        assert prefix < eps.lo <= eps.hi < prefix + Fraction(1, 10000)
        assert eps.width < Fraction(1, 10 ** 12)
        assert eps.argmin.coords == argmin
        assert eps.tied == ()
        assert eps.precision_bits_used == 64


def test_min_modulus_matches_thresholds():
    for radicands, _, _, q_min in WORKED_CASES:
        eps = compute_epsilon(sqrt_system(*radicands), 2)
        assert min_modulus(eps, 2, 1) == q_min
    eps = compute_epsilon(sqrt_system(2, 3), 2)
    assert Fraction(125850, 10000) < modulus_threshold(eps, 2, 1) < Fraction(125851, 10000)
    assert min_modulus(eps, 2, 2) == 26
    raises(ValidationError, min_modulus, eps, 2, 0)


def test_closed_form_enclosure():
    # eps_{2,4} = sqrt2 + sqrt7 - sqrt3 - sqrt5; squares bracket it exactly
    eps = compute_epsilon(sqrt_system(2, 3, 5, 7), 2)
    closed = linear_combination([(1, SqrtRational(2)), (1, SqrtRational(7)), (-1, SqrtRational(3)),
                                 (-1, SqrtRational(5))])
    lo, hi, e = closed.enclose(200)
    assert Fraction(lo, 1 << e) <= eps.hi and eps.lo <= Fraction(hi, 1 << e)


def test_upper_bound_chain():
    for radicands, _, _, _ in WORKED_CASES:
        system = sqrt_system(*radicands)
        eps = compute_epsilon(system, 2)
        assert eps.hi <= 2 * 2 * theta_norm_interval(system, 64).hi


def test_scaling():
    system = sqrt_system(2, 3, 5)
    scaled = ThetaSystem.from_scalars([linear_combination([(3, v[0])]) for v in system.vectors])
    a = compute_epsilon(system, 2)
    b = compute_epsilon(scaled, 2)
    assert 3 * a.lo <= b.hi and b.lo <= 3 * a.hi
    assert a.argmin == b.argmin


def test_higher_h_and_vectors():
    eps = compute_epsilon(sqrt_system(2, 3, 5), 3)
    assert 0 < eps.lo <= eps.hi
    assert eps.argmin.positive_part <= 3
    system = ThetaSystem.parse(["sqrt:2,sqrt:3", "sqrt:5,sqrt:7", "sqrt:11,sqrt:13"])
    eps = compute_epsilon(system, 2)
    assert eps.n == 3 and eps.lo > 0


def test_dependent_input_is_reported():
    e = raises(IndependenceUnresolvedError, compute_epsilon, ThetaSystem.parse(["rat:1", "rat:2"]), 2)
    assert e.combination == (2, -1)
    assert e.exit_code == 4
    e = raises(IndependenceUnresolvedError, compute_epsilon, ThetaSystem.parse(["rat:1", "rat:2"]), 3)
    assert e.combination == (2, -1)


def test_hidden_dependence_exhausts_precision():
    # sqrt2 - 2*sqrt8 + sqrt18 = 0, invisible to the exact check
    system = ThetaSystem.parse(["sqrt:2", "sqrt:8", "sqrt:18"])
    e = raises(IndependenceUnresolvedError, compute_epsilon, system, 2, precision_max=256)
    assert e.combination == (1, -2, 1)
    assert e.precision_bits == 256


def test_requires_two_vectors():
    raises(ValidationError, compute_epsilon, sqrt_system(2), 2)
    raises(ValidationError, compute_epsilon, sqrt_system(2, 3), 0)


def test_ladder():
    assert list(precision_ladder(64, 512)) == [64, 128, 256, 512]
    assert list(precision_ladder(64, 1000)) == [64, 128, 256, 512, 1000]
    raises(ValidationError, list, precision_ladder(4, 64))


def test_candidate_book_intersects():
    book = CandidateBook()
    book.update((1, -1), Fraction(1), Fraction(3))
    book.update((1, -2, 1), Fraction(2), Fraction(5))
    assert book.best_hi() == 3
    assert book.contenders() == [(1, -1), (1, -2, 1)]
    book.update((1, -1), Fraction(1, 2), Fraction(3, 2))
    assert book.bounds((1, -1)) == (Fraction(1), Fraction(3, 2))
    assert book.contenders() == [(1, -1)]
    book.update((0, 1, -1), Fraction(0), Fraction(1))
    assert book.unresolved() == [(0, 1, -1)]


def test_json_rendering():
    eps = compute_epsilon(sqrt_system(2, 3), 2)
    out = epsilon_to_dict(eps, digits=4, m=1)
    assert out["lo"] == "0.3178" and out["hi"] == "0.3179"
    assert out["argmin"] == [1, -1] and out["q_min"] == 13

def test_tied_minimizers_report_smallest_argmin():
    # second coordinates put (1,-1,0) and (1,-2,1) at exactly 1; first coordinates stay far below it
    scale = Fraction(1, 10 ** 12)
    system = ThetaSystem(((SqrtRational(2 * scale), Rational(0)),
                          (SqrtRational(3 * scale), Rational(1)),
                          (SqrtRational(5 * scale), Rational(3))))
    eps = compute_epsilon(system, 2)
    assert eps.lo == eps.hi == 1
    assert eps.argmin.coords == (1, -2, 1)
    assert [z.coords for z in eps.tied] == [(1, -1, 0)]
    assert eps.precision_bits_used == PRECISION_MAX



def main():
    return run_tests(globals(), "epsilon tests")


if __name__ == "__main__":
    sys.exit(main())
