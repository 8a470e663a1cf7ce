import random
from fractions import Fraction
from math import gcd

import pytest

from bdlab.coeff import (
    Angle,
    CircleFunction,
    CircleRotation,
    FiniteCyclicFunction,
    FiniteCyclicShift,
    cyclic_invariant_ideal_search,
    cyclic_orbits,
)
from bdlab.scalar import Scalar


def numeric_rotation_oracle(f: CircleFunction, m: int, angle_value: float, theta0: float, points=8):
    """alpha^m(f) should equal s -> f(s - m*angle) pointwise."""
    return [f.evaluate(theta0, s / points - m * angle_value) for s in range(points)]


class TestCircleRotation:
    def test_alpha_on_z_formal(self, circle):
        # substitute z = e^{2 pi i s} into f(s - theta): picks up t^{-1}
        assert circle.alpha_power(CircleFunction.z(), 1) == CircleFunction.z(1, Scalar.t_power(-1))

    def test_alpha_numeric_oracle(self, circle):
        theta0 = 0.4142135623
        f = CircleFunction({1: Scalar.one(), -2: Scalar.term(Fraction(1, 2))})
        g = circle.alpha_power(f, 3)
        for s in range(8):
            expected = f.evaluate(theta0, s / 8 - 3 * theta0)
            assert abs(g.evaluate(theta0, s / 8) - expected) < 1e-9

    def test_alpha_identity_power(self, circle):
        f = CircleFunction.z(5)
        assert circle.alpha_power(f, 0) == f

    def test_alpha_rational_angle(self):
        quarter = CircleRotation(Angle(Fraction(1, 4), Fraction(0)))
        assert quarter.alpha_power(CircleFunction.z(2), 1) == CircleFunction.z(2, Scalar.from_rational(-1))

    @pytest.mark.parametrize("algebra_fixture", ["circle", "circle_q", "cyclic3"])
    def test_alpha_group_law_and_star(self, algebra_fixture, request, rng):
        algebra = request.getfixturevalue(algebra_fixture)
        for _ in range(40):
            f = algebra.sample(rng)
            g = algebra.sample(rng)
            a, b = rng.randint(-4, 4), rng.randint(-4, 4)
            assert algebra.alpha_power(algebra.alpha_power(f, b), a) == algebra.alpha_power(f, a + b)
            assert algebra.alpha_power(f * g, a) == algebra.alpha_power(f, a) * algebra.alpha_power(g, a)
            assert algebra.alpha_power(f + g, a) == algebra.alpha_power(f, a) + algebra.alpha_power(g, a)
            assert algebra.alpha_power(f.star(), a) == algebra.alpha_power(f, a).star()

    def test_trace0(self, circle):
        assert circle.trace0(CircleFunction.z()) == Scalar.zero()
        f = CircleFunction.one() + CircleFunction.z(2, Scalar.from_rational(3))
        assert circle.trace0(f) == Scalar.one()
        assert circle.trace0(CircleFunction.z(0, Scalar.t_power(1))) == Scalar.t_power(1)

    @pytest.mark.parametrize("algebra_fixture", ["circle", "circle_q", "cyclic3"])
    def test_trace_alpha_invariance(self, algebra_fixture, request):
        algebra = request.getfixturevalue(algebra_fixture)
        rng = random.Random(99)
        for _ in range(200):
            f = algebra.sample(rng)
            for m in range(-8, 9):
                assert algebra.trace0(algebra.alpha_power(f, m)) == algebra.trace0(f)

    @pytest.mark.parametrize("algebra_fixture", ["circle", "circle_q", "cyclic3"])
    def test_trace0_is_a_tracial_state(self, algebra_fixture, request, rng):
        algebra = request.getfixturevalue(algebra_fixture)
        assert algebra.trace0(algebra.one()) == Scalar.one()
        for _ in range(50):
            f, g = algebra.sample(rng), algebra.sample(rng)
            assert algebra.trace0(f * g) == algebra.trace0(g * f)

    def test_mul_matches_pointwise_numeric(self, rng):
        for _ in range(30):
            angle = Angle(Fraction(rng.randint(-3, 3), rng.randint(1, 4)), Fraction(rng.randint(-2, 2)))
            algebra = CircleRotation(angle)
            theta0 = rng.random()
            f, g = algebra.sample(rng), algebra.sample(rng)
            h = f * g
            for s in range(16):
                want = f.evaluate(theta0, s / 16) * g.evaluate(theta0, s / 16)
                assert abs(h.evaluate(theta0, s / 16) - want) < 1e-10

    def test_json_round_trip(self, circle, rng):
        f = circle.sample(rng)
        assert CircleFunction.from_json(f.to_json()) == f


class TestFiniteCyclicShift:
    def test_shift_examples(self):
        a, b, c = Scalar.from_rational(1), Scalar.from_rational(2), Scalar.from_rational(3)
        alg = FiniteCyclicShift(3)
        f = FiniteCyclicFunction(3, (a, b, c))
        assert alg.alpha_power(f, 1) == FiniteCyclicFunction(3, (c, a, b))
        assert alg.alpha_power(f, 3) == f
        g = FiniteCyclicFunction(2, (a, b))
        assert FiniteCyclicShift(2).alpha_power(g, -1) == FiniteCyclicFunction(2, (b, a))

    def test_trace_is_uniform_average(self, cyclic3):
        f = FiniteCyclicFunction(3, (Scalar.from_rational(1), Scalar.from_rational(2), Scalar.zero()))
        assert cyclic3.trace0(f) == Scalar.from_rational(1)

    def test_star_pointwise(self, cyclic3, rng):
        f = cyclic3.sample(rng)
        assert f.star().star() == f

    def test_json_round_trip(self, cyclic3, rng):
        f = cyclic3.sample(rng)
        assert FiniteCyclicFunction.from_json(f.to_json()) == f


class TestInvariantIdealSearch:
    def test_search_examples(self):
        assert cyclic_invariant_ideal_search(2, 2) == frozenset({0})
        assert cyclic_invariant_ideal_search(3, 2) is None
        assert cyclic_invariant_ideal_search(4, 2) == frozenset({0, 2})

    def test_none_iff_gcd_one(self):
        for d in range(1, 25):
            for n in range(1, 25):
                found = cyclic_invariant_ideal_search(d, n)
                assert (found is None) == (gcd(n, d) == 1)
                if found is not None:
                    assert 0 < len(found) < d
                    assert all((i + n) % d in found for i in found)

    def test_against_exhaustive_subset_enumeration(self):
        # independent oracle: scan all nonempty proper subsets for invariance
        for d in range(1, 9):
            for n in range(1, 9):
                exists = False
                for mask in range(1, 2**d - 1):
                    subset = {i for i in range(d) if mask >> i & 1}
                    if all((i + n) % d in subset for i in subset):
                        exists = True
                        break
                assert exists == (cyclic_invariant_ideal_search(d, n) is not None)

    def test_orbits_partition(self):
        for d in range(1, 13):
            for n in range(1, 13):
                orbits = cyclic_orbits(d, n)
                assert sorted(i for orbit in orbits for i in orbit) == list(range(d))


class TestAngle:
    @pytest.mark.parametrize(
        "text,q,r",
        [
            ("theta", 0, 1),
            ("-theta", 0, -1),
            ("2*theta", 0, 2),
            ("1/2*theta+3/4", Fraction(3, 4), Fraction(1, 2)),
            ("theta+1/4", Fraction(1, 4), 1),
            ("-theta+1/8", Fraction(1, 8), -1),
            ("1/4", Fraction(1, 4), 0),
        ],
    )
    def test_parse(self, text, q, r):
        angle = Angle.parse(text)
        assert angle == Angle(Fraction(q), Fraction(r))

    def test_str_round_trip(self):
        for angle in (Angle(Fraction(1, 8), Fraction(-1)), Angle(Fraction(0), Fraction(1, 2))):
            assert Angle.parse(str(angle)) == angle

    def test_json_round_trip(self):
        angle = Angle(Fraction(3, 4), Fraction(-2, 3))
        assert Angle.from_json(angle.to_json()) == angle
