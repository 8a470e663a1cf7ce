import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import bdlab.scalar as scalar_mod
from bdlab.errors import BudgetError
from bdlab.scalar import Scalar, cyclotomic_polynomial, euler_phi

e = Scalar.root_of_unity
t = Scalar.t_power
rat = Scalar.from_rational


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@pytest.mark.parametrize("n", list(range(1, 31)) + [36, 60, 105])
def test_cyclotomic_product_over_divisors(n):
    # oracle: prod_{d | n} Phi_d(x) = x^n - 1
    prod = [1]
    for d in range(1, n + 1):
        if n % d == 0:
            prod = poly_mul(prod, list(cyclotomic_polynomial(d)))
    expected = [-1] + [0] * (n - 1) + [1]
    assert prod == expected
    assert len(cyclotomic_polynomial(n)) - 1 == euler_phi(n)


def test_add_examples():
    assert (e(Fraction(1, 3)) + e(Fraction(2, 3)) + rat(1)).is_zero()
    assert t(1) + Scalar.zero() == t(1)
    half_t2 = Scalar.term(Fraction(1, 2), theta=2)
    assert half_t2 + half_t2 == t(2)


def test_mul_examples():
    assert e(Fraction(1, 4)) * e(Fraction(1, 4)) == e(Fraction(1, 2))
    assert t(1) * t(-1) == Scalar.one()
    assert e(Fraction(1, 2)) * e(Fraction(1, 2)) == Scalar.one()


def test_star_examples():
    assert t(1).star() == t(-1)
    assert e(Fraction(1, 3)).star() == e(Fraction(2, 3))
    assert rat(Fraction(3, 5)).star() == rat(Fraction(3, 5))


def test_eq_examples():
    assert e(Fraction(1, 3)) + e(Fraction(2, 3)) == rat(-1)
    assert not (t(1) == e(Fraction(1, 2)))
    assert Scalar() == Scalar.zero()


def test_equality_is_value_equality_across_conductors():
    # zeta_3 and zeta_6 - 1 are the same number with different stored forms
    lhs = e(Fraction(1, 3))
    rhs = e(Fraction(1, 6)) - rat(1)
    assert lhs.terms != rhs.terms
    assert lhs == rhs


def _random_scalar(rng, max_terms=2):
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        coeff = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        root = rng.choice([Fraction(0), Fraction(0), Fraction(1, 2), Fraction(1, 3),
                           Fraction(1, 4), Fraction(1, 6), Fraction(2, 3), Fraction(5, 6)])
        theta = Fraction(rng.choice([0, 0, 1, -1, 2]), rng.choice([1, 1, 2]))
        terms.append(((root, theta), coeff))
    return Scalar(terms)


def test_ring_axioms_1000_random_triples():
    rng = random.Random(13)
    for _ in range(1000):
        a, b, c = (_random_scalar(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a
        assert a * b == b * a


def test_normalization_idempotent():
    rng = random.Random(7)
    for _ in range(200):
        s = _random_scalar(rng, max_terms=3)
        assert Scalar(s.terms).terms == s.terms


def test_star_is_involutive_ring_automorphism():
    rng = random.Random(5)
    for _ in range(200):
        a, b = _random_scalar(rng), _random_scalar(rng)
        assert (a * b).star() == a.star() * b.star()
        assert (a + b).star() == a.star() + b.star()
        assert a.star().star() == a


def test_numerical_soundness():
    rng = random.Random(3)
    for _ in range(100):
        a, b = _random_scalar(rng), _random_scalar(rng)
        theta0 = Fraction(rng.randint(1, 30), 31)
        assert abs((a + b).evaluate(theta0) - (a.evaluate(theta0) + b.evaluate(theta0))) < 1e-12
        assert abs((a * b).evaluate(theta0) - a.evaluate(theta0) * b.evaluate(theta0)) < 1e-12


@given(st.integers(-6, 6), st.integers(1, 6), st.integers(-4, 4), st.integers(1, 4))
def test_root_exponents_add_mod_one(num1, den1, num2, den2):
    r1, r2 = Fraction(num1, den1), Fraction(num2, den2)
    assert e(r1) * e(r2) == e((r1 + r2) % 1)


fractions_st = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 6))
scalar_terms = st.tuples(st.tuples(fractions_st, fractions_st), fractions_st)
scalars = st.builds(Scalar, st.lists(scalar_terms, max_size=3))


@given(scalars, scalars, scalars)
def test_ring_axioms_property(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + Scalar.zero() == a
    assert a * Scalar.one() == a


@given(scalars, scalars)
def test_star_property(a, b):
    assert (a * b).star() == a.star() * b.star()
    assert a.star().star() == a


@given(scalars)
def test_json_round_trip_property(a):
    assert Scalar.from_json(a.to_json()) == a


def test_conductor_limit(monkeypatch):
    monkeypatch.setattr(scalar_mod, "CONDUCTOR_LIMIT", 100)
    with pytest.raises(BudgetError):
        e(Fraction(1, 101)) + e(Fraction(1, 3))


def test_json_round_trip_and_canonical_order():
    s = Scalar.term(Fraction(2, 3), root=Fraction(1, 6), theta=Fraction(-1, 2)) + t(1) + rat(5)
    data = s.to_json()
    assert data == sorted(data, key=lambda d: (Fraction(d["theta"]), Fraction(d["root"])))
    assert Scalar.from_json(data) == s
    assert all(set(item) == {"coeff", "root", "theta"} for item in data)


def test_zero_never_stored():
    s = rat(1) + rat(-1)
    assert s.terms == {}
    assert not s
