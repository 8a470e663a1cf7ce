"""Exact scalar arithmetic for all coefficients in the library.

A scalar is a finite rational combination of basis monomials e(r) * t^s where
e(r) stands for the root of unity exp(2*pi*i*r) with rational r in [0, 1), and
t is a formal unit-circle symbol (morally exp(2*pi*i*theta) for a fixed formal
irrational theta) carrying a rational exponent s.  Distinct theta exponents
never interact: t is transcendental over the cyclotomics by fiat.

Canonical form: within each fixed theta exponent, the root-of-unity
combination is reduced modulo the N-th cyclotomic polynomial, N being the lcm
of the root-exponent denominators, under the identification e(a/N) = zeta_N^a.
Since 1, zeta_N, ..., zeta_N^(phi(N)-1) form a basis of the cyclotomic field,
a reduced combination is zero exactly when it has no terms, which makes
equality decidable: x == y iff (x - y) normalises to the empty sum.  Note the
stored form still depends on the conductor the terms arrived with (e.g.
zeta_3 and zeta_6 - 1 are the same number in different clothes), so equality
always goes through subtraction rather than comparing term maps.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Mapping, Union

from .errors import BudgetError

RationalLike = Union[int, Fraction]

#: Root-exponent denominators above this bound are rejected rather than
#: reduced; guards against runaway conductors from pathological inputs.
CONDUCTOR_LIMIT = 10**6


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def format_fraction(value: RationalLike) -> str:
    return str(Fraction(value))


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result = n
    p, m = 2, n
    while p * p <= m:
        if m % p == 0:
            result -= result // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    # den is monic with integer coefficients; the division must be exact.
    num = list(num)
    deg = len(den) - 1
    quot = [0] * (len(num) - deg)
    for i in range(len(num) - 1, deg - 1, -1):
        c = num[i]
        if c:
            quot[i - deg] = c
            for j, dc in enumerate(den):
                num[i - deg + j] -= c * dc
    if any(num[:deg]):
        raise ArithmeticError("cyclotomic division left a remainder")
    return quot


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, index = degree."""
    if n == 1:
        return (-1, 1)
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_div_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _reduce_root_group(group: dict[Fraction, Fraction]) -> dict[Fraction, Fraction]:
    """Reduce a root-exponent -> coefficient map modulo the joint conductor."""
    group = {r: c for r, c in group.items() if c}
    if not group:
        return group
    conductor = 1
    for r in group:
        conductor = lcm(conductor, r.denominator)
    if conductor > CONDUCTOR_LIMIT:
        raise BudgetError(f"root-of-unity conductor {conductor} exceeds limit {CONDUCTOR_LIMIT}")
    if conductor == 1:
        return group
    phi = euler_phi(conductor)
    exps = {r.numerator * (conductor // r.denominator): c for r, c in group.items()}
    if all(a < phi for a in exps):
        return group
    coeffs = [Fraction(0)] * conductor
    for a, c in exps.items():
        coeffs[a] += c
    den = cyclotomic_polynomial(conductor)
    for i in range(conductor - 1, phi - 1, -1):
        c = coeffs[i]
        if c:
            for j in range(len(den)):
                coeffs[i - phi + j] -= c * den[j]
    return {Fraction(a, conductor): c for a, c in enumerate(coeffs[:phi]) if c}


def _normalize(raw: Iterable[tuple[tuple[Fraction, Fraction], Fraction]]) -> dict:
    by_theta: dict[Fraction, dict[Fraction, Fraction]] = {}
    for (root, theta), coeff in raw:
        coeff = Fraction(coeff)
        if not coeff:
            continue
        root = Fraction(root) % 1
        theta = Fraction(theta)
        group = by_theta.setdefault(theta, {})
        group[root] = group.get(root, Fraction(0)) + coeff
    terms = {}
    for theta, group in by_theta.items():
        for root, coeff in _reduce_root_group(group).items():
            terms[(root, theta)] = coeff
    return terms


class Scalar:
    """Immutable exact scalar; supports +, -, *, star() and complete equality."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable | Mapping = (), *, _canonical: bool = False):
        if isinstance(terms, Mapping):
            terms = terms.items()
        self._terms = dict(terms) if _canonical else _normalize(terms)

    @staticmethod
    def zero() -> Scalar:
        return Scalar((), _canonical=True)

    @staticmethod
    def one() -> Scalar:
        return Scalar.from_rational(1)

    @staticmethod
    def from_rational(value: RationalLike) -> Scalar:
        value = Fraction(value)
        if not value:
            return Scalar.zero()
        return Scalar({(Fraction(0), Fraction(0)): value}, _canonical=True)

    @staticmethod
    def root_of_unity(root: RationalLike) -> Scalar:
        """e(root) = exp(2*pi*i*root)."""
        return Scalar([((Fraction(root), Fraction(0)), Fraction(1))])

    @staticmethod
    def t_power(exponent: RationalLike) -> Scalar:
        return Scalar({(Fraction(0), Fraction(exponent)): Fraction(1)}, _canonical=True)

    @staticmethod
    def term(coeff: RationalLike, root: RationalLike = 0, theta: RationalLike = 0) -> Scalar:
        return Scalar([((Fraction(root), Fraction(theta)), Fraction(coeff))])

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(root == 0 and theta == 0 for root, theta in self._terms)

    def as_rational(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"not a rational scalar: {self!r}")
        return next(iter(self._terms.values()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other) -> Scalar:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        merged = dict(self._terms)
        for key, coeff in other._terms.items():
            total = merged.get(key, Fraction(0)) + coeff
            if total:
                merged[key] = total
            else:
                merged.pop(key, None)
        # Joining two canonical forms can raise the conductor, so re-reduce.
        return Scalar(merged.items())

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar({k: -c for k, c in self._terms.items()}, _canonical=True)

    def __sub__(self, other) -> Scalar:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Scalar:
        return _coerce(other) + (-self)

    def __mul__(self, other) -> Scalar:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._terms or not other._terms:
            return Scalar.zero()
        raw: dict[tuple[Fraction, Fraction], Fraction] = {}
        for (r1, t1), c1 in self._terms.items():
            for (r2, t2), c2 in other._terms.items():
                key = ((r1 + r2) % 1, t1 + t2)
                raw[key] = raw.get(key, Fraction(0)) + c1 * c2
        return Scalar(raw.items())

    __rmul__ = __mul__

    def star(self) -> Scalar:
        """Complex conjugation: e(r) -> e(-r), t^s -> t^(-s), rationals fixed."""
        return Scalar([(((-root) % 1, -theta), coeff) for (root, theta), coeff in self._terms.items()])

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def evaluate(self, theta_value: float | Fraction) -> complex:
        """Numeric value with t = exp(2*pi*i*theta_value)."""
        tv = float(theta_value)
        total = 0j
        for (root, theta), coeff in self._terms.items():
            total += float(coeff) * cmath.exp(2j * cmath.pi * (float(root) + theta * tv))
        return total

    def to_json(self) -> list[dict[str, str]]:
        items = sorted(self._terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        return [
            {"coeff": format_fraction(c), "root": format_fraction(r), "theta": format_fraction(t)}
            for (r, t), c in items
        ]

    @staticmethod
    def from_json(data: list[dict[str, str]]) -> Scalar:
        terms = [
            (
                (parse_fraction(item.get("root", "0")), parse_fraction(item.get("theta", "0"))),
                parse_fraction(item["coeff"]),
            )
            for item in data
        ]
        return Scalar(terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (root, theta), coeff in sorted(self._terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            factors = []
            if coeff != 1 or (root == 0 and theta == 0):
                factors.append(str(coeff))
            if root:
                factors.append(f"e({root})")
            if theta:
                factors.append(f"t^({theta})" if theta != 1 else "t")
            parts.append("*".join(factors))
        return " + ".join(parts)


def _coerce(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction)):
        return Scalar.from_rational(value)
    return NotImplemented


ZERO = Scalar.zero()
ONE = Scalar.one()
