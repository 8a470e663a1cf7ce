"""Coefficient *-algebras with a distinguished automorphism.

Two concrete instances back everything downstream:

* ``CircleRotation(angle)``: trigonometric polynomials sum c_m z^m on the
  circle, with alpha rotating by the angle q + r*theta.  On a monomial,
  alpha^m(z^p) = e(-p*m*q) * t^(-p*m*r) * z^p, i.e. rotation only twists the
  coefficient by an exact phase.
* ``FiniteCyclicShift(d)``: functions on Z/d with alpha the cyclic shift; a
  finite testbed for the invariant-ideal and trace-uniqueness questions.

Both are dense *-subalgebras of their C*-completions; every identity checked
in this library is a polynomial identity, so exactness costs nothing.
Elements are immutable and operations are pure.  trace0 is the canonical
invariant state: the z^0 coefficient, resp. the uniform average.

Positivity of elements is deliberately not modelled: the identities verified
downstream are linear in any weights involved, so arbitrary elements may
stand in where the operator picture would ask for positive ones.
"""

from __future__ import annotations

import random
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import BudgetError, MismatchError
from .scalar import Scalar, format_fraction, parse_fraction

#: z-degree above which circle-function products are rejected.
DEGREE_CAP = 64

_ROOT_CHOICES = (0, 0, 0, 0, Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 6))
_THETA_CHOICES = (0, 0, 0, 1, -1, 2)


def sample_scalar(rng: random.Random) -> Scalar:
    coeff = Fraction(rng.choice((-3, -2, -1, 1, 1, 2, 3)), rng.choice((1, 1, 2, 3)))
    return Scalar.term(coeff, root=rng.choice(_ROOT_CHOICES), theta=Fraction(rng.choice(_THETA_CHOICES)))


@dataclass(frozen=True)
class Angle:
    """A rotation angle q + r*theta with rational q, r and theta formal."""

    q: Fraction
    r: Fraction

    def scaled(self, factor: Fraction | int) -> Angle:
        factor = Fraction(factor)
        return Angle(self.q * factor, self.r * factor)

    @staticmethod
    def parse(text: str) -> Angle:
        """Parse 'q+r*theta' style input, e.g. 'theta', '-theta+1/8', '1/2*theta+3/4'."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty angle")
        q = Fraction(0)
        r = Fraction(0)
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            factor = Fraction(-1 if sign == "-" else 1)
            if body.endswith("theta"):
                head = body[: -len("theta")].rstrip("*")
                r += factor * (Fraction(head) if head else 1)
            else:
                q += factor * Fraction(body)
        return Angle(q, r)

    def __str__(self) -> str:
        if self.r == 0:
            return str(self.q)
        r = "theta" if self.r == 1 else ("-theta" if self.r == -1 else f"{self.r}*theta")
        if self.q == 0:
            return r
        return f"{r}+{self.q}" if self.q > 0 else f"{r}{self.q}"

    def to_json(self) -> dict:
        return {"q": format_fraction(self.q), "r": format_fraction(self.r)}

    @staticmethod
    def from_json(data: dict) -> Angle:
        return Angle(parse_fraction(data["q"]), parse_fraction(data["r"]))


class CircleFunction:
    """Trigonometric polynomial sum c_m z^m with Scalar coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, Scalar] | None = None):
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if not c.is_zero()}

    @staticmethod
    def zero() -> CircleFunction:
        return CircleFunction()

    @staticmethod
    def one() -> CircleFunction:
        return CircleFunction({0: Scalar.one()})

    @staticmethod
    def z(power: int = 1, coeff: Scalar | None = None) -> CircleFunction:
        return CircleFunction({power: coeff if coeff is not None else Scalar.one()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def z_degree(self) -> int:
        return max((abs(m) for m in self.coeffs), default=0)

    def __add__(self, other: CircleFunction) -> CircleFunction:
        merged = dict(self.coeffs)
        for m, c in other.coeffs.items():
            merged[m] = merged.get(m, Scalar.zero()) + c
        return CircleFunction(merged)

    def __neg__(self) -> CircleFunction:
        return CircleFunction({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: CircleFunction) -> CircleFunction:
        return self + (-other)

    def __mul__(self, other: CircleFunction) -> CircleFunction:
        out: dict[int, Scalar] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = m1 + m2
                if abs(m) > DEGREE_CAP:
                    raise BudgetError(f"z-degree {m} exceeds cap {DEGREE_CAP}")
                prod = c1 * c2
                out[m] = out.get(m, Scalar.zero()) + prod
        return CircleFunction(out)

    def scale(self, scalar: Scalar) -> CircleFunction:
        return CircleFunction({m: scalar * c for m, c in self.coeffs.items()})

    def star(self) -> CircleFunction:
        return CircleFunction({-m: c.star() for m, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, CircleFunction):
            return NotImplemented
        return (self - other).is_zero()

    def evaluate(self, theta_value: float, point: float) -> complex:
        """Numeric value at z = exp(2*pi*i*point) with t = exp(2*pi*i*theta_value)."""
        import cmath

        return sum(
            c.evaluate(theta_value) * cmath.exp(2j * cmath.pi * m * point)
            for m, c in self.coeffs.items()
        )

    def to_json(self) -> dict:
        return {f"z:{m}": self.coeffs[m].to_json() for m in sorted(self.coeffs)}

    @staticmethod
    def from_json(data: dict) -> CircleFunction:
        coeffs = {}
        for key, val in data.items():
            if not key.startswith("z:"):
                raise ValueError(f"bad circle-function key {key!r}")
            coeffs[int(key[2:])] = Scalar.from_json(val)
        return CircleFunction(coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({self.coeffs[m]!r})*z^{m}" if m else f"({self.coeffs[m]!r})" for m in sorted(self.coeffs))


class FiniteCyclicFunction:
    """A Scalar-valued function on Z/d."""

    __slots__ = ("modulus", "values")

    def __init__(self, modulus: int, values):
        values = tuple(values)
        if len(values) != modulus:
            raise MismatchError(f"expected {modulus} values, got {len(values)}")
        self.modulus = modulus
        self.values = values

    @staticmethod
    def constant(modulus: int, value: Scalar) -> FiniteCyclicFunction:
        return FiniteCyclicFunction(modulus, (value,) * modulus)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def _check(self, other: FiniteCyclicFunction) -> None:
        if self.modulus != other.modulus:
            raise MismatchError("modulus mismatch")

    def __add__(self, other: FiniteCyclicFunction) -> FiniteCyclicFunction:
        self._check(other)
        return FiniteCyclicFunction(self.modulus, (a + b for a, b in zip(self.values, other.values)))

    def __neg__(self) -> FiniteCyclicFunction:
        return FiniteCyclicFunction(self.modulus, (-a for a in self.values))

    def __sub__(self, other: FiniteCyclicFunction) -> FiniteCyclicFunction:
        return self + (-other)

    def __mul__(self, other: FiniteCyclicFunction) -> FiniteCyclicFunction:
        self._check(other)
        return FiniteCyclicFunction(self.modulus, (a * b for a, b in zip(self.values, other.values)))

    def scale(self, scalar: Scalar) -> FiniteCyclicFunction:
        return FiniteCyclicFunction(self.modulus, (scalar * a for a in self.values))

    def star(self) -> FiniteCyclicFunction:
        return FiniteCyclicFunction(self.modulus, (a.star() for a in self.values))

    def shifted(self, m: int) -> FiniteCyclicFunction:
        d = self.modulus
        return FiniteCyclicFunction(d, (self.values[(i - m) % d] for i in range(d)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteCyclicFunction):
            return NotImplemented
        return self.modulus == other.modulus and all(a == b for a, b in zip(self.values, other.values))

    def to_json(self) -> dict:
        return {"d": self.modulus, "values": [v.to_json() for v in self.values]}

    @staticmethod
    def from_json(data: dict) -> FiniteCyclicFunction:
        return FiniteCyclicFunction(int(data["d"]), (Scalar.from_json(v) for v in data["values"]))

    def __repr__(self) -> str:
        return f"FiniteCyclicFunction({self.modulus}, {list(self.values)!r})"


class CoefficientAlgebra(ABC):
    """Operations of the coefficient *-algebra (A, alpha) used downstream."""

    @abstractmethod
    def zero(self): ...

    @abstractmethod
    def one(self): ...

    @abstractmethod
    def alpha_power(self, element, power: int):
        """Apply alpha^power; a *-automorphism for every integer power."""

    @abstractmethod
    def trace0(self, element) -> Scalar:
        """The alpha-invariant tracial state on the dense subalgebra."""

    @abstractmethod
    def sample(self, rng: random.Random, degree: int = 2):
        """A random element with degree/support bounded by ``degree``."""

    @abstractmethod
    def tag(self) -> dict:
        """JSON tag identifying the algebra, sufficient to reconstruct it."""

    @abstractmethod
    def composite_tag(self, power: int) -> tuple:
        """Canonical identity of the automorphism alpha^power (for retags)."""

    @abstractmethod
    def element_to_json(self, element) -> dict: ...

    @abstractmethod
    def element_from_json(self, data: dict): ...

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def mul(self, x, y):
        return x * y

    def star(self, x):
        return x.star()

    def eq(self, x, y) -> bool:
        return x == y

    def is_zero(self, x) -> bool:
        return x.is_zero()

    @staticmethod
    def from_tag(data: dict) -> CoefficientAlgebra:
        kind = data.get("kind")
        if kind == "circle":
            return CircleRotation(Angle.from_json(data["angle"]))
        if kind == "cyclic":
            return FiniteCyclicShift(int(data["d"]))
        raise ValueError(f"unknown algebra tag {data!r}")


@dataclass(frozen=True)
class CircleRotation(CoefficientAlgebra):
    """C(T) trigonometric polynomials with alpha = rotation by q + r*theta."""

    angle: Angle

    def zero(self) -> CircleFunction:
        return CircleFunction.zero()

    def one(self) -> CircleFunction:
        return CircleFunction.one()

    def alpha_power(self, element: CircleFunction, power: int) -> CircleFunction:
        if power == 0 or element.is_zero():
            return element
        return CircleFunction({m: self._phase(m, power) * c for m, c in element.coeffs.items()})

    def _phase(self, z_power: int, alpha_power: int) -> Scalar:
        # alpha^m(z^p) picks up e(-p*m*q) * t^(-p*m*r)
        e = z_power * alpha_power
        return Scalar.term(1, root=(-e * self.angle.q) % 1, theta=-e * self.angle.r)

    def trace0(self, element: CircleFunction) -> Scalar:
        return element.coeffs.get(0, Scalar.zero())

    def sample(self, rng: random.Random, degree: int = 2) -> CircleFunction:
        coeffs = {}
        for _ in range(rng.randint(1, 2)):
            coeffs[rng.randint(-degree, degree)] = sample_scalar(rng)
        return CircleFunction(coeffs)

    def tag(self) -> dict:
        return {"kind": "circle", "angle": self.angle.to_json()}

    def composite_tag(self, power: int) -> tuple:
        return ("circle", (self.angle.q * power) % 1, self.angle.r * power)

    def element_to_json(self, element: CircleFunction) -> dict:
        return element.to_json()

    def element_from_json(self, data: dict) -> CircleFunction:
        return CircleFunction.from_json(data)


@dataclass(frozen=True)
class FiniteCyclicShift(CoefficientAlgebra):
    """Functions on Z/d with alpha the shift i -> i+1."""

    d: int

    def zero(self) -> FiniteCyclicFunction:
        return FiniteCyclicFunction.constant(self.d, Scalar.zero())

    def one(self) -> FiniteCyclicFunction:
        return FiniteCyclicFunction.constant(self.d, Scalar.one())

    def alpha_power(self, element: FiniteCyclicFunction, power: int) -> FiniteCyclicFunction:
        if element.modulus != self.d:
            raise MismatchError("modulus mismatch")
        return element.shifted(power)

    def trace0(self, element: FiniteCyclicFunction) -> Scalar:
        total = Scalar.zero()
        for v in element.values:
            total = total + v
        return Fraction(1, self.d) * total

    def sample(self, rng: random.Random, degree: int = 2) -> FiniteCyclicFunction:
        return FiniteCyclicFunction(
            self.d,
            (sample_scalar(rng) if rng.random() < 0.6 else Scalar.zero() for _ in range(self.d)),
        )

    def tag(self) -> dict:
        return {"kind": "cyclic", "d": self.d}

    def composite_tag(self, power: int) -> tuple:
        return ("cyclic", self.d, power % self.d)

    def element_to_json(self, element: FiniteCyclicFunction) -> dict:
        return element.to_json()

    def element_from_json(self, data: dict) -> FiniteCyclicFunction:
        return FiniteCyclicFunction.from_json(data)


def cyclic_orbits(d: int, n: int) -> list[frozenset[int]]:
    """Orbits of i -> i+n on Z/d."""
    seen: set[int] = set()
    orbits = []
    for start in range(d):
        if start in seen:
            continue
        orbit = set()
        i = start
        while i not in orbit:
            orbit.add(i)
            i = (i + n) % d
        seen |= orbit
        orbits.append(frozenset(orbit))
    return orbits


def cyclic_invariant_ideal_search(d: int, n: int) -> frozenset[int] | None:
    """A nonempty proper shift-by-n invariant subset of Z/d, if one exists.

    The subset indexes the ideal of functions vanishing off it.  Invariant
    subsets are exactly unions of orbits, so a single orbit is returned as
    witness whenever there is more than one; None means Z/d is one orbit
    (equivalently gcd(n, d) == 1).
    """
    orbits = cyclic_orbits(d, n)
    if len(orbits) == 1:
        return None
    return orbits[0]


def single_orbit(d: int, n: int) -> bool:
    return gcd(n, d) == 1
