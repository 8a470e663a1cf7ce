"""Stage algebras: twisted Laurent sums and matrices over them.

A ``CrossedElement`` is a finite sum  sum_l a_l u^l  over a coefficient
algebra (A, alpha), where the unitary u twists by a fixed power n of alpha:

    u * a = alpha^n(a) * u

so multiplication is the twisted convolution
(a u^l)(b u^r) = a * alpha^(n*l)(b) * u^(l+r)  and the involution is
(a u^l)* = alpha^(-n*l)(a*) u^(-l).  Only finite sums are represented; this
is the dense *-subalgebra of the crossed product, which is where every
identity verified in this library lives.

``MatrixElement`` wraps square matrices of crossed elements sharing one
(algebra, power) pair; stage algebras take power == size, but the power is
kept separate so that p x p blocks of n x n stage matrices can be flattened
before the amplification shuffle re-tags them.

Zero coefficients are pruned eagerly so structural emptiness means zero, and
u-degrees are capped to reject runaway products.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .coeff import CoefficientAlgebra
from .errors import BudgetError, MismatchError
from .scalar import Scalar

#: u-degree above which crossed products are rejected.
DEGREE_CAP = 64


class CrossedElement:
    """A finite sum  sum_l a_l u^l  in A x_(alpha^power) Z."""

    __slots__ = ("algebra", "power", "coeffs")

    def __init__(self, algebra: CoefficientAlgebra, power: int, coeffs: dict | None = None):
        self.algebra = algebra
        self.power = power
        self.coeffs = {l: a for l, a in (coeffs or {}).items() if not a.is_zero()}

    @staticmethod
    def zero(algebra: CoefficientAlgebra, power: int) -> CrossedElement:
        return CrossedElement(algebra, power)

    @staticmethod
    def unit(algebra: CoefficientAlgebra, power: int) -> CrossedElement:
        return CrossedElement(algebra, power, {0: algebra.one()})

    @staticmethod
    def from_coefficient(algebra: CoefficientAlgebra, power: int, a) -> CrossedElement:
        return CrossedElement(algebra, power, {0: a})

    @staticmethod
    def monomial(algebra: CoefficientAlgebra, power: int, a, u_exponent: int) -> CrossedElement:
        return CrossedElement(algebra, power, {u_exponent: a})

    @staticmethod
    def u_power(algebra: CoefficientAlgebra, power: int, u_exponent: int = 1) -> CrossedElement:
        return CrossedElement(algebra, power, {u_exponent: algebra.one()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def u_degree(self) -> int:
        return max((abs(l) for l in self.coeffs), default=0)

    def _check(self, other: CrossedElement) -> None:
        if self.algebra != other.algebra or self.power != other.power:
            raise MismatchError("crossed elements from different stage algebras")

    def __add__(self, other: CrossedElement) -> CrossedElement:
        self._check(other)
        merged = dict(self.coeffs)
        for l, a in other.coeffs.items():
            merged[l] = merged[l] + a if l in merged else a
        return CrossedElement(self.algebra, self.power, merged)

    def __neg__(self) -> CrossedElement:
        return CrossedElement(self.algebra, self.power, {l: -a for l, a in self.coeffs.items()})

    def __sub__(self, other: CrossedElement) -> CrossedElement:
        return self + (-other)

    def __mul__(self, other: CrossedElement) -> CrossedElement:
        self._check(other)
        alg, n = self.algebra, self.power
        out: dict[int, object] = {}
        for l, a in self.coeffs.items():
            for r, b in other.coeffs.items():
                e = l + r
                if abs(e) > DEGREE_CAP:
                    raise BudgetError(f"u-degree {e} exceeds cap {DEGREE_CAP}")
                term = a * alg.alpha_power(b, n * l)
                out[e] = out[e] + term if e in out else term
        return CrossedElement(alg, n, out)

    def scale(self, scalar: Scalar | int | Fraction) -> CrossedElement:
        if isinstance(scalar, (int, Fraction)):
            scalar = Scalar.from_rational(scalar)
        return CrossedElement(self.algebra, self.power, {l: a.scale(scalar) for l, a in self.coeffs.items()})

    def star(self) -> CrossedElement:
        alg, n = self.algebra, self.power
        return CrossedElement(
            alg, n, {-l: alg.alpha_power(a.star(), -n * l) for l, a in self.coeffs.items()}
        )

    def expectation(self):
        """Conditional expectation onto A: the u^0 coefficient."""
        return self.coeffs.get(0, self.algebra.zero())

    def trace(self) -> Scalar:
        """trace0 of the conditional expectation; tracial on the dense subalgebra."""
        return self.algebra.trace0(self.expectation())

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrossedElement):
            return NotImplemented
        self._check(other)
        return (self - other).is_zero()

    def to_json(self) -> dict:
        return {
            "n": self.power,
            "algebra": self.algebra.tag(),
            "coeffs": {f"u:{l}": self.algebra.element_to_json(self.coeffs[l]) for l in sorted(self.coeffs)},
        }

    @staticmethod
    def from_json(data: dict, algebra: CoefficientAlgebra | None = None) -> CrossedElement:
        if algebra is None:
            algebra = CoefficientAlgebra.from_tag(data["algebra"])
        coeffs = {}
        for key, val in data.get("coeffs", {}).items():
            if not key.startswith("u:"):
                raise ValueError(f"bad crossed-element key {key!r}")
            coeffs[int(key[2:])] = algebra.element_from_json(val)
        return CrossedElement(algebra, int(data["n"]), coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({self.coeffs[l]!r})*u^{l}" if l else f"({self.coeffs[l]!r})" for l in sorted(self.coeffs))


def sample_crossed(
    algebra: CoefficientAlgebra,
    power: int,
    rng: random.Random,
    u_degree: int = 2,
    coeff_degree: int = 2,
) -> CrossedElement:
    coeffs = {}
    for _ in range(rng.randint(1, 2)):
        coeffs[rng.randint(-u_degree, u_degree)] = algebra.sample(rng, coeff_degree)
    return CrossedElement(algebra, power, coeffs)


class MatrixElement:
    """A size x size matrix over one crossed-product algebra."""

    __slots__ = ("algebra", "power", "size", "entries")

    def __init__(self, algebra: CoefficientAlgebra, power: int, size: int, entries: dict | None = None):
        self.algebra = algebra
        self.power = power
        self.size = size
        clean = {}
        for (i, j), x in (entries or {}).items():
            if not (0 <= i < size and 0 <= j < size):
                raise MismatchError(f"entry ({i},{j}) outside {size}x{size} matrix")
            if x.algebra != algebra or x.power != power:
                raise MismatchError("matrix entry from a different stage algebra")
            if not x.is_zero():
                clean[(i, j)] = x
        self.entries = clean

    @staticmethod
    def zero(algebra: CoefficientAlgebra, power: int, size: int) -> MatrixElement:
        return MatrixElement(algebra, power, size)

    @staticmethod
    def identity(algebra: CoefficientAlgebra, power: int, size: int) -> MatrixElement:
        unit = CrossedElement.unit(algebra, power)
        return MatrixElement(algebra, power, size, {(i, i): unit for i in range(size)})

    @staticmethod
    def single(algebra: CoefficientAlgebra, power: int, size: int, i: int, j: int, x: CrossedElement | None = None) -> MatrixElement:
        """x * e_{i,j}; with x omitted, the matrix unit e_{i,j}."""
        if x is None:
            x = CrossedElement.unit(algebra, power)
        return MatrixElement(algebra, power, size, {(i, j): x})

    def is_zero(self) -> bool:
        return not self.entries

    def entry(self, i: int, j: int) -> CrossedElement:
        return self.entries.get((i, j), CrossedElement.zero(self.algebra, self.power))

    def _check(self, other: MatrixElement) -> None:
        if self.algebra != other.algebra or self.power != other.power or self.size != other.size:
            raise MismatchError("matrix elements from different stage algebras")

    def __add__(self, other: MatrixElement) -> MatrixElement:
        self._check(other)
        merged = dict(self.entries)
        for key, x in other.entries.items():
            merged[key] = merged[key] + x if key in merged else x
        return MatrixElement(self.algebra, self.power, self.size, merged)

    def __neg__(self) -> MatrixElement:
        return MatrixElement(self.algebra, self.power, self.size, {k: -x for k, x in self.entries.items()})

    def __sub__(self, other: MatrixElement) -> MatrixElement:
        return self + (-other)

    def __mul__(self, other: MatrixElement) -> MatrixElement:
        self._check(other)
        by_row: dict[int, list[tuple[int, CrossedElement]]] = {}
        for (k, j), y in other.entries.items():
            by_row.setdefault(k, []).append((j, y))
        out: dict[tuple[int, int], CrossedElement] = {}
        for (i, k), x in self.entries.items():
            for j, y in by_row.get(k, ()):
                prod = x * y
                key = (i, j)
                out[key] = out[key] + prod if key in out else prod
        return MatrixElement(self.algebra, self.power, self.size, out)

    def star(self) -> MatrixElement:
        return MatrixElement(
            self.algebra, self.power, self.size, {(j, i): x.star() for (i, j), x in self.entries.items()}
        )

    def trace(self) -> Scalar:
        """Normalized matrix trace (1/size) * sum of diagonal stage traces."""
        total = Scalar.zero()
        for i in range(self.size):
            x = self.entries.get((i, i))
            if x is not None:
                total = total + x.trace()
        return Fraction(1, self.size) * total

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixElement):
            return NotImplemented
        self._check(other)
        return (self - other).is_zero()

    def with_twist(self, algebra: CoefficientAlgebra, power: int) -> MatrixElement:
        """Re-tag entries under a different (algebra, power) presenting the same twist.

        Valid only when alpha_old^old_power == alpha_new^new_power as
        automorphisms, e.g. rotation stages (theta, n) vs (theta/p, p*n).
        """
        if self.algebra.composite_tag(self.power) != algebra.composite_tag(power):
            raise MismatchError("incompatible twist re-tag")
        entries = {
            key: CrossedElement(algebra, power, dict(x.coeffs)) for key, x in self.entries.items()
        }
        return MatrixElement(algebra, power, self.size, entries)

    def to_json(self) -> dict:
        rows = [[self.entry(i, j).to_json() for j in range(self.size)] for i in range(self.size)]
        return {"size": self.size, "entries": rows}

    @staticmethod
    def from_json(data: dict, algebra: CoefficientAlgebra | None = None) -> MatrixElement:
        size = int(data["size"])
        rows = data["entries"]
        entries = {}
        power = None
        for i in range(size):
            for j in range(size):
                x = CrossedElement.from_json(rows[i][j], algebra)
                if algebra is None:
                    algebra = x.algebra
                if power is None:
                    power = x.power
                entries[(i, j)] = x
        if power is None:
            raise ValueError("empty matrix JSON")
        return MatrixElement(algebra, power, size, entries)

    def __repr__(self) -> str:
        body = ", ".join(f"({i},{j}): {x!r}" for (i, j), x in sorted(self.entries.items()))
        return f"Matrix{self.size}[{body}]"


def sample_matrix(
    algebra: CoefficientAlgebra,
    power: int,
    size: int,
    rng: random.Random,
    u_degree: int = 2,
    coeff_degree: int = 2,
    density: float = 0.5,
) -> MatrixElement:
    entries = {}
    for i in range(size):
        for j in range(size):
            if rng.random() < density:
                entries[(i, j)] = sample_crossed(algebra, power, rng, u_degree, coeff_degree)
    return MatrixElement(algebra, power, size, entries)
