"""Connecting maps between stages and the direct-limit bookkeeping.

For n | m (k = m/n) the unital injective *-homomorphism gamma_{n,m} from the
size-n stage into the size-m stage is determined by its generator images

    a e_00   |->  sum_{l<k} alpha^(l n)(a) e_{ln,ln}
    u_n e_00 |->  u_m e_{(k-1)n,0} + sum_{l<k-1} e_{ln,(l+1)n}
    e_{i,j}  |->  sum_{l<k} e_{i+ln,j+ln}

A general monomial a u^l e_{i,j} factors as e_{i,0} (a e_00) (u e_00)^l e_{0,j}
(with the star of the u-image for negative l), so gamma is computed by
multiplying generator images; multiplying by the e_{i,0}/e_{0,j} images just
shifts row indices by i and column indices by j, which is how it is coded.
The closed-form entry description lives in the test suite as an independent
oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .coeff import Angle, CircleRotation, CoefficientAlgebra
from .crossed import CrossedElement, MatrixElement, sample_matrix
from .errors import MismatchError
from .report import Report, case_rng


def check_divisibility_chain(sizes) -> tuple[int, ...]:
    sizes = tuple(int(s) for s in sizes)
    if not sizes or sizes[0] != 1:
        raise MismatchError("stage sequence must start with 1")
    for a, b in zip(sizes, sizes[1:]):
        if b % a != 0 or b < a:
            raise MismatchError(f"stage sizes must divide in order, got {a} then {b}")
    return sizes


def _coeff_image(algebra: CoefficientAlgebra, n: int, m: int, a) -> MatrixElement:
    k = m // n
    entries = {
        (c * n, c * n): CrossedElement.from_coefficient(algebra, m, algebra.alpha_power(a, c * n))
        for c in range(k)
    }
    return MatrixElement(algebra, m, m, entries)


def _u_image(algebra: CoefficientAlgebra, n: int, m: int) -> MatrixElement:
    k = m // n
    entries = {((k - 1) * n, 0): CrossedElement.u_power(algebra, m, 1)}
    unit = CrossedElement.unit(algebra, m)
    for c in range(k - 1):
        entries[(c * n, (c + 1) * n)] = unit
    return MatrixElement(algebra, m, m, entries)


def gamma(n: int, m: int, X: MatrixElement) -> MatrixElement:
    """Apply gamma_{n,m} to a size-n stage element."""
    if m % n != 0:
        raise MismatchError(f"{n} does not divide {m}")
    if X.size != n or X.power != n:
        raise MismatchError(f"expected a size-{n} stage element")
    if n == m:
        return X
    algebra = X.algebra
    V = _u_image(algebra, n, m)
    Vstar = V.star()
    powers = {0: MatrixElement.identity(algebra, m, m)}

    def vpow(l: int) -> MatrixElement:
        if l not in powers:
            powers[l] = vpow(l - 1) * V if l > 0 else vpow(l + 1) * Vstar
        return powers[l]

    acc: dict[tuple[int, int], CrossedElement] = {}
    for (i, j), x in X.entries.items():
        for l, a in x.coeffs.items():
            base = _coeff_image(algebra, n, m, a) * vpow(l)
            for (r, c), v in base.entries.items():
                key = (r + i, c + j)
                acc[key] = acc[key] + v if key in acc else v
    return MatrixElement(algebra, m, m, acc)


def gamma_left_inverse(n: int, m: int, Y: MatrixElement) -> MatrixElement | None:
    """Recover X with gamma_{n,m}(X) == Y, or None if Y is not in the image.

    The candidate is read off the first row-block: the image places the
    coefficient of u_n^l in entry (i, j) at position (i, j + (l mod k) n)
    with u_m-exponent floor(l / k).  The candidate is then pushed back
    through gamma to certify membership.
    """
    if m % n != 0:
        raise MismatchError(f"{n} does not divide {m}")
    if Y.size != m or Y.power != m:
        raise MismatchError(f"expected a size-{m} stage element")
    k = m // n
    entries = {}
    for i in range(n):
        for j in range(n):
            coeffs = {}
            for cp in range(k):
                y = Y.entries.get((i, j + cp * n))
                if y is None:
                    continue
                for e, b in y.coeffs.items():
                    coeffs[e * k + cp] = b
            if coeffs:
                entries[(i, j)] = CrossedElement(Y.algebra, n, coeffs)
    X = MatrixElement(Y.algebra, n, n, entries)
    return X if gamma(n, m, X) == Y else None


def gamma_chain(sizes, from_stage: int, to_stage: int, X: MatrixElement) -> MatrixElement:
    """Compose consecutive gammas along the configured sequence (1-based stages)."""
    sizes = check_divisibility_chain(sizes)
    if not (1 <= from_stage <= to_stage <= len(sizes)):
        raise MismatchError("stage outside the configured sequence")
    for stage in range(from_stage, to_stage):
        X = gamma(sizes[stage - 1], sizes[stage], X)
    return X


@dataclass(frozen=True)
class LimitElement:
    """A stage-tagged element of the direct limit; promotion is the identity."""

    sequence: tuple[int, ...]
    stage: int
    value: MatrixElement

    def __post_init__(self):
        sizes = check_divisibility_chain(self.sequence)
        object.__setattr__(self, "sequence", sizes)
        if not (1 <= self.stage <= len(sizes)):
            raise MismatchError("stage outside the configured sequence")
        if self.value.size != sizes[self.stage - 1]:
            raise MismatchError("value size does not match its stage")

    def promote(self, target_stage: int) -> LimitElement:
        if target_stage < self.stage:
            raise MismatchError("promotion must not decrease the stage")
        value = gamma_chain(self.sequence, self.stage, target_stage, self.value)
        return LimitElement(self.sequence, target_stage, value)

    def _align(self, other: LimitElement) -> tuple[MatrixElement, MatrixElement, int]:
        if self.sequence != other.sequence:
            raise MismatchError("limit elements over different stage sequences")
        stage = max(self.stage, other.stage)
        return self.promote(stage).value, other.promote(stage).value, stage

    def __add__(self, other: LimitElement) -> LimitElement:
        a, b, stage = self._align(other)
        return LimitElement(self.sequence, stage, a + b)

    def __mul__(self, other: LimitElement) -> LimitElement:
        a, b, stage = self._align(other)
        return LimitElement(self.sequence, stage, a * b)

    def star(self) -> LimitElement:
        return LimitElement(self.sequence, self.stage, self.value.star())

    def trace(self):
        return self.value.trace()

    def __eq__(self, other) -> bool:
        if not isinstance(other, LimitElement):
            return NotImplemented
        a, b, _ = self._align(other)
        return a == b

    def to_json(self) -> dict:
        return {"sequence": list(self.sequence), "stage": self.stage, "value": self.value.to_json()}

    @staticmethod
    def from_json(data: dict, algebra: CoefficientAlgebra | None = None) -> LimitElement:
        return LimitElement(
            tuple(data["sequence"]), int(data["stage"]), MatrixElement.from_json(data["value"], algebra)
        )


def amplification_shuffle(p: int, X: MatrixElement) -> MatrixElement:
    """Conjugate by the canonical shuffle M_p(M_n) -> M_{pn}.

    Row/column (b, i) of the p x p of n x n block picture, flattened as
    b*n + i, moves to position i*p + b.
    """
    if p < 1 or X.size % p != 0:
        raise MismatchError(f"size {X.size} is not a multiple of p={p}")
    n = X.size // p
    perm = {b * n + i: i * p + b for b in range(p) for i in range(n)}
    entries = {(perm[r], perm[c]): x for (r, c), x in X.entries.items()}
    return MatrixElement(X.algebra, X.power, X.size, entries)


def blockwise_gamma(p: int, n: int, m: int, X: MatrixElement) -> MatrixElement:
    """Apply gamma_{n,m} to each n x n block of a p x p block matrix."""
    if X.size != p * n or X.power != n:
        raise MismatchError("expected a p x p block matrix of size-n stage elements")
    algebra = X.algebra
    out: dict[tuple[int, int], CrossedElement] = {}
    for B in range(p):
        for C in range(p):
            block = {
                (i, j): X.entries[(B * n + i, C * n + j)]
                for i in range(n)
                for j in range(n)
                if (B * n + i, C * n + j) in X.entries
            }
            if not block:
                continue
            image = gamma(n, m, MatrixElement(algebra, n, n, block))
            for (i, j), v in image.entries.items():
                out[(B * m + i, C * m + j)] = v
    return MatrixElement(algebra, m, p * m, out)


def _stage_generators(algebra: CoefficientAlgebra, n: int, rng: random.Random) -> list[MatrixElement]:
    gens = [
        MatrixElement.single(algebra, n, n, 0, 0, CrossedElement.from_coefficient(algebra, n, algebra.one())),
        MatrixElement.single(algebra, n, n, 0, 0, CrossedElement.from_coefficient(algebra, n, algebra.sample(rng))),
        MatrixElement.single(algebra, n, n, 0, 0, CrossedElement.u_power(algebra, n)),
    ]
    gens.extend(MatrixElement.single(algebra, n, n, i, j) for i in range(n) for j in range(n))
    return gens


def verify_gamma_homomorphism(
    algebra: CoefficientAlgebra,
    n: int,
    m: int,
    seed: int,
    count: int,
    u_degree: int = 2,
    coeff_degree: int = 2,
) -> Report:
    report = Report(
        "gamma-hom",
        config={"n": n, "m": m, "algebra": algebra.tag(), "seed": seed, "count": count,
                "uDegree": u_degree, "coeffDegree": coeff_degree},
    )
    one_n = MatrixElement.identity(algebra, n, n)
    one_m = MatrixElement.identity(algebra, m, m)
    report.record("unital", gamma(n, m, one_n) == one_m, lhs=gamma(n, m, one_n), rhs=one_m)
    for idx in range(count):
        rng = case_rng(seed, idx)
        X = sample_matrix(algebra, n, n, rng, u_degree, coeff_degree)
        Y = sample_matrix(algebra, n, n, rng, u_degree, coeff_degree)
        gX, gY = gamma(n, m, X), gamma(n, m, Y)
        lhs, rhs = gamma(n, m, X * Y), gX * gY
        report.record(f"{idx}:mul", lhs == rhs, lhs=lhs, rhs=rhs)
        lhs_s, rhs_s = gamma(n, m, X.star()), gX.star()
        report.record(f"{idx}:star", lhs_s == rhs_s, lhs=lhs_s, rhs=rhs_s)
    return report


def verify_gamma_composition(
    algebra: CoefficientAlgebra, n: int, k: int, l: int, seed: int, count: int = 50,
    u_degree: int = 2, coeff_degree: int = 2,
) -> Report:
    nk, nkl = n * k, n * k * l
    report = Report(
        "gamma-comp",
        config={"n": n, "k": k, "l": l, "algebra": algebra.tag(), "seed": seed, "count": count},
    )
    cases = [(f"gen{i}", X) for i, X in enumerate(_stage_generators(algebra, n, case_rng(seed, "gen")))]
    for idx in range(count):
        cases.append((idx, sample_matrix(algebra, n, n, case_rng(seed, idx), u_degree, coeff_degree)))
    for label, X in cases:
        lhs = gamma(nk, nkl, gamma(n, nk, X))
        rhs = gamma(n, nkl, X)
        report.record(label, lhs == rhs, lhs=lhs, rhs=rhs)
    return report


def verify_trace_compatibility(
    algebra: CoefficientAlgebra, n: int, m: int, seed: int, count: int,
    u_degree: int = 2, coeff_degree: int = 2,
) -> Report:
    report = Report(
        "trace-compat",
        config={"n": n, "m": m, "algebra": algebra.tag(), "seed": seed, "count": count},
    )
    for idx in range(count):
        X = sample_matrix(algebra, n, n, case_rng(seed, idx), u_degree, coeff_degree)
        lhs = gamma(n, m, X).trace()
        rhs = X.trace()
        report.record(idx, lhs == rhs, lhs=lhs, rhs=rhs)
    return report


def verify_gamma_injectivity(
    algebra: CoefficientAlgebra, n: int, m: int, seed: int, count: int,
    u_degree: int = 2, coeff_degree: int = 2,
) -> Report:
    report = Report(
        "gamma-inverse",
        config={"n": n, "m": m, "algebra": algebra.tag(), "seed": seed, "count": count},
    )
    for idx in range(count):
        X = sample_matrix(algebra, n, n, case_rng(seed, idx), u_degree, coeff_degree)
        back = gamma_left_inverse(n, m, gamma(n, m, X))
        report.record(idx, back is not None and back == X, lhs=back, rhs=X)
    return report


def verify_amplification_intertwining(
    angle: Angle, p: int, n: int, m: int, seed: int, count: int,
    u_degree: int = 2, coeff_degree: int = 2,
) -> Report:
    """psi circle (gamma_{n,m} blockwise) == gamma_{pn,pm} circle psi.

    The left side works at angle theta with stage sizes n, m; the right side
    at theta/p with sizes pn, pm.  The stage algebras coincide because
    (theta/p)(pn) = theta n, so the shuffle output re-tags between them.
    """
    if m % n != 0:
        raise MismatchError(f"{n} does not divide {m}")
    base = CircleRotation(angle)
    target = CircleRotation(angle.scaled(Fraction(1, p)))
    report = Report(
        "amplification",
        config={"p": p, "n": n, "m": m, "angle": str(angle), "seed": seed, "count": count},
    )

    def both_sides(X: MatrixElement) -> tuple[MatrixElement, MatrixElement]:
        lhs = amplification_shuffle(p, blockwise_gamma(p, n, m, X)).with_twist(target, p * m)
        rhs = gamma(p * n, p * m, amplification_shuffle(p, X).with_twist(target, p * n))
        return lhs, rhs

    gen_rng = case_rng(seed, "gen")
    generators = [
        MatrixElement.single(base, n, p * n, 0, 0, CrossedElement.from_coefficient(base, n, base.one())),
        MatrixElement.single(base, n, p * n, 0, 0, CrossedElement.from_coefficient(base, n, base.sample(gen_rng))),
        MatrixElement.single(base, n, p * n, 0, 0, CrossedElement.u_power(base, n)),
    ]
    generators.extend(
        MatrixElement.single(base, n, p * n, i, j) for i in range(p * n) for j in range(p * n)
    )
    for i, X in enumerate(generators):
        lhs, rhs = both_sides(X)
        report.record(f"gen{i}", lhs == rhs, lhs=lhs, rhs=rhs)
    for idx in range(count):
        X = sample_matrix(base, n, p * n, case_rng(seed, idx), u_degree, coeff_degree)
        lhs, rhs = both_sides(X)
        report.record(idx, lhs == rhs, lhs=lhs, rhs=rhs)
    return report
