"""Truncated Fock-space operators and the Toeplitz block identities.

Operators keep levels 0..depth-1 of the Fock module over (A, alpha) and are
band matrices with entries in A: composition is plain matrix composition (no
twist; the twisting sits inside the generator constructions).  The ``step``
attribute says which power of alpha one level carries, so the same class
models both the ambient Fock space (step 1) and the block-index spaces that
arise from decomposing modulo a period (step k).

Generators:

    phi(a):       diagonal, (i, i) = alpha^(step*i)(a)          -- left action
    weighted(lam, a): subdiagonal, (q+1, q) = alpha^(step*q)(lam_(q+1) * a)
    creation(a) = weighted(1, a) = T(a);  shift() = T(1);  projection0()

Truncation semantics: every operator carries ``trust``; entries (i, j) with
max(i, j) < trust provably agree with the untruncated operator.  Composition
erodes trust by the maximal level-raise of the right factor, so boundary
artifacts can never masquerade as identities failing: ``agrees`` compares
only inside the joint trusted window.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .coeff import CoefficientAlgebra
from .errors import MismatchError
from .report import Report, case_rng


@dataclass(frozen=True)
class WeightSequence:
    """Periodic weight sequence lam_1, lam_2, ... of coefficient elements."""

    weights: tuple

    def __post_init__(self):
        if not self.weights:
            raise MismatchError("weight sequence needs at least one weight")
        object.__setattr__(self, "weights", tuple(self.weights))

    @property
    def period(self) -> int:
        return len(self.weights)

    def weight(self, index: int):
        """lam_index with 1-based index, extended periodically."""
        return self.weights[(index - 1) % self.period]


class FockOperator:
    """Band matrix over A on levels 0..depth-1, with a trusted window."""

    __slots__ = ("algebra", "depth", "step", "trust", "entries")

    def __init__(self, algebra: CoefficientAlgebra, depth: int, entries: dict | None = None,
                 *, step: int = 1, trust: int | None = None):
        self.algebra = algebra
        self.depth = depth
        self.step = step
        self.trust = depth if trust is None else max(0, min(trust, depth))
        clean = {}
        for (i, j), a in (entries or {}).items():
            if not (0 <= i < depth and 0 <= j < depth):
                raise MismatchError(f"level ({i},{j}) outside depth {depth}")
            if not a.is_zero():
                clean[(i, j)] = a
        self.entries = clean

    @staticmethod
    def zero(algebra: CoefficientAlgebra, depth: int, *, step: int = 1) -> FockOperator:
        return FockOperator(algebra, depth, step=step)

    @staticmethod
    def phi(algebra: CoefficientAlgebra, a, depth: int, *, step: int = 1) -> FockOperator:
        """Left action phi_infinity(a): level i carries alpha^(step*i)(a)."""
        return FockOperator(
            algebra, depth, {(i, i): algebra.alpha_power(a, step * i) for i in range(depth)}, step=step
        )

    @staticmethod
    def identity(algebra: CoefficientAlgebra, depth: int, *, step: int = 1) -> FockOperator:
        return FockOperator.phi(algebra, algebra.one(), depth, step=step)

    @staticmethod
    def weighted(algebra: CoefficientAlgebra, lam: WeightSequence, a, depth: int, *, step: int = 1) -> FockOperator:
        """Weighted creation operator T_lam(a)."""
        entries = {
            (q + 1, q): algebra.alpha_power(lam.weight(q + 1) * a, step * q)
            for q in range(depth - 1)
        }
        return FockOperator(algebra, depth, entries, step=step)

    @staticmethod
    def creation(algebra: CoefficientAlgebra, a, depth: int, *, step: int = 1) -> FockOperator:
        """Unweighted creation operator T(a)."""
        return FockOperator.weighted(algebra, WeightSequence((algebra.one(),)), a, depth, step=step)

    @staticmethod
    def shift(algebra: CoefficientAlgebra, depth: int, *, step: int = 1) -> FockOperator:
        return FockOperator.creation(algebra, algebra.one(), depth, step=step)

    @staticmethod
    def projection0(algebra: CoefficientAlgebra, depth: int, *, step: int = 1) -> FockOperator:
        return FockOperator(algebra, depth, {(0, 0): algebra.one()}, step=step)

    def _check(self, other: FockOperator) -> None:
        if self.algebra != other.algebra or self.depth != other.depth or self.step != other.step:
            raise MismatchError("fock operators on different truncated spaces")

    def raise_degree(self) -> int:
        """Maximal level-raise max(i - j), floored at 0."""
        return max((i - j for (i, j) in self.entries), default=0) if self.entries else 0

    def __add__(self, other: FockOperator) -> FockOperator:
        self._check(other)
        merged = dict(self.entries)
        for key, a in other.entries.items():
            merged[key] = merged[key] + a if key in merged else a
        return FockOperator(self.algebra, self.depth, merged, step=self.step,
                            trust=min(self.trust, other.trust))

    def __neg__(self) -> FockOperator:
        return FockOperator(self.algebra, self.depth, {k: -a for k, a in self.entries.items()},
                            step=self.step, trust=self.trust)

    def __sub__(self, other: FockOperator) -> FockOperator:
        return self + (-other)

    def compose(self, other: FockOperator) -> FockOperator:
        """Matrix composition; trust shrinks by the right factor's level-raise."""
        self._check(other)
        by_row: dict[int, list] = {}
        for (k, j), b in other.entries.items():
            by_row.setdefault(k, []).append((j, b))
        out: dict[tuple[int, int], object] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                prod = a * b
                out[key] = out[key] + prod if key in out else prod
        trust = min(self.trust, other.trust) - max(0, other.raise_degree())
        return FockOperator(self.algebra, self.depth, out, step=self.step, trust=trust)

    __matmul__ = compose

    def star(self) -> FockOperator:
        return FockOperator(self.algebra, self.depth, {(j, i): a.star() for (i, j), a in self.entries.items()},
                            step=self.step, trust=self.trust)

    def agrees(self, other: FockOperator) -> bool:
        """Equality on the joint trusted window max(i, j) < min(trusts)."""
        self._check(other)
        window = min(self.trust, other.trust)
        keys = set(self.entries) | set(other.entries)
        for (i, j) in keys:
            if max(i, j) >= window:
                continue
            a = self.entries.get((i, j))
            b = other.entries.get((i, j))
            if a is None:
                if not b.is_zero():
                    return False
            elif b is None:
                if not a.is_zero():
                    return False
            elif not (a == b):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "trust": self.trust,
            "step": self.step,
            "entries": {f"{i},{j}": self.algebra.element_to_json(a) for (i, j), a in sorted(self.entries.items())},
        }

    def __repr__(self) -> str:
        body = ", ".join(f"({i},{j}): {a!r}" for (i, j), a in sorted(self.entries.items()))
        return f"Fock[d={self.depth},s={self.step},t={self.trust}]{{{body}}}"


def block_trust(trust: int, block_row: int, block_col: int, k: int) -> int:
    """Quotient levels q with q*k + max(block indices) inside the trusted window."""
    offset = max(block_row, block_col)
    if trust <= offset:
        return 0
    return (trust - offset - 1) // k + 1


def block_decompose(X: FockOperator, k: int) -> dict[tuple[int, int], FockOperator]:
    """Split by level residues mod k, reindexing by quotient.

    Block (l', l) holds the entries with row = l' (mod k), column = l (mod k);
    it lives on the block-index Fock space, whose one-level automorphism is
    alpha^(step*k).  This is the matrix picture over the period-k Toeplitz
    algebra, with the isometric diag(1, S, ..., S^(k-1)) conjugation realized
    by the reindexing itself.
    """
    depth = (X.depth + k - 1) // k
    buckets: dict[tuple[int, int], dict] = {}
    for (i, j), a in X.entries.items():
        buckets.setdefault((i % k, j % k), {})[(i // k, j // k)] = a
    blocks = {}
    for lp in range(k):
        for l in range(k):
            blocks[(lp, l)] = FockOperator(
                X.algebra, depth, buckets.get((lp, l), {}),
                step=X.step * k, trust=block_trust(X.trust, lp, l, k),
            )
    return blocks


def block_reassemble(blocks: dict[tuple[int, int], FockOperator], k: int, depth: int,
                     *, step: int = 1, trust: int | None = None) -> FockOperator:
    """Inverse of block_decompose for blocks sharing one decomposition."""
    entries = {}
    algebra = None
    for (lp, l), block in blocks.items():
        algebra = block.algebra
        for (qp, q), a in block.entries.items():
            entries[(qp * k + lp, q * k + l)] = a
    if algebra is None:
        raise MismatchError("no blocks to reassemble")
    return FockOperator(algebra, depth, entries, step=step, trust=trust)


class BlockMatrix:
    """A square matrix of FockOperators sharing depth and step (absent = zero)."""

    __slots__ = ("algebra", "size", "depth", "step", "entries")

    def __init__(self, algebra: CoefficientAlgebra, size: int, depth: int, entries: dict | None = None,
                 *, step: int = 1):
        self.algebra = algebra
        self.size = size
        self.depth = depth
        self.step = step
        self.entries = {}
        for (i, j), op in (entries or {}).items():
            if not (0 <= i < size and 0 <= j < size):
                raise MismatchError(f"block ({i},{j}) outside {size}x{size}")
            if op.depth != depth or op.step != step or op.algebra != algebra:
                raise MismatchError("block on a different truncated space")
            if op.entries or op.trust < depth:
                self.entries[(i, j)] = op

    def _zero(self) -> FockOperator:
        return FockOperator.zero(self.algebra, self.depth, step=self.step)

    def block(self, i: int, j: int) -> FockOperator:
        return self.entries.get((i, j), self._zero())

    def _check(self, other: BlockMatrix) -> None:
        if (self.algebra, self.size, self.depth, self.step) != (other.algebra, other.size, other.depth, other.step):
            raise MismatchError("incompatible block matrices")

    def __add__(self, other: BlockMatrix) -> BlockMatrix:
        self._check(other)
        merged = dict(self.entries)
        for key, op in other.entries.items():
            merged[key] = merged[key] + op if key in merged else op
        return BlockMatrix(self.algebra, self.size, self.depth, merged, step=self.step)

    def __neg__(self) -> BlockMatrix:
        return BlockMatrix(self.algebra, self.size, self.depth,
                           {k: -op for k, op in self.entries.items()}, step=self.step)

    def __sub__(self, other: BlockMatrix) -> BlockMatrix:
        return self + (-other)

    def __mul__(self, other: BlockMatrix) -> BlockMatrix:
        self._check(other)
        by_row: dict[int, list] = {}
        for (k, j), op in other.entries.items():
            by_row.setdefault(k, []).append((j, op))
        out: dict[tuple[int, int], FockOperator] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                prod = a.compose(b)
                out[key] = out[key] + prod if key in out else prod
        return BlockMatrix(self.algebra, self.size, self.depth, out, step=self.step)

    def star(self) -> BlockMatrix:
        return BlockMatrix(self.algebra, self.size, self.depth,
                           {(j, i): op.star() for (i, j), op in self.entries.items()}, step=self.step)

    def agrees(self, other: BlockMatrix) -> bool:
        self._check(other)
        keys = set(self.entries) | set(other.entries)
        return all(self.block(i, j).agrees(other.block(i, j)) for (i, j) in keys)

    def to_json(self) -> dict:
        return {"size": self.size,
                "blocks": {f"{i},{j}": op.to_json() for (i, j), op in sorted(self.entries.items())}}


def theta_block_map(algebra: CoefficientAlgebra, n: int, m: int, kind: str, element, depth: int) -> BlockMatrix:
    """Image of a tagged period-n Toeplitz generator in the k x k block picture.

    kind 'phi':       phi(a)  |-> sum_j phi(alpha^(jn)(a)) e_{j,j}
    kind 'creation':  T(b)    |-> T(alpha^((k-1)n)(b)) e_{0,k-1}
                                  + sum_{j<k-1} phi(alpha^(jn)(b)) e_{j+1,j}
    """
    if m % n != 0:
        raise MismatchError(f"{n} does not divide {m}")
    k = m // n
    entries: dict[tuple[int, int], FockOperator] = {}
    if kind == "phi":
        for j in range(k):
            entries[(j, j)] = FockOperator.phi(algebra, algebra.alpha_power(element, j * n), depth, step=m)
    elif kind == "creation":
        entries[(0, k - 1)] = FockOperator.creation(
            algebra, algebra.alpha_power(element, (k - 1) * n), depth, step=m
        )
        for j in range(k - 1):
            entries[(j + 1, j)] = FockOperator.phi(algebra, algebra.alpha_power(element, j * n), depth, step=m)
    else:
        raise ValueError(f"unknown Toeplitz generator kind {kind!r}")
    return BlockMatrix(algebra, k, depth, entries, step=m)


def eq_id_sides(algebra: CoefficientAlgebra, a, c, depth: int) -> tuple[FockOperator, FockOperator]:
    """Both sides of phi(a c*) - T(alpha(a)) T(alpha(c))* = phi(a c*) P0."""
    ac = a * c.star()
    lhs = FockOperator.phi(algebra, ac, depth) - FockOperator.creation(
        algebra, algebra.alpha_power(a, 1), depth
    ).compose(FockOperator.creation(algebra, algebra.alpha_power(c, 1), depth).star())
    rhs = FockOperator.phi(algebra, ac, depth).compose(FockOperator.projection0(algebra, depth))
    return lhs, rhs


def verify_fock_identity(algebra: CoefficientAlgebra, seed: int, count: int, depth: int = 8) -> Report:
    """One-step compact remainder identity on `count` random coefficient pairs."""
    report = Report("fock-id", config={"algebra": algebra.tag(), "seed": seed, "count": count, "depth": depth})
    one = algebra.one()
    lhs, rhs = eq_id_sides(algebra, one, one, depth)
    report.record("unit", lhs.agrees(rhs), lhs=lhs, rhs=rhs)
    for idx in range(count):
        rng = case_rng(seed, idx)
        a, c = algebra.sample(rng), algebra.sample(rng)
        lhs, rhs = eq_id_sides(algebra, a, c, depth)
        report.record(idx, lhs.agrees(rhs), lhs=lhs, rhs=rhs)
    return report


def weighted_blocks_check(algebra: CoefficientAlgebra, lam: WeightSequence, b, depth: int) -> list[tuple[str, bool]]:
    """Compare the period-k block decomposition of T_lam(b) with its expected form.

    Subdiagonal block (l+1, l) must be the block-space left action of
    alpha^l(lam_(l+1) b); corner block (0, k-1) the block-space creation
    operator of alpha^(k-1)(lam_k b); everything else zero.
    """
    k = lam.period
    X = FockOperator.weighted(algebra, lam, b, depth)
    blocks = block_decompose(X, k)
    block_depth = (depth + k - 1) // k
    results = []
    for lp in range(k):
        for l in range(k):
            actual = blocks[(lp, l)]
            if k == 1 or (lp == 0 and l == k - 1):
                expected = FockOperator.creation(
                    algebra, algebra.alpha_power(lam.weight(k) * b, k - 1), block_depth, step=k
                )
            elif lp == l + 1:
                expected = FockOperator.phi(
                    algebra, algebra.alpha_power(lam.weight(l + 1) * b, l), block_depth, step=k
                )
            else:
                expected = FockOperator.zero(algebra, block_depth, step=k)
            results.append((f"block({lp},{l})", actual.agrees(expected)))
    return results


def verify_weighted_blocks(algebra: CoefficientAlgebra, period: int, seed: int, count: int,
                           depth: int | None = None) -> Report:
    if depth is None:
        depth = 4 * period
    report = Report("fock-blocks", config={"algebra": algebra.tag(), "period": period,
                                           "seed": seed, "count": count, "depth": depth})
    for idx in range(count):
        rng = case_rng(seed, idx)
        lam = WeightSequence(tuple(algebra.sample(rng) for _ in range(period)))
        b = algebra.sample(rng)
        for label, ok in weighted_blocks_check(algebra, lam, b, depth):
            report.record(f"{idx}:{label}", ok)
    return report


def compact_preservation_sides(algebra: CoefficientAlgebra, n: int, m: int, a, c, depth: int) -> tuple[BlockMatrix, BlockMatrix]:
    """theta of the compact remainder at period n versus the corner remainder at period m."""
    k = m // n
    ac = a * c.star()
    lhs = theta_block_map(algebra, n, m, "phi", ac, depth) - (
        theta_block_map(algebra, n, m, "creation", algebra.alpha_power(a, n), depth)
        * theta_block_map(algebra, n, m, "creation", algebra.alpha_power(c, n), depth).star()
    )
    corner = FockOperator.phi(algebra, ac, depth, step=m) - FockOperator.creation(
        algebra, algebra.alpha_power(a, m), depth, step=m
    ).compose(FockOperator.creation(algebra, algebra.alpha_power(c, m), depth, step=m).star())
    rhs = BlockMatrix(algebra, k, depth, {(0, 0): corner}, step=m)
    return lhs, rhs


def verify_compact_preservation(algebra: CoefficientAlgebra, n: int, m: int, seed: int, count: int,
                                depth: int = 8) -> Report:
    report = Report("compact-preserve", config={"algebra": algebra.tag(), "n": n, "m": m,
                                                "seed": seed, "count": count, "depth": depth})
    one = algebra.one()
    lhs, rhs = compact_preservation_sides(algebra, n, m, one, one, depth)
    report.record("unit", lhs.agrees(rhs), lhs=lhs, rhs=rhs)
    for idx in range(count):
        rng = case_rng(seed, idx)
        a, c = algebra.sample(rng), algebra.sample(rng)
        lhs, rhs = compact_preservation_sides(algebra, n, m, a, c, depth)
        report.record(idx, lhs.agrees(rhs), lhs=lhs, rhs=rhs)
    return report


def _beta_image(algebra: CoefficientAlgebra, n: int, m: int, kind: str, element, depth: int) -> BlockMatrix:
    """Size-m matrix image of a size-n stage generator in the block picture."""
    k = m // n
    identity = FockOperator.identity(algebra, depth, step=m)
    entries: dict[tuple[int, int], FockOperator] = {}
    if kind == "phi":
        for j in range(k):
            entries[(j * n, j * n)] = FockOperator.phi(algebra, algebra.alpha_power(element, j * n), depth, step=m)
    elif kind == "creation":
        entries[(0, (k - 1) * n)] = FockOperator.creation(
            algebra, algebra.alpha_power(element, (k - 1) * n), depth, step=m
        )
        for j in range(k - 1):
            entries[((j + 1) * n, j * n)] = FockOperator.phi(
                algebra, algebra.alpha_power(element, j * n), depth, step=m
            )
    elif kind == "unit":
        i, j = element
        for l in range(k):
            entries[(i + l * n, j + l * n)] = identity
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return BlockMatrix(algebra, m, depth, entries, step=m)


def shuffle_conjugate(M: BlockMatrix, n: int, k: int) -> BlockMatrix:
    """Reindex the n x n of k x k block picture by (i, c) -> i + c*n."""
    perm = {i * k + c: i + c * n for i in range(n) for c in range(k)}
    entries = {(perm[r], perm[c]): op for (r, c), op in M.entries.items()}
    return BlockMatrix(M.algebra, M.size, M.depth, entries, step=M.step)


def verify_shuffle(algebra: CoefficientAlgebra, n: int, m: int, seed: int, depth: int = 8) -> Report:
    """Entrywise theta images, shuffled, against the directly assembled block images."""
    report = Report("shuffle", config={"algebra": algebra.tag(), "n": n, "m": m, "seed": seed, "depth": depth})
    k = m // n
    rng = case_rng(seed, "gen")
    cases: list[tuple[str, str, object, tuple[int, int]]] = [
        ("phi-one", "phi", algebra.one(), (0, 0)),
        ("phi", "phi", algebra.sample(rng), (0, 0)),
        ("creation", "creation", algebra.sample(rng), (0, 0)),
    ]
    cases.extend((f"unit({i},{j})", "unit", (i, j), (i, j)) for i in range(n) for j in range(n))
    for label, kind, element, (gi, gj) in cases:
        # entrywise theta of the generator sitting at entry (gi, gj) of M_n
        if kind == "unit":
            theta_img = BlockMatrix(
                algebra, k, depth,
                {(c, c): FockOperator.identity(algebra, depth, step=m) for c in range(k)}, step=m,
            )
        else:
            theta_img = theta_block_map(algebra, n, m, kind, element, depth)
        assembled: dict[tuple[int, int], FockOperator] = {}
        for (c, cp), op in theta_img.entries.items():
            assembled[(gi * k + c, gj * k + cp)] = op
        lhs = shuffle_conjugate(BlockMatrix(algebra, m, depth, assembled, step=m), n, k)
        rhs = _beta_image(algebra, n, m, kind, element if kind != "unit" else (gi, gj), depth)
        report.record(label, lhs.agrees(rhs), lhs=lhs, rhs=rhs)
    return report


def sample_fock(algebra: CoefficientAlgebra, depth: int, rng: random.Random, *, step: int = 1,
                band: int = 2, density: float = 0.4) -> FockOperator:
    entries = {}
    for i in range(depth):
        for j in range(max(0, i - band), min(depth, i + band + 1)):
            if rng.random() < density:
                entries[(i, j)] = algebra.sample(rng)
    return FockOperator(algebra, depth, entries, step=step)
