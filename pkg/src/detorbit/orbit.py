"""Restrictions of the determinant along m x i matrices and witness search.

An m x i matrix A sends the determinant to the product-form polynomial
prod_p (sum_j x_j * A[p][j]) of degree m in i variables, whose coefficient at
exponent d equals Perm(A with column j repeated d_j times) / prod_j d_j!.
Points of this shape are used to certify that the degree-i invariant of
:mod:`detorbit.invariant` does not vanish on the restriction family: a single
matrix A with nonzero invariant value is a witness.

The permanent comes in two exact flavours: a Ryser-style inclusion-exclusion
with Gray-code row-sum updates (production) and the factorial-sum definition
(oracle).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from random import Random
from typing import Iterator, Optional, Sequence

from .errors import BudgetExceeded
from .invariant import HomPoly, det_power_invariant

__all__ = [
    "RestrictionMatrix",
    "WitnessResult",
    "permanent",
    "permanent_naive",
    "det_restriction",
    "perm_restriction",
    "content_coefficient",
    "candidate_schedule",
    "witness_search",
    "matrix_from_csv",
]

MAX_PERMANENT_SIZE = 20
MAX_NAIVE_PERMANENT_SIZE = 12


def permanent(mat: Sequence[Sequence[Fraction | int]]) -> Fraction:
    """Exact permanent by inclusion-exclusion over column subsets.

    Gray-code updates keep one running row-sum vector; supports n <= 20.
    """
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix must be square")
    if n == 0:
        return Fraction(1)
    if n > MAX_PERMANENT_SIZE:
        raise BudgetExceeded(f"permanent of size {n} > {MAX_PERMANENT_SIZE}")
    rows = [[Fraction(x) for x in row] for row in mat]
    sums = [Fraction(0)] * n
    total = Fraction(0)
    prev_gray = 0
    popcount = 0
    for s in range(1, 1 << n):
        gray = s ^ (s >> 1)
        bit = gray ^ prev_gray
        j = bit.bit_length() - 1
        if gray & bit:
            popcount += 1
            for p in range(n):
                sums[p] += rows[p][j]
        else:
            popcount -= 1
            for p in range(n):
                sums[p] -= rows[p][j]
        prev_gray = gray
        prod = Fraction(1)
        for p in range(n):
            prod *= sums[p]
            if not prod:
                break
        if prod:
            total += prod if (n - popcount) % 2 == 0 else -prod
    return total


def permanent_naive(mat: Sequence[Sequence[Fraction | int]]) -> Fraction:
    """Permanent straight from the definition; independent oracle (n <= 12)."""
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix must be square")
    if n > MAX_NAIVE_PERMANENT_SIZE:
        raise BudgetExceeded(f"naive permanent of size {n} > {MAX_NAIVE_PERMANENT_SIZE}")
    total = Fraction(0)
    for sigma in permutations(range(n)):
        prod = Fraction(1)
        for p in range(n):
            prod *= Fraction(mat[p][sigma[p]])
            if not prod:
                break
        total += prod
    return total


@dataclass(frozen=True)
class RestrictionMatrix:
    """An m x i matrix of exact rationals, columns indexed by the i variables."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise ValueError("empty matrix")
        width = len(self.rows[0])
        if any(len(row) != width for row in self.rows):
            raise ValueError("ragged rows")
        if width > len(self.rows):
            raise ValueError("need at least as many rows as columns")
        for row in self.rows:
            for x in row:
                if not isinstance(x, Fraction):
                    raise ValueError("entries must be Fractions")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Fraction | int | str]]) -> "RestrictionMatrix":
        return cls(tuple(tuple(Fraction(x) for x in row) for row in rows))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def i(self) -> int:
        return len(self.rows[0])

    def column_repeated(self, d: Sequence[int]) -> list[list[Fraction]]:
        """The m x m matrix with column j repeated d_j times."""
        if len(d) != self.i or sum(d) != self.m or any(e < 0 for e in d):
            raise ValueError("content must have length i and total m")
        cols = []
        for j, e in enumerate(d):
            cols.extend([j] * e)
        return [[row[j] for j in cols] for row in self.rows]

    def scale_row(self, p: int, t: Fraction | int) -> "RestrictionMatrix":
        t = Fraction(t)
        rows = list(self.rows)
        rows[p] = tuple(x * t for x in rows[p])
        return RestrictionMatrix(tuple(rows))

    def permute_rows(self, sigma: Sequence[int]) -> "RestrictionMatrix":
        return RestrictionMatrix(tuple(self.rows[sigma[p]] for p in range(self.m)))

    def right_multiply(self, g: Sequence[Sequence[Fraction | int]]) -> "RestrictionMatrix":
        """A @ g for an i x i matrix g."""
        i = self.i
        if len(g) != i or any(len(row) != i for row in g):
            raise ValueError("g must be i x i")
        rows = tuple(
            tuple(
                sum((row[k] * Fraction(g[k][j]) for k in range(i)), Fraction(0))
                for j in range(i)
            )
            for row in self.rows
        )
        return RestrictionMatrix(rows)

    def to_json_rows(self) -> list[list[str]]:
        return [
            [f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator) for x in row]
            for row in self.rows
        ]


def _product_form(rows: Sequence[Sequence[Fraction]], i: int) -> HomPoly:
    poly: dict[tuple[int, ...], Fraction] = {tuple([0] * i): Fraction(1)}
    for row in rows:
        nxt: dict[tuple[int, ...], Fraction] = {}
        for exp, c in poly.items():
            for j in range(i):
                a = row[j]
                if not a:
                    continue
                key = exp[:j] + (exp[j] + 1,) + exp[j + 1 :]
                new = nxt.get(key, Fraction(0)) + c * a
                if new:
                    nxt[key] = new
                else:
                    nxt.pop(key, None)
        poly = nxt
        if not poly:
            break
    return HomPoly(i, len(rows), poly)


def det_restriction(A: RestrictionMatrix) -> HomPoly:
    """Expand prod_p (sum_j x_j A[p][j]) into a degree-m form in i variables."""
    return _product_form(A.rows, A.i)


def perm_restriction(A: RestrictionMatrix, basis: str = "diagonal") -> HomPoly:
    """Permanent restriction; identical to the determinant one on the diagonal basis.

    Only the diagonal basis is supported: there both ambient functions reduce
    to the same product form.
    """
    if basis != "diagonal":
        raise ValueError("unsupported basis image")
    return _product_form(A.rows, A.i)


def content_coefficient(A: RestrictionMatrix, d: Sequence[int]) -> Fraction:
    """Perm(A with column j repeated d_j times) / prod_j d_j!.

    Independent permanent route for the coefficient of x^d in
    :func:`det_restriction`.
    """
    if sum(d) != A.m:
        raise ValueError("content must sum to the row count")
    denom = 1
    for e in d:
        denom *= factorial(e)
    return permanent(A.column_repeated(d)) / denom


# ---------------------------------------------------------------------------
# Witness search.
# ---------------------------------------------------------------------------


@dataclass
class WitnessResult:
    """First matrix in the schedule whose restriction has nonzero invariant."""

    m: int
    i: int
    matrix: RestrictionMatrix
    value: Fraction
    schedule_index: int
    label: str
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "i": self.i,
            "A": self.matrix.to_json_rows(),
            "value": {
                "num": str(self.value.numerator),
                "den": str(self.value.denominator),
            },
            "schedule_index": self.schedule_index,
            "label": self.label,
            "seed": self.seed,
        }


def candidate_schedule(
    m: int, i: int, seed: int = 0, count: int = 40
) -> Iterator[tuple[str, RestrictionMatrix]]:
    """Deterministic candidates: structured integer matrices, then seeded rationals."""
    yield (
        "cyclic-identity",
        RestrictionMatrix.from_rows(
            [[1 if j == p % i else 0 for j in range(i)] for p in range(m)]
        ),
    )
    yield ("all-ones", RestrictionMatrix.from_rows([[1] * i for _ in range(m)]))
    yield (
        "vandermonde",
        RestrictionMatrix.from_rows(
            [[(p + 1) ** j for j in range(i)] for p in range(m)]
        ),
    )
    yield (
        "ones-plus-identity",
        RestrictionMatrix.from_rows(
            [[2 if j == p % i else 1 for j in range(i)] for p in range(m)]
        ),
    )
    rng = Random(seed)
    emitted = 4
    while emitted < count:
        rows = [
            [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(i)]
            for _ in range(m)
        ]
        yield (f"random-{emitted}", RestrictionMatrix.from_rows(rows))
        emitted += 1


def witness_search(
    m: int,
    i: int,
    *,
    seed: int = 0,
    max_candidates: int = 40,
    budget: int = 10**9,
) -> Optional[WitnessResult]:
    """Scan the candidate schedule for a nonzero invariant value.

    Returns the first hit (schedule order fixes the winner) or None when the
    budgeted schedule is exhausted.
    """
    if m % 2:
        raise ValueError("the invariant requires even m")
    if not 1 <= i <= m:
        raise ValueError("need 1 <= i <= m")
    for index, (label, A) in enumerate(
        candidate_schedule(m, i, seed, max_candidates)
    ):
        value = det_power_invariant(m, i, det_restriction(A), budget=budget)
        if value:
            return WitnessResult(
                m=m,
                i=i,
                matrix=A,
                value=value,
                schedule_index=index,
                label=label,
                seed=seed,
            )
    return None


def matrix_from_csv(text: str) -> RestrictionMatrix:
    """Rows of comma-separated integers or p/q rationals."""
    rows = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        rows.append([Fraction(cell.strip()) for cell in line.split(",")])
    return RestrictionMatrix.from_rows(rows)
