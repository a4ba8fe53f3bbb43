"""The degree-i SL(i)-invariant built from the polarized determinant power.

A homogeneous degree-m form f in i variables (m even, m' = m/2) is first
fully polarized; reading the polarized coefficients along pairs of indices
expands f into a sum of elementary-matrix words of length m'.  Feeding i such
words into the full polarization of A |-> det(A)^{m'} and summing over all
i-tuples evaluates the (unique up to scale) SL(i)-invariant of degree i on
the space of degree-m forms.  At the power-sum point sum_j x_j^m the value
has the closed form i! * (m'!)^i / (i*m')!.

All arithmetic is exact; the only approximations are the configurable work
budgets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import BudgetExceeded

__all__ = [
    "HomPoly",
    "MatrixTensorTerm",
    "polarized_coefficient",
    "elementary_matrix_expansion",
    "polarized_det_power",
    "det_power_invariant",
    "power_sum_invariant_check",
    "exact_det",
]

Matrix = tuple[tuple[Fraction, ...], ...]

DEFAULT_DET_BUDGET = 10**9


@dataclass
class HomPoly:
    """Sparse homogeneous polynomial with exact rational coefficients.

    ``coeffs`` maps exponent tuples (length ``nvars``, entries summing to
    ``degree``) to nonzero rationals.
    """

    nvars: int
    degree: int
    coeffs: dict[tuple[int, ...], Fraction]

    def __post_init__(self):
        for exp, c in list(self.coeffs.items()):
            if len(exp) != self.nvars or any(e < 0 for e in exp):
                raise ValueError("bad exponent vector")
            if sum(exp) != self.degree:
                raise ValueError("exponent vector of wrong total degree")
            if c == 0:
                del self.coeffs[exp]
            elif not isinstance(c, Fraction):
                self.coeffs[exp] = Fraction(c)

    @classmethod
    def from_terms(
        cls,
        nvars: int,
        degree: int,
        terms: Iterable[tuple[Sequence[int], Fraction | int]],
    ) -> "HomPoly":
        coeffs: dict[tuple[int, ...], Fraction] = {}
        for exp, c in terms:
            key = tuple(exp)
            coeffs[key] = coeffs.get(key, Fraction(0)) + Fraction(c)
        return cls(nvars, degree, {k: v for k, v in coeffs.items() if v})

    @classmethod
    def power_sum(cls, nvars: int, degree: int) -> "HomPoly":
        """sum_j x_j^degree."""
        coeffs = {}
        for j in range(nvars):
            exp = [0] * nvars
            exp[j] = degree
            coeffs[tuple(exp)] = Fraction(1)
        return cls(nvars, degree, coeffs)

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self.coeffs.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def scale(self, c: Fraction | int) -> "HomPoly":
        c = Fraction(c)
        if c == 0:
            return HomPoly(self.nvars, self.degree, {})
        return HomPoly(
            self.nvars, self.degree, {k: v * c for k, v in self.coeffs.items()}
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, HomPoly)
            and (self.nvars, self.degree) == (other.nvars, other.degree)
            and self.coeffs == other.coeffs
        )

    def compose_linear(self, g: Sequence[Sequence[Fraction | int]]) -> "HomPoly":
        """Substitute x_j -> sum_k g[j][k] x_k and re-expand."""
        n = self.nvars
        if len(g) != n or any(len(row) != n for row in g):
            raise ValueError("substitution matrix must be nvars x nvars")
        lin: list[dict[tuple[int, ...], Fraction]] = []
        for j in range(n):
            row = {}
            for k in range(n):
                c = Fraction(g[j][k])
                if c:
                    exp = [0] * n
                    exp[k] = 1
                    row[tuple(exp)] = c
            lin.append(row)
        out: dict[tuple[int, ...], Fraction] = {}
        for exp, c in self.coeffs.items():
            term = {tuple([0] * n): c}
            for j, e in enumerate(exp):
                for _ in range(e):
                    term = _dict_poly_mul(term, lin[j])
            for key, val in term.items():
                new = out.get(key, Fraction(0)) + val
                if new:
                    out[key] = new
                else:
                    out.pop(key, None)
        return HomPoly(n, self.degree, out)

    def to_json_dict(self) -> dict:
        return {
            "vars": self.nvars,
            "degree": self.degree,
            "terms": [
                {
                    "exp": list(exp),
                    "num": str(c.numerator),
                    "den": str(c.denominator),
                }
                for exp, c in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "HomPoly":
        coeffs = {
            tuple(rec["exp"]): Fraction(int(rec["num"]), int(rec["den"]))
            for rec in obj["terms"]
        }
        return cls(int(obj["vars"]), int(obj["degree"]), coeffs)


def _dict_poly_mul(
    a: dict[tuple[int, ...], Fraction], b: dict[tuple[int, ...], Fraction]
) -> dict[tuple[int, ...], Fraction]:
    out: dict[tuple[int, ...], Fraction] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            new = out.get(key, Fraction(0)) + ca * cb
            if new:
                out[key] = new
            else:
                out.pop(key, None)
    return out


def polarized_coefficient(f: HomPoly, word: Sequence[int]) -> Fraction:
    """Full polarization of f evaluated on a basis word (1-based symbols).

    Equals coeff(exponent = content of word) * prod_j content_j! / m!.
    """
    m = f.degree
    if len(word) != m:
        raise ValueError("word length must equal the degree")
    content = [0] * f.nvars
    for s in word:
        if not 1 <= s <= f.nvars:
            raise ValueError("symbol out of range")
        content[s - 1] += 1
    c = f.coefficient(content)
    if not c:
        return Fraction(0)
    num = 1
    for e in content:
        num *= factorial(e)
    return c * Fraction(num, factorial(m))


@dataclass(frozen=True)
class MatrixTensorTerm:
    """One elementary-matrix word with its polarized coefficient."""

    coefficient: Fraction
    matrices: tuple[Matrix, ...]


def _elementary(i: int, r: int, c: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if (a, b) == (r, c) else Fraction(0) for b in range(i))
        for a in range(i)
    )


def elementary_matrix_expansion(f: HomPoly) -> list[MatrixTensorTerm]:
    """Expand the polarized form into elementary-matrix words of length m/2.

    Each index word (l_1..l_m) with nonzero polarized coefficient contributes
    that coefficient times E(l_1,l_2) ox ... ox E(l_{m-1},l_m).  Zero terms
    are omitted; at most i^m terms.
    """
    m = f.degree
    if m % 2:
        raise ValueError("the invariant requires even degree")
    i = f.nvars
    half = m // 2
    coeff_cache: dict[tuple[int, ...], Fraction] = {}
    for exp, c in f.coeffs.items():
        num = 1
        for e in exp:
            num *= factorial(e)
        coeff_cache[exp] = c * Fraction(num, factorial(m))
    terms = []
    for word in product(range(i), repeat=m):
        content = [0] * i
        for s in word:
            content[s] += 1
        coeff = coeff_cache.get(tuple(content))
        if not coeff:
            continue
        mats = tuple(
            _elementary(i, word[2 * p], word[2 * p + 1]) for p in range(half)
        )
        terms.append(MatrixTensorTerm(coeff, mats))
    return terms


def exact_det(mat: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination on cleared rows."""
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix must be square")
    if n == 0:
        return Fraction(1)
    denom = 1
    rows: list[list[int]] = []
    for row in mat:
        scale = 1
        for x in row:
            f = Fraction(x)
            scale = scale * f.denominator // _gcd(scale, f.denominator)
        denom *= scale
        rows.append([int(Fraction(x) * scale) for x in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for r in range(k + 1, n):
                if rows[r][k]:
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = rows[k][k]
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                rows[r][c] = (rows[r][c] * pivot - rows[r][k] * rows[k][c]) // prev
            rows[r][k] = 0
        prev = pivot
    return Fraction(sign * rows[n - 1][n - 1], denom)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def polarized_det_power(
    size: int, power: int, matrices: Sequence[Matrix]
) -> Fraction:
    """Full polarization of A |-> det(A)^power at the given size x size matrices.

    Computed by subset inclusion-exclusion over the size*power arguments with
    Gray-code updates of the running sum.  Symmetric and multilinear; at
    equal arguments (X,..,X) it returns det(X)^power.
    """
    k = size * power
    if len(matrices) != k:
        raise ValueError(f"expected {k} matrices")
    for mat in matrices:
        if len(mat) != size or any(len(row) != size for row in mat):
            raise ValueError("matrix of wrong size")
    cur = [[Fraction(0)] * size for _ in range(size)]
    total = Fraction(0)
    prev_gray = 0
    popcount = 0
    for s in range(1, 1 << k):
        gray = s ^ (s >> 1)
        bit = gray ^ prev_gray
        j = bit.bit_length() - 1
        mat = matrices[j]
        if gray & bit:
            popcount += 1
            for a in range(size):
                row = cur[a]
                mrow = mat[a]
                for b in range(size):
                    row[b] += mrow[b]
        else:
            popcount -= 1
            for a in range(size):
                row = cur[a]
                mrow = mat[a]
                for b in range(size):
                    row[b] -= mrow[b]
        prev_gray = gray
        d = exact_det(cur)
        if d:
            term = d**power
            total += term if (k - popcount) % 2 == 0 else -term
    return total / factorial(k)


def det_power_invariant(
    m: int, i: int, f: HomPoly, *, budget: int = DEFAULT_DET_BUDGET
) -> Fraction:
    """Evaluate the degree-i invariant at f (a degree-m form in >= i variables).

    Sums, over all i-tuples of elementary-matrix words of f, the product of
    word coefficients times the polarized determinant power of the i*m/2
    concatenated matrices.  Words are grouped by matrix multiset (the
    polarization is symmetric in its arguments), so the loop runs over
    multisets with multinomial weights.
    """
    if m % 2:
        raise ValueError("the invariant requires even degree")
    if f.degree != m:
        raise ValueError("degree mismatch")
    if not 1 <= i <= f.nvars:
        raise ValueError("need 1 <= i <= number of variables")
    if f.nvars != i:
        # The invariant lives on forms in i variables; restrict by setting
        # the trailing variables to zero.
        coeffs = {
            exp[:i]: c
            for exp, c in f.coeffs.items()
            if all(e == 0 for e in exp[i:])
        }
        f = HomPoly(i, m, coeffs)
    half = m // 2
    terms = elementary_matrix_expansion(f)
    if not terms:
        return Fraction(0)
    # Group by sorted matrix word; members share the coefficient.
    classes: dict[tuple, list] = {}
    for term in terms:
        key = tuple(sorted(term.matrices))
        entry = classes.get(key)
        if entry is None:
            classes[key] = [term.coefficient, 1, term.matrices]
        else:
            if entry[0] != term.coefficient:
                raise RuntimeError("internal error: class coefficient mismatch")
            entry[1] += 1
    class_list = list(classes.values())
    est = len(class_list) ** i * (1 << (i * half))
    if est > budget:
        raise BudgetExceeded(
            f"invariant evaluation needs ~{est} determinant steps", est
        )
    total = Fraction(0)
    fact_i = factorial(i)
    for combo in combinations_with_replacement(range(len(class_list)), i):
        reps: dict[int, int] = {}
        for idx in combo:
            reps[idx] = reps.get(idx, 0) + 1
        weight = fact_i
        coeff = Fraction(1)
        mats: list[Matrix] = []
        for idx, e in reps.items():
            weight //= factorial(e)
            a, n, matrices = class_list[idx]
            coeff *= (a * n) ** e
            mats.extend(matrices * e)
        value = polarized_det_power(i, half, mats)
        if value:
            total += weight * coeff * value
    return total


def power_sum_invariant_check(m: int, i: int) -> tuple[Fraction, Fraction]:
    """Invariant at the power-sum point next to its closed form.

    Returns (computed, i! * (m/2)!^i / (i*m/2)!); the two must be equal.
    """
    computed = det_power_invariant(m, i, HomPoly.power_sum(i, m))
    half = m // 2
    closed = Fraction(factorial(i) * factorial(half) ** i, factorial(i * half))
    return computed, closed
