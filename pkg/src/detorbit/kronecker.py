"""Symmetric group characters and (symmetric) Kronecker coefficients.

Characters are computed exactly by the Murnaghan-Nakayama border-strip
recursion over beta-sets, with global memoization.  Kronecker coefficients
are class-weighted triple character sums; the symmetric variant adds the
square-class trick: the multiplicity of W_lam in the symmetric square of
W_mu is (1/n!) sum_g chi_lam(g) (chi_mu(g)^2 + chi_mu(g^2)) / 2, evaluated
classwise with the cycle type of g^2 derived combinatorially (an l-cycle
squares to one l-cycle for odd l, two l/2-cycles for even l).

Every public result is an exact nonnegative integer; a non-integral class
sum aborts, since it can only mean a character bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

from .errors import BudgetExceeded

__all__ = [
    "Partition",
    "CharacterTable",
    "PositivityReport",
    "partitions",
    "class_size",
    "mn_character",
    "partition_dimension",
    "square_cycle_type",
    "kronecker_coeff",
    "symmetric_kronecker_coeff",
    "alternating_kronecker_coeff",
    "rectangle_sk_positivity",
]

Partition = tuple[int, ...]

DEFAULT_MAX_N = 12


def _check_partition(lam: Sequence[int]) -> Partition:
    lam = tuple(lam)
    if any(a <= 0 for a in lam):
        raise ValueError("parts must be positive")
    if any(lam[j] < lam[j + 1] for j in range(len(lam) - 1)):
        raise ValueError("parts must be weakly decreasing")
    return lam


def partitions(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of n in descending lexicographic order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        yield ()
        return
    top = n if max_part is None else min(n, max_part)
    for first in range(top, 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def class_size(mu: Sequence[int]) -> int:
    """Size of the conjugacy class with cycle type mu: n! / z_mu."""
    mu = _check_partition(mu)
    n = sum(mu)
    z = 1
    mult: dict[int, int] = {}
    for part in mu:
        mult[part] = mult.get(part, 0) + 1
    for part, k in mult.items():
        z *= part**k * factorial(k)
    return factorial(n) // z


@lru_cache(maxsize=None)
def _mn(lam: Partition, mu: Partition) -> int:
    if not mu:
        return 1
    t = mu[0]
    rest = mu[1:]
    k = len(lam)
    beta = [lam[j] + (k - 1 - j) for j in range(k)]
    bset = set(beta)
    total = 0
    for b in beta:
        nb = b - t
        if nb < 0 or nb in bset:
            continue
        height = sum(1 for c in beta if nb < c < b)
        new_beta = sorted((c if c != b else nb for c in beta), reverse=True)
        new_lam = tuple(
            nb_j - (k - 1 - j) for j, nb_j in enumerate(new_beta)
        )
        while new_lam and new_lam[-1] == 0:
            new_lam = new_lam[:-1]
        value = _mn(new_lam, rest)
        total += -value if height & 1 else value
    return total


def mn_character(lam: Sequence[int], mu: Sequence[int]) -> int:
    """Exact character value chi_lam at cycle type mu (border-strip recursion)."""
    lam = _check_partition(lam)
    mu = _check_partition(mu)
    if sum(lam) != sum(mu):
        raise ValueError("partition sizes differ")
    return _mn(lam, mu)


def partition_dimension(lam: Sequence[int]) -> int:
    """Dimension of the irreducible module: hook length formula."""
    lam = _check_partition(lam)
    n = sum(lam)
    if n == 0:
        return 1
    conj = [sum(1 for a in lam if a > j) for j in range(lam[0])]
    hooks = 1
    for r, length in enumerate(lam):
        for c in range(length):
            hooks *= length - c + conj[c] - r - 1
    return factorial(n) // hooks


def square_cycle_type(mu: Sequence[int]) -> Partition:
    """Cycle type of g^2 given the cycle type of g."""
    parts: list[int] = []
    for part in mu:
        if part % 2:
            parts.append(part)
        else:
            parts.extend([part // 2, part // 2])
    return tuple(sorted(parts, reverse=True))


@dataclass
class CharacterTable:
    """Full exact character table of the symmetric group on n symbols.

    Rows are indexed by the partition labelling the irreducible module,
    columns by cycle type; both run in descending lexicographic order.
    """

    n: int
    parts: list[Partition]
    sizes: list[int]
    values: list[list[int]]

    @classmethod
    def build(cls, n: int, max_n: int = DEFAULT_MAX_N) -> "CharacterTable":
        if n > max_n:
            raise BudgetExceeded(f"character table for n={n} > {max_n}")
        parts = list(partitions(n))
        sizes = [class_size(mu) for mu in parts]
        values = [[_mn(lam, mu) for mu in parts] for lam in parts]
        return cls(n=n, parts=parts, sizes=sizes, values=values)

    def row_orthogonality_ok(self) -> bool:
        """sum_mu |C_mu| chi_lam(mu) chi_rho(mu) == n! delta_{lam,rho}."""
        target = factorial(self.n)
        k = len(self.parts)
        for a in range(k):
            for b in range(a, k):
                total = sum(
                    self.sizes[c] * self.values[a][c] * self.values[b][c]
                    for c in range(k)
                )
                if total != (target if a == b else 0):
                    return False
        return True

    def column_orthogonality_ok(self) -> bool:
        """sum_lam chi_lam(mu) chi_lam(nu) == delta_{mu,nu} n!/|C_mu|."""
        target = factorial(self.n)
        k = len(self.parts)
        for a in range(k):
            for b in range(a, k):
                total = sum(self.values[r][a] * self.values[r][b] for r in range(k))
                expect = target // self.sizes[a] if a == b else 0
                if total != expect:
                    return False
        return True

    def index(self, lam: Sequence[int]) -> int:
        return self.parts.index(_check_partition(lam))


def _class_sum_divided(n: int, terms: Iterator[tuple[int, int]], divisor: int) -> int:
    """Sum |C| * value over classes, divided exactly by divisor."""
    total = 0
    for size, value in terms:
        total += size * value
    if total % divisor:
        raise RuntimeError("internal error: non-integer character sum")
    result = total // divisor
    if result < 0:
        raise RuntimeError("internal error: negative multiplicity")
    return result


def kronecker_coeff(
    lam: Sequence[int], mu: Sequence[int], nu: Sequence[int]
) -> int:
    """Multiplicity of W_lam in W_mu ox W_nu: (1/n!) sum |C| chi chi chi."""
    lam, mu, nu = map(_check_partition, (lam, mu, nu))
    n = sum(lam)
    if sum(mu) != n or sum(nu) != n:
        raise ValueError("partition sizes differ")
    return _class_sum_divided(
        n,
        (
            (class_size(rho), _mn(lam, rho) * _mn(mu, rho) * _mn(nu, rho))
            for rho in partitions(n)
        ),
        factorial(n),
    )


def symmetric_kronecker_coeff(lam: Sequence[int], mu: Sequence[int]) -> int:
    """Multiplicity of W_lam in the symmetric square of W_mu."""
    lam, mu = map(_check_partition, (lam, mu))
    n = sum(lam)
    if sum(mu) != n:
        raise ValueError("partition sizes differ")
    return _class_sum_divided(
        n,
        (
            (
                class_size(rho),
                _mn(lam, rho)
                * (_mn(mu, rho) ** 2 + _mn(mu, square_cycle_type(rho))),
            )
            for rho in partitions(n)
        ),
        2 * factorial(n),
    )


def alternating_kronecker_coeff(lam: Sequence[int], mu: Sequence[int]) -> int:
    """Multiplicity of W_lam in the alternating square of W_mu."""
    lam, mu = map(_check_partition, (lam, mu))
    n = sum(lam)
    if sum(mu) != n:
        raise ValueError("partition sizes differ")
    return _class_sum_divided(
        n,
        (
            (
                class_size(rho),
                _mn(lam, rho)
                * (_mn(mu, rho) ** 2 - _mn(mu, square_cycle_type(rho))),
            )
            for rho in partitions(n)
        ),
        2 * factorial(n),
    )


@dataclass
class PositivityReport:
    """Symmetric Kronecker values sk(m*lam_bar, rectangle, rectangle) for lam_bar of d."""

    m: int
    d: int
    n: int
    entries: list[dict]
    all_positive: bool

    def to_json_list(self) -> list[dict]:
        return self.entries


def rectangle_sk_positivity(
    m: int, d: int, *, max_n: int = DEFAULT_MAX_N
) -> PositivityReport:
    """Check sk(m*lam_bar, d^m, d^m) > 0 for every lam_bar of d with <= m parts.

    The rectangle d^m is the m-part partition (d,...,d) of n = d*m.
    """
    if m < 1 or d < 1:
        raise ValueError("m and d must be positive")
    n = d * m
    if n > max_n:
        raise BudgetExceeded(f"n = d*m = {n} exceeds the table budget {max_n}")
    rectangle = (d,) * m
    entries = []
    for lam_bar in partitions(d):
        if len(lam_bar) > m:
            continue
        scaled = tuple(m * a for a in lam_bar)
        sk = symmetric_kronecker_coeff(scaled, rectangle)
        entries.append(
            {
                "lambda_bar": list(lam_bar),
                "m_lambda_bar": list(scaled),
                "sk": str(sk),
                "positive": sk > 0,
            }
        )
    return PositivityReport(
        m=m,
        d=d,
        n=n,
        entries=entries,
        all_positive=all(e["positive"] for e in entries),
    )
