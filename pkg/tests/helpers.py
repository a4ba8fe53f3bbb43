"""Shared generators for the randomized test suites (all exact arithmetic)."""

from __future__ import annotations

from fractions import Fraction
from random import Random

from detorbit.invariant import HomPoly
from detorbit.orbit import RestrictionMatrix


def random_sl_matrix(n: int, rng: Random, steps: int = 6) -> list[list[Fraction]]:
    """Random integer matrix of determinant exactly 1 (product of shears)."""
    mat = [[Fraction(1 if a == b else 0) for b in range(n)] for a in range(n)]
    if n == 1:
        return mat
    for _ in range(steps):
        a = rng.randrange(n)
        b = rng.randrange(n)
        while b == a:
            b = rng.randrange(n)
        c = Fraction(rng.randint(-3, 3))
        for j in range(n):
            mat[a][j] += c * mat[b][j]
    return mat


def random_hompoly(nvars: int, degree: int, rng: Random, density: float = 0.7) -> HomPoly:
    """Random form with small rational coefficients, at least one term."""
    exps = _compositions(degree, nvars)
    terms = []
    for exp in exps:
        if rng.random() < density:
            c = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
            if c:
                terms.append((exp, c))
    if not terms:
        exp = exps[rng.randrange(len(exps))]
        terms.append((exp, Fraction(1)))
    return HomPoly.from_terms(nvars, degree, terms)


def _compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return out


def random_restriction_matrix(m: int, i: int, rng: Random) -> RestrictionMatrix:
    """Random integer m x i matrix with entries in [-4, 4]."""
    return RestrictionMatrix.from_rows(
        [[rng.randint(-4, 4) for _ in range(i)] for _ in range(m)]
    )


def cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    """Cycle type of a 0-based permutation tuple, as a decreasing partition."""
    n = len(perm)
    seen = [False] * n
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))
