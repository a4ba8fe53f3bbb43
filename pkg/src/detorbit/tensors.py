"""Exact sparse tensor algebra over the symbol alphabet {1..m}.

Tensors are sparse maps from fixed-length index words (stored as ``bytes`` of
0-based symbols) to rationals.  Permutations of {0..k-1} act on tensor slots
from the left: sigma moves the content of slot j to slot sigma[j].  Young
symmetrizers of rectangular tableaux applied to symmetrized basis words give
both sides of the pairing identities that connect this module to the signed
Latin tallies of :mod:`detorbit.latin`:

* the rectangle symmetrizer pairing equals (1/m!)^i * sum over patterns of
  (plus - minus)^2, and
* at i = m the pairing against the tableau word equals the signed Latin
  square count.

Dual and primal tensors share one representation; the pairing is the plain
coefficient contraction in the monomial basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import factorial
from random import Random
from typing import Iterable, Iterator, Optional, Sequence

from .errors import BudgetExceeded
from . import latin

__all__ = [
    "SparseTensor",
    "Tableau",
    "SignedGroupElement",
    "ScanReport",
    "symmetrized_basis_tensor",
    "word_tensor",
    "rectangular_tableau",
    "row_group",
    "col_group",
    "apply_symmetrizer",
    "pairing",
    "rectangle_symmetrizer_pairing",
    "pattern_imbalance_pairing",
    "pairing_identity_report",
    "latin_sign_sum_pairing",
    "translated_pairing_scan",
]

DEFAULT_GROUP_CAP = 10**6
DEFAULT_WORK_CAP = 2 * 10**6

# Known Latin square counts, used only as feasibility estimates.
_SQUARE_COUNTS = {
    1: 1,
    2: 2,
    3: 12,
    4: 576,
    5: 161280,
    6: 812851200,
    7: 61479419904000,
}


@dataclass
class SparseTensor:
    """Rank-k tensor over an m-symbol alphabet with exact rational entries.

    Keys are length-k ``bytes`` of 0-based symbols; zero coefficients are
    never stored.  Iteration for output is over sorted keys.
    """

    rank: int
    m: int
    data: dict[bytes, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for key, coeff in list(self.data.items()):
            if len(key) != self.rank or any(s >= self.m for s in key):
                raise ValueError("index word out of range")
            if coeff == 0:
                del self.data[key]

    def nnz(self) -> int:
        return len(self.data)

    def copy(self) -> "SparseTensor":
        return SparseTensor(self.rank, self.m, dict(self.data))

    def scale(self, c: Fraction | int) -> "SparseTensor":
        c = Fraction(c)
        if c == 0:
            return SparseTensor(self.rank, self.m, {})
        return SparseTensor(self.rank, self.m, {k: v * c for k, v in self.data.items()})

    def __add__(self, other: "SparseTensor") -> "SparseTensor":
        if (self.rank, self.m) != (other.rank, other.m):
            raise ValueError("tensor shape mismatch")
        data = dict(self.data)
        for key, coeff in other.data.items():
            new = data.get(key, 0) + coeff
            if new:
                data[key] = new
            else:
                data.pop(key, None)
        return SparseTensor(self.rank, self.m, data)

    def __sub__(self, other: "SparseTensor") -> "SparseTensor":
        return self + other.scale(-1)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SparseTensor)
            and (self.rank, self.m) == (other.rank, other.m)
            and self.data == other.data
        )

    def tensor(self, other: "SparseTensor") -> "SparseTensor":
        """Tensor product: keys concatenate, coefficients multiply."""
        if self.m != other.m:
            raise ValueError("alphabet mismatch")
        data = {}
        for ka, va in self.data.items():
            for kb, vb in other.data.items():
                data[ka + kb] = va * vb
        return SparseTensor(self.rank + other.rank, self.m, data)

    def tensor_power(self, i: int) -> "SparseTensor":
        out = SparseTensor(0, self.m, {b"": Fraction(1)})
        for _ in range(i):
            out = out.tensor(self)
        return out

    def permute_slots(self, perm: Sequence[int]) -> "SparseTensor":
        """Left action: slot perm[j] of the result carries slot j of self."""
        if len(perm) != self.rank:
            raise ValueError("permutation rank mismatch")
        data = {}
        for key, coeff in self.data.items():
            out = bytearray(self.rank)
            for j, s in enumerate(key):
                out[perm[j]] = s
            data[bytes(out)] = coeff
        return SparseTensor(self.rank, self.m, data)

    def items_sorted(self) -> Iterator[tuple[bytes, Fraction]]:
        for key in sorted(self.data):
            yield key, self.data[key]

    def to_json_dict(self) -> dict:
        return {
            "rank": self.rank,
            "m": self.m,
            "entries": [
                {
                    "idx": [s + 1 for s in key],
                    "num": str(coeff.numerator),
                    "den": str(coeff.denominator),
                }
                for key, coeff in self.items_sorted()
            ],
        }


def pairing(dual: SparseTensor, primal: SparseTensor) -> Fraction:
    """Coefficient contraction over common index words."""
    if dual.rank != primal.rank:
        raise ValueError("rank mismatch")
    if dual.m != primal.m:
        raise ValueError("alphabet mismatch")
    small, big = (
        (dual.data, primal.data)
        if len(dual.data) <= len(primal.data)
        else (primal.data, dual.data)
    )
    total = Fraction(0)
    for key, coeff in small.items():
        other = big.get(key)
        if other is not None:
            total += coeff * other
    return total


def symmetrized_basis_tensor(m: int) -> SparseTensor:
    """Average of all permutation words: every word carries coefficient 1/m!.

    Serves as both the dual- and primal-side symmetrized word (the two sides
    have identical coordinates in the monomial basis).
    """
    if m < 1:
        raise ValueError("m must be positive")
    coeff = Fraction(1, factorial(m))
    data = {bytes(word): coeff for word in permutations(range(m))}
    return SparseTensor(m, m, data)


# ---------------------------------------------------------------------------
# Tableaux and Young symmetrizers.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tableau:
    """A filling of a Young diagram with the labels 1..k, one per cell."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        shape = self.shape
        if any(shape[j] < shape[j + 1] for j in range(len(shape) - 1)):
            raise ValueError("shape must be weakly decreasing")
        labels = [c for row in self.rows for c in row]
        if sorted(labels) != list(range(1, len(labels) + 1)):
            raise ValueError("filling must be a bijection onto 1..k")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.rows)

    @property
    def size(self) -> int:
        return sum(self.shape)

    def columns(self) -> list[list[int]]:
        ncols = self.shape[0] if self.rows else 0
        return [
            [row[c] for row in self.rows if len(row) > c] for c in range(ncols)
        ]

    @classmethod
    def row_reading(cls, shape: Sequence[int]) -> "Tableau":
        rows = []
        nxt = 1
        for length in shape:
            rows.append(tuple(range(nxt, nxt + length)))
            nxt += length
        return cls(tuple(rows))


def rectangular_tableau(i: int, m: int) -> Tableau:
    """The row-reading tableau with i rows of length m."""
    return Tableau.row_reading((m,) * i)


@dataclass(frozen=True)
class SignedGroupElement:
    """A slot permutation of {0..k-1} with an attached sign."""

    perm: tuple[int, ...]
    sign: int


def _group_order(cells: list[list[int]]) -> int:
    order = 1
    for block in cells:
        order *= factorial(len(block))
    return order


def _iter_block_perms(
    k: int, blocks: list[list[int]], signed: bool
) -> Iterator[tuple[tuple[int, ...], int]]:
    """All permutations fixing each block setwise, as full slot maps.

    Cell labels are 1-based; slots are 0-based.  With ``signed`` the sign of
    the restriction to each block is multiplied in.
    """
    slot_blocks = [[c - 1 for c in block] for block in blocks]
    for choice in product(*(permutations(block) for block in slot_blocks)):
        perm = list(range(k))
        sign = 1
        for block, image in zip(slot_blocks, choice):
            for src, dst in zip(block, image):
                perm[src] = dst
            if signed:
                inv = 0
                pos = {c: t for t, c in enumerate(block)}
                idx = [pos[c] for c in image]
                for a in range(len(idx)):
                    for b in range(a + 1, len(idx)):
                        if idx[b] < idx[a]:
                            inv += 1
                if inv & 1:
                    sign = -sign
        yield tuple(perm), sign


def row_group(
    t: Tableau, max_order: int = DEFAULT_GROUP_CAP
) -> list[SignedGroupElement]:
    """All row-preserving slot permutations, every sign +1."""
    blocks = [list(row) for row in t.rows]
    if _group_order(blocks) > max_order:
        raise BudgetExceeded("symmetrizer too large", _group_order(blocks))
    return [
        SignedGroupElement(perm, 1)
        for perm, _ in _iter_block_perms(t.size, blocks, signed=False)
    ]


def col_group(
    t: Tableau, max_order: int = DEFAULT_GROUP_CAP
) -> list[SignedGroupElement]:
    """All column-preserving slot permutations, signed by parity."""
    blocks = t.columns()
    if _group_order(blocks) > max_order:
        raise BudgetExceeded("symmetrizer too large", _group_order(blocks))
    return [
        SignedGroupElement(perm, sign)
        for perm, sign in _iter_block_perms(t.size, blocks, signed=True)
    ]


def apply_symmetrizer(
    t: Tableau, x: SparseTensor, max_work: int = DEFAULT_WORK_CAP
) -> SparseTensor:
    """Row-symmetrize then signed column-sum: (sum_col sign * mu)(sum_row sigma) x.

    The work estimate (group order times current support) is checked before
    each stage; composing the output with a column transposition on the left
    negates it.
    """
    if x.rank != t.size:
        raise ValueError("tensor rank must equal the tableau size")
    row_blocks = [list(row) for row in t.rows]
    col_blocks = t.columns()
    row_order = _group_order(row_blocks)
    if row_order * max(1, x.nnz()) > max_work:
        raise BudgetExceeded("symmetrizer too large", row_order * x.nnz())
    k = t.size
    acc: dict[bytes, Fraction] = {}
    for perm, _ in _iter_block_perms(k, row_blocks, signed=False):
        for key, coeff in x.data.items():
            out = bytearray(k)
            for j, s in enumerate(key):
                out[perm[j]] = s
            bkey = bytes(out)
            new = acc.get(bkey, 0) + coeff
            if new:
                acc[bkey] = new
            else:
                acc.pop(bkey, None)
    col_order = _group_order(col_blocks)
    if col_order * max(1, len(acc)) > max_work:
        raise BudgetExceeded("symmetrizer too large", col_order * len(acc))
    out_data: dict[bytes, Fraction] = {}
    for perm, sign in _iter_block_perms(k, col_blocks, signed=True):
        for key, coeff in acc.items():
            out = bytearray(k)
            for j, s in enumerate(key):
                out[perm[j]] = s
            bkey = bytes(out)
            new = out_data.get(bkey, 0) + (coeff if sign > 0 else -coeff)
            if new:
                out_data[bkey] = new
            else:
                out_data.pop(bkey, None)
    return SparseTensor(k, x.m, out_data)


def word_tensor(t: Tableau, m: int) -> SparseTensor:
    """Basis word of a tableau: slot (label-1) carries the 0-based row index."""
    k = t.size
    if len(t.rows) > m:
        raise ValueError("more rows than alphabet symbols")
    word = bytearray(k)
    for r, row in enumerate(t.rows):
        for c in row:
            word[c - 1] = r
    return SparseTensor(k, m, {bytes(word): Fraction(1)})


# ---------------------------------------------------------------------------
# Pairing identities.
# ---------------------------------------------------------------------------


def _pair_with_symmetrized_power(t: SparseTensor, m: int, i: int) -> Fraction:
    """Pairing of t against the i-th tensor power of the symmetrized word.

    Avoids materializing the m!^i support: each key whose i consecutive
    length-m blocks are permutation words contributes coeff / m!^i.
    """
    if t.rank != i * m:
        raise ValueError("rank mismatch")
    target = bytes(range(m))
    total = Fraction(0)
    for key, coeff in t.data.items():
        if all(
            bytes(sorted(key[b * m : (b + 1) * m])) == target for b in range(i)
        ):
            total += coeff
    return total / Fraction(factorial(m)) ** i


def _perms_with_signs(n: int) -> list[tuple[tuple[int, ...], int]]:
    out = []
    for perm in permutations(range(n)):
        inv = 0
        for a in range(n):
            for b in range(a + 1, n):
                if perm[b] < perm[a]:
                    inv += 1
        out.append((perm, -1 if inv & 1 else 1))
    return out


def rectangle_symmetrizer_pairing(
    i: int,
    m: int,
    *,
    method: str = "latin",
    max_work: int = DEFAULT_WORK_CAP,
) -> Fraction:
    """Pairing of the symmetrized word power against its symmetrizer image.

    ``method='full'`` materializes the symmetrizer image of the i-th power of
    the symmetrized word under the i x m rectangular tableau and contracts.
    ``method='latin'`` exploits the cancellation of non-Latin terms: it scans
    Latin (i, m)-rectangles and, per rectangle, all per-column rearrangement
    tuples whose result still has permutation rows, accumulating the product
    of rearrangement signs.  Both return the exact rational value.
    """
    if not 1 <= i <= m:
        raise ValueError("need 1 <= i <= m")
    if method == "full":
        base = symmetrized_basis_tensor(m)
        power = base.tensor_power(i)
        image = apply_symmetrizer(rectangular_tableau(i, m), power, max_work)
        return pairing(power, image)
    if method != "latin":
        raise ValueError("method must be 'latin' or 'full'")

    perms_i = _perms_with_signs(i)
    total = 0

    def per_rectangle(rows, _masks, _parity):
        nonlocal total
        cols = [tuple(row[q] for row in rows) for q in range(m)]
        row_used = [0] * i

        def fill(q: int, sign: int) -> None:
            nonlocal total
            if q == m:
                total += sign
                return
            col = cols[q]
            for perm, psign in perms_i:
                if any(row_used[p] >> col[perm[p]] & 1 for p in range(i)):
                    continue
                for p in range(i):
                    row_used[p] |= 1 << col[perm[p]]
                fill(q + 1, sign * psign)
                for p in range(i):
                    row_used[p] &= ~(1 << col[perm[p]])

        fill(0, 1)

    latin._run_rows(i, m, [(1 << m) - 1] * m, (), per_rectangle)
    return Fraction(total, factorial(m) ** i)


def pattern_imbalance_pairing(
    i: int, m: int, tally: Optional[latin.SignedTally] = None
) -> Fraction:
    """(1/m!)^i times the sum over patterns of (plus - minus)^2."""
    if tally is None:
        tally = latin.signed_tally(i, m)
    return Fraction(tally.imbalance_square_sum(), factorial(m) ** i)


def pairing_identity_report(i: int, m: int, *, max_work: int = DEFAULT_WORK_CAP) -> dict:
    """Both sides of the pairing identity, plus the full-expansion cross-check."""
    lhs = rectangle_symmetrizer_pairing(i, m, method="latin")
    rhs = pattern_imbalance_pairing(i, m)
    report = {
        "i": i,
        "m": m,
        "lhs_latin": lhs,
        "rhs": rhs,
        "equal": lhs == rhs,
    }
    try:
        full = rectangle_symmetrizer_pairing(i, m, method="full", max_work=max_work)
        report["lhs_full"] = full
        report["equal"] = report["equal"] and full == lhs
    except BudgetExceeded:
        report["lhs_full"] = None
    return report


def latin_sign_sum_pairing(
    m: int, *, method: str = "search", max_squares: int = 10**6
) -> int:
    """Pairing of the symmetrized word power against the symmetrized tableau word.

    Equals the sum of sign products over all m-tuples of column permutations
    whose matrix is a Latin square, i.e. the signed Latin square count.
    ``method='search'`` runs a column-by-column backtracking sum;
    ``method='explicit'`` materializes the symmetrizer image and contracts
    (small m only).
    """
    if m < 1:
        raise ValueError("m must be positive")
    est = _SQUARE_COUNTS.get(m)
    if est is None or est > max_squares:
        raise BudgetExceeded(
            f"latin sign sum at m={m} needs ~{est or 'huge'} visits", est
        )
    if method == "explicit":
        t = rectangular_tableau(m, m)
        image = apply_symmetrizer(t, word_tensor(t, m))
        value = _pair_with_symmetrized_power(image, m, m)
        if value.denominator != 1:
            raise RuntimeError("internal error: non-integer sign sum")
        return value.numerator
    if method != "search":
        raise ValueError("method must be 'search' or 'explicit'")
    row_used = [0] * m
    total = 0
    perms_m = _perms_with_signs(m)

    def fill(q: int, sign: int) -> None:
        nonlocal total
        if q == m:
            total += sign
            return
        for perm, psign in perms_m:
            for p in range(m):
                if row_used[p] >> perm[p] & 1:
                    break
            else:
                for p in range(m):
                    row_used[p] |= 1 << perm[p]
                fill(q + 1, sign * psign)
                for p in range(m):
                    row_used[p] &= ~(1 << perm[p])

    fill(0, 1)
    return total


@dataclass
class ScanReport:
    """Values of the pairing against slot-translated symmetrizer images."""

    m: int
    base_value: int
    checked: int
    ok: bool
    value_counts: dict[str, int]
    violations: list[tuple[tuple[int, ...], Fraction]]


def translated_pairing_scan(
    m: int,
    taus: Optional[Iterable[Sequence[int]]] = None,
    *,
    samples: int = 24,
    seed: int = 0,
    max_work: int = DEFAULT_WORK_CAP,
) -> ScanReport:
    """Check that every slot translation scales the pairing by 0 or +-1.

    With ``taus`` omitted, scans all of S_{m^2} when m = 2 and a seeded
    sample otherwise.
    """
    t = rectangular_tableau(m, m)
    image = apply_symmetrizer(t, word_tensor(t, m), max_work)
    base = latin_sign_sum_pairing(m)
    k = m * m
    if taus is None:
        if m == 2:
            tau_list = [tuple(p) for p in permutations(range(k))]
        else:
            rng = Random(seed)
            tau_list = []
            for _ in range(samples):
                perm = list(range(k))
                rng.shuffle(perm)
                tau_list.append(tuple(perm))
    else:
        tau_list = [tuple(tau) for tau in taus]
    allowed = {Fraction(0), Fraction(base), Fraction(-base)}
    counts: dict[str, int] = {}
    violations: list[tuple[tuple[int, ...], Fraction]] = []
    for tau in tau_list:
        value = _pair_with_symmetrized_power(image.permute_slots(tau), m, m)
        counts[str(value)] = counts.get(str(value), 0) + 1
        if value not in allowed:
            violations.append((tau, value))
    return ScanReport(
        m=m,
        base_value=base,
        checked=len(tau_list),
        ok=not violations,
        value_counts=dict(sorted(counts.items())),
        violations=violations,
    )
