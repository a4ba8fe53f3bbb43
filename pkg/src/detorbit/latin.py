"""Exact signed enumeration of Latin rectangles.

A Latin (i, m)-rectangle has i rows, each a permutation of {1..m}, with
pairwise distinct entries in every column.  Each column carries the sign of
the product of pairwise differences read top to bottom; the rectangle sign
eps_c is the product of the column signs.  The per-pattern tallies of
column-even / column-odd rectangles computed here feed the tensor pairing
identities in :mod:`detorbit.tensors`, and the single-pattern signed count at
i = m is the quantity of the Alon-Tarsi / column Latin square conjecture.

Symbols are stored 0-based (bitmask friendly) and rendered 1-based in all
public input and output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import factorial
from multiprocessing import Pool
from typing import Callable, Iterable, Optional, Sequence

__all__ = [
    "LatinRectangle",
    "Pattern",
    "SignedTally",
    "SignFactorizationReport",
    "column_sign",
    "rect_sign",
    "pattern_of",
    "is_valid_pattern",
    "enumerate_latin_rectangles",
    "signed_tally",
    "column_order_tally",
    "alon_tarsi_difference",
    "project_last_row",
    "verify_sign_factorization",
    "concatenate",
    "write_checkpoint_record",
    "load_checkpoint",
]

# Ordered m-tuple of sorted column content sets, 1-based symbols.
Pattern = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class LatinRectangle:
    """An i x m array with permutation rows and distinct-entry columns.

    ``entries`` holds 0-based symbols; use :meth:`from_rows` / :meth:`to_rows`
    for the 1-based rendering.
    """

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = self.entries
        if not rows or not rows[0]:
            raise ValueError("empty rectangle")
        m = len(rows[0])
        if len(rows) > m:
            raise ValueError("too many rows")
        full = (1 << m) - 1
        for row in rows:
            if len(row) != m:
                raise ValueError("ragged rows")
            mask = 0
            for s in row:
                if not 0 <= s < m:
                    raise ValueError(f"symbol {s + 1} out of range 1..{m}")
                mask |= 1 << s
            if mask != full:
                raise ValueError("row is not a permutation")
        for q in range(m):
            col = [row[q] for row in rows]
            if len(set(col)) != len(col):
                raise ValueError("column has repeated entries")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "LatinRectangle":
        """Build from rows of 1-based symbols."""
        return cls(tuple(tuple(s - 1 for s in row) for row in rows))

    @property
    def i(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries[0])

    def to_rows(self) -> list[list[int]]:
        """Rows with 1-based symbols."""
        return [[s + 1 for s in row] for row in self.entries]

    def column(self, q: int) -> tuple[int, ...]:
        """Column q (0-based index), 1-based symbols, top to bottom."""
        return tuple(row[q] + 1 for row in self.entries)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(s + 1) for s in row) for row in self.entries)


def column_sign(column: Sequence[int]) -> int:
    """Sign of prod_{p<p'} (a_{p'} - a_p) over a distinct-entry column.

    The empty product convention gives +1 for a single entry.
    """
    if len(set(column)) != len(column):
        raise ValueError("not a valid Latin column")
    inv = 0
    for p in range(len(column)):
        for pp in range(p + 1, len(column)):
            if column[pp] < column[p]:
                inv += 1
    return -1 if inv & 1 else 1


def rect_sign(rect: LatinRectangle) -> int:
    """eps_c: product of the column signs."""
    sign = 1
    for q in range(rect.m):
        sign *= column_sign([row[q] for row in rect.entries])
    return sign


def pattern_of(rect: LatinRectangle) -> Pattern:
    """Ordered tuple of sorted column contents (1-based)."""
    return tuple(
        tuple(sorted(row[q] + 1 for row in rect.entries)) for q in range(rect.m)
    )


def is_valid_pattern(pattern: Pattern, i: int, m: int) -> bool:
    """Each subset has size i and every symbol of 1..m occurs in exactly i subsets."""
    if len(pattern) != m:
        return False
    occur = [0] * m
    for subset in pattern:
        if len(subset) != i or len(set(subset)) != i:
            return False
        for s in subset:
            if not 1 <= s <= m:
                return False
            occur[s - 1] += 1
    return all(c == i for c in occur)


def _pattern_masks(pattern: Pattern, i: int, m: int) -> list[int]:
    if not is_valid_pattern(pattern, i, m):
        raise ValueError("invalid pattern")
    masks = []
    for subset in pattern:
        mask = 0
        for s in subset:
            mask |= 1 << (s - 1)
        masks.append(mask)
    return masks


def _pattern_from_masks(masks: Sequence[int], m: int) -> Pattern:
    return tuple(
        tuple(s + 1 for s in range(m) if mask >> s & 1) for mask in masks
    )


# ---------------------------------------------------------------------------
# Enumeration cores.  Row order: fill row by row, each row left to right,
# symbols ascending, so rectangles appear in row-major lexicographic order.
# Column order: independent cross-check filling column by column.  Both track
# the sign parity incrementally: placing s under a column with used-mask u
# adds popcount(u >> (s+1)) inversions.
# ---------------------------------------------------------------------------


def _run_rows(
    i: int,
    m: int,
    allowed: Sequence[int],
    prefix: Sequence[Sequence[int]],
    on_leaf: Optional[Callable[[list[tuple[int, ...]], list[int], int], None]],
    forced_first: Optional[Sequence[int]] = None,
) -> int:
    """DFS over rectangles extending ``prefix`` (0-based rows).

    ``on_leaf(rows, col_masks, parity)`` sees transient state; parity is the
    inversion parity of eps_c.  Returns the number of leaves visited.
    ``forced_first`` pins the first-column entry of each row.
    """
    col_mask = [0] * m
    parity0 = 0
    rows: list[tuple[int, ...]] = []
    for p, row in enumerate(prefix):
        for q, s in enumerate(row):
            if col_mask[q] >> s & 1 or not allowed[q] >> s & 1:
                raise ValueError("invalid prefix rows")
            parity0 ^= (col_mask[q] >> (s + 1)).bit_count() & 1
            col_mask[q] |= 1 << s
        rows.append(tuple(row))
    count = 0
    bufs = [[0] * m for _ in range(i)]

    def fill(p: int, q: int, row_mask: int, parity: int) -> None:
        nonlocal count
        if q == m:
            rows.append(tuple(bufs[p]))
            if p + 1 == i:
                count += 1
                if on_leaf is not None:
                    on_leaf(rows, col_mask, parity)
            else:
                fill(p + 1, 0, 0, parity)
            rows.pop()
            return
        avail = allowed[q] & ~col_mask[q] & ~row_mask
        if forced_first is not None and q == 0:
            avail &= 1 << forced_first[p]
        while avail:
            bit = avail & -avail
            avail ^= bit
            s = bit.bit_length() - 1
            inv = (col_mask[q] >> (s + 1)).bit_count() & 1
            bufs[p][q] = s
            col_mask[q] |= bit
            fill(p, q + 1, row_mask | bit, parity ^ inv)
            col_mask[q] ^= bit

    if len(prefix) == i:
        count = 1
        if on_leaf is not None:
            on_leaf(rows, col_mask, parity0)
    else:
        fill(len(prefix), 0, 0, parity0)
    return count


def _run_columns(
    i: int,
    m: int,
    allowed: Sequence[int],
    on_leaf: Optional[Callable[[list[int], int], None]],
    forced_first: Optional[Sequence[int]] = None,
) -> int:
    """Column-by-column DFS; ``on_leaf(col_masks, parity)`` per rectangle."""
    col_masks = [0] * m
    row_mask = [0] * i
    count = 0

    def fill(q: int, p: int, cmask: int, parity: int) -> None:
        nonlocal count
        if p == i:
            col_masks[q] = cmask
            if q + 1 == m:
                count += 1
                if on_leaf is not None:
                    on_leaf(col_masks, parity)
            else:
                fill(q + 1, 0, 0, parity)
            col_masks[q] = 0
            return
        avail = allowed[q] & ~cmask & ~row_mask[p]
        if forced_first is not None and q == 0:
            avail &= 1 << forced_first[p]
        while avail:
            bit = avail & -avail
            avail ^= bit
            s = bit.bit_length() - 1
            inv = (cmask >> (s + 1)).bit_count() & 1
            row_mask[p] |= bit
            fill(q, p + 1, cmask | bit, parity ^ inv)
            row_mask[p] ^= bit

    fill(0, 0, 0, 0)
    return count


def _check_dims(i: int, m: int) -> None:
    if m < 1 or i < 1:
        raise ValueError("dimensions must be positive")
    if i > m:
        raise ValueError("too many rows")
    if m > 64:
        raise ValueError("alphabet larger than 64 symbols is unsupported")


def enumerate_latin_rectangles(
    i: int,
    m: int,
    *,
    pattern: Optional[Pattern] = None,
    visitor: Optional[Callable[[LatinRectangle], None]] = None,
) -> int:
    """Visit every Latin (i, m)-rectangle once, in row-major lexicographic order.

    With ``pattern`` given, visits exactly the rectangles of that pattern.
    Returns the number visited.
    """
    _check_dims(i, m)
    allowed = (
        _pattern_masks(pattern, i, m) if pattern is not None else [(1 << m) - 1] * m
    )
    if visitor is None:
        return _run_rows(i, m, allowed, (), None)

    def leaf(rows, _masks, _parity):
        visitor(LatinRectangle(tuple(rows)))

    return _run_rows(i, m, allowed, (), leaf)


# ---------------------------------------------------------------------------
# Signed tallies.
# ---------------------------------------------------------------------------


@dataclass
class SignedTally:
    """Per-pattern counts of column-even (plus) and column-odd (minus) rectangles."""

    i: int
    m: int
    counts: dict[Pattern, tuple[int, int]]

    def total(self) -> int:
        return sum(p + n for p, n in self.counts.values())

    def signed_sum(self) -> int:
        return sum(p - n for p, n in self.counts.values())

    def imbalance_square_sum(self) -> int:
        """sum over patterns of (plus - minus)^2."""
        return sum((p - n) ** 2 for p, n in self.counts.values())

    def merge(self, other: "SignedTally") -> None:
        if (self.i, self.m) != (other.i, other.m):
            raise ValueError("tally shape mismatch")
        for key, (p, n) in other.counts.items():
            op, on = self.counts.get(key, (0, 0))
            self.counts[key] = (op + p, on + n)

    def to_json_dict(self) -> dict:
        return {
            "i": self.i,
            "m": self.m,
            "patterns": [
                {
                    "pattern": [list(sub) for sub in key],
                    "plus": str(p),
                    "minus": str(n),
                }
                for key, (p, n) in sorted(self.counts.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SignedTally":
        counts = {
            tuple(tuple(sub) for sub in rec["pattern"]): (
                int(rec["plus"]),
                int(rec["minus"]),
            )
            for rec in obj["patterns"]
        }
        return cls(int(obj["i"]), int(obj["m"]), counts)

    def to_csv_text(self) -> str:
        lines = ["i,m,pattern,plus,minus"]
        for key, (p, n) in sorted(self.counts.items()):
            pat = ";".join(",".join(str(s) for s in sub) for sub in key)
            lines.append(f"{self.i},{self.m},{pat},{p},{n}")
        return "\n".join(lines) + "\n"


def _tally_leaf_factory(bucket: dict):
    def leaf(_rows, col_masks, parity):
        key = tuple(col_masks)
        cur = bucket.get(key)
        if cur is None:
            cur = [0, 0]
            bucket[key] = cur
        cur[parity] += 1

    return leaf


def _bucket_to_tally(i: int, m: int, bucket: dict) -> SignedTally:
    counts = {
        _pattern_from_masks(key, m): (pn[0], pn[1]) for key, pn in bucket.items()
    }
    return SignedTally(i, m, counts)


def _prefix_depth(i: int) -> int:
    # First-two-rows partitioning; degenerate row counts get shallower blocks.
    return 0 if i == 1 else (1 if i == 2 else 2)


def _list_prefixes(
    i: int, m: int, allowed: Sequence[int], forced_first: Optional[Sequence[int]]
) -> list[tuple[tuple[int, ...], ...]]:
    depth = _prefix_depth(i)
    out: list[tuple[tuple[int, ...], ...]] = []
    _run_rows(
        depth,
        m,
        allowed,
        (),
        lambda rows, _m, _p: out.append(tuple(rows)),
        forced_first[:depth] if forced_first is not None else None,
    )
    return out


def _block_job(args) -> tuple[tuple, dict]:
    i, m, allowed, prefix, forced_first = args
    bucket: dict = {}
    _run_rows(i, m, allowed, prefix, _tally_leaf_factory(bucket), forced_first)
    return prefix, {key: tuple(pn) for key, pn in bucket.items()}


def _tally_by_blocks(
    i: int,
    m: int,
    allowed: Sequence[int],
    forced_first: Optional[Sequence[int]],
    processes: int,
    checkpoint_path: Optional[str],
    record_patterns: bool,
) -> dict:
    """Prefix-partitioned tally with optional worker pool and checkpointing.

    Results are merged in lexicographic prefix order, so they do not depend
    on the worker schedule.  Checkpoint records carry (i, m, reduced) and
    records from a different configuration are ignored, as are prefixes
    outside the current partition.
    """
    prefixes = _list_prefixes(i, m, allowed, forced_first)
    reduced = forced_first is not None
    done: dict[tuple, dict] = {}
    if checkpoint_path is not None:
        loaded = load_checkpoint(checkpoint_path, m, i=i, reduced=reduced)
        valid = set(prefixes)
        done = {p: b for p, b in loaded.items() if p in valid}
    todo = [p for p in prefixes if p not in done]
    results: dict[tuple, dict] = dict(done)
    meta = {"i": i, "m": m, "reduced": reduced}
    jobs = [(i, m, tuple(allowed), p, forced_first) for p in todo]
    if processes > 1 and len(jobs) > 1:
        with Pool(processes) as pool:
            for prefix, bucket in pool.imap_unordered(
                _block_job, jobs, chunksize=max(1, len(jobs) // (8 * processes))
            ):
                results[prefix] = bucket
                if checkpoint_path is not None:
                    write_checkpoint_record(
                        checkpoint_path, prefix, bucket, m, record_patterns, meta
                    )
    else:
        for job in jobs:
            prefix, bucket = _block_job(job)
            results[prefix] = bucket
            if checkpoint_path is not None:
                write_checkpoint_record(
                    checkpoint_path, prefix, bucket, m, record_patterns, meta
                )
    merged: dict = {}
    for prefix in sorted(results):
        for key, (p, n) in sorted(results[prefix].items()):
            cur = merged.get(key)
            if cur is None:
                merged[key] = [p, n]
            else:
                cur[0] += p
                cur[1] += n
    return merged


def signed_tally(
    i: int,
    m: int,
    *,
    pattern: Optional[Pattern] = None,
    processes: int = 1,
    checkpoint_path: Optional[str] = None,
) -> SignedTally:
    """Exact per-pattern (plus, minus) counts over all Latin (i, m)-rectangles."""
    _check_dims(i, m)
    allowed = (
        _pattern_masks(pattern, i, m) if pattern is not None else [(1 << m) - 1] * m
    )
    bucket = _tally_by_blocks(i, m, allowed, None, processes, checkpoint_path, True)
    return _bucket_to_tally(i, m, bucket)


def column_order_tally(
    i: int, m: int, *, pattern: Optional[Pattern] = None
) -> SignedTally:
    """Independent column-by-column tally; must agree with :func:`signed_tally`."""
    _check_dims(i, m)
    allowed = (
        _pattern_masks(pattern, i, m) if pattern is not None else [(1 << m) - 1] * m
    )
    bucket: dict = {}

    def leaf(col_masks, parity):
        key = tuple(col_masks)
        cur = bucket.get(key)
        if cur is None:
            cur = [0, 0]
            bucket[key] = cur
        cur[parity] += 1

    _run_columns(i, m, allowed, leaf)
    return _bucket_to_tally(i, m, bucket)


def alon_tarsi_difference(
    m: int,
    *,
    order: str = "rows",
    fix_first_column: bool = False,
    processes: int = 1,
    checkpoint_path: Optional[str] = None,
) -> int:
    """Signed sum of eps_c over all Latin (m, m)-squares.

    ``order`` selects the row-major or the column-major enumeration; the two
    must agree exactly.  ``fix_first_column`` quotients out the free symbol
    relabelling action (valid for even m only, where relabelling preserves
    eps_c) and multiplies the fixed-first-column sum by m!.
    """
    _check_dims(m, m)
    forced_first = None
    scale = 1
    if fix_first_column:
        if m % 2:
            raise ValueError("first-column reduction requires even m")
        forced_first = tuple(range(m))
        scale = factorial(m)
    allowed = [(1 << m) - 1] * m
    if order == "rows":
        bucket = _tally_by_blocks(
            m, m, allowed, forced_first, processes, checkpoint_path, False
        )
        diff = sum(pn[0] - pn[1] for pn in bucket.values())
    elif order == "columns":
        acc = [0, 0]

        def leaf(_masks, parity):
            acc[parity] += 1

        _run_columns(m, m, allowed, leaf, forced_first)
        diff = acc[0] - acc[1]
    else:
        raise ValueError("order must be 'rows' or 'columns'")
    return scale * diff


# ---------------------------------------------------------------------------
# Structural operations: projection, sign factorization, concatenation.
# ---------------------------------------------------------------------------


def project_last_row(rect: LatinRectangle) -> LatinRectangle:
    """Drop the last row, yielding an (i-1, m)-rectangle."""
    if rect.i == 1:
        raise ValueError("cannot project single row")
    return LatinRectangle(rect.entries[:-1])


@dataclass
class SignFactorizationReport:
    """Whether eps_c factors through the projected pattern on every fiber.

    For each (i, m)-pattern A and each (i-1, m)-pattern B arising from its
    rectangles, the ratio eps_c(rect) / eps_c(projection) must be a constant
    eps(B) on the fiber.
    """

    i: int
    m: int
    ok: bool
    fibers: int
    rectangles: int
    counterexample: Optional[tuple[LatinRectangle, LatinRectangle]]


def verify_sign_factorization(i: int, m: int) -> SignFactorizationReport:
    """Exhaustively check the fiberwise sign factorization at (i, m)."""
    if i < 2:
        raise ValueError("need at least two rows")
    _check_dims(i, m)
    allowed = [(1 << m) - 1] * m
    fiber_sign: dict[tuple, int] = {}
    state = {"ok": True, "count": 0, "bad": None}

    def leaf(rows, col_masks, parity):
        if not state["ok"]:
            return
        state["count"] += 1
        top = rows[:-1]
        top_masks = []
        top_parity = 0
        for q in range(m):
            mask = 0
            for row in top:
                s = row[q]
                top_parity ^= (mask >> (s + 1)).bit_count() & 1
                mask |= 1 << s
            top_masks.append(mask)
        key = (tuple(col_masks), tuple(top_masks))
        ratio = 1 if parity == top_parity else -1
        seen = fiber_sign.get(key)
        if seen is None:
            fiber_sign[key] = ratio
        elif seen != ratio:
            state["ok"] = False
            state["bad"] = (
                LatinRectangle(tuple(rows)),
                LatinRectangle(tuple(top)),
            )

    _run_rows(i, m, allowed, (), leaf)
    return SignFactorizationReport(
        i=i,
        m=m,
        ok=state["ok"],
        fibers=len(fiber_sign),
        rectangles=state["count"],
        counterexample=state["bad"],
    )


def concatenate(rect_a: LatinRectangle, rect_b: LatinRectangle) -> LatinRectangle:
    """Side-by-side join with rect_b's symbols shifted by rect_a's width.

    eps_c of the result is the product of the two signs, and the pattern is
    the pattern of rect_a followed by the shifted pattern of rect_b.
    """
    if rect_a.i != rect_b.i:
        raise ValueError("row counts differ")
    shift = rect_a.m
    rows = tuple(
        ra + tuple(s + shift for s in rb)
        for ra, rb in zip(rect_a.entries, rect_b.entries)
    )
    return LatinRectangle(rows)


# ---------------------------------------------------------------------------
# Checkpoint files: one newline-delimited JSON record per completed prefix
# block, restart-safe via prefix deduplication.
# ---------------------------------------------------------------------------


def write_checkpoint_record(
    path: str,
    prefix: tuple,
    bucket: dict,
    m: int,
    record_patterns: bool,
    meta: Optional[dict] = None,
) -> None:
    plus = sum(pn[0] for pn in bucket.values())
    minus = sum(pn[1] for pn in bucket.values())
    rec: dict = {
        "prefix": [[s + 1 for s in row] for row in prefix],
        "plus": str(plus),
        "minus": str(minus),
    }
    if meta:
        rec.update(meta)
    if record_patterns:
        rec["patterns"] = [
            {
                "pattern": [list(sub) for sub in _pattern_from_masks(key, m)],
                "plus": str(pn[0]),
                "minus": str(pn[1]),
            }
            for key, pn in sorted(bucket.items())
        ]
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _mask_of(subset: Iterable[int]) -> int:
    mask = 0
    for s in subset:
        mask |= 1 << (s - 1)
    return mask


def load_checkpoint(
    path: str,
    m: int,
    *,
    i: Optional[int] = None,
    reduced: Optional[bool] = None,
) -> dict[tuple, dict]:
    """Completed prefix blocks from a checkpoint file (later records win).

    Records carrying (i, m, reduced) metadata that disagrees with the
    requested configuration are skipped; bare records are accepted.
    """
    done: dict[tuple, dict] = {}
    try:
        fh = open(path, encoding="utf-8")
    except FileNotFoundError:
        return done
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if "m" in rec and rec["m"] != m:
                continue
            if i is not None and "i" in rec and rec["i"] != i:
                continue
            if reduced is not None and rec.get("reduced", reduced) != reduced:
                continue
            prefix = tuple(tuple(s - 1 for s in row) for row in rec["prefix"])
            if "patterns" in rec:
                bucket = {
                    tuple(_mask_of(sub) for sub in entry["pattern"]): (
                        int(entry["plus"]),
                        int(entry["minus"]),
                    )
                    for entry in rec["patterns"]
                }
            else:
                # Single-pattern runs (full squares) store only the totals.
                key = tuple((1 << m) - 1 for _ in range(m))
                bucket = {key: (int(rec["plus"]), int(rec["minus"]))}
            done[prefix] = bucket
    return done
