"""Latin rectangle enumeration, signs, tallies and structural operations."""

from __future__ import annotations

import json

import pytest

from detorbit import latin
from detorbit.latin import (
    LatinRectangle,
    alon_tarsi_difference,
    column_order_tally,
    column_sign,
    concatenate,
    enumerate_latin_rectangles,
    pattern_of,
    project_last_row,
    rect_sign,
    signed_tally,
    verify_sign_factorization,
)


def test_column_sign_examples():
    assert column_sign((1, 2)) == 1
    assert column_sign((2, 1)) == -1
    assert column_sign((3,)) == 1
    assert column_sign((3, 1, 2)) == 1  # two inversions


def test_column_sign_rejects_duplicates():
    with pytest.raises(ValueError, match="not a valid Latin column"):
        column_sign((1, 1))


def test_rect_sign_examples():
    assert rect_sign(LatinRectangle.from_rows([(1, 2), (2, 1)])) == -1
    assert rect_sign(LatinRectangle.from_rows([(2, 1), (1, 2)])) == -1
    assert rect_sign(LatinRectangle.from_rows([(1, 2, 3, 4)])) == 1


def test_rect_sign_matches_per_column_product():
    rects = []
    enumerate_latin_rectangles(3, 4, visitor=rects.append)
    for rect in rects:
        assert rect_sign(rect) == _sign_by_columns(rect)


def _sign_by_columns(rect: LatinRectangle) -> int:
    sign = 1
    for q in range(rect.m):
        sign *= column_sign(rect.column(q))
    return sign


def test_pattern_of_examples():
    assert pattern_of(LatinRectangle.from_rows([(1, 2), (2, 1)])) == ((1, 2), (1, 2))
    assert pattern_of(LatinRectangle.from_rows([(2, 1)])) == ((2,), (1,))
    assert pattern_of(LatinRectangle.from_rows([(1, 2, 3), (2, 3, 1)])) == (
        (1, 2),
        (2, 3),
        (1, 3),
    )


def test_invalid_rectangles_rejected():
    with pytest.raises(ValueError):
        LatinRectangle.from_rows([(1, 1)])
    with pytest.raises(ValueError):
        LatinRectangle.from_rows([(1, 2), (1, 3)])  # not a permutation row
    with pytest.raises(ValueError):
        LatinRectangle.from_rows([(1, 2), (1, 2)])  # repeated column entry
    with pytest.raises(ValueError, match="too many rows"):
        LatinRectangle.from_rows([(1,), (1,)])


def test_enumeration_counts():
    assert enumerate_latin_rectangles(1, 2) == 2
    assert enumerate_latin_rectangles(2, 2) == 2
    assert enumerate_latin_rectangles(2, 3) == 12
    assert enumerate_latin_rectangles(3, 3) == 12
    assert enumerate_latin_rectangles(4, 4) == 576


def test_enumeration_order_and_validity():
    seen = []
    enumerate_latin_rectangles(2, 3, visitor=seen.append)
    assert len(seen) == 12
    keys = [tuple(r.entries) for r in seen]
    assert keys == sorted(keys)  # row-major lexicographic
    assert len(set(keys)) == 12


def test_enumeration_with_pattern_filter():
    pattern = ((1, 2), (1, 2))
    seen = []
    n = enumerate_latin_rectangles(2, 2, pattern=pattern, visitor=seen.append)
    assert n == 2
    assert all(pattern_of(r) == pattern for r in seen)
    # Filtered counts recover each tally fiber.
    tally = signed_tally(2, 3)
    for pat, (p, n_) in tally.counts.items():
        assert enumerate_latin_rectangles(2, 3, pattern=pat) == p + n_


def test_enumeration_errors():
    with pytest.raises(ValueError, match="too many rows"):
        enumerate_latin_rectangles(3, 2)


def test_signed_tally_small_cases():
    assert signed_tally(2, 2).counts == {((1, 2), (1, 2)): (0, 2)}
    assert signed_tally(1, 2).counts == {
        ((1,), (2,)): (1, 0),
        ((2,), (1,)): (1, 0),
    }


def test_single_row_tallies():
    for m in (1, 2, 3, 4, 5):
        tally = signed_tally(1, m)
        assert len(tally.counts) == _factorial(m)
        assert all(pn == (1, 0) for pn in tally.counts.values())
        assert tally.imbalance_square_sum() == _factorial(m)


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


@pytest.mark.parametrize("i,m", [(1, 4), (2, 3), (2, 4), (3, 3), (3, 4), (4, 4)])
def test_two_enumeration_orders_agree(i, m):
    assert signed_tally(i, m).counts == column_order_tally(i, m).counts


def _brute_force_tally(i: int, m: int) -> dict:
    """First-principles oracle: filter tuples of permutations, literal signs."""
    from itertools import permutations, product

    counts: dict = {}
    for rows in product(permutations(range(1, m + 1)), repeat=i):
        cols = [tuple(row[q] for row in rows) for q in range(m)]
        if any(len(set(col)) != i for col in cols):
            continue
        sign = 1
        for col in cols:
            prod = 1
            for p in range(i):
                for pp in range(p + 1, i):
                    prod *= col[pp] - col[p]
            sign *= 1 if prod > 0 else -1
        key = tuple(tuple(sorted(col)) for col in cols)
        plus, minus = counts.get(key, (0, 0))
        counts[key] = (plus + 1, minus) if sign == 1 else (plus, minus + 1)
    return counts


@pytest.mark.parametrize("i,m", [(2, 3), (3, 3), (2, 4), (3, 4)])
def test_tally_against_first_principles_oracle(i, m):
    assert signed_tally(i, m).counts == _brute_force_tally(i, m)


def test_tally_signed_sums_match_visitor_recomputation():
    tally = signed_tally(3, 4)
    acc: dict = {}
    def visit(rect):
        key = pattern_of(rect)
        plus, minus = acc.get(key, (0, 0))
        if rect_sign(rect) == 1:
            acc[key] = (plus + 1, minus)
        else:
            acc[key] = (plus, minus + 1)
    enumerate_latin_rectangles(3, 4, visitor=visit)
    assert acc == tally.counts


def test_alon_tarsi_values():
    assert alon_tarsi_difference(1) == 1
    assert alon_tarsi_difference(2) == -2
    assert alon_tarsi_difference(3) == 0
    assert alon_tarsi_difference(2, order="columns") == -2


def test_alon_tarsi_single_pattern_tally_consistency():
    for m in (2, 3, 4):
        tally = signed_tally(m, m)
        assert len(tally.counts) == 1
        assert tally.signed_sum() == alon_tarsi_difference(m)


def test_alon_tarsi_odd_cancellation():
    for m in (1, 3, 5):
        expected = 1 if m == 1 else 0
        assert alon_tarsi_difference(m) == expected


def test_first_column_reduction_matches_full_enumeration():
    for m in (2, 4):
        full = alon_tarsi_difference(m)
        assert alon_tarsi_difference(m, fix_first_column=True) == full
        assert (
            alon_tarsi_difference(m, order="columns", fix_first_column=True) == full
        )
    with pytest.raises(ValueError):
        alon_tarsi_difference(3, fix_first_column=True)


def test_parallel_tally_matches_serial():
    serial = signed_tally(3, 4)
    parallel = signed_tally(3, 4, processes=2)
    assert serial.counts == parallel.counts


def test_checkpoint_resume(tmp_path):
    cp = str(tmp_path / "tally.ndjson")
    full = signed_tally(3, 4, checkpoint_path=cp)
    lines = open(cp).read().strip().splitlines()
    assert lines
    rec = json.loads(lines[0])
    assert set(rec) >= {"prefix", "plus", "minus"}
    # Drop half of the completed blocks and resume.
    with open(cp, "w") as fh:
        fh.write("\n".join(lines[: len(lines) // 2]) + "\n")
    resumed = signed_tally(3, 4, checkpoint_path=cp)
    assert resumed.counts == full.counts


def test_alon_tarsi_checkpoint_records(tmp_path):
    cp = str(tmp_path / "at.ndjson")
    value = alon_tarsi_difference(3, checkpoint_path=cp)
    recs = [json.loads(line) for line in open(cp)]
    assert all(set(r) >= {"prefix", "plus", "minus"} for r in recs)
    assert all("patterns" not in r for r in recs)
    assert sum(int(r["plus"]) - int(r["minus"]) for r in recs) == value
    # Resume from the complete file reproduces the value without new work.
    assert alon_tarsi_difference(3, checkpoint_path=cp) == value


def test_checkpoint_ignores_foreign_configurations(tmp_path):
    cp = str(tmp_path / "mixed.ndjson")
    at3 = alon_tarsi_difference(3, checkpoint_path=cp)
    # A (3,4) tally resumed against the (3,3) file must ignore every record.
    tally = signed_tally(3, 4, checkpoint_path=cp)
    assert tally.counts == signed_tally(3, 4).counts
    # The full-square run still resumes correctly from its own records.
    assert alon_tarsi_difference(3, checkpoint_path=cp) == at3
    # Reduced and full runs do not share records either.
    cp2 = str(tmp_path / "reduced.ndjson")
    reduced = alon_tarsi_difference(4, fix_first_column=True, checkpoint_path=cp2)
    assert alon_tarsi_difference(4, checkpoint_path=cp2) == reduced == 576


def test_project_last_row():
    rect = LatinRectangle.from_rows([(1, 2), (2, 1)])
    assert project_last_row(rect) == LatinRectangle.from_rows([(1, 2)])
    rect3 = LatinRectangle.from_rows([(1, 2, 3), (2, 3, 1), (3, 1, 2)])
    assert project_last_row(rect3) == LatinRectangle.from_rows([(1, 2, 3), (2, 3, 1)])
    with pytest.raises(ValueError, match="cannot project single row"):
        project_last_row(LatinRectangle.from_rows([(1, 2)]))


def test_projection_fibers_recovered_by_filtered_enumeration():
    # Extending each projected rectangle enumerates exactly the fiber.
    squares = []
    enumerate_latin_rectangles(3, 3, visitor=squares.append)
    by_top: dict = {}
    for sq in squares:
        by_top.setdefault(project_last_row(sq).entries, []).append(sq.entries)
    pairs = []
    enumerate_latin_rectangles(2, 3, visitor=pairs.append)
    for pair in pairs:
        fiber = by_top.get(pair.entries, [])
        extensions = [
            sq.entries
            for sq in squares
            if sq.entries[:2] == pair.entries
        ]
        assert sorted(fiber) == sorted(extensions)


@pytest.mark.parametrize("i,m", [(2, 2), (2, 3), (3, 3), (3, 4)])
def test_sign_factorization(i, m):
    report = verify_sign_factorization(i, m)
    assert report.ok, report.counterexample


def test_concatenate_examples():
    a = LatinRectangle.from_rows([(1,)])
    b = LatinRectangle.from_rows([(1,)])
    joined = concatenate(a, b)
    assert joined == LatinRectangle.from_rows([(1, 2)])
    with pytest.raises(ValueError):
        concatenate(
            LatinRectangle.from_rows([(1, 2)]),
            LatinRectangle.from_rows([(1, 2), (2, 1)]),
        )


def test_concatenate_pattern_is_shifted_join():
    a = LatinRectangle.from_rows([(1, 2), (2, 1)])
    b = LatinRectangle.from_rows([(1, 2, 3), (3, 1, 2)])
    joined = concatenate(a, b)
    shifted = tuple(tuple(s + a.m for s in sub) for sub in pattern_of(b))
    assert pattern_of(joined) == pattern_of(a) + shifted


def test_concatenate_sign_multiplicative_at_2x2():
    squares = []
    enumerate_latin_rectangles(2, 2, visitor=squares.append)
    for x in squares:
        for y in squares:
            assert rect_sign(concatenate(x, y)) == rect_sign(x) * rect_sign(y)


def test_tally_json_and_csv_round_trip():
    tally = signed_tally(2, 3)
    obj = tally.to_json_dict()
    assert obj["i"] == 2 and obj["m"] == 3
    assert latin.SignedTally.from_json_dict(obj).counts == tally.counts
    csv_text = tally.to_csv_text()
    assert csv_text.splitlines()[0] == "i,m,pattern,plus,minus"
    assert len(csv_text.strip().splitlines()) == len(tally.counts) + 1


def test_pattern_validation():
    assert latin.is_valid_pattern(((1, 2), (1, 2)), 2, 2)
    assert not latin.is_valid_pattern(((1, 2), (1, 3)), 2, 3)
    with pytest.raises(ValueError):
        signed_tally(2, 2, pattern=((1,), (1, 2)))
