"""Command line front end with machine-readable, byte-reproducible reports.

Every report is JSON with sorted keys, exact decimal strings for all numbers
and no timestamps, so re-running a subcommand with the same configuration
reproduces the output byte for byte.  Exit codes: 0 all checks pass, 1 a
check failed, 2 infeasible under the configured budgets, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import invariant, kronecker, latin, orbit, tensors
from .errors import BudgetExceeded

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_INPUT_ERROR = 3


def _frac(value: Fraction) -> dict:
    return {"num": str(value.numerator), "den": str(value.denominator)}


def _emit(report: dict, args) -> None:
    if getattr(args, "format", "json") == "csv":
        text = report.get("csv")
        if text is None:
            raise ValueError("csv output is only available for tally reports")
    else:
        report = {k: v for k, v in report.items() if k != "csv"}
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _cmd_tally(args) -> tuple[int, dict]:
    tally = latin.signed_tally(
        args.i,
        args.m,
        processes=args.threads,
        checkpoint_path=args.checkpoint,
    )
    report = tally.to_json_dict()
    report["total"] = str(tally.total())
    report["csv"] = tally.to_csv_text()
    return EXIT_OK, report


def _cmd_alon_tarsi(args) -> tuple[int, dict]:
    rows = latin.alon_tarsi_difference(
        args.m,
        order="rows",
        processes=args.threads,
        checkpoint_path=args.checkpoint,
    )
    cols = latin.alon_tarsi_difference(args.m, order="columns")
    ok = rows == cols
    report = {
        "m": args.m,
        "difference": str(rows),
        "difference_column_order": str(cols),
        "orders_agree": ok,
    }
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), report


def _cmd_pairing(args) -> tuple[int, dict]:
    rep = tensors.pairing_identity_report(args.i, args.m)
    report = {
        "i": rep["i"],
        "m": rep["m"],
        "lhs_latin": _frac(rep["lhs_latin"]),
        "lhs_full": _frac(rep["lhs_full"]) if rep["lhs_full"] is not None else None,
        "rhs": _frac(rep["rhs"]),
        "verdict": "equal" if rep["equal"] else "NOT EQUAL",
    }
    return (EXIT_OK if rep["equal"] else EXIT_CHECK_FAILED), report


def _cmd_sign_sum(args) -> tuple[int, dict]:
    value = tensors.latin_sign_sum_pairing(args.m)
    cross = latin.alon_tarsi_difference(args.m, order="rows")
    ok = value == cross
    report = {
        "m": args.m,
        "pairing": str(value),
        "signed_square_count": str(cross),
        "verdict": "equal" if ok else "NOT EQUAL",
    }
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), report


def _cmd_invariant_check(args) -> tuple[int, dict]:
    computed, closed = invariant.power_sum_invariant_check(args.m, args.i)
    ok = computed == closed
    report = {
        "m": args.m,
        "i": args.i,
        "computed": _frac(computed),
        "closed_form": _frac(closed),
        "verdict": "equal" if ok else "NOT EQUAL",
    }
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), report


def _cmd_witness(args) -> tuple[int, dict]:
    if args.matrix is not None:
        with open(args.matrix, encoding="utf-8") as fh:
            A = orbit.matrix_from_csv(fh.read())
        if A.m != args.m or A.i != args.i:
            raise ValueError("matrix shape does not match m and i")
        value = invariant.det_power_invariant(
            args.m, args.i, orbit.det_restriction(A), budget=args.budget
        )
        report = {
            "m": args.m,
            "i": args.i,
            "A": A.to_json_rows(),
            "value": _frac(value),
            "found": value != 0,
        }
        return (EXIT_OK if value else EXIT_CHECK_FAILED), report
    result = orbit.witness_search(
        args.m, args.i, seed=args.seed, budget=args.budget
    )
    if result is None:
        return EXIT_CHECK_FAILED, {
            "m": args.m,
            "i": args.i,
            "found": False,
            "seed": args.seed,
        }
    report = result.to_json_dict()
    report["found"] = True
    return EXIT_OK, report


def _cmd_invariant_eval(args) -> tuple[int, dict]:
    if args.form == "-":
        payload = sys.stdin.read()
    else:
        with open(args.form, encoding="utf-8") as fh:
            payload = fh.read()
    f = invariant.HomPoly.from_json_dict(json.loads(payload))
    value = invariant.det_power_invariant(args.m, args.i, f, budget=args.budget)
    report = {
        "m": args.m,
        "i": args.i,
        "form": f.to_json_dict(),
        "value": _frac(value),
    }
    return EXIT_OK, report


def _cmd_kronecker(args) -> tuple[int, dict]:
    rep = kronecker.rectangle_sk_positivity(args.m, args.d)
    report = {
        "m": rep.m,
        "d": rep.d,
        "n": rep.n,
        "entries": rep.to_json_list(),
        "all_positive": rep.all_positive,
    }
    return (EXIT_OK if rep.all_positive else EXIT_CHECK_FAILED), report


def _verify_all_checks(m: int, seed: int, budget: int) -> list[dict]:
    checks: list[dict] = []

    def add(name: str, ok: bool, **detail) -> None:
        checks.append({"name": name, "ok": bool(ok), **detail})

    for i in range(1, min(m, 3) + 1):
        a = latin.signed_tally(i, m)
        b = latin.column_order_tally(i, m)
        add(
            f"latin-tally-two-orders i={i}",
            a.counts == b.counts,
            total=str(a.total()),
        )
    rows = latin.alon_tarsi_difference(m, order="rows")
    cols = latin.alon_tarsi_difference(m, order="columns")
    add(
        "signed-square-count-two-orders",
        rows == cols and rows != 0,
        value=str(rows),
    )
    for i in (1, 2):
        rep = tensors.pairing_identity_report(i, m)
        add(
            f"symmetrizer-pairing-identity i={i}",
            rep["equal"],
            lhs=_frac(rep["lhs_latin"]),
            rhs=_frac(rep["rhs"]),
        )
    if m <= 4:
        add(
            "sign-sum-pairing-cross-check",
            tensors.latin_sign_sum_pairing(m) == rows,
        )
    for i in range(1, min(m, 4) + 1):
        computed, closed = invariant.power_sum_invariant_check(m, i)
        add(
            f"power-sum-closed-form i={i}",
            computed == closed,
            value=_frac(computed),
        )
    for i in (1, 2):
        w = orbit.witness_search(m, i, seed=seed, budget=budget)
        add(
            f"nonvanishing-witness i={i}",
            w is not None,
            value=_frac(w.value) if w else None,
            schedule_index=w.schedule_index if w else None,
        )
    for d in (1, 2):
        rep = kronecker.rectangle_sk_positivity(m, d)
        add(
            f"symmetric-kronecker-positivity d={d}",
            rep.all_positive,
            entries=rep.to_json_list(),
        )
    return checks


def _cmd_verify_all(args) -> tuple[int, dict]:
    m = args.m
    if m % 2 or m < 2:
        raise ValueError("verify-all requires even m >= 2")
    if m > 4:
        raise BudgetExceeded("verify-all supports m <= 4 under default budgets")
    checks = _verify_all_checks(m, args.seed, args.budget)
    ok = all(c["ok"] for c in checks)
    for c in checks:
        sys.stderr.write(f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']}\n")
    report = {"m": m, "checks": checks, "all_ok": ok, "seed": args.seed}
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detorbit",
        description="Exact signed Latin square counts, symmetrizer pairings, "
        "polarized determinant invariants and symmetric Kronecker checks.",
    )
    parser.add_argument("--threads", type=int, default=1, help="worker processes")
    parser.add_argument(
        "--budget", type=int, default=10**9, help="work cap for heavy evaluations"
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled schedules")
    parser.add_argument("--out", type=str, default=None, help="also write report here")
    parser.add_argument("--checkpoint", type=str, default=None, help="checkpoint file")
    parser.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tally", help="per-pattern signed Latin rectangle tally")
    p.add_argument("i", type=int)
    p.add_argument("m", type=int)
    p.set_defaults(func=_cmd_tally)

    p = sub.add_parser("alon-tarsi", help="signed Latin square count, two orders")
    p.add_argument("m", type=int)
    p.set_defaults(func=_cmd_alon_tarsi)

    p = sub.add_parser("pairing", help="symmetrizer pairing identity, both sides")
    p.add_argument("i", type=int)
    p.add_argument("m", type=int)
    p.set_defaults(func=_cmd_pairing)

    p = sub.add_parser("sign-sum", help="tableau word pairing vs signed count")
    p.add_argument("m", type=int)
    p.set_defaults(func=_cmd_sign_sum)

    p = sub.add_parser("invariant-check", help="power-sum closed form check")
    p.add_argument("m", type=int)
    p.add_argument("i", type=int)
    p.set_defaults(func=_cmd_invariant_check)

    p = sub.add_parser("witness", help="nonvanishing witness search")
    p.add_argument("m", type=int)
    p.add_argument("i", type=int)
    p.add_argument(
        "--matrix",
        type=str,
        default=None,
        help="evaluate this CSV matrix (integers or p/q) instead of searching",
    )
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser(
        "invariant-eval", help="evaluate the invariant at a JSON form literal"
    )
    p.add_argument("m", type=int)
    p.add_argument("i", type=int)
    p.add_argument("form", type=str, help="path to the form literal, or - for stdin")
    p.set_defaults(func=_cmd_invariant_eval)

    p = sub.add_parser("kronecker", help="symmetric Kronecker positivity report")
    p.add_argument("m", type=int)
    p.add_argument("d", type=int)
    p.set_defaults(func=_cmd_kronecker)

    p = sub.add_parser("verify-all", help="run the acceptance battery for even m")
    p.add_argument("m", type=int)
    p.set_defaults(func=_cmd_verify_all)

    return parser


def _emit_error(message: str, kind: str, args) -> None:
    args.format = "json"
    _emit({"error": message, "kind": kind}, args)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads < 1 or args.budget < 1:
            raise ValueError("threads and budget must be positive")
        code, report = args.func(args)
        report.setdefault("seed", args.seed)
        _emit(report, args)
    except BudgetExceeded as exc:
        _emit_error(str(exc), "infeasible", args)
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as exc:
        _emit_error(str(exc), "input", args)
        return EXIT_INPUT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
