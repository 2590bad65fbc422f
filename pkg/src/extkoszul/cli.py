"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

import argparse
import json
import sys

from .blowup import as_class
from .checks import SUITES, run_suite
from .grammar import ParseError, parse
from .koszul import CONCRETE, FORMAL
from .resolutions import (
    resolution_of_power,
    resolution_of_quotient,
    resolution_of_subquotient,
    to_json,
    verify_exactness,
)
from .tor import delta, delta_snake, tor_graded, tor_power, tor_quotient, tor_subquotient

DELTA_SCHEMA = "extkoszul.delta/1"
ALGEBRA_SCHEMA = "extkoszul.algebra/1"
CHECK_SCHEMA = "extkoszul.check/1"


class UsageError(Exception):
    pass


def _dump(obj):
    return json.dumps(obj, indent=2, default=_json_default)


def _json_default(obj):
    if hasattr(obj, "format"):
        return obj.format()
    return str(obj)


def _limits(args, n=None, s=None, t=None, bound=None):
    if n is not None and not 1 <= n <= args.max_n:
        raise UsageError(f"--n must lie in 1..{args.max_n}")
    if s is not None and not 0 <= s <= args.max_bound:
        raise UsageError(f"--s must lie in 0..{args.max_bound}")
    if t is not None and not 0 <= t <= args.max_bound + 1:
        raise UsageError(f"--t must lie in 0..{args.max_bound + 1}")
    if bound is not None and not 0 <= bound <= args.max_bound:
        raise UsageError(f"--bound must lie in 0..{args.max_bound}")


def _parse_r(text, n):
    if text is None:
        return None
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError("--r takes comma-separated integers") from None
    if len(values) != n:
        raise UsageError(f"--r needs {n} values")
    return values


# ---------------------------------------------------------------------------
# subcommands


def cmd_resolution(args, out):
    _limits(args, n=args.n, s=args.s, t=args.t, bound=args.bound)
    r = _parse_r(args.r, args.n)
    if args.mode == FORMAL and r is not None:
        raise UsageError("--r is only meaningful in concrete mode")
    if args.verify and args.mode == FORMAL:
        raise UsageError("--verify needs --mode concrete")
    if args.target == "power":
        if args.bound is None:
            raise UsageError("--target power needs --bound")
        if args.t is not None:
            raise UsageError("--t is only used with --target subquotient")
        build = lambda: resolution_of_power(args.n, args.s, args.bound, args.mode, r)  # noqa: E731
    elif args.target == "quotient":
        if args.t is not None:
            raise UsageError("--t is only used with --target subquotient")
        build = lambda: resolution_of_quotient(args.n, args.s, args.mode, r)  # noqa: E731
    else:
        if args.t is None:
            raise UsageError("--target subquotient needs --t")
        build = lambda: resolution_of_subquotient(args.n, args.s, args.t, args.mode, r)  # noqa: E731
    try:
        res = build()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = None
    if args.verify:
        md = args.multidegree_bound
        if md is None:
            md = max(res.hi, res.bound + 1)
        _limits(args, bound=min(md, args.max_bound))
        try:
            report = verify_exactness(res, md)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    data = to_json(res, report)
    if args.format == "json":
        out.write(_dump(data) + "\n")
    else:
        out.write(f"resolution of {data['target']}  n={res.n}  mode={res.mode}  bound={res.bound}\n")
        out.write(f"window {data['window'][0]} <= |a| < {data['window'][1]}\n")
        out.write(f"ranks {data['ranks']}\n")
        for deg in data["degrees"]:
            out.write(f"degree {deg['k']} (rank {deg['rank']}):\n")
            for b in deg["basis"]:
                out.write(f"  {b}\n")
            for row, col, c in deg["differential"]:
                out.write(f"  d({col}) contains {c} * {row}\n")
        out.write("augmentation:\n")
        for lab, v in data["augmentation"]:
            out.write(f"  {lab} -> {v}\n")
        if report is not None:
            out.write(f"exactness: {len(report['failures'])} failure(s)\n")
            for f in report["failures"]:
                out.write(f"  {f}\n")
    return 1 if report is not None and report["failures"] else 0


def cmd_tor(args, out):
    _limits(args, n=args.n, s=args.s, t=args.t)
    if args.max_k is not None and args.max_k < 0:
        raise UsageError("--max-k must be non-negative")
    if args.module != "subquotient" and args.t is not None:
        raise UsageError("--t is only used with --module subquotient")
    try:
        if args.module == "power":
            table = tor_power(args.n, args.s, args.max_k)
        elif args.module == "quotient":
            table = tor_quotient(args.n, args.s, args.max_k)
        elif args.module == "graded":
            table = tor_graded(args.n, args.s)
            if args.max_k is not None:
                table = table._replace(rows=table.rows[: args.max_k + 1])
        else:
            if args.t is None:
                raise UsageError("--module subquotient needs --t")
            table = tor_subquotient(args.n, args.s, args.t, args.max_k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = table.to_json()
    if args.format == "json":
        out.write(_dump(data) + "\n")
    else:
        extra = f" t={table.t}" if table.t is not None else ""
        out.write(f"Tor({table.module}) n={table.n} s={table.s}{extra}\n")
        out.write(f"ranks {data['ranks']}\n")
        for row in data["rows"]:
            flags = f"free={'yes' if row['free_certified'] else 'no'}"
            if "exact_certified" in row:
                flags += f" exact={'yes' if row['exact_certified'] else 'no'}"
            if "reduced_rank" in row:
                flags += f" reduced={row['reduced_rank']}"
            out.write(f"k={row['k']} rank={row['rank']} {flags}\n")
            for b in row["basis"]:
                out.write(f"  {b}\n")
    return 0


def _parse_expr(args, generators):
    try:
        return parse(args.expr, args.n, generators=generators)
    except ParseError as exc:
        raise UsageError(f"parse error: {exc.message} at position {exc.position}\n{exc.caret()}") from None


def cmd_delta(args, out):
    _limits(args, n=args.n)
    xi = _parse_expr(args, generators=False)
    try:
        value = delta(xi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    kinds = xi.kinds()
    s = kinds[0][1] if kinds else 0
    _limits(args, s=s)
    agree = None
    if args.oracle == "snake":
        try:
            agree = delta_snake(xi) == value
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.format == "json":
        data = {
            "schema": DELTA_SCHEMA,
            "n": args.n,
            "s": s,
            "mode": FORMAL,
            "bound": s + 1,
            "input": xi.format(),
            "delta": value.format(),
        }
        if agree is not None:
            data["oracle"] = {"name": "snake", "agrees": agree}
        out.write(_dump(data) + "\n")
    else:
        out.write(value.format() + "\n")
        if agree is not None:
            out.write(f"snake oracle: {'agrees' if agree else 'DISAGREES'}\n")
    return 1 if agree is False else 0


def cmd_algebra(args, out):
    _limits(args, n=args.n)
    xi = _parse_expr(args, generators=True)
    try:
        cls = as_class(xi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        data = {
            "schema": ALGEBRA_SCHEMA,
            "n": args.n,
            "s": cls.s,
            "k": cls.k,
            "mode": FORMAL,
            "bound": cls.s,
            "input": args.expr.strip(),
            "value": cls.format(),
            "member": cls.member,
        }
        out.write(_dump(data) + "\n")
    else:
        out.write(cls.format() + "\n")
        where = "" if cls.k is None else f" (k={cls.k}, s={cls.s})"
        out.write(f"member of A: {'yes' if cls.member else 'no'}{where}\n")
    return 0


def cmd_check(args, out):
    _limits(args, n=args.n, s=args.s, bound=args.bound)
    results = run_suite(args.suite, args.n, args.s, args.bound)
    ok = all(r.ok for r in results)
    if args.format == "json":
        data = {
            "schema": CHECK_SCHEMA,
            "suite": args.suite,
            "n": args.n,
            "s": args.s,
            "mode": "formal+concrete",
            "bound": args.bound,
            "passed": sum(r.ok for r in results),
            "failed": sum(not r.ok for r in results),
            "ok": ok,
            "results": [r.to_json() for r in results],
        }
        out.write(_dump(data) + "\n")
    else:
        for r in results:
            n = r.detail.get("n")
            where = f" [n={n}]" if n is not None else ""
            out.write(f"{'PASS' if r.ok else 'FAIL'} {r.suite}: {r.name}{where}\n")
        out.write(f"{sum(r.ok for r in results)} passed, {sum(not r.ok for r in results)} failed\n")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    p = argparse.ArgumentParser(
        prog="extkoszul", description="Extended Koszul complexes, Tor tables, blowup algebra.", allow_abbrev=False
    )
    p.add_argument("--max-n", type=int, default=6, help="largest accepted n (default 6)")
    p.add_argument("--max-bound", type=int, default=10, help="largest accepted s, t, bound (default 10)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(q, fmt=True):
        q.add_argument("--n", type=int, required=True)
        if fmt:
            q.add_argument("--format", choices=["text", "json"], default="text")

    q = sub.add_parser("resolution", allow_abbrev=False, help="free resolutions of R/I^s, I^s, I^s/I^t")
    q.add_argument("--target", choices=["quotient", "power", "subquotient"], required=True)
    common(q)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--t", type=int)
    q.add_argument("--mode", choices=[FORMAL, CONCRETE], default=CONCRETE)
    q.add_argument("--bound", type=int)
    q.add_argument("--r", help="integer values r_1,...,r_n (default: generic y_i over QQ[y])")
    q.add_argument("--verify", action="store_true")
    q.add_argument("--multidegree-bound", type=int)
    q.set_defaults(func=cmd_resolution)

    q = sub.add_parser("tor", allow_abbrev=False, help="Tor tables over E = R/I")
    q.add_argument("--module", choices=["power", "quotient", "graded", "subquotient"], required=True)
    common(q)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--t", type=int)
    q.add_argument("--max-k", type=int)
    q.set_defaults(func=cmd_tor)

    q = sub.add_parser("delta", allow_abbrev=False, help="connecting homomorphism of a homogeneous element")
    common(q)
    q.add_argument("--oracle", choices=["snake"])
    q.add_argument("expr")
    q.set_defaults(func=cmd_delta)

    q = sub.add_parser("algebra", allow_abbrev=False, help="expand a product of blowup generators")
    common(q)
    q.add_argument("expr")
    q.set_defaults(func=cmd_algebra)

    q = sub.add_parser("check", allow_abbrev=False, help="run invariant suites")
    q.add_argument("--suite", choices=list(SUITES) + ["all"], required=True)
    common(q)
    q.add_argument("--s", type=int, default=2)
    q.add_argument("--bound", type=int, default=4)
    q.set_defaults(func=cmd_check)
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # expressions such as "-1*e[1]" would otherwise be read as options
    argv = [a if not (a.startswith("-") and "[" in a) else " " + a for a in argv]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
