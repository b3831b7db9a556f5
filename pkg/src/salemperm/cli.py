"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 domain error, 4 self-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from fractions import Fraction

from . import analysis, numerals, salem, selfaffine, verify
from .numerals import DomainError, ParseError

EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_SELFCHECK = 4

OUTDIR_ENV = "SALEMPERM_OUTDIR"


class SelfCheckError(Exception):
    pass


def _dec(v: Fraction, digits: int = 17) -> str:
    return selfaffine._decimal(Fraction(v), digits)


def build_system(args) -> salem.SalemSystem:
    params = numerals.PartitionParams.parse(args.p)
    if args.perm:
        perm = salem.DigitPermutation.parse(args.perm)
    else:
        perm = salem.theta(args.theta)
    return salem.SalemSystem(params, perm)


def parse_point(text: str, q: int):
    """Expansion if the text is digits/parentheses, else a rational.

    Bare digit words read as expansions ("1" is the point with expansion
    1(0)); write "1/1" for the number one.
    """
    if "/" in text or "." in text:
        return numerals.parse_rational(text)
    return numerals.parse_expansion(text, q)


class _Out:
    """Writes to --out (relative names go under $SALEMPERM_OUTDIR) or stdout."""

    def __init__(self, path):
        self.path = path

    def __enter__(self):
        if not self.path:
            self.fh = None
            return sys.stdout
        path = self.path
        outdir = os.environ.get(OUTDIR_ENV)
        if outdir and not os.path.isabs(path):
            path = os.path.join(outdir, path)
        try:
            self.fh = open(path, "w", newline="")
        except OSError as exc:
            raise selfaffine.ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc
        return self.fh

    def __exit__(self, *exc):
        if self.fh:
            self.fh.close()


def _rows(out, fmt, header, rows):
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        for row in rows:
            out.write("  ".join(f"{h}={v}" for h, v in zip(header, row)) + "\n")


# -- subcommands ------------------------------------------------------------

def cmd_eval(args):
    sys_ = build_system(args)
    x = parse_point(args.x, sys_.q)
    if isinstance(x, numerals.DigitExpansion):
        value, bound = salem.eval_f(x, sys_), Fraction(0)
    else:
        value, bound = salem.eval_f_at(x, sys_, args.digits)
    with _Out(args.out) as out:
        if args.format == "csv":
            _rows(out, "csv", ["x", "f", "decimal", "error_bound"],
                  [[args.x, str(value), _dec(value), str(bound)]])
        else:
            out.write(f"{value}\t{_dec(value)}\n")
            if bound:
                out.write(f"error_bound {bound}\t{_dec(bound, 6)}\n")


def cmd_integral(args):
    sys_ = build_system(args)
    exact = analysis.integral_closed_form(sys_)
    lo, hi = analysis.integral_bracket(sys_, args.rank)
    est, se = analysis.integral_monte_carlo(sys_, args.samples, args.seed)
    bracket_ok = lo <= exact <= hi
    mc_ok = abs(est - float(exact)) <= 4 * se if se > 0 else True
    with _Out(args.out) as out:
        if args.format == "csv":
            _rows(out, "csv", ["method", "value", "lower", "upper", "std_error"], [
                ["closed_form", str(exact), "", "", ""],
                ["bracket", "", str(lo), str(hi), ""],
                ["monte_carlo", repr(est), "", "", repr(se)],
            ])
        else:
            out.write(f"{exact}\t{_dec(exact)}\n")
            out.write(f"bracket rank {args.rank}: [{_dec(lo)}, {_dec(hi)}] gap {_dec(hi - lo, 6)}\n")
            out.write(f"monte carlo n={args.samples} seed={args.seed}: {est!r} +- {se!r}\n")
    if not (bracket_ok and mc_ok):
        raise SelfCheckError("closed form, bracket and Monte Carlo disagree")


def cmd_verify(args):
    sys_ = build_system(args)
    results = verify.run_suites(sys_, args.suite, args.seed)
    with _Out(args.out) as out:
        _rows(out, "csv", ["suite", "cases", "failures"],
              [[r.suite, r.cases, r.failures] for r in results])
    for r in results:
        if r.first_failure:
            print(f"{r.suite}: first failure: {r.first_failure}", file=sys.stderr)
    if not all(r.passed for r in results):
        raise SelfCheckError("invariant violated")


def cmd_graph(args):
    sys_ = build_system(args)
    if args.chaos:
        pts = selfaffine.chaos_game(sys_, args.chaos, args.seed, args.burn_in, weighted=args.weighted)
    else:
        pts = selfaffine.deterministic_points(sys_, args.depth)
    fmt = "svg" if args.format == "svg" else "csv"
    with _Out(args.out) as out:
        if fmt == "csv":
            selfaffine.write_csv(pts, out, args.precision)
        else:
            selfaffine.write_svg(pts, out, args.radius)


def cmd_jump(args):
    sys_ = build_system(args)
    x0 = numerals.parse_expansion(args.x, sys_.q)
    rep = analysis.jump_at(x0, sys_)
    rows = [[str(rep.point), str(rep.left_limit), str(rep.right_limit), str(rep.jump)]]
    with _Out(args.out) as out:
        if args.format == "csv":
            _rows(out, "csv", ["point", "left", "right", "jump"], rows)
        else:
            out.write(f"point {rep.point}\nleft {rep.left_limit}\nright {rep.right_limit}\n"
                      f"jump {rep.jump}\n")


def cmd_cylinder(args):
    sys_ = build_system(args)
    base = numerals.parse_digits(args.base, sys_.q)
    cyl = numerals.cylinder(base, sys_.params)
    inc = analysis.cylinder_increment(base, sys_)
    ratio = inc / cyl.length
    header = ["inf", "sup", "length", "increment", "ratio"]
    row = [str(cyl.inf), str(cyl.sup), str(cyl.length), str(inc), str(ratio)]
    with _Out(args.out) as out:
        if args.format == "csv":
            _rows(out, "csv", header, [row])
        else:
            out.write("".join(f"{h} {v}\n" for h, v in zip(header, row)))


def cmd_freq(args):
    sys_ = build_system(args)
    if args.x:
        source = numerals.parse_expansion(args.x, sys_.q)
    else:
        source = analysis.lebesgue_streams(sys_.params, 1, args.k, args.seed)[0].tolist()
    rep = analysis.digit_frequency(source, args.k, sys_)
    with _Out(args.out) as out:
        rows = [[s, c, str(f)] for s, (c, f) in enumerate(zip(rep.counts, rep.frequencies))]
        _rows(out, "csv" if args.format == "csv" else "text", ["s", "count", "frequency"], rows)
        if args.format != "csv":
            out.write(f"log_ratio {rep.log_ratio!r}\n")
            out.write(f"expected_per_digit {analysis.expected_log_slope(sys_)!r}\n")


def cmd_quotient(args):
    sys_ = build_system(args)
    x0 = numerals.parse_expansion(args.x, sys_.q)
    terms = analysis.difference_quotient_trace(x0, args.n0_max, args.j, sys_)
    rows = [[t.n0, t.quotient.numerator, t.quotient.denominator, repr(analysis.log_abs(t.quotient))]
            for t in terms]
    with _Out(args.out) as out:
        _rows(out, "csv", ["n0", "quotient_num", "quotient_den", "log_abs"], rows)


def cmd_invert(args):
    params = numerals.PartitionParams.parse(args.p)
    y = numerals.parse_rational(args.y)
    e = numerals.digits_of(y, params, args.digits)
    with _Out(args.out) as out:
        out.write(f"{numerals.format_expansion(e)}\n")


# -- parser -----------------------------------------------------------------

def _common(sp, out_formats=("text", "csv")):
    sp.add_argument("--p", default="1/3,1/3,1/3", help="weights a/b,c/d,... (exact)")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--theta", type=int, default=2, help="built-in ternary row 1..6")
    g.add_argument("--perm", help="explicit permutation, e.g. 0,2,1")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="output file (default stdout)")
    sp.add_argument("--format", choices=out_formats, default=out_formats[0])


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="salemperm", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="f at an expansion like 02(1) or a rational like 11/24")
    _common(sp)
    sp.add_argument("x")
    sp.add_argument("--digits", type=int, default=64)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("integral", help="integral: closed form, bracket, Monte Carlo")
    _common(sp)
    sp.add_argument("--rank", type=int, default=8)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.set_defaults(func=cmd_integral)

    sp = sub.add_parser("verify", help="run invariant suites")
    _common(sp, ("csv",))
    sp.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("graph", help="graph points (deterministic or chaos game)")
    _common(sp, ("csv", "svg"))
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--chaos", type=int, default=0, help="number of chaos-game points")
    sp.add_argument("--burn-in", type=int, default=40)
    sp.add_argument("--weighted", action="store_true", help="pick map t with probability p_t")
    sp.add_argument("--precision", type=int, default=17)
    sp.add_argument("--radius", type=float, default=0.6)
    sp.set_defaults(func=cmd_graph)

    sp = sub.add_parser("jump", help="one-sided limits at a boundary point")
    _common(sp)
    sp.add_argument("x")
    sp.set_defaults(func=cmd_jump)

    sp = sub.add_parser("cylinder", help="cylinder length, increment and ratio")
    _common(sp)
    sp.add_argument("--base", default="")
    sp.set_defaults(func=cmd_cylinder)

    sp = sub.add_parser("freq", help="digit counts and log-ratio statistic")
    _common(sp)
    sp.add_argument("x", nargs="?", help="expansion; omit for a Lebesgue-random stream")
    sp.add_argument("-k", type=int, default=1000)
    sp.set_defaults(func=cmd_freq)

    sp = sub.add_parser("quotient", help="difference quotients under one-digit changes")
    _common(sp, ("csv",))
    sp.add_argument("x")
    sp.add_argument("--n0-max", type=int, default=20)
    sp.add_argument("--j", type=int, default=1, help="replacement digit")
    sp.set_defaults(func=cmd_quotient)

    sp = sub.add_parser("invert", help="greedy expansion of a rational")
    sp.add_argument("--p", default="1/3,1/3,1/3")
    sp.add_argument("--digits", type=int, default=64)
    sp.add_argument("--out")
    sp.add_argument("y")
    sp.set_defaults(func=cmd_invert)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SelfCheckError as exc:
        print(f"self-check failed: {exc}", file=sys.stderr)
        return EXIT_SELFCHECK
    except selfaffine.ExportError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
