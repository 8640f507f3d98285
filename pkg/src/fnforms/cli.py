"""Command line entry point: ``fnforms <subcommand> ...``.

Exit codes: 0 on success or a passing suite, 1 when a suite fails, 2 for
any input or validation error.  Errors print one line ``error[<code>]: msg``
on stderr.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import bundle as bl
from .connection import Connection, cocurvature, curvature
from .errors import FnFormsError, ParseError
from .forms import VectorForm, alg_bracket, fn_bracket, insert, render_form
from .io import load_bundle, load_connection, parse_form, parse_vector_form
from .operators import (
    HStar,
    Insert,
    Operator,
    cov_D,
    cov_d,
    d_op,
    decompose,
    decompose_h,
    graded_commutator,
    hat_bracket,
    theta,
    theta_h,
    zero_operator,
)
from .poly import Chart, rational
from .suites import render_report, suite_ids, verify_suite


# --------------------------------------------------------------------------
# operator expressions for `decompose`

_TOKEN = re.compile(r"\s*(h\*|d\^h|D\^h|\d+(?:/\d+)?|[A-Za-z_]\w*|[\[\],().+\-*])")
_FUNCS = ("theta", "theta_h", "i", "i_h")


class _OpParser:
    """Recursive descent over ``expr := term (± term)*``, ``term := [c*] factor (. factor)*``."""

    def __init__(self, text: str, conn: Connection, forms: Dict[str, VectorForm]):
        self.toks = self._lex(text)
        self.pos = 0
        self.conn = conn
        self.forms = forms

    @staticmethod
    def _lex(text):
        out, i = [], 0
        while i < len(text):
            m = _TOKEN.match(text, i)
            if not m:
                if text[i:].strip() == "":
                    break
                raise ParseError(f"unexpected character in operator expression at {text[i:]!r}")
            out.append(m.group(1))
            i = m.end()
        return out

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, want=None):
        tok = self.peek()
        if tok is None or (want is not None and tok != want):
            raise ParseError(f"expected {want or 'more input'} in operator expression, got {tok!r}")
        self.pos += 1
        return tok

    def parse(self) -> Operator:
        op = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r} in operator expression")
        return op

    def expr(self) -> Operator:
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        op = self.term()
        if sign < 0:
            op = -op
        while self.peek() in ("+", "-"):
            if self.take() == "+":
                op = op + self.term()
            else:
                op = op - self.term()
        return op

    def term(self) -> Operator:
        coeff = None
        if self.peek() and self.peek()[0].isdigit():
            coeff = rational(self.take())
            self.take("*")
        op = self.factor()
        while self.peek() == ".":
            self.take()
            op = op @ self.factor()
        return op if coeff is None else coeff * op

    def factor(self) -> Operator:
        tok = self.take()
        c = self.conn
        if tok == "d":
            return d_op(c.chart)
        if tok == "h*":
            return HStar(c)
        if tok == "d^h":
            return cov_d(c)
        if tok == "D^h":
            return cov_D(c)
        if tok == "(":
            op = self.expr()
            self.take(")")
            return op
        if tok == "[":
            a = self.expr()
            self.take(",")
            b = self.expr()
            self.take("]")
            return graded_commutator(a, b)
        if tok in _FUNCS:
            self.take("(")
            K = self.form_ref(self.take())
            self.take(")")
            if tok == "theta":
                return theta(K)
            if tok == "theta_h":
                return theta_h(K, c)
            if tok == "i":
                return Insert(K)
            if K.degree < 1:
                return zero_operator(c.chart, K.degree - 1)
            return Insert(K, c)
        raise ParseError(f"unknown operator {tok!r}")

    def form_ref(self, name: str) -> VectorForm:
        c = self.conn
        builtin = {
            "phi": lambda: c.phi,
            "h": lambda: c.h,
            "Id": lambda: VectorForm.identity(c.chart),
            "R": lambda: curvature(c),
            "Rbar": lambda: cocurvature(c),
        }
        if name in self.forms:
            return self.forms[name]
        if name in builtin:
            return builtin[name]()
        raise ParseError(f"unknown form name {name!r}")


def parse_operator(text: str, conn: Connection, forms: Optional[Dict[str, VectorForm]] = None) -> Operator:
    return _OpParser(text, conn, forms or {}).parse()


# --------------------------------------------------------------------------
# subcommands


def _read_text(arg: str) -> str:
    if arg.startswith("@"):
        try:
            return Path(arg[1:]).read_text(encoding="utf-8").strip()
        except OSError as e:
            raise ParseError(f"cannot read {arg[1:]}: {e.strerror}") from None
    return arg


def _named_forms(chart: Chart, items: List[str]) -> Dict[str, VectorForm]:
    out = {}
    for item in items or ():
        name, sep, text = item.partition("=")
        if not sep or not name.strip():
            raise ParseError(f"--form expects NAME=FORM, got {item!r}")
        out[name.strip()] = parse_vector_form(chart, _read_text(text))
    return out


def cmd_curvature(args, out) -> int:
    conn = load_connection(args.path)
    R = curvature(conn)
    out.write(f"R = {render_form(R)}\n")
    out.write(f"Rbar = {render_form(cocurvature(conn))}\n")
    for text in args.apply or ():
        w = parse_form(conn.chart, _read_text(text), vector=False)
        Dh = cov_D(conn)(w)
        dh = cov_d(conn)(w)
        out.write(f"form {render_form(w)}\n")
        out.write(f"  h* = {render_form(HStar(conn)(w))}\n")
        out.write(f"  D^h = {render_form(Dh)}\n")
        out.write(f"  d^h = {render_form(dh)}\n")
        out.write(f"  d^h - D^h = {render_form(dh - Dh)}\n")
        out.write(f"  i^h(R) = {render_form(insert(R, w, conn.h))}\n")
    return 0


def cmd_bracket(args, out) -> int:
    conn = load_connection(args.conn) if args.conn else None
    if args.kind == "hat" and conn is None:
        raise ParseError("the hat bracket needs --conn")
    if conn is not None:
        chart = conn.chart
    elif args.coords:
        try:
            chart = Chart(c.strip() for c in args.coords.split(","))
        except ValueError as e:
            raise ParseError(str(e)) from None
    else:
        raise ParseError("give --coords or --conn to fix the chart")
    K = parse_vector_form(chart, _read_text(args.K))
    L = parse_vector_form(chart, _read_text(args.L))
    if args.kind == "fn":
        B = fn_bracket(K, L)
    elif args.kind == "alg":
        B = alg_bracket(K, L)
    else:
        B = hat_bracket(K, L, conn)
    out.write(f"[K,L] = {render_form(B)}\n")
    return 0


def cmd_decompose(args, out) -> int:
    conn = load_connection(args.path)
    D = parse_operator(args.expr, conn, _named_forms(conn.chart, args.form))
    K, L = (decompose_h if args.h else decompose)(D, conn)
    out.write(f"K = {render_form(K)}\n")
    out.write(f"L = {render_form(L)}\n")
    return 0


def cmd_lift(args, out) -> int:
    pb = load_bundle(args.path)
    K = parse_vector_form(pb.base, _read_text(args.K))
    out.write(f"chi_*K = {render_form(bl.chi_star(pb, K))}\n")
    return 0


def _dims(text: str) -> List[int]:
    try:
        dims = [int(d) for d in text.split(",") if d.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None
    if not dims or any(not 1 <= d <= 6 for d in dims):
        raise argparse.ArgumentTypeError("dimensions must lie in 1..6")
    return dims


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def cmd_verify(args, out) -> int:
    report = verify_suite(args.suite, args.dims, args.trials, args.seed, workers=args.workers)
    text = render_report(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        out.write(text.rstrip("\n").rsplit("\n", 1)[-1] + "\n")
    else:
        out.write(text)
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fnforms", description="Exact calculus of vector valued forms and connections.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("curvature", help="curvature and cocurvature of a connection file")
    c.add_argument("path", help="connection file (JSON)")
    c.add_argument("--apply", action="append", metavar="FORM", help="also print h*, D^h, d^h and i^h(R) applied to FORM")
    c.set_defaults(func=cmd_curvature)

    b = sub.add_parser("bracket", help="Frolicher-Nijenhuis, algebraic or hat bracket of two forms")
    b.add_argument("kind", choices=("fn", "alg", "hat"))
    b.add_argument("K", help="vector valued form text, or @path")
    b.add_argument("L", help="vector valued form text, or @path")
    b.add_argument("--conn", help="connection file; required for hat")
    b.add_argument("--coords", help="comma separated chart coordinates when no --conn is given")
    b.set_defaults(func=cmd_bracket)

    d = sub.add_parser("decompose", help="split a derivation over h* into (K, L)")
    d.add_argument("path", help="connection file (JSON)")
    d.add_argument("expr", help="operator expression, e.g. '[d,h*]' or 'theta_h(h) + i_h(R)'")
    d.add_argument("--h", action="store_true", help="decompose inside Der^h (horizontal K, equivariant L)")
    d.add_argument("--form", action="append", metavar="NAME=FORM", help="name a vector valued form for use in expr")
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="run a randomized identity suite")
    v.add_argument("suite", help="one of: " + ", ".join(suite_ids()))
    v.add_argument("--dims", type=_dims, default=[3])
    v.add_argument("--trials", type=_positive, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--workers", type=_positive, default=1)
    v.set_defaults(func=cmd_verify)

    lf = sub.add_parser("lift", help="lift a base vector valued form to a product bundle")
    lf.add_argument("path", help="bundle file (JSON)")
    lf.add_argument("K", help="vector valued form on the base chart, or @path")
    lf.set_defaults(func=cmd_lift)
    return p


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except FnFormsError as e:
        err.write(f"error[{e.code}]: {e}\n")
    except ValueError as e:
        err.write(f"error[invalid]: {e}\n")
    return 2


if __name__ == "__main__":
    sys.exit(main())
