"""Exact multivariate polynomials over the rationals on a coordinate chart.

Coefficients are Python ``int`` or :class:`fractions.Fraction`; integer data
stays integer, so the common case never pays for gcd normalization.
Monomials are packed into a single integer, ``_BITS`` bits per coordinate,
which turns monomial multiplication into integer addition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple, Union

from .errors import ChartMismatch, ParseError

Rational = Fraction
Coeff = Union[int, Fraction]
RawPoly = Dict[int, Coeff]

_BITS = 16
_MASK = (1 << _BITS) - 1

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def rational(value) -> Coeff:
    """Coerce ``value`` (int, Fraction, or ``"p/q"`` string) to an exact scalar."""
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        try:
            q = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {value!r}") from exc
        return q.numerator if q.denominator == 1 else q
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")


@dataclass(frozen=True)
class Chart:
    """A coordinate chart ``U ⊆ R^n`` with named coordinates."""

    coord_names: Tuple[str, ...]

    def __init__(self, coord_names: Iterable[str]):
        names = tuple(coord_names)
        if not names:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names must be unique: {names}")
        for name in names:
            if not _NAME_RE.match(name):
                raise ValueError(f"invalid coordinate name {name!r}")
        object.__setattr__(self, "coord_names", names)

    @property
    def dim(self) -> int:
        return len(self.coord_names)

    def index(self, name: str) -> int:
        try:
            return self.coord_names.index(name)
        except ValueError:
            raise ParseError(f"unknown coordinate {name!r}") from None

    def __repr__(self):
        return f"Chart({', '.join(self.coord_names)})"


def check_chart(a: Chart, b: Chart) -> None:
    if a is not b and a != b:
        raise ChartMismatch(f"{a!r} vs {b!r}")


# --------------------------------------------------------------------------
# raw dict kernels, shared with the forms layer

def pack(exps: Iterable[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def unpack(key: int, n: int) -> Tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(n))


def raw_clean(p: RawPoly) -> RawPoly:
    return {e: c for e, c in p.items() if c}


def raw_add_into(acc: RawPoly, p: RawPoly, scale: Coeff = 1) -> None:
    """acc += scale * p, in place; may leave zero coefficients behind."""
    get = acc.get
    if scale == 1:
        for e, c in p.items():
            acc[e] = get(e, 0) + c
    elif scale == -1:
        for e, c in p.items():
            acc[e] = get(e, 0) - c
    else:
        for e, c in p.items():
            acc[e] = get(e, 0) + scale * c


def raw_addmul_into(acc: RawPoly, a: RawPoly, b: RawPoly, scale: Coeff = 1) -> None:
    """acc += scale * a * b, in place."""
    if len(a) > len(b):
        a, b = b, a
    get = acc.get
    for ea, ca in a.items():
        s = scale * ca
        for eb, cb in b.items():
            e = ea + eb
            acc[e] = get(e, 0) + s * cb


def raw_mul(a: RawPoly, b: RawPoly) -> RawPoly:
    acc: RawPoly = {}
    raw_addmul_into(acc, a, b)
    return raw_clean(acc)


def raw_partial(a: RawPoly, i: int) -> RawPoly:
    shift = _BITS * i
    one = 1 << shift
    out: RawPoly = {}
    for e, c in a.items():
        k = (e >> shift) & _MASK
        if k:
            out[e - one] = c * k
    return out


def raw_scale(a: RawPoly, s: Coeff) -> RawPoly:
    if not s:
        return {}
    return {e: s * c for e, c in a.items()}


def raw_sum(parts: Iterable[Tuple[Coeff, RawPoly]]) -> RawPoly:
    acc: RawPoly = {}
    for s, p in parts:
        raw_add_into(acc, p, s)
    return raw_clean(acc)


def _grlex_key(key: int, n: int):
    exps = unpack(key, n)
    return (sum(exps), exps)


# --------------------------------------------------------------------------


class Poly:
    """Immutable exact polynomial on a :class:`Chart`.

    ``terms`` maps exponent vectors to nonzero rationals.
    """

    __slots__ = ("chart", "_t")

    def __init__(self, chart: Chart, terms: Mapping[Tuple[int, ...], object] | None = None):
        self.chart = chart
        t: RawPoly = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != chart.dim:
                raise ValueError(f"exponent vector {exps} has wrong length for {chart!r}")
            c = rational(c)
            if c:
                key = pack(exps)
                t[key] = t.get(key, 0) + c
        self._t = raw_clean(t)

    @classmethod
    def _raw(cls, chart: Chart, t: RawPoly) -> "Poly":
        p = cls.__new__(cls)
        p.chart = chart
        p._t = t
        return p

    @classmethod
    def const(cls, chart: Chart, c) -> "Poly":
        c = rational(c)
        return cls._raw(chart, {0: c} if c else {})

    @classmethod
    def coord(cls, chart: Chart, i: int) -> "Poly":
        if not 0 <= i < chart.dim:
            raise IndexError(f"coordinate index {i} out of range for {chart!r}")
        return cls._raw(chart, {1 << (_BITS * i): 1})

    @classmethod
    def parse(cls, chart: Chart, text: str) -> "Poly":
        return parse_poly(chart, text)

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> Dict[Tuple[int, ...], Coeff]:
        n = self.chart.dim
        return {unpack(e, n): c for e, c in self.sorted_items()}

    def sorted_items(self):
        """Terms in canonical order: descending graded-lexicographic."""
        n = self.chart.dim
        return sorted(self._t.items(), key=lambda ec: _grlex_key(ec[0], n), reverse=True)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return all(e == 0 for e in self._t)

    def constant_term(self) -> Coeff:
        return self._t.get(0, 0)

    def total_degree(self) -> int:
        n = self.chart.dim
        return max((sum(unpack(e, n)) for e in self._t), default=-1)

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            check_chart(self.chart, other.chart)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(self.chart, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._t)
        raw_add_into(acc, other._t)
        return Poly._raw(self.chart, raw_clean(acc))

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.chart, {e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._t)
        raw_add_into(acc, other._t, -1)
        return Poly._raw(self.chart, raw_clean(acc))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(self.chart, raw_mul(self._t, other._t))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = Poly.const(self.chart, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def partial(self, i: int) -> "Poly":
        if not 0 <= i < self.chart.dim:
            raise IndexError(f"coordinate index {i} out of range for {self.chart!r}")
        return Poly._raw(self.chart, raw_partial(self._t, i))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.chart == other.chart and self._t == other._t
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._t == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.chart, frozenset(self._t.items())))

    def __str__(self):
        return render_poly(self)

    def __repr__(self):
        return f"Poly({render_poly(self)!r})"


def poly_combine(a: Poly, b: Poly, kind: str) -> Poly:
    """Exact ``a + b``, ``a - b`` or ``a * b`` in canonical form."""
    check_chart(a.chart, b.chart)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown combination {kind!r}")


def poly_partial(a: Poly, i: int) -> Poly:
    return a.partial(i)


# --------------------------------------------------------------------------
# text grammar:  [-]c/d x^a y^b  (+|-)  ...


def _render_coeff(c: Coeff) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(int(c))


def render_poly(p: Poly) -> str:
    if not p._t:
        return "0"
    names = p.chart.coord_names
    n = len(names)
    out = []
    for key, c in p.sorted_items():
        exps = unpack(key, n)
        mono = " ".join(
            name if e == 1 else f"{name}^{e}" for name, e in zip(names, exps) if e
        )
        mag = -c if c < 0 else c
        if mono:
            body = mono if mag == 1 else f"{_render_coeff(mag)} {mono}"
        else:
            body = _render_coeff(mag)
        if not out:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f"- {body}" if c < 0 else f"+ {body}")
    return " ".join(out)


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")
_COEFF_RE = re.compile(r"^\d+(/\d+)?$")
_FACTOR_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?$")


def parse_poly(chart: Chart, text: str) -> Poly:
    """Parse the polynomial text grammar; coordinates must belong to ``chart``."""
    src = text.strip()
    if not src:
        raise ParseError("empty polynomial")
    pieces = _TERM_SPLIT.split(src)
    # pieces alternates [term, sign, term, sign, term...]; a leading sign gives ''.
    terms = []
    sign = 1
    if pieces[0] == "":
        pieces = pieces[1:]
    else:
        pieces = ["+"] + pieces
    if len(pieces) % 2:
        raise ParseError(f"dangling operator in {text!r}")
    for s, body in zip(pieces[0::2], pieces[1::2]):
        sign = -1 if s == "-" else 1
        if not body:
            raise ParseError(f"empty term in {text!r}")
        terms.append((sign, body))
    acc: RawPoly = {}
    n = chart.dim
    for sign, body in terms:
        coeff: Coeff = 1
        exps = [0] * n
        factors = body.replace("*", " ").split()
        for idx, fac in enumerate(factors):
            if _COEFF_RE.match(fac):
                if idx != 0:
                    raise ParseError(f"coefficient must lead the term: {body!r}")
                coeff = rational(fac)
                continue
            m = _FACTOR_RE.match(fac)
            if not m:
                raise ParseError(f"bad factor {fac!r} in {text!r}")
            i = chart.index(m.group(1))
            exps[i] += int(m.group(2)) if m.group(2) else 1
        key = pack(exps)
        acc[key] = acc.get(key, 0) + sign * coeff
    return Poly._raw(chart, raw_clean(acc))
