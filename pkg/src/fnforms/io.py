"""Input files and the text grammar for forms.

Forms use the same grammar as the renderer: ``(poly) x^y`` for a scalar
term, ``(poly) x^y (*) d/z`` for a vector valued term, terms joined by
``+``.  A function is a bare ``(poly)`` and a vector field is
``(poly) (*) d/z``.  Since ``0`` has no degree, a text may carry a leading
``k:`` annotation, e.g. ``2:0``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Optional, Union

from .bundle import ProductBundle, make_bundle
from .connection import Connection, make_connection
from .errors import ChartMismatch, DegreeError, ParseError
from .forms import ScalarForm, VectorForm
from .poly import Chart, Poly, render_poly

PathLike = Union[str, Path]

_DEG = re.compile(r"^\s*(\d+)\s*:(.*)$", re.S)
_TERM = re.compile(r"^\(([^()]*)\)\s*([A-Za-z_][\w^]*)?\s*(?:\(\*\)\s*d/([A-Za-z_]\w*))?$")


def _split_terms(text: str):
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced parentheses in {text!r}")
        elif ch == "+" and depth == 0:
            out.append(text[start:i])
            start = i + 1
    if depth:
        raise ParseError(f"unbalanced parentheses in {text!r}")
    out.append(text[start:])
    return [t.strip() for t in out]


def parse_form(chart: Chart, text: str, degree: Optional[int] = None, vector: Optional[bool] = None):
    """Parse a scalar or vector valued form; returns ScalarForm or VectorForm."""
    m = _DEG.match(text)
    if m:
        ann = int(m.group(1))
        if degree is not None and degree != ann:
            raise DegreeError(f"annotated degree {ann} but {degree} expected")
        degree, text = ann, m.group(2)
    body = text.strip()
    if not body:
        raise ParseError("empty form")
    if body == "0":
        if degree is None:
            raise ParseError("the zero form needs a degree annotation such as '1:0'")
        return VectorForm.zero(chart, degree) if vector else ScalarForm.zero(chart, degree)
    scalar_terms, vector_terms = [], []
    for term in _split_terms(body):
        tm = _TERM.match(term)
        if not tm:
            raise ParseError(f"bad form term {term!r}")
        coeff = Poly.parse(chart, tm.group(1))
        idx = tuple(chart.index(name) for name in tm.group(2).split("^")) if tm.group(2) else ()
        if len(set(idx)) != len(idx):
            raise ParseError(f"repeated differential in {term!r}")
        if tm.group(3):
            vector_terms.append((idx, chart.index(tm.group(3)), coeff))
        else:
            scalar_terms.append((idx, coeff))
    if scalar_terms and vector_terms:
        raise ParseError("form mixes scalar and vector valued terms")
    is_vec = bool(vector_terms)
    if vector is not None and vector != is_vec:
        raise ParseError("expected a vector valued form" if vector else "expected a scalar form")
    degs = {len(t[0]) for t in (vector_terms or scalar_terms)}
    if len(degs) > 1:
        raise DegreeError(f"terms of mixed degree {sorted(degs)}")
    k = degs.pop()
    if degree is not None and degree != k:
        raise DegreeError(f"form has degree {k}, expected {degree}")
    if k > chart.dim:
        raise DegreeError(f"degree {k} exceeds chart dimension {chart.dim}")
    if not is_vec:
        out = ScalarForm.zero(chart, k)
        for idx, c in scalar_terms:
            out = out + ScalarForm.basis(chart, idx, c)
        return out
    comps = {}
    for idx, j, c in vector_terms:
        comps[j] = comps.get(j, ScalarForm.zero(chart, k)) + ScalarForm.basis(chart, idx, c)
    return VectorForm.from_components(chart, k, comps)


def parse_vector_form(chart: Chart, text: str, degree: Optional[int] = None) -> VectorForm:
    return parse_form(chart, text, degree, vector=True)


def parse_scalar_form(chart: Chart, text: str, degree: Optional[int] = None) -> ScalarForm:
    return parse_form(chart, text, degree, vector=False)


# --------------------------------------------------------------------------
# JSON input files


def _load_json(source) -> dict:
    if isinstance(source, dict):
        return source
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {source}: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}: invalid JSON ({e.msg} at line {e.lineno})") from None
    if not isinstance(data, dict):
        raise ParseError(f"{source}: expected a JSON object")
    return data


def _require(data: dict, key: str, kind, where: str):
    if key not in data:
        raise ParseError(f"{where}: missing field {key!r}")
    if not isinstance(data[key], kind):
        raise ParseError(f"{where}: field {key!r} has the wrong type")
    return data[key]


def _poly_matrix(chart: Chart, rows, nrows: int, ncols: int, what: str):
    if len(rows) != nrows or any(not isinstance(r, list) or len(r) != ncols for r in rows):
        raise ParseError(f"{what} must be a {nrows}x{ncols} matrix")
    out = []
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (str, int)):
                raise ParseError(f"{what} entries must be polynomial strings or integers")
            cells.append(Poly.parse(chart, v) if isinstance(v, str) else Poly.const(chart, v))
        out.append(cells)
    return out


def connection_from_dict(data: dict, where: str = "connection file") -> Connection:
    coords = _require(data, "coords", list, where)
    if not all(isinstance(c, str) for c in coords):
        raise ParseError(f"{where}: coords must be strings")
    dim = data.get("dim", len(coords))
    if not isinstance(dim, int) or dim != len(coords):
        raise ParseError(f"{where}: dim does not match the number of coords")
    try:
        chart = Chart(tuple(coords))
    except ValueError as e:
        raise ParseError(f"{where}: {e}") from None
    phi = _poly_matrix(chart, _require(data, "phi", list, where), dim, dim, "phi")
    return make_connection(chart, phi)


def load_connection(source) -> Connection:
    """Read a connection file: ``{"dim": n, "coords": [...], "phi": [[...], ...]}``."""
    data = _load_json(source)
    return connection_from_dict(data, str(source) if not isinstance(source, dict) else "connection file")


def connection_to_dict(conn: Connection) -> dict:
    return {
        "dim": conn.chart.dim,
        "coords": list(conn.chart.coord_names),
        "phi": [[render_poly(p) for p in row] for row in conn.phi.matrix()],
    }


def load_bundle(source) -> ProductBundle:
    """Read a bundle file: ``{"base_coords": [...], "fiber_coords": [...], "gamma": [[...]]}``."""
    data = _load_json(source)
    where = str(source) if not isinstance(source, dict) else "bundle file"
    base = _require(data, "base_coords", list, where)
    fiber = _require(data, "fiber_coords", list, where)
    if not all(isinstance(c, str) for c in base + fiber):
        raise ParseError(f"{where}: coordinate names must be strings")
    clash = set(base) & set(fiber)
    if clash:
        raise ChartMismatch(f"base and fiber share coordinate names {sorted(clash)}")
    try:
        total = Chart(tuple(base) + tuple(fiber))
    except ValueError as e:
        raise ParseError(f"{where}: {e}") from None
    gamma = _poly_matrix(total, _require(data, "gamma", list, where), len(fiber), len(base), "gamma")
    return make_bundle(base, fiber, gamma)
