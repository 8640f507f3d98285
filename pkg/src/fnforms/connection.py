"""Connections as idempotent projections of the tangent bundle.

A connection is a degree-1 vector form ``φ`` with ``φ∘φ = φ``; its image is
the vertical distribution and ``h = Id - φ`` projects onto the horizontal one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import DegreeError, NonConstantTrace, NotIdempotent
from .forms import (
    ScalarForm,
    VectorForm,
    apply_endo,
    insert,
    lie_bracket,
    postcompose,
    precompose,
    pullback_by,
)
from .poly import Chart, Poly, check_chart, raw_addmul_into, raw_clean
from .sampling import random_poly


@dataclass(frozen=True, eq=False)
class Connection:
    chart: Chart
    phi: VectorForm
    h: VectorForm
    rank: int

    def vertical_fields(self):
        """``φ ∂_m`` for every coordinate; they span the vertical distribution."""
        return [apply_endo(self.phi, VectorForm.coord_field(self.chart, m)) for m in range(self.chart.dim)]

    def horizontal_fields(self):
        return [apply_endo(self.h, VectorForm.coord_field(self.chart, m)) for m in range(self.chart.dim)]

    def __repr__(self):
        return f"Connection({self.chart!r}, rank={self.rank}, phi={self.phi})"


def _as_poly(chart: Chart, v) -> Poly:
    if isinstance(v, Poly):
        check_chart(chart, v.chart)
        return v
    if isinstance(v, str):
        return Poly.parse(chart, v)
    return Poly.const(chart, v)


def make_connection(chart: Chart, phi_matrix: Sequence[Sequence[object]]) -> Connection:
    """Validate ``φ`` (``phi_matrix[i][j]`` is the ``∂_i`` component of ``φ(∂_j)``)."""
    n = chart.dim
    if len(phi_matrix) != n or any(len(row) != n for row in phi_matrix):
        raise ValueError(f"phi must be a {n}x{n} matrix")
    phi = VectorForm.from_matrix(chart, [[_as_poly(chart, v) for v in row] for row in phi_matrix])
    if postcompose(phi, phi) != phi:
        raise NotIdempotent()
    trace = Poly.const(chart, 0)
    for i in range(n):
        trace = trace + phi.matrix()[i][i]
    if not trace.is_constant():
        raise NonConstantTrace(f"trace(phi) = {trace} is not constant")
    r = trace.constant_term()
    if r != int(r) or not 0 <= r <= n:
        raise NonConstantTrace(f"trace(phi) = {r} is not an integer in 0..{n}")
    h = VectorForm.identity(chart) - phi
    return Connection(chart, phi, h, int(r))


def h_star(conn: Connection, w: ScalarForm) -> ScalarForm:
    """``(h^*ω)(X_1, ..., X_p) = ω(hX_1, ..., hX_p)``."""
    check_chart(conn.chart, w.chart)
    return pullback_by(w, conn.h)


def _bracket_form(outer: VectorForm, fields) -> VectorForm:
    chart = outer.chart
    n = chart.dim
    coeffs = {}
    for a in range(n):
        for b in range(a + 1, n):
            v = apply_endo(outer, lie_bracket(fields[a], fields[b]))
            for j, p in enumerate(v.field_components()):
                if p:
                    coeffs[((a, b), j)] = p
    return VectorForm(chart, 2, coeffs)


def curvature(conn: Connection) -> VectorForm:
    """``R(X, Y) = φ[hX, hY]``."""
    return _bracket_form(conn.phi, conn.horizontal_fields())


def cocurvature(conn: Connection) -> VectorForm:
    """``R̄(X, Y) = h[φX, φY]``."""
    return _bracket_form(conn.h, conn.vertical_fields())


def is_h_equivariant(conn: Connection, K: VectorForm) -> bool:
    """``h∘K == K∘Λh``."""
    check_chart(conn.chart, K.chart)
    if K.degree < 1:
        raise DegreeError("h-equivariance is defined for degree >= 1")
    return postcompose(conn.h, K) == precompose(K, conn.h)


_MODES = ("horizontal", "vertical", "horizontal_values", "vertical_values", "horizontal_args", "vertical_args")


def horizontality(conn: Connection, obj: Union[ScalarForm, VectorForm], mode: str) -> bool:
    """Exact horizontality predicates.

    For scalar forms ``horizontal`` means ``i_X ω = 0`` for every vertical ``X``
    and ``vertical`` the same for horizontal ``X``.  For vector forms the
    ``*_values`` modes test ``h∘K = K`` / ``φ∘K = K`` and the ``*_args`` modes
    ``K∘Λh = K`` / ``K∘Λφ = K``; plain ``horizontal``/``vertical`` mean the
    argument conditions.
    """
    check_chart(conn.chart, obj.chart)
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(obj, ScalarForm):
        if mode in ("horizontal", "horizontal_args"):
            fields = conn.vertical_fields()
        elif mode in ("vertical", "vertical_args"):
            fields = conn.horizontal_fields()
        else:
            raise ValueError(f"mode {mode!r} applies to vector forms only")
        return all(insert(X, obj).is_zero() for X in fields)
    if mode in ("horizontal", "horizontal_args"):
        return precompose(obj, conn.h) == obj
    if mode in ("vertical", "vertical_args"):
        return precompose(obj, conn.phi) == obj
    if mode == "horizontal_values":
        return postcompose(conn.h, obj) == obj
    return postcompose(conn.phi, obj) == obj


# --------------------------------------------------------------------------
# generator


def _matmul(A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = {}
            for m in range(n):
                if A[i][m] and B[m][j]:
                    raw_addmul_into(acc, A[i][m], B[m][j])
            row.append(raw_clean(acc))
        out.append(row)
    return out


def _shear(n, a, b, f_raw):
    M = [[({0: 1} if i == j else {}) for j in range(n)] for i in range(n)]
    M[a][b] = dict(f_raw)
    return M


def random_connection(
    chart: Chart,
    rank: int,
    seed: int,
    coeff_degree: int = 2,
    shears: int | None = None,
) -> Connection:
    """Random polynomial connection of vertical rank ``rank``.

    Built as ``G P0 G^{-1}`` with ``P0`` the coordinate projection onto the
    first ``rank`` coordinates and ``G`` a product of elementary shears
    ``I + f e_ab`` (``f`` random of degree ``<= coeff_degree``), so ``G^{-1}``
    is the reversed product of ``I - f e_ab`` and stays polynomial.
    """
    n = chart.dim
    if not 0 <= rank <= n:
        raise ValueError(f"rank {rank} out of range 0..{n}")
    rng = random.Random(seed)
    if shears is None:
        shears = n + 1
    G = [[({0: 1} if i == j else {}) for j in range(n)] for i in range(n)]
    Ginv = [row[:] for row in G]
    if 0 < rank < n:
        for s in range(shears):
            # alternate vertical→horizontal and horizontal→vertical couplings
            if s % 2 == 0:
                a, b = rng.randrange(rank, n), rng.randrange(0, rank)
            else:
                a, b = rng.randrange(0, rank), rng.randrange(rank, n)
            if rng.random() < 0.3:
                a, b = rng.sample(range(n), 2)
            f = random_poly(rng, chart, coeff_degree, max_terms=2, nonconstant=True)._t
            G = _matmul(G, _shear(n, a, b, f))
            Ginv = _matmul(_shear(n, a, b, {e: -c for e, c in f.items()}), Ginv)
    P0 = [[({0: 1} if (i == j and i < rank) else {}) for j in range(n)] for i in range(n)]
    phi = _matmul(_matmul(G, P0), Ginv)
    conn = make_connection(chart, [[Poly._raw(chart, p) for p in row] for row in phi])
    assert conn.rank == rank
    return conn


def shear_connection(conn: Connection, seed: int, coeff_degree: int = 1) -> Connection:
    """Another connection with the same vertical image: ``φ' = φ + φ∘S∘h``.

    ``φ'`` is idempotent with ``im φ' = im φ`` for any ``S``; the horizontal
    bundle moves while the vertical one stays fixed.
    """
    chart = conn.chart
    n = chart.dim
    rng = random.Random(seed)
    S = VectorForm.from_matrix(
        chart,
        [[random_poly(rng, chart, coeff_degree, max_terms=1) if rng.random() < 0.5 else 0 for _ in range(n)] for _ in range(n)],
    )
    phi2 = conn.phi + postcompose(conn.phi, postcompose(S, conn.h))
    return make_connection(chart, phi2.matrix())

