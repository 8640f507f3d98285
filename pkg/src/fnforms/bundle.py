"""Product fiber bundles ``U × S`` with a connection given by lift coefficients.

Total-chart coordinates list the base coordinates first, so base index
tuples and packed base monomials are valid on the total chart unchanged.
The induced connection is ``φ(ξ, η) = (0, η - Γξ)``; its horizontal lift is
``χ(ξ) = (ξ, Γξ)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from .connection import Connection, make_connection
from .errors import ChartMismatch, FiberDependence
from .forms import ScalarForm, VectorForm
from .poly import Chart, Poly, raw_addmul_into, raw_clean, unpack


@dataclass(frozen=True, eq=False)
class ProductBundle:
    base: Chart
    fiber: Chart
    total: Chart
    gamma: Tuple[Tuple[Poly, ...], ...]  # gamma[σ][a], over the total chart

    @property
    def m(self) -> int:
        return self.base.dim

    @property
    def s(self) -> int:
        return self.fiber.dim


def make_bundle(base_coords: Sequence[str], fiber_coords: Sequence[str], gamma: Sequence[Sequence[object]]) -> ProductBundle:
    clash = set(base_coords) & set(fiber_coords)
    if clash:
        raise ChartMismatch(f"base and fiber share coordinate names {sorted(clash)}")
    base, fiber = Chart(base_coords), Chart(fiber_coords)
    total = Chart(tuple(base_coords) + tuple(fiber_coords))
    if len(gamma) != fiber.dim or any(len(row) != base.dim for row in gamma):
        raise ValueError(f"gamma must be {fiber.dim}x{base.dim}")
    rows = []
    for row in gamma:
        out = []
        for v in row:
            if isinstance(v, Poly):
                if v.chart != total:
                    raise ChartMismatch("gamma entries must live on the total chart")
                out.append(v)
            elif isinstance(v, str):
                out.append(Poly.parse(total, v))
            else:
                out.append(Poly.const(total, v))
        rows.append(tuple(out))
    return ProductBundle(base, fiber, total, tuple(rows))


def induced_connection(pb: ProductBundle) -> Connection:
    m, s = pb.m, pb.s
    n = m + s
    phi = [[0] * n for _ in range(n)]
    for sig in range(s):
        for a in range(m):
            phi[m + sig][a] = -pb.gamma[sig][a]
        phi[m + sig][m + sig] = 1
    return make_connection(pb.total, phi)


# --------------------------------------------------------------------------
# moving data between the base and the total chart


def _check_base_raw(pb: ProductBundle, raw) -> None:
    n = pb.total.dim
    for e in raw:
        if any(unpack(e, n)[pb.m:]):
            raise FiberDependence("coefficient depends on fiber coordinates")


def _as_base(pb: ProductBundle, obj):
    """Validate ``obj`` as base data; total-chart inputs must avoid fiber coordinates."""
    if obj.chart == pb.base:
        return obj
    if obj.chart != pb.total:
        raise ChartMismatch(f"{obj.chart!r} is neither the base nor the total chart")
    m = pb.m
    if isinstance(obj, ScalarForm):
        comps = {None: obj._c}
    else:
        comps = obj._c
        if any(j >= m for j in comps):
            raise FiberDependence("vector form has fiber-direction values")
    c = {}
    for j, comp in comps.items():
        out = {}
        for I, p in comp.items():
            if I and I[-1] >= m:
                raise FiberDependence("form has fiber differentials")
            _check_base_raw(pb, p)
            out[I] = p
        c[j] = out
    if isinstance(obj, ScalarForm):
        return ScalarForm._raw(pb.base, obj.degree, c[None])
    return VectorForm._raw(pb.base, obj.degree, c)


def pullback_base(pb: ProductBundle, w: ScalarForm) -> ScalarForm:
    """``p^*ω``: reinterpret a base form on the total chart."""
    w = _as_base(pb, w)
    # base exponents occupy the low bits of a packed monomial, so keys carry over
    return ScalarForm._raw(pb.total, w.degree, dict(w._c))


def embed_poly(pb: ProductBundle, f: Poly) -> Poly:
    if f.chart != pb.base:
        raise ChartMismatch("expected a base polynomial")
    return Poly._raw(pb.total, f._t)


def chi_star(pb: ProductBundle, K: VectorForm) -> VectorForm:
    """``(χ_*K)(X_1, ...) = χ(K(Tp X_1, ...))``: horizontal with horizontal values."""
    K = _as_base(pb, K)
    m = pb.m
    comps = {}
    for a, comp in K._c.items():
        comps[a] = dict(comp)
    for sig in range(pb.s):
        acc = {}
        for a, comp in K._c.items():
            g = pb.gamma[sig][a]._t
            if not g:
                continue
            for I, p in comp.items():
                slot = acc.setdefault(I, {})
                raw_addmul_into(slot, g, p)
        acc = {I: raw_clean(p) for I, p in acc.items()}
        acc = {I: p for I, p in acc.items() if p}
        if acc:
            comps[m + sig] = acc
    return VectorForm._raw(pb.total, K.degree, comps)


def chi_lift(pb: ProductBundle, X: VectorForm) -> VectorForm:
    """Horizontal lift of a base vector field."""
    if X.degree != 0:
        raise ValueError("chi_lift takes a vector field")
    return chi_star(pb, X)

