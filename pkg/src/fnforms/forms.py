"""Scalar and tangent-valued differential forms on a chart.

Forms are stored on strictly increasing index tuples only.  The pairing
convention is the determinant one: ``(dx^i1 ∧ ... ∧ dx^ip)(∂_j1, ..., ∂_jp)``
is the sign of the permutation taking ``J`` to ``I`` (zero if the index sets
differ), so a coefficient is the value on the sorted coordinate fields.

A vector-valued form ``K`` of degree ``k`` is kept as its output components
``K^j = dx^j ∘ K``, each a scalar ``k``-form.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .errors import ChartMismatch, DegreeError
from .poly import (
    Chart,
    Coeff,
    Poly,
    RawPoly,
    check_chart,
    rational,
    raw_add_into,
    raw_addmul_into,
    raw_clean,
    raw_mul,
    raw_partial,
    render_poly,
)

Index = Tuple[int, ...]
RawForm = Dict[Index, RawPoly]

_ONE: RawPoly = {0: 1}


# --------------------------------------------------------------------------
# permutation bookkeeping


@lru_cache(maxsize=None)
def merge_sign(a: Index, b: Index) -> Tuple[int, Index]:
    """Sign and sorted tuple of ``dx^a ∧ dx^b`` for sorted ``a``, ``b``; sign 0 on overlap."""
    if set(a) & set(b):
        return 0, ()
    inversions = sum(1 for i in a for j in b if i > j)
    return (-1 if inversions & 1 else 1), tuple(sorted(a + b))


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if it has repeats."""
    if len(set(seq)) != len(seq):
        return 0
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def _check_index(I: Index, n: int) -> Index:
    I = tuple(int(i) for i in I)
    if any(b <= a for a, b in zip(I, I[1:])):
        raise ValueError(f"index tuple {I} is not strictly increasing")
    if I and not (0 <= I[0] and I[-1] < n):
        raise ValueError(f"index tuple {I} out of range")
    return I


def _raw_of(chart: Chart, value) -> RawPoly:
    if isinstance(value, Poly):
        check_chart(chart, value.chart)
        return value._t
    if isinstance(value, dict):
        return raw_clean(value)
    c = rational(value)
    return {0: c} if c else {}


# --------------------------------------------------------------------------
# raw-form kernels


def _rf_add_into(acc: RawForm, src: RawForm, scale: Coeff = 1) -> None:
    for I, p in src.items():
        slot = acc.get(I)
        if slot is None:
            slot = acc[I] = {}
        raw_add_into(slot, p, scale)


def _rf_clean(acc: RawForm) -> RawForm:
    out = {}
    for I, p in acc.items():
        p = raw_clean(p)
        if p:
            out[I] = p
    return out


def _rf_wedge(a: RawForm, b: RawForm, scale: Coeff = 1, acc: Optional[RawForm] = None) -> RawForm:
    """acc += scale * (a ∧ b) on raw coefficient maps (acc left uncleaned)."""
    if acc is None:
        acc = {}
    for I, f in a.items():
        for J, g in b.items():
            s, K = merge_sign(I, J)
            if not s:
                continue
            slot = acc.get(K)
            if slot is None:
                slot = acc[K] = {}
            raw_addmul_into(slot, f, g, s * scale)
    return acc


def _rf_mul_poly(a: RawForm, f: RawPoly) -> RawForm:
    if f == _ONE:
        return a
    out = {}
    for I, p in a.items():
        q = raw_mul(p, f)
        if q:
            out[I] = q
    return out


def _rf_d(a: RawForm, n: int) -> RawForm:
    acc: RawForm = {}
    for I, f in a.items():
        for m in range(n):
            if m in I:
                continue
            df = raw_partial(f, m)
            if not df:
                continue
            s, K = merge_sign((m,), I)
            slot = acc.get(K)
            if slot is None:
                slot = acc[K] = {}
            raw_add_into(slot, df, s)
    return _rf_clean(acc)


# --------------------------------------------------------------------------


class ScalarForm:
    """An element of Ω^p(U) with exact polynomial coefficients.

    Degrees outside ``0..n`` are allowed but such a form is always zero.
    """

    __slots__ = ("chart", "degree", "_c")

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[Index, object] | None = None):
        self.chart = chart
        self.degree = int(degree)
        c: RawForm = {}
        n = chart.dim
        for I, v in (coeffs or {}).items():
            I = _check_index(I, n)
            if len(I) != self.degree:
                raise DegreeError(f"index {I} does not match degree {self.degree}")
            raw = _raw_of(chart, v)
            if raw:
                c[I] = raw
        self._c = c

    @classmethod
    def _raw(cls, chart: Chart, degree: int, c: RawForm) -> "ScalarForm":
        f = cls.__new__(cls)
        f.chart = chart
        f.degree = degree
        f._c = c if 0 <= degree <= chart.dim else {}
        return f

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "ScalarForm":
        return cls._raw(chart, degree, {})

    @classmethod
    def function(cls, f: Poly) -> "ScalarForm":
        return cls._raw(f.chart, 0, {(): f._t} if f._t else {})

    @classmethod
    def dx(cls, chart: Chart, i: int) -> "ScalarForm":
        if not 0 <= i < chart.dim:
            raise IndexError(i)
        return cls._raw(chart, 1, {(i,): dict(_ONE)})

    @classmethod
    def basis(cls, chart: Chart, I: Iterable[int], coeff=1) -> "ScalarForm":
        I = tuple(I)
        sign = perm_sign(I)
        if not sign:
            return cls.zero(chart, len(I))
        raw = _raw_of(chart, coeff)
        if sign < 0:
            raw = {e: -c for e, c in raw.items()}
        return cls._raw(chart, len(I), {tuple(sorted(I)): raw} if raw else {})

    # -- inspection --------------------------------------------------------

    @property
    def in_range(self) -> bool:
        return 0 <= self.degree <= self.chart.dim

    @property
    def coeffs(self) -> Dict[Index, Poly]:
        return {I: Poly._raw(self.chart, self._c[I]) for I in sorted(self._c)}

    def coeff(self, I: Iterable[int]) -> Poly:
        I = tuple(I)
        sign = perm_sign(I)
        raw = self._c.get(tuple(sorted(I)), {}) if sign else {}
        p = Poly._raw(self.chart, raw)
        return -p if sign < 0 else p

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    # -- linear structure --------------------------------------------------

    def _combine(self, other: "ScalarForm", scale: Coeff) -> "ScalarForm":
        if not isinstance(other, ScalarForm):
            return NotImplemented
        check_chart(self.chart, other.chart)
        if self.degree != other.degree:
            if not other._c:
                return self
            if not self._c:
                return other * scale
            raise DegreeError(f"cannot add forms of degree {self.degree} and {other.degree}")
        acc: RawForm = {I: dict(p) for I, p in self._c.items()}
        _rf_add_into(acc, other._c, scale)
        return ScalarForm._raw(self.chart, self.degree, _rf_clean(acc))

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self * -1

    def __mul__(self, s):
        """Multiply by an exact scalar or by a function (Poly)."""
        if isinstance(s, Poly):
            check_chart(self.chart, s.chart)
            return ScalarForm._raw(self.chart, self.degree, _rf_mul_poly(self._c, s._t) if s._t else {})
        s = rational(s)
        if not s:
            return ScalarForm.zero(self.chart, self.degree)
        return ScalarForm._raw(
            self.chart, self.degree, {I: {e: s * c for e, c in p.items()} for I, p in self._c.items()}
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ScalarForm):
            return NotImplemented
        return self.chart == other.chart and self.degree == other.degree and self._c == other._c

    def __hash__(self):
        return hash((self.chart, self.degree, frozenset((I, frozenset(p.items())) for I, p in self._c.items())))

    def __str__(self):
        return render_form(self)

    def __repr__(self):
        return f"ScalarForm(deg={self.degree}, {render_form(self)})"


class VectorForm:
    """An element of Ω^k(U; TU), stored as output components ``K^j``."""

    __slots__ = ("chart", "degree", "_c")

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[Tuple[Index, int], object] | None = None):
        self.chart = chart
        self.degree = int(degree)
        n = chart.dim
        c: Dict[int, RawForm] = {}
        for (I, j), v in (coeffs or {}).items():
            I = _check_index(I, n)
            if len(I) != self.degree:
                raise DegreeError(f"index {I} does not match degree {self.degree}")
            if not 0 <= j < n:
                raise ValueError(f"output index {j} out of range")
            raw = _raw_of(chart, v)
            if raw:
                comp = c.setdefault(j, {})
                slot = comp.setdefault(I, {})
                raw_add_into(slot, raw)
        self._c = {j: _rf_clean(comp) for j, comp in c.items()}
        self._c = {j: comp for j, comp in self._c.items() if comp}

    @classmethod
    def _raw(cls, chart: Chart, degree: int, c: Dict[int, RawForm]) -> "VectorForm":
        K = cls.__new__(cls)
        K.chart = chart
        K.degree = degree
        K._c = {j: comp for j, comp in c.items() if comp} if 0 <= degree <= chart.dim else {}
        return K

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "VectorForm":
        return cls._raw(chart, degree, {})

    @classmethod
    def from_components(cls, chart: Chart, degree: int, comps: Mapping[int, ScalarForm]) -> "VectorForm":
        c = {}
        for j, w in comps.items():
            check_chart(chart, w.chart)
            if w._c and w.degree != degree:
                raise DegreeError(f"component {j} has degree {w.degree}, expected {degree}")
            c[j] = w._c
        return cls._raw(chart, degree, c)

    @classmethod
    def vector_field(cls, chart: Chart, components: Sequence[object]) -> "VectorForm":
        if len(components) != chart.dim:
            raise ValueError("vector field needs one component per coordinate")
        c = {}
        for j, v in enumerate(components):
            raw = _raw_of(chart, v)
            if raw:
                c[j] = {(): raw}
        return cls._raw(chart, 0, c)

    @classmethod
    def coord_field(cls, chart: Chart, i: int) -> "VectorForm":
        if not 0 <= i < chart.dim:
            raise IndexError(i)
        return cls._raw(chart, 0, {i: {(): dict(_ONE)}})

    @classmethod
    def from_matrix(cls, chart: Chart, matrix: Sequence[Sequence[object]]) -> "VectorForm":
        """Degree-1 form of the endomorphism ``X ↦ A X`` (``matrix[i][j]`` = A_ij)."""
        n = chart.dim
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise ValueError(f"expected an {n}x{n} matrix")
        c: Dict[int, RawForm] = {}
        for i, row in enumerate(matrix):
            for j, v in enumerate(row):
                raw = _raw_of(chart, v)
                if raw:
                    c.setdefault(i, {})[(j,)] = raw
        return cls._raw(chart, 1, c)

    @classmethod
    def identity(cls, chart: Chart) -> "VectorForm":
        return cls._raw(chart, 1, {i: {(i,): dict(_ONE)} for i in range(chart.dim)})

    # -- inspection --------------------------------------------------------

    @property
    def in_range(self) -> bool:
        return 0 <= self.degree <= self.chart.dim

    def component(self, j: int) -> ScalarForm:
        return ScalarForm._raw(self.chart, self.degree, self._c.get(j, {}))

    def components(self):
        return [self.component(j) for j in range(self.chart.dim)]

    @property
    def coeffs(self) -> Dict[Tuple[Index, int], Poly]:
        items = [((I, j), p) for j, comp in self._c.items() for I, p in comp.items()]
        return {key: Poly._raw(self.chart, p) for key, p in sorted(items, key=lambda kv: kv[0])}

    def matrix(self):
        """Entries ``A[i][j]`` of a degree-1 form viewed as an endomorphism."""
        if self.degree != 1:
            raise DegreeError("matrix() needs a degree-1 form")
        n = self.chart.dim
        return [[Poly._raw(self.chart, self._c.get(i, {}).get((j,), {})) for j in range(n)] for i in range(n)]

    def field_components(self):
        if self.degree != 0:
            raise DegreeError("field_components() needs a vector field")
        return [Poly._raw(self.chart, self._c.get(j, {}).get((), {})) for j in range(self.chart.dim)]

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    # -- linear structure --------------------------------------------------

    def _combine(self, other: "VectorForm", scale: Coeff) -> "VectorForm":
        if not isinstance(other, VectorForm):
            return NotImplemented
        check_chart(self.chart, other.chart)
        if self.degree != other.degree:
            if not other._c:
                return self
            if not self._c:
                return other * scale
            raise DegreeError(f"cannot add vector forms of degree {self.degree} and {other.degree}")
        acc: Dict[int, RawForm] = {j: {I: dict(p) for I, p in comp.items()} for j, comp in self._c.items()}
        for j, comp in other._c.items():
            _rf_add_into(acc.setdefault(j, {}), comp, scale)
        return VectorForm._raw(self.chart, self.degree, {j: _rf_clean(c) for j, c in acc.items()})

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self * -1

    def __mul__(self, s):
        if isinstance(s, Poly):
            check_chart(self.chart, s.chart)
            if not s._t:
                return VectorForm.zero(self.chart, self.degree)
            return VectorForm._raw(self.chart, self.degree, {j: _rf_mul_poly(c, s._t) for j, c in self._c.items()})
        s = rational(s)
        if not s:
            return VectorForm.zero(self.chart, self.degree)
        return VectorForm._raw(
            self.chart,
            self.degree,
            {j: {I: {e: s * c for e, c in p.items()} for I, p in comp.items()} for j, comp in self._c.items()},
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorForm):
            return NotImplemented
        return self.chart == other.chart and self.degree == other.degree and self._c == other._c

    def __hash__(self):
        return hash((self.chart, self.degree, str(self)))

    def __str__(self):
        return render_form(self)

    def __repr__(self):
        return f"VectorForm(deg={self.degree}, {render_form(self)})"


def _same_chart(*objs) -> Chart:
    chart = objs[0].chart
    for o in objs[1:]:
        check_chart(chart, o.chart)
    return chart


# --------------------------------------------------------------------------
# exterior algebra


def wedge(a: ScalarForm, b: ScalarForm) -> ScalarForm:
    chart = _same_chart(a, b)
    deg = a.degree + b.degree
    if deg > chart.dim or not a._c or not b._c:
        return ScalarForm.zero(chart, deg)
    return ScalarForm._raw(chart, deg, _rf_clean(_rf_wedge(a._c, b._c)))


def wedge_many(forms: Sequence[ScalarForm]) -> ScalarForm:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def ext_d(a: ScalarForm) -> ScalarForm:
    n = a.chart.dim
    if a.degree + 1 > n or not a._c:
        return ScalarForm.zero(a.chart, a.degree + 1)
    return ScalarForm._raw(a.chart, a.degree + 1, _rf_d(a._c, n))


def wedge_vv(w: ScalarForm, K: VectorForm) -> VectorForm:
    """``ω ∧ K``: wedge ``ω`` into each output component of ``K``."""
    chart = _same_chart(w, K)
    deg = w.degree + K.degree
    if deg > chart.dim:
        return VectorForm.zero(chart, deg)
    return VectorForm._raw(chart, deg, {j: _rf_clean(_rf_wedge(w._c, comp)) for j, comp in K._c.items()})


def d_vv(K: VectorForm) -> VectorForm:
    """Componentwise exterior derivative (chart-dependent; used only by identities written in coordinates)."""
    n = K.chart.dim
    return VectorForm._raw(K.chart, K.degree + 1, {j: _rf_d(c, n) for j, c in K._c.items()})


# --------------------------------------------------------------------------
# evaluation and vector fields


def _field_raw(X: VectorForm):
    if X.degree != 0:
        raise DegreeError(f"expected a vector field, got degree {X.degree}")
    return [X._c.get(j, {}).get((), {}) for j in range(X.chart.dim)]


def eval_form(w: ScalarForm, *fields: VectorForm) -> Poly:
    """Evaluate ``ω(X_1, ..., X_p)`` on vector fields."""
    chart = _same_chart(w, *fields) if fields else w.chart
    if len(fields) != w.degree:
        raise DegreeError(f"{w.degree}-form evaluated on {len(fields)} fields")
    if w.degree == 0:
        return Poly._raw(chart, w._c.get((), {}))
    comps = [_field_raw(X) for X in fields]
    p = w.degree
    acc: RawPoly = {}
    perms = list(permutations(range(p)))
    signs = [perm_sign(s) for s in perms]
    for I, f in w._c.items():
        for sigma, s in zip(perms, signs):
            term = f
            for b in range(p):
                xb = comps[sigma[b]][I[b]]
                if not xb:
                    break
                term = raw_mul(term, xb)
            else:
                raw_add_into(acc, term, s)
    return Poly._raw(chart, raw_clean(acc))


def eval_vector_form(K: VectorForm, *fields: VectorForm) -> VectorForm:
    """``K(X_1, ..., X_k)`` as a vector field."""
    comps = [eval_form(K.component(j), *fields) for j in range(K.chart.dim)]
    return VectorForm.vector_field(K.chart, comps)


def apply_vector(X: VectorForm, f: Poly) -> Poly:
    """Directional derivative ``X·f``."""
    check_chart(X.chart, f.chart)
    acc: RawPoly = {}
    for i, xi in enumerate(_field_raw(X)):
        if xi:
            raw_addmul_into(acc, xi, raw_partial(f._t, i))
    return Poly._raw(f.chart, raw_clean(acc))


def lie_bracket(X: VectorForm, Y: VectorForm) -> VectorForm:
    chart = _same_chart(X, Y)
    if X.degree != 0 or Y.degree != 0:
        raise DegreeError("lie_bracket takes vector fields (degree 0)")
    xs, ys = _field_raw(X), _field_raw(Y)
    n = chart.dim
    c = {}
    for j in range(n):
        acc: RawPoly = {}
        for i in range(n):
            if xs[i] and ys[j]:
                raw_addmul_into(acc, xs[i], raw_partial(ys[j], i))
            if ys[i] and xs[j]:
                raw_addmul_into(acc, ys[i], raw_partial(xs[j], i), -1)
        acc = raw_clean(acc)
        if acc:
            c[j] = {(): acc}
    return VectorForm._raw(chart, 0, c)


# --------------------------------------------------------------------------
# composition with endomorphisms (degree-1 vector forms)


def pullback_by(w: ScalarForm, A: VectorForm) -> ScalarForm:
    """``(A^*ω)(X_1, ..., X_p) = ω(A X_1, ..., A X_p)`` for a degree-1 ``A``."""
    chart = _same_chart(w, A)
    if A.degree != 1:
        raise DegreeError("pullback_by needs a degree-1 vector form")
    if w.degree <= 0 or not w._c:
        return w
    rows = [A._c.get(i, {}) for i in range(chart.dim)]
    acc: RawForm = {}
    cache: Dict[Index, RawForm] = {}
    for I, f in w._c.items():
        img = _pull_basis(I, rows, cache)
        if not img:
            continue
        for J, g in img.items():
            slot = acc.get(J)
            if slot is None:
                slot = acc[J] = {}
            raw_addmul_into(slot, g, f)
    return ScalarForm._raw(chart, w.degree, _rf_clean(acc))


def _pull_basis(I: Index, rows, cache) -> RawForm:
    hit = cache.get(I)
    if hit is not None:
        return hit
    if len(I) == 1:
        out = rows[I[0]]
    else:
        head = _pull_basis(I[:-1], rows, cache)
        out = _rf_clean(_rf_wedge(head, rows[I[-1]])) if head and rows[I[-1]] else {}
    cache[I] = out
    return out


def precompose(K: VectorForm, A: VectorForm) -> VectorForm:
    """``K ∘ Λ^k A``: feed every argument through ``A``."""
    chart = _same_chart(K, A)
    if K.degree == 0:
        return K
    comps = {j: pullback_by(K.component(j), A)._c for j in K._c}
    return VectorForm._raw(chart, K.degree, comps)


def postcompose(A: VectorForm, K: VectorForm) -> VectorForm:
    """``A ∘ K``: apply the endomorphism ``A`` to the values of ``K``."""
    chart = _same_chart(A, K)
    if A.degree != 1:
        raise DegreeError("postcompose needs a degree-1 endomorphism")
    out: Dict[int, RawForm] = {}
    for i, row in A._c.items():
        acc: RawForm = {}
        for (j,), a_ij in row.items():
            comp = K._c.get(j)
            if not comp:
                continue
            for I, p in comp.items():
                slot = acc.get(I)
                if slot is None:
                    slot = acc[I] = {}
                raw_addmul_into(slot, a_ij, p)
        acc = _rf_clean(acc)
        if acc:
            out[i] = acc
    return VectorForm._raw(chart, K.degree, out)


def apply_endo(A: VectorForm, X: VectorForm) -> VectorForm:
    """``A(X)`` for a degree-1 ``A`` and a vector field ``X``."""
    return postcompose(A, X)


# --------------------------------------------------------------------------
# insertion operators


def insert(K: VectorForm, w: ScalarForm, h: Optional[VectorForm] = None) -> ScalarForm:
    """``i^h(K) ω``; plain insertion ``i(K) ω`` when ``h`` is None.

    Uses the expansion over one-form factors
    ``i^h(K)(ω_1∧...∧ω_p) = Σ_j (-1)^{(j-1)k} (ω_1∘h)∧...∧(ω_j∘K)∧...∧(ω_p∘h)``
    with ``k = deg K - 1``.  For ``deg K = 0`` this is contraction with a vector field
    (followed by ``h^*`` when ``h`` is given).
    """
    chart = _same_chart(K, w) if h is None else _same_chart(K, w, h)
    k = K.degree - 1
    out_deg = k + w.degree
    if w.degree <= 0 or not w._c or not K._c or out_deg > chart.dim or out_deg < 0:
        return ScalarForm.zero(chart, out_deg)
    n = chart.dim
    if h is None:
        one_forms = [{(i,): _ONE} for i in range(n)]
    else:
        if h.degree != 1:
            raise DegreeError("h must be a degree-1 endomorphism")
        one_forms = [h._c.get(i, {}) for i in range(n)]
    kcomp = [K._c.get(i, {}) for i in range(n)]
    acc: RawForm = {}
    unit: RawForm = {(): _ONE}
    for I, f in w._c.items():
        p = len(I)
        prefix = [unit]
        for a in range(p - 1):
            prefix.append(_rf_clean(_rf_wedge(prefix[-1], one_forms[I[a]])) if prefix[-1] else {})
        suffix = [unit]
        for a in range(p - 1, 0, -1):
            suffix.append(_rf_clean(_rf_wedge(one_forms[I[a]], suffix[-1])) if suffix[-1] else {})
        suffix.reverse()  # suffix[j] = wedge of factors after position j
        for j in range(p):
            kj = kcomp[I[j]]
            if not kj or not prefix[j] or not suffix[j]:
                continue
            sign = -1 if (j * k) % 2 else 1
            left = _rf_wedge(prefix[j], kj) if prefix[j] is not unit else kj
            if suffix[j] is not unit:
                left = _rf_wedge(_rf_clean(left), suffix[j])
            left = _rf_clean(left)
            for J, g in left.items():
                slot = acc.get(J)
                if slot is None:
                    slot = acc[J] = {}
                raw_addmul_into(slot, g, f, sign)
    return ScalarForm._raw(chart, out_deg, _rf_clean(acc))


def insert_vv(K: VectorForm, L: VectorForm, h: Optional[VectorForm] = None) -> VectorForm:
    """``i^h(K) L``: insertion acting on each output component of ``L``."""
    chart = _same_chart(K, L)
    deg = K.degree - 1 + L.degree
    comps = {j: insert(K, L.component(j), h)._c for j in L._c}
    return VectorForm._raw(chart, deg, comps)


def alg_bracket(K: VectorForm, L: VectorForm, h: Optional[VectorForm] = None) -> VectorForm:
    """``[K, L]^∧ = i(K)L - (-1)^{kl} i(L)K`` with ``k = deg K - 1``, ``l = deg L - 1``.

    With ``h`` given this is the hat bracket ``[K, L]^{∧,h}`` (no equivariance check).
    """
    _same_chart(K, L)
    if K.degree < 1 or L.degree < 1:
        raise DegreeError("the algebraic bracket takes forms of degree >= 1")
    k, l = K.degree - 1, L.degree - 1
    a = insert_vv(K, L, h)
    b = insert_vv(L, K, h)
    return a - b if (k * l) % 2 == 0 else a + b


# --------------------------------------------------------------------------
# Lie derivations and the Frölicher–Nijenhuis bracket


def lie_derivative(K: VectorForm, w: ScalarForm) -> ScalarForm:
    """``Θ(K) ω = i(K) dω - (-1)^{k-1} d i(K) ω`` for ``K`` of degree ``k``."""
    _same_chart(K, w)
    k = K.degree
    a = insert(K, ext_d(w))
    b = ext_d(insert(K, w))
    return a + b if (k - 1) % 2 else a - b


def fn_bracket(K: VectorForm, L: VectorForm) -> VectorForm:
    """Frölicher–Nijenhuis bracket.

    The component ``[K, L]^j`` is read off as ``[Θ(K), Θ(L)] x^j``, the graded
    commutator of the Lie derivations applied to the coordinate function ``x^j``.
    """
    chart = _same_chart(K, L)
    k, l = K.degree, L.degree
    deg = k + l
    if deg > chart.dim:
        return VectorForm.zero(chart, deg)
    sign = -1 if (k * l) % 2 else 1
    comps = {}
    for j in range(chart.dim):
        xj = ScalarForm.function(Poly.coord(chart, j))
        a = lie_derivative(K, lie_derivative(L, xj))
        b = lie_derivative(L, lie_derivative(K, xj))
        comps[j] = (a - b * sign)._c
    return VectorForm._raw(chart, deg, comps)


def fn_bracket_deg1_oracle(K: VectorForm, L: VectorForm) -> VectorForm:
    """Degree-(1,1) bracket evaluated literally on pairs of coordinate fields.

    ``[K,L](X,Y) = [KX,LY] - [KY,LX] - L([KX,Y] - [KY,X]) - K([LX,Y] - [LY,X])
    + (L∘K + K∘L)([X,Y])``.
    """
    chart = _same_chart(K, L)
    if K.degree != 1 or L.degree != 1:
        raise DegreeError("the explicit formula is for two degree-1 forms")
    n = chart.dim
    fields = [VectorForm.coord_field(chart, i) for i in range(n)]
    LK = postcompose(L, K)
    KL = postcompose(K, L)
    coeffs = {}
    for a in range(n):
        for b in range(a + 1, n):
            X, Y = fields[a], fields[b]
            KX, KY = apply_endo(K, X), apply_endo(K, Y)
            LX, LY = apply_endo(L, X), apply_endo(L, Y)
            val = (
                lie_bracket(KX, LY)
                - lie_bracket(KY, LX)
                - apply_endo(L, lie_bracket(KX, Y) - lie_bracket(KY, X))
                - apply_endo(K, lie_bracket(LX, Y) - lie_bracket(LY, X))
                + apply_endo(LK + KL, lie_bracket(X, Y))
            )
            for j, p in enumerate(val.field_components()):
                if p:
                    coeffs[((a, b), j)] = p
    return VectorForm(chart, 2, coeffs)


# --------------------------------------------------------------------------
# rendering


def _index_text(chart: Chart, I: Index) -> str:
    return "^".join(chart.coord_names[i] for i in I)


def render_form(f) -> str:
    """Canonical one-line text: ``(poly) x^y`` terms, ``(*) d/z`` before an output leg."""
    chart = f.chart
    parts = []
    if isinstance(f, ScalarForm):
        for I in sorted(f._c):
            idx = _index_text(chart, I)
            body = f"({render_poly(Poly._raw(chart, f._c[I]))})"
            parts.append(f"{body} {idx}" if idx else body)
    else:
        for (I, j), p in f.coeffs.items():
            idx = _index_text(chart, I)
            body = f"({render_poly(p)})"
            if idx:
                body += f" {idx}"
            parts.append(f"{body} (*) d/{chart.coord_names[j]}")
    return " + ".join(parts) if parts else "0"
