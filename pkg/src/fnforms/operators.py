"""Graded operators on Ω(U) as lazy expression trees.

Ω(U) is infinite dimensional, so two operators are compared by applying
both to a fixed separating family of test forms (coordinate functions,
coordinate one-forms and a few random forms of every degree).  For
derivations over ``h^*`` agreement on functions and one-forms already
forces equality.
"""

from __future__ import annotations

import random
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .connection import Connection, is_h_equivariant
from .errors import (
    DegreeError,
    DerivationCheckFailed,
    ExtractionInconsistent,
    NotEquivariant,
    NotInDerH,
)
from .forms import (
    ScalarForm,
    VectorForm,
    alg_bracket,
    ext_d,
    insert,
    precompose,
    pullback_by,
    wedge,
)
from .poly import Chart, Coeff, Poly, check_chart, rational
from .sampling import derive_seed, random_form


class Operator:
    """A graded linear operator ``Ω^p(U) → Ω^{p+degree}(U)``."""

    chart: Chart
    degree: int

    def __call__(self, w: ScalarForm) -> ScalarForm:
        check_chart(self.chart, w.chart)
        out = self._apply(w)
        if out.is_zero() and out.degree != w.degree + self.degree:
            return ScalarForm.zero(self.chart, w.degree + self.degree)
        return out

    def _apply(self, w: ScalarForm) -> ScalarForm:
        raise NotImplementedError

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "Operator") -> "Operator":
        return Sum([(1, self), (1, other)])

    def __sub__(self, other: "Operator") -> "Operator":
        return Sum([(1, self), (-1, other)])

    def __neg__(self) -> "Operator":
        return Sum([(-1, self)])

    def __rmul__(self, c) -> "Operator":
        return Sum([(rational(c), self)])

    def __matmul__(self, other: "Operator") -> "Operator":
        return Compose(self, other)


class ExteriorD(Operator):
    def __init__(self, chart: Chart):
        self.chart = chart
        self.degree = 1

    def _apply(self, w):
        return ext_d(w)

    def __repr__(self):
        return "d"


class HStar(Operator):
    def __init__(self, conn: Connection):
        self.chart = conn.chart
        self.degree = 0
        self.conn = conn

    def _apply(self, w):
        return pullback_by(w, self.conn.h)

    def __repr__(self):
        return "h*"


class Insert(Operator):
    """``i(K)`` or, with a connection, ``i^h(K)``."""

    def __init__(self, K: VectorForm, conn: Optional[Connection] = None):
        if conn is not None:
            check_chart(conn.chart, K.chart)
        self.chart = K.chart
        self.degree = K.degree - 1
        self.K = K
        self.conn = conn

    def _apply(self, w):
        return insert(self.K, w, None if self.conn is None else self.conn.h)

    def __repr__(self):
        return "i(K)" if self.conn is None else "i^h(K)"


class WedgeBy(Operator):
    """``ψ ↦ ω ∧ ψ``."""

    def __init__(self, w: ScalarForm):
        self.chart = w.chart
        self.degree = w.degree
        self.form = w

    def _apply(self, psi):
        return wedge(self.form, psi)

    def __repr__(self):
        return f"({self.form})∧"


class Compose(Operator):
    """``outer ∘ inner``."""

    def __init__(self, outer: Operator, inner: Operator):
        check_chart(outer.chart, inner.chart)
        self.chart = outer.chart
        self.degree = outer.degree + inner.degree
        self.outer = outer
        self.inner = inner

    def _apply(self, w):
        return self.outer(self.inner(w))

    def __repr__(self):
        return f"{self.outer!r}∘{self.inner!r}"


class Sum(Operator):
    """Rational linear combination of operators of one degree."""

    def __init__(self, terms: Sequence[Tuple[Coeff, Operator]], degree: Optional[int] = None, chart: Optional[Chart] = None):
        terms = [(rational(c), op) for c, op in terms if rational(c)]
        if not terms and (degree is None or chart is None):
            raise ValueError("an empty Sum needs an explicit degree and chart")
        self.chart = chart if chart is not None else terms[0][1].chart
        self.degree = degree if degree is not None else terms[0][1].degree
        for _, op in terms:
            check_chart(self.chart, op.chart)
            if op.degree != self.degree:
                raise DegreeError(f"summands of degree {op.degree} and {self.degree}")
        self.terms = terms

    def _apply(self, w):
        out = ScalarForm.zero(self.chart, w.degree + self.degree)
        for c, op in self.terms:
            v = op(w)
            out = out + (v if c == 1 else v * c)
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}·({op!r})" if c != 1 else f"({op!r})" for c, op in self.terms)


def zero_operator(chart: Chart, degree: int) -> Operator:
    return Sum([], degree=degree, chart=chart)


# --------------------------------------------------------------------------
# constructors


def apply(D: Operator, w: ScalarForm) -> ScalarForm:
    return D(w)


def d_op(chart: Chart) -> Operator:
    return ExteriorD(chart)


def h_star_op(conn: Connection) -> Operator:
    return HStar(conn)


def insert_op(K: VectorForm) -> Operator:
    """Plain insertion ``i(K)``; degree-0 ``K`` gives contraction with a vector field."""
    return Insert(K)


def insert_h(K: VectorForm, conn: Connection) -> Operator:
    """``i^h(K)``, the algebraic derivation over ``h^*`` determined by ``K``."""
    if K.degree < 1:
        raise DegreeError("i^h(K) needs K of degree >= 1; use insert_op for vector fields")
    return Insert(K, conn)


def graded_commutator(A: Operator, B: Operator) -> Operator:
    """``[A, B] = A∘B - (-1)^{ab} B∘A``."""
    check_chart(A.chart, B.chart)
    sign = -1 if (A.degree * B.degree) % 2 else 1
    return Sum([(1, Compose(A, B)), (-sign, Compose(B, A))])


def theta(K: VectorForm) -> Operator:
    """Lie derivation ``Θ(K) = [i(K), d]``."""
    return graded_commutator(Insert(K), ExteriorD(K.chart))


def theta_h(K: VectorForm, conn: Connection) -> Operator:
    """``Θ^h(K) = h^*∘Θ(K)∘h^*``."""
    check_chart(conn.chart, K.chart)
    hs = HStar(conn)
    return Compose(hs, Compose(theta(K), hs))


def cov_D(conn: Connection) -> Operator:
    """Classical covariant derivative ``D^h = h^*∘d``."""
    return Compose(HStar(conn), ExteriorD(conn.chart))


def cov_d(conn: Connection) -> Operator:
    """Covariant derivative ``d^h = h^*∘d∘h^*``."""
    return Compose(cov_D(conn), HStar(conn))


def module_action(w: ScalarForm, D: Operator) -> Operator:
    """``(ω∧D)ψ = ω ∧ Dψ``."""
    check_chart(w.chart, D.chart)
    return Compose(WedgeBy(w), D)


# --------------------------------------------------------------------------
# equality protocol


@lru_cache(maxsize=64)
def test_family(chart: Chart, seed: int = 0, per_degree: int = 3) -> Tuple[ScalarForm, ...]:
    """Coordinate functions, coordinate one-forms, and random forms of each degree."""
    n = chart.dim
    fam: List[ScalarForm] = [ScalarForm.function(Poly.coord(chart, i)) for i in range(n)]
    fam += [ScalarForm.dx(chart, i) for i in range(n)]
    rng = random.Random(derive_seed("family", seed, *chart.coord_names))
    for p in range(n + 1):
        for _ in range(per_degree):
            fam.append(random_form(rng, chart, p, max_degree=2))
    return tuple(fam)


test_family.__test__ = False  # not a pytest test despite the name


def operator_residual(A: Operator, B: Operator, family: Optional[Sequence[ScalarForm]] = None):
    """First ``(degree, A(ω) - B(ω))`` with a nonzero difference, or None."""
    check_chart(A.chart, B.chart)
    if family is None:
        family = test_family(A.chart)
    for w in family:
        diff = A(w) - B(w)
        if not diff.is_zero():
            return w.degree, diff
    return None


def operators_equal(A: Operator, B: Operator, family: Optional[Sequence[ScalarForm]] = None) -> bool:
    return operator_residual(A, B, family) is None


def derivation_residual(D: Operator, conn: Connection, pairs: Sequence[Tuple[ScalarForm, ScalarForm]]):
    """Check ``D(a∧b) = Da∧h*b + (-1)^{k|a|} h*a∧Db`` on sample pairs."""
    hs = HStar(conn)
    k = D.degree
    for a, b in pairs:
        lhs = D(wedge(a, b))
        sign = -1 if (k * a.degree) % 2 else 1
        rhs = wedge(D(a), hs(b)) + wedge(hs(a), D(b)) * sign
        diff = lhs - rhs
        if not diff.is_zero():
            return a.degree + b.degree, diff
    return None


def _sample_pairs(chart: Chart, family: Sequence[ScalarForm]):
    small = [w for w in family if w.degree <= 1]
    rest = [w for w in family if 1 <= w.degree < chart.dim]
    pairs = []
    for i, a in enumerate(small[: 2 * chart.dim]):
        b = family[(3 * i + 1) % len(family)]
        pairs.append((a, b))
    for a in rest[:3]:
        pairs.append((a, small[-1]))
    return pairs


# --------------------------------------------------------------------------
# decomposition of derivations over h^*


def _extract_K(D: Operator, conn: Connection) -> VectorForm:
    # D f = df ∘ K on functions: K^j = D(x^j)
    chart = conn.chart
    comps = {j: D(ScalarForm.function(Poly.coord(chart, j))) for j in range(chart.dim)}
    return VectorForm.from_components(chart, D.degree, comps)


def _extract_L(rem: Operator, chart: Chart) -> VectorForm:
    # algebraic remainder: i^h(L) dx^j = dx^j ∘ L = L^j
    comps = {j: rem(ScalarForm.dx(chart, j)) for j in range(chart.dim)}
    return VectorForm.from_components(chart, rem.degree + 1, comps)


def _algebraic_insert(L: VectorForm, conn: Connection) -> Operator:
    if L.degree < 1:
        return zero_operator(conn.chart, L.degree - 1)
    return Insert(L, conn)


def decompose(D: Operator, conn: Connection, family: Optional[Sequence[ScalarForm]] = None):
    """Split a derivation over ``h^*`` as ``Θ(K)∘h^* + i^h(L)``; returns ``(K, L)``."""
    chart = conn.chart
    check_chart(chart, D.chart)
    if family is None:
        family = test_family(chart)
    bad = derivation_residual(D, conn, _sample_pairs(chart, family))
    if bad is not None:
        raise DerivationCheckFailed(f"Leibniz rule over h* fails in degree {bad[0]}")
    K = _extract_K(D, conn)
    rem = D - Compose(theta(K), HStar(conn))
    for w in family:
        if w.degree == 0 and not rem(w).is_zero():
            raise ExtractionInconsistent("remainder does not vanish on functions")
    L = _extract_L(rem, chart)
    rebuilt = Compose(theta(K), HStar(conn)) + _algebraic_insert(L, conn)
    bad = operator_residual(D, rebuilt, family)
    if bad is not None:
        raise ExtractionInconsistent(f"reconstruction differs in degree {bad[0]}")
    return K, L


def decompose_h(D: Operator, conn: Connection, family: Optional[Sequence[ScalarForm]] = None):
    """Split ``D ∈ Der^h`` as ``Θ^h(K) + i^h(L̃)`` with horizontal ``K`` and h-equivariant ``L̃``."""
    chart = conn.chart
    check_chart(chart, D.chart)
    if family is None:
        family = test_family(chart)
    hs = HStar(conn)
    if operator_residual(Compose(D, hs), Compose(hs, D), family) is not None:
        raise NotInDerH("[D, h*] does not vanish")
    bad = derivation_residual(D, conn, _sample_pairs(chart, family))
    if bad is not None:
        raise DerivationCheckFailed(f"Leibniz rule over h* fails in degree {bad[0]}")
    K = _extract_K(D, conn)
    if precompose(K, conn.h) != K:
        raise ExtractionInconsistent("extracted K is not horizontal")
    rem = D - theta_h(K, conn)
    Lt = _extract_L(rem, chart)
    if Lt.degree >= 1 and not is_h_equivariant(conn, Lt):
        raise ExtractionInconsistent("extracted L is not h-equivariant")
    rebuilt = theta_h(K, conn) + _algebraic_insert(Lt, conn)
    bad = operator_residual(D, rebuilt, family)
    if bad is not None:
        raise ExtractionInconsistent(f"reconstruction differs in degree {bad[0]}")
    return K, Lt


def hat_bracket(K: VectorForm, L: VectorForm, conn: Connection) -> VectorForm:
    """``[K, L]^{∧,h} = i^h(K)L - (-1)^{kl} i^h(L)K`` for h-equivariant ``K``, ``L``."""
    for X in (K, L):
        if X.degree < 1:
            raise DegreeError("the hat bracket takes forms of degree >= 1")
        if not is_h_equivariant(conn, X):
            raise NotEquivariant("hat bracket arguments must be h-equivariant")
    return alg_bracket(K, L, conn.h)
