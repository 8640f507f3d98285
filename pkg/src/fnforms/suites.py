"""Randomized exact verification of the operator identities.

Each suite is a list of items; an item draws random data inside its
hypothesis class (by projection, never by rejection) and records every
nonzero residual.  A trial is one random connection (or product bundle) per
requested chart dimension; it passes when no item reports a residual.
"""

from __future__ import annotations

import random
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import bundle as bl
from .connection import (
    Connection,
    cocurvature,
    curvature,
    horizontality,
    is_h_equivariant,
    random_connection,
    shear_connection,
)
from .errors import UnknownSuite
from .forms import (
    ScalarForm,
    VectorForm,
    alg_bracket,
    ext_d,
    fn_bracket,
    fn_bracket_deg1_oracle,
    insert,
    insert_vv,
    lie_bracket,
    postcompose,
    precompose,
    pullback_by,
    render_form,
    wedge,
    wedge_vv,
)
from .operators import (
    Compose,
    HStar,
    Insert,
    Operator,
    Sum,
    cov_D,
    cov_d,
    d_op,
    decompose,
    decompose_h,
    derivation_residual,
    graded_commutator,
    hat_bracket,
    module_action,
    operator_residual,
    test_family,
    theta,
    theta_h,
    zero_operator,
)
from .poly import Chart
from .sampling import derive_seed, random_form, random_poly, random_vector_form

_COORDS = ("x", "y", "z", "w", "u", "v")


def chart_for(dim: int) -> Chart:
    if not 1 <= dim <= len(_COORDS):
        raise ValueError(f"chart dimension must be in 1..{len(_COORDS)}")
    return Chart(_COORDS[:dim])


def bundle_shape(dim: int) -> Tuple[int, int]:
    """(base, fiber) dimensions used for a total dimension: (1,1), (2,1), (2,2), ..."""
    return (dim + 1) // 2, dim // 2


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True, order=True)
class Failure:
    seed: int
    item: str
    degree: int
    residual: str


@dataclass
class GroupSummary:
    dim: int
    trials: int
    checks: int
    failures: int
    skipped: Tuple[str, ...] = ()


@dataclass
class SuiteReport:
    suite_id: str
    trials: int
    failures: List[Failure]
    passed: int = 0
    seed: int = 0
    dims: Tuple[int, ...] = ()
    groups: List[GroupSummary] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def render_report(r: SuiteReport) -> str:
    lines = [f"suite={r.suite_id} seed={r.seed} dims={','.join(map(str, r.dims))} trials={r.trials}"]
    for g in r.groups:
        skipped = ",".join(g.skipped) if g.skipped else "-"
        lines.append(f"group dim={g.dim} trials={g.trials} checks={g.checks} failures={g.failures} skipped={skipped}")
    for f in sorted(r.failures):
        lines.append(f"FAIL seed={f.seed} item={f.item} deg={f.degree} residual={f.residual}")
    lines.append(f"{'PASS' if r.ok else 'FAIL'} {r.passed}/{r.trials}")
    return "\n".join(lines) + "\n"


_HEAD = re.compile(r"^suite=(\S+) seed=(-?\d+) dims=([\d,]*) trials=(\d+)$")
_GROUP = re.compile(r"^group dim=(\d+) trials=(\d+) checks=(\d+) failures=(\d+) skipped=(\S+)$")
_FAIL = re.compile(r"^FAIL seed=(-?\d+) item=(\S+) deg=(-?\d+) residual=(.*)$")
_TAIL = re.compile(r"^(PASS|FAIL) (\d+)/(\d+)$")


def parse_report(text: str) -> SuiteReport:
    lines = text.rstrip("\n").split("\n")
    m = _HEAD.match(lines[0])
    if not m:
        raise ValueError("malformed report header")
    dims = tuple(int(d) for d in m.group(3).split(",") if d)
    report = SuiteReport(m.group(1), int(m.group(4)), [], 0, int(m.group(2)), dims, [])
    for line in lines[1:-1]:
        g = _GROUP.match(line)
        if g:
            skipped = () if g.group(5) == "-" else tuple(g.group(5).split(","))
            report.groups.append(GroupSummary(*(int(g.group(i)) for i in range(1, 5)), skipped))
            continue
        f = _FAIL.match(line)
        if not f:
            raise ValueError(f"malformed report line: {line!r}")
        report.failures.append(Failure(int(f.group(1)), f.group(2), int(f.group(3)), f.group(4)))
    t = _TAIL.match(lines[-1])
    if not t:
        raise ValueError("malformed report tail")
    report.passed = int(t.group(2))
    return report


# --------------------------------------------------------------------------
# trial context


class Trial:
    """Random data and residual bookkeeping for one (suite, dim, trial) cell."""

    def __init__(self, suite: str, dim: int, seed: int):
        self.suite = suite
        self.dim = dim
        self.seed = seed
        self.checks = 0
        self.failures: List[Failure] = []
        self._item = "?"
        self._conn: Optional[Connection] = None
        self._bundle = None
        self.chart = chart_for(dim)

    def rng(self, tag: str = "") -> random.Random:
        return random.Random(derive_seed(self.seed, self._item, tag))

    # lazily built shared data

    @property
    def conn(self) -> Connection:
        if self._conn is None:
            rng = random.Random(derive_seed(self.seed, "connection"))
            n = self.dim
            rank = rng.randint(1, n - 1) if n >= 2 else rng.randint(0, n)
            self._conn = random_connection(self.chart, rank, derive_seed(self.seed, "phi"), coeff_degree=2)
        return self._conn

    @property
    def R(self) -> VectorForm:
        if not hasattr(self, "_R"):
            self._R = curvature(self.conn)
        return self._R

    @property
    def Rbar(self) -> VectorForm:
        if not hasattr(self, "_Rbar"):
            self._Rbar = cocurvature(self.conn)
        return self._Rbar

    @property
    def family(self):
        return test_family(self.chart, self.seed % 1000)

    @property
    def bundle(self):
        if self._bundle is None:
            m, s = bundle_shape(self.dim)
            rng = random.Random(derive_seed(self.seed, "bundle"))
            total = self.chart
            gamma = [[random_poly(rng, total, 2, max_terms=2) for _ in range(m)] for _ in range(s)]
            self._bundle = bl.make_bundle(total.coord_names[:m], total.coord_names[m:], gamma)
        return self._bundle

    # random data in hypothesis classes

    def vform(self, rng, degree: int) -> VectorForm:
        return random_vector_form(rng, self.chart, degree, max_degree=2)

    def horizontal(self, K: VectorForm) -> VectorForm:
        return precompose(K, self.conn.h)

    def equivariant(self, rng, degree: int) -> VectorForm:
        """``h∘A∘Λh + φ∘(B - B∘Λh)``: the general shape of an h-equivariant form."""
        c = self.conn
        A = self.vform(rng, degree)
        B = self.vform(rng, degree)
        L = postcompose(c.h, precompose(A, c.h)) + postcompose(c.phi, B - precompose(B, c.h))
        if not is_h_equivariant(c, L):
            raise AssertionError("generator produced a non-equivariant form")
        return L

    def hform(self, rng, degree: int) -> ScalarForm:
        return pullback_by(random_form(rng, self.chart, degree), self.conn.h)

    def derivation(self, rng, degree: int) -> Operator:
        """Random derivation over h^*: ``Θ(K)∘h^* + i^h(L)``."""
        K = self.vform(rng, degree)
        parts = [(1, Compose(theta(K), HStar(self.conn)))]
        if degree + 1 <= self.dim:
            parts.append((1, Insert(self.vform(rng, degree + 1), self.conn)))
        return Sum(parts)

    def der_h(self, rng, degree: int) -> Operator:
        """Random element of Der^h: ``Θ^h(K_hor) + i^h(L_equiv)``."""
        K = self.horizontal(self.vform(rng, degree))
        op = theta_h(K, self.conn)
        if degree + 1 <= self.dim:
            op = op + Insert(self.equivariant(rng, degree + 1), self.conn)
        return op

    # checks

    def _fail(self, degree: int, residual: str):
        self.failures.append(Failure(self.seed, self._item, degree, residual))

    def eq(self, lhs, rhs):
        """Exact equality of two forms (scalar or vector valued)."""
        self.checks += 1
        diff = lhs - rhs
        if not diff.is_zero():
            self._fail(diff.degree, render_form(diff))

    def zero(self, x):
        self.checks += 1
        if not x.is_zero():
            self._fail(x.degree, render_form(x))

    def ops(self, A: Operator, B: Operator, family=None):
        """Operator equality on the separating test family."""
        self.checks += 1
        res = operator_residual(A, B, self.family if family is None else family)
        if res is not None:
            self._fail(res[0], render_form(res[1]))

    def truth(self, cond: bool, degree: int, what: str):
        self.checks += 1
        if not cond:
            self._fail(degree, what)


@dataclass(frozen=True)
class Item:
    ident: str
    fn: Callable[[Trial], None]
    min_dim: int = 1
    doc: str = ""


SUITES: Dict[str, List[Item]] = {}


def _item(suite: str, ident: str, min_dim: int = 1):
    def deco(fn):
        SUITES.setdefault(suite, []).append(Item(ident, fn, min_dim, (fn.__doc__ or "").strip()))
        return fn

    return deco


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


def _ih(L: VectorForm, conn: Connection) -> Operator:
    """i^h(L), allowing the degree-0 case to vanish as an operator of degree -1."""
    if L.degree < 1:
        return zero_operator(conn.chart, L.degree - 1)
    return Insert(L, conn)


# --------------------------------------------------------------------------
# bianchi


@_item("bianchi", "1.4.1", min_dim=3)
def _bianchi_1(t: Trial):
    """[R + R̄, φ] = 0"""
    t.zero(fn_bracket(t.R + t.Rbar, t.conn.phi))


@_item("bianchi", "1.4.2", min_dim=3)
def _bianchi_2(t: Trial):
    """[R, φ] = i(R)R̄ + i(R̄)R"""
    t.eq(fn_bracket(t.R, t.conn.phi), insert_vv(t.R, t.Rbar) + insert_vv(t.Rbar, t.R))


@_item("bianchi", "1.4.kill", min_dim=2)
def _bianchi_kill(t: Trial):
    """i(R)R = 0 and i(R̄)R̄ = 0"""
    t.zero(insert_vv(t.R, t.R))
    t.zero(insert_vv(t.Rbar, t.Rbar))


# --------------------------------------------------------------------------
# Frölicher–Nijenhuis axioms


def _degrees(rng, n: int, count: int, total_max: int):
    while True:
        ds = [rng.randint(0, total_max) for _ in range(count)]
        if sum(ds) <= total_max:
            return ds


@_item("fn-axioms", "antisymmetry")
def _fn_antisym(t: Trial):
    """[K, L] = -(-1)^{kl} [L, K]"""
    rng = t.rng()
    k, l = _degrees(rng, t.dim, 2, t.dim)
    K, L = t.vform(rng, k), t.vform(rng, l)
    t.eq(fn_bracket(K, L), fn_bracket(L, K) * (-_sgn(k * l)))


@_item("fn-axioms", "jacobi")
def _fn_jacobi(t: Trial):
    """[K, [L, M]] = [[K, L], M] + (-1)^{kl} [L, [K, M]]"""
    rng = t.rng()
    k, l, m = _degrees(rng, t.dim, 3, t.dim)
    K, L, M = t.vform(rng, k), t.vform(rng, l), t.vform(rng, m)
    lhs = fn_bracket(K, fn_bracket(L, M))
    rhs = fn_bracket(fn_bracket(K, L), M) + fn_bracket(L, fn_bracket(K, M)) * _sgn(k * l)
    t.eq(lhs, rhs)


@_item("fn-axioms", "deg1-formula", min_dim=2)
def _fn_oracle(t: Trial):
    """fn_bracket agrees with the explicit degree-(1,1) formula (two pairs per trial)"""
    rng = t.rng()
    for _ in range(2):
        K, L = t.vform(rng, 1), t.vform(rng, 1)
        t.eq(fn_bracket(K, L), fn_bracket_deg1_oracle(K, L))


@_item("fn-axioms", "lie")
def _fn_lie(t: Trial):
    """degree 0: the bracket is the Lie bracket of vector fields"""
    rng = t.rng()
    X, Y = t.vform(rng, 0), t.vform(rng, 0)
    t.eq(fn_bracket(X, Y), lie_bracket(X, Y))


@_item("fn-axioms", "center")
def _fn_center(t: Trial):
    """[Id, L] = 0"""
    rng = t.rng()
    L = t.vform(rng, rng.randint(0, t.dim - 1))
    t.zero(fn_bracket(VectorForm.identity(t.chart), L))


@_item("fn-axioms", "theta-hom")
def _fn_theta(t: Trial):
    """Θ([K, L]) = [Θ(K), Θ(L)]"""
    rng = t.rng()
    k, l = _degrees(rng, t.dim, 2, t.dim)
    K, L = t.vform(rng, k), t.vform(rng, l)
    t.ops(theta(fn_bracket(K, L)), graded_commutator(theta(K), theta(L)))


@_item("fn-axioms", "1.3", min_dim=2)
def _fn_torsion(t: Trial):
    """[φ, φ] = [h, h] = -[φ, h] = 2(R + R̄)"""
    phi, h = t.conn.phi, t.conn.h
    target = (t.R + t.Rbar) * 2
    t.eq(fn_bracket(phi, phi), target)
    t.eq(fn_bracket(h, h), target)
    t.eq(-fn_bracket(phi, h), target)
    t.eq(fn_bracket_deg1_oracle(phi, phi), target)


# --------------------------------------------------------------------------
# connection invariants (shared by several suites)


@_item("fn-axioms", "projection")
def _projection(t: Trial):
    """φ² = φ, h² = h, φh = hφ = 0, φ + h = Id; R, R̄ have the expected types"""
    c = t.conn
    t.eq(postcompose(c.phi, c.phi), c.phi)
    t.eq(postcompose(c.h, c.h), c.h)
    t.zero(postcompose(c.phi, c.h))
    t.zero(postcompose(c.h, c.phi))
    t.eq(c.phi + c.h, VectorForm.identity(t.chart))
    t.truth(horizontality(c, t.R, "horizontal_args") and horizontality(c, t.R, "vertical_values"), 2, "R type")
    t.truth(horizontality(c, t.Rbar, "vertical_args") and horizontality(c, t.Rbar, "horizontal_values"), 2, "Rbar type")


# --------------------------------------------------------------------------
# insertion over h^* and commutators of Der^h


@_item("lemma23", "2.1")
def _l21(t: Trial):
    """commutator of Der^h elements is again a derivation over h^* commuting with h^*"""
    rng = t.rng()
    k1, k2 = rng.randint(0, 1), rng.randint(0, 1)
    C = graded_commutator(t.der_h(rng, k1), t.der_h(rng, k2))
    hs = HStar(t.conn)
    fam = t.family
    pairs = [(fam[i], fam[-1 - i]) for i in range(0, len(fam) // 2, 3)]
    t.truth(derivation_residual(C, t.conn, pairs) is None, C.degree, "commutator is not a derivation over h*")
    t.ops(Compose(C, hs), Compose(hs, C))


@_item("lemma23", "2.3.1")
def _l231(t: Trial):
    """i^h(K) is a derivation over h^*"""
    rng = t.rng()
    K = t.vform(rng, rng.randint(1, t.dim))
    D = Insert(K, t.conn)
    pairs = []
    for _ in range(3):
        p = rng.randint(0, t.dim)
        q = rng.randint(0, t.dim - p)
        pairs.append((random_form(rng, t.chart, p), random_form(rng, t.chart, q)))
    res = derivation_residual(D, t.conn, pairs)
    t.checks += 1
    if res is not None:
        t._fail(res[0], render_form(res[1]))


@_item("lemma23", "2.3.2")
def _l232(t: Trial):
    """[i^h(K), h^*] = 0 iff h∘K = K∘Λh"""
    rng = t.rng()
    hs = HStar(t.conn)
    cases = [t.conn.h, t.equivariant(rng, rng.randint(1, t.dim)), t.vform(rng, rng.randint(1, t.dim))]
    if t.dim >= 2:
        cases.append(t.R)
    for K in cases:
        D = Insert(K, t.conn)
        commutes = operator_residual(Compose(D, hs), Compose(hs, D), t.family) is None
        t.truth(commutes == is_h_equivariant(t.conn, K), K.degree, "commutation and equivariance disagree")
    t.truth(is_h_equivariant(t.conn, t.conn.h), 1, "h is not equivariant")
    if not t.R.is_zero():
        t.truth(not is_h_equivariant(t.conn, t.R), 2, "nonzero R reported equivariant")


@_item("lemma23", "2.3.3")
def _l233(t: Trial):
    """i^h([K, L]^{∧,h}) = [i^h(K), i^h(L)]; the bracket is h-equivariant"""
    rng = t.rng()
    a = rng.randint(1, t.dim)
    b = rng.randint(1, max(1, t.dim - a + 1))
    K, L = t.equivariant(rng, a), t.equivariant(rng, b)
    B = hat_bracket(K, L, t.conn)
    if B.degree >= 1:
        t.truth(is_h_equivariant(t.conn, B), B.degree, "hat bracket not equivariant")
    t.ops(_ih(B, t.conn), graded_commutator(Insert(K, t.conn), Insert(L, t.conn)))


@_item("lemma23", "2.3.4")
def _l234(t: Trial):
    """the four relations between i(K), i^h(K) and h^*"""
    rng = t.rng()
    c = t.conn
    K = t.vform(rng, rng.randint(1, t.dim))
    hs, iK, ihK = HStar(c), Insert(K), Insert(K, c)
    KLh = precompose(K, c.h)
    hK = postcompose(c.h, K)
    # h*∘i(K) = i^h(K∘Λh) = h*∘i^h(K)
    t.ops(Compose(hs, iK), Insert(KLh, c))
    t.ops(Compose(hs, iK), Compose(hs, ihK))
    # i(K)∘h* = i^h(h∘K) = i^h(K)∘h*
    t.ops(Compose(iK, hs), Insert(hK, c))
    t.ops(Compose(iK, hs), Compose(ihK, hs))
    # [i(K), h*] = [i^h(K), h*] = i^h(h∘K - K∘Λh)
    t.ops(graded_commutator(iK, hs), graded_commutator(ihK, hs))
    t.ops(graded_commutator(iK, hs), _ih(hK - KLh, c))
    # h*∘i(K)∘h* = h*∘i^h(K)∘h* = i^h(h∘K∘Λh)
    t.ops(Compose(hs, Compose(iK, hs)), Compose(hs, Compose(ihK, hs)))
    t.ops(Compose(hs, Compose(iK, hs)), Insert(postcompose(c.h, KLh), c))


@_item("lemma23", "hstar")
def _hstar(t: Trial):
    """h^* is an idempotent algebra homomorphism"""
    rng = t.rng()
    c = t.conn
    p = rng.randint(0, t.dim)
    a, b = random_form(rng, t.chart, p), random_form(rng, t.chart, rng.randint(0, t.dim - p))
    hs = HStar(c)
    t.eq(hs(wedge(a, b)), wedge(hs(a), hs(b)))
    t.eq(hs(hs(a)), hs(a))


# --------------------------------------------------------------------------
# decomposition of derivations over h^*


@_item("prop24", "2.4.1")
def _p241(t: Trial):
    """decompose(Θ(K)∘h^* + i^h(L)) returns (K, L), and re-decomposition is stable"""
    rng = t.rng()
    c = t.conn
    k = rng.randint(0, min(2, t.dim - 1))
    K, L = t.vform(rng, k), t.vform(rng, k + 1)
    D = Compose(theta(K), HStar(c)) + Insert(L, c)
    K2, L2 = decompose(D, c, t.family)
    t.eq(K2, K)
    t.eq(L2, L)
    K3, L3 = decompose(Compose(theta(K2), HStar(c)) + Insert(L2, c), c, t.family)
    t.eq(K3, K2)
    t.eq(L3, L2)


@_item("prop24", "2.4.1-algebraic")
def _p241a(t: Trial):
    """D is algebraic iff K = 0"""
    rng = t.rng()
    L = t.vform(rng, rng.randint(1, t.dim))
    K2, L2 = decompose(Insert(L, t.conn), t.conn, t.family)
    t.zero(K2)
    t.eq(L2, L)


@_item("prop24", "2.4.2")
def _p242(t: Trial):
    """decompose_h(Θ^h(K∘Λh) + i^h(L̃)) returns (K∘Λh, L̃)"""
    rng = t.rng()
    c = t.conn
    k = rng.randint(0, min(2, t.dim - 1))
    K = t.horizontal(t.vform(rng, k))
    Lt = t.equivariant(rng, k + 1)
    K2, L2 = decompose_h(theta_h(K, c) + Insert(Lt, c), c, t.family)
    t.eq(K2, K)
    t.eq(L2, Lt)
    # same K as in the unrestricted decomposition
    K3, _ = decompose(theta_h(K, c) + Insert(Lt, c), c, t.family)
    t.eq(K3, K)


@_item("prop24", "2.5.2-decompose", min_dim=2)
def _p24_dh(t: Trial):
    """decompose([d, h^*]) = (φ, R + R̄)"""
    c = t.conn
    K, L = decompose(graded_commutator(d_op(t.chart), HStar(c)), c, t.family)
    t.eq(K, c.phi)
    t.eq(L, t.R + t.Rbar)


@_item("prop24", "dh-decompose_h")
def _p24_dh2(t: Trial):
    """decompose_h(d^h) = (h, 0)"""
    c = t.conn
    K, L = decompose_h(cov_d(c), c, t.family)
    t.eq(K, c.h)
    t.zero(L)


# --------------------------------------------------------------------------
# covariant derivatives


@_item("prop25", "2.5.1")
def _p251(t: Trial):
    """d^h - D^h = i^h(R)"""
    c = t.conn
    t.ops(cov_d(c) - cov_D(c), _ih(t.R, c))


@_item("prop25", "2.5.2")
def _p252(t: Trial):
    """[d, h^*] = Θ(φ)∘h^* + i^h(R + R̄)"""
    c = t.conn
    t.ops(graded_commutator(d_op(t.chart), HStar(c)), Compose(theta(c.phi), HStar(c)) + _ih(t.R + t.Rbar, c))


@_item("prop25", "2.5.3")
def _p253(t: Trial):
    """d∘h^* - d^h = Θ(φ)∘h^* + i^h(R̄)"""
    c = t.conn
    t.ops(Compose(d_op(t.chart), HStar(c)) - cov_d(c), Compose(theta(c.phi), HStar(c)) + _ih(t.Rbar, c))


@_item("prop25", "2.5.4")
def _p254(t: Trial):
    """D^h∘D^h = i^h(R)∘d"""
    c = t.conn
    t.ops(Compose(cov_D(c), cov_D(c)), Compose(_ih(t.R, c), d_op(t.chart)))


@_item("prop25", "2.5.5")
def _p255(t: Trial):
    """[d^h, d^h] = 2 d^h∘d^h = 2 i^h(R)∘d∘h^* = 2 h^*∘i(R)∘d∘h^*"""
    c = t.conn
    dh = cov_d(c)
    hs, d = HStar(c), d_op(t.chart)
    lhs = graded_commutator(dh, dh)
    t.ops(lhs, 2 * Compose(dh, dh))
    t.ops(lhs, 2 * Compose(_ih(t.R, c), Compose(d, hs)))
    t.ops(lhs, 2 * Compose(hs, Compose(Insert(t.R), Compose(d, hs))))


@_item("prop25", "2.5.6")
def _p256(t: Trial):
    """D^h = d^h on horizontal forms"""
    rng = t.rng()
    c = t.conn
    fam = [pullback_by(w, c.h) for w in t.family] + [t.hform(rng, p) for p in range(t.dim + 1)]
    t.ops(cov_D(c), cov_d(c), family=fam)


# --------------------------------------------------------------------------
# Lie derivations and their horizontal projections


@_item("thm26", "2.6.1")
def _t261(t: Trial):
    """K h-equivariant: Θ^h(K) = [i^h(K), d^h]"""
    rng = t.rng()
    c = t.conn
    K = t.equivariant(rng, rng.randint(1, t.dim))
    t.ops(theta_h(K, c), graded_commutator(Insert(K, c), cov_d(c)))


@_item("thm26", "2.6.2")
def _t262(t: Trial):
    """h^*∘Θ(K) = h^*∘Θ(K∘Λh) + (-1)^{k-1} i^h(i^h(R)K)"""
    rng = t.rng()
    c = t.conn
    k = rng.randint(0, t.dim)
    K = t.vform(rng, k)
    hs = HStar(c)
    rhs = Compose(hs, theta(precompose(K, c.h))) + _sgn(k - 1) * _ih(insert_vv(t.R, K, c.h), c)
    t.ops(Compose(hs, theta(K)), rhs)


@_item("thm26", "2.6.3")
def _t263(t: Trial):
    """Θ^h(K) = Θ^h(h^*K) + (-1)^{k-1} i^h(i^h(R)(h∘K))"""
    rng = t.rng()
    c = t.conn
    k = rng.randint(0, t.dim)
    K = t.vform(rng, k)
    rhs = theta_h(precompose(K, c.h), c) + _sgn(k - 1) * _ih(insert_vv(t.R, postcompose(c.h, K), c.h), c)
    t.ops(theta_h(K, c), rhs)


@_item("thm26", "2.6.4")
def _t264(t: Trial):
    """K h-equivariant: Θ^h(K) = Θ^h(h^*K) = Θ^h(h∘K)"""
    rng = t.rng()
    c = t.conn
    K = t.equivariant(rng, rng.randint(1, t.dim))
    t.ops(theta_h(K, c), theta_h(precompose(K, c.h), c))
    t.ops(theta_h(K, c), theta_h(postcompose(c.h, K), c))


def _horizontal_K(t: Trial, rng, k=None):
    k = rng.randint(0, t.dim - 1) if k is None else k
    return k, t.horizontal(t.vform(rng, k))


@_item("thm26", "2.6.5")
def _t265(t: Trial):
    """K horizontal: h^*∘Θ(K) - Θ^h(K) = i^h(φ∘[K,φ]∘Λh)"""
    rng = t.rng()
    c = t.conn
    k, K = _horizontal_K(t, rng)
    M = precompose(postcompose(c.phi, fn_bracket(K, c.phi)), c.h)
    t.ops(Compose(HStar(c), theta(K)) - theta_h(K, c), _ih(M, c))


@_item("thm26", "2.6.6")
def _t266(t: Trial):
    """K horizontal: Θ(K)∘h^* - Θ^h(K) = i^h((-1)^k i(R̄)(h∘K) - h∘[K,φ])"""
    rng = t.rng()
    c = t.conn
    k, K = _horizontal_K(t, rng)
    M = insert_vv(t.Rbar, postcompose(c.h, K)) * _sgn(k) - postcompose(c.h, fn_bracket(K, c.phi))
    t.ops(Compose(theta(K), HStar(c)) - theta_h(K, c), _ih(M, c))


@_item("thm26", "2.6.7")
def _t267(t: Trial):
    """K horizontal: [h^*, Θ(K)] = i^h(φ∘[K,φ]∘Λh + h∘[K,φ] - (-1)^k i(R̄)(h∘K))"""
    rng = t.rng()
    c = t.conn
    k, K = _horizontal_K(t, rng)
    KP = fn_bracket(K, c.phi)
    M = precompose(postcompose(c.phi, KP), c.h) + postcompose(c.h, KP) - insert_vv(t.Rbar, postcompose(c.h, K)) * _sgn(k)
    t.ops(graded_commutator(HStar(c), theta(K)), _ih(M, c))


@_item("thm26", "2.6.8")
def _t268(t: Trial):
    """K_i horizontal: [Θ^h(K1), Θ^h(K2)] = Θ^h([K1,K2]) - i^h(h∘[K1,φ∘[K2,φ]]∘Λh - (-1)^{k1k2} h∘[K2,φ∘[K1,φ]]∘Λh)"""
    rng = t.rng()
    c = t.conn
    k1, k2 = _degrees(rng, t.dim, 2, t.dim)
    K1 = t.horizontal(t.vform(rng, k1))
    K2 = t.horizontal(t.vform(rng, k2))
    M = _twisted_pair(c, K1, K2)
    t.ops(graded_commutator(theta_h(K1, c), theta_h(K2, c)), theta_h(fn_bracket(K1, K2), c) - _ih(M, c))


def _twisted_pair(c: Connection, K1: VectorForm, K2: VectorForm) -> VectorForm:
    """h∘[K1,φ∘[K2,φ]]∘Λh - (-1)^{k1k2} h∘[K2,φ∘[K1,φ]]∘Λh"""
    k1, k2 = K1.degree, K2.degree

    def term(A, B):
        inner = postcompose(c.phi, fn_bracket(B, c.phi))
        return precompose(postcompose(c.h, fn_bracket(A, inner)), c.h)

    return term(K1, K2) - term(K2, K1) * _sgn(k1 * k2)


# --------------------------------------------------------------------------
# Lie derivations along phi and h


@_item("cor27", "2.7.1")
def _c271(t: Trial):
    """h^*∘Θ(φ) = i^h(R)"""
    c = t.conn
    t.ops(Compose(HStar(c), theta(c.phi)), _ih(t.R, c))


@_item("cor27", "2.7.2")
def _c272(t: Trial):
    """Θ^h(φ) = 0"""
    c = t.conn
    t.ops(theta_h(c.phi, c), zero_operator(t.chart, 1))


@_item("cor27", "2.7.3")
def _c273(t: Trial):
    """[h^*, Θ(h)] = -2 i^h(R) - i^h(R̄)"""
    c = t.conn
    t.ops(graded_commutator(HStar(c), theta(c.h)), _ih(t.R * -2 - t.Rbar, c))


@_item("cor27", "2.7.4")
def _c274(t: Trial):
    """h^*∘Θ(h) = Θ^h(h) - 2 i^h(R)"""
    c = t.conn
    t.ops(Compose(HStar(c), theta(c.h)), theta_h(c.h, c) - 2 * _ih(t.R, c))


@_item("cor27", "2.7.5")
def _c275(t: Trial):
    """Θ^h(h) + i^h(R̄) = Θ(h)∘h^*"""
    c = t.conn
    t.ops(theta_h(c.h, c) + _ih(t.Rbar, c), Compose(theta(c.h), HStar(c)))


@_item("cor27", "2.7.6")
def _c276(t: Trial):
    """[Θ^h(h), Θ^h(h)] = 2Θ^h(R) = 2 h^*∘i(R)∘d∘h^*"""
    c = t.conn
    th = theta_h(c.h, c)
    hs = HStar(c)
    lhs = graded_commutator(th, th)
    t.ops(lhs, 2 * theta_h(t.R, c))
    t.ops(lhs, 2 * Compose(hs, Compose(Insert(t.R), Compose(d_op(t.chart), hs))))


@_item("cor27", "2.7.7")
def _c277(t: Trial):
    """Θ^h(R̄) = 0"""
    t.ops(theta_h(t.Rbar, t.conn), zero_operator(t.chart, 2))


@_item("cor27", "dh-is-theta-h-id")
def _c27_id(t: Trial):
    """d^h = Θ^h(Id) = D^h∘h^*"""
    c = t.conn
    t.ops(cov_d(c), theta_h(VectorForm.identity(t.chart), c))
    t.ops(cov_d(c), Compose(cov_D(c), HStar(c)))


# --------------------------------------------------------------------------
# brackets inside Der^h


@_item("thm28", "2.8.1")
def _t281(t: Trial):
    """L h-equivariant: [i^h(L), Θ^h(K)] = Θ^h(i(L)K) + (-1)^k i^h(h∘[L,K]∘Λh)"""
    rng = t.rng()
    c = t.conn
    k = rng.randint(0, t.dim - 1)
    K = t.vform(rng, k)
    L = t.equivariant(rng, rng.randint(1, t.dim))
    lhs = graded_commutator(Insert(L, c), theta_h(K, c))
    M = precompose(postcompose(c.h, fn_bracket(L, K)), c.h)
    t.ops(lhs, theta_h(insert_vv(L, K), c) + _sgn(k) * _ih(M, c))


def _hstar_vv(c, K):
    return precompose(K, c.h)


@_item("thm28", "2.8.2")
def _t282(t: Trial):
    """i^h(L)(h^*[K1,K2]) = h^*[i(L)K1,K2] + (-1)^{k1 l} h^*[K1,i(L)K2] - (-1)^{k1 l} i^h(h^*[K1,L])K2 + (-1)^{(k1+l)k2} i^h(h^*[K2,L])K1"""
    rng = t.rng()
    c = t.conn
    h = c.h
    l1 = rng.randint(1, t.dim)
    L = t.equivariant(rng, l1)
    l = l1 - 1
    k1, k2 = _degrees(rng, t.dim, 2, t.dim)
    K1, K2 = t.vform(rng, k1), t.vform(rng, k2)
    lhs = insert_vv(L, _hstar_vv(c, fn_bracket(K1, K2)), h)
    rhs = (
        _hstar_vv(c, fn_bracket(insert_vv(L, K1), K2))
        + _hstar_vv(c, fn_bracket(K1, insert_vv(L, K2))) * _sgn(k1 * l)
        - insert_vv(_hstar_vv(c, fn_bracket(K1, L)), K2, h) * _sgn(k1 * l)
        + insert_vv(_hstar_vv(c, fn_bracket(K2, L)), K1, h) * _sgn((k1 + l) * k2)
    )
    t.eq(lhs, rhs)


@_item("thm28", "2.8.3")
def _t283(t: Trial):
    """K_i horizontal: i^h(L)(h^*[K1,K2]) = h^*[i^h(L)K1,K2] + (-1)^{k1 l} h^*[K1,i^h(L)K2] - (-1)^{k1 l} i^h(h^*[K1,L])K2 + (-1)^{(k1+l)k2} i^h(h^*[K2,L])K1"""
    rng = t.rng()
    c = t.conn
    h = c.h
    l1 = rng.randint(1, t.dim)
    L = t.equivariant(rng, l1)
    l = l1 - 1
    k1, k2 = _degrees(rng, t.dim, 2, t.dim)
    K1, K2 = t.horizontal(t.vform(rng, k1)), t.horizontal(t.vform(rng, k2))
    lhs = insert_vv(L, _hstar_vv(c, fn_bracket(K1, K2)), h)
    rhs = (
        _hstar_vv(c, fn_bracket(insert_vv(L, K1, h), K2))
        + _hstar_vv(c, fn_bracket(K1, insert_vv(L, K2, h))) * _sgn(k1 * l)
        - insert_vv(_hstar_vv(c, fn_bracket(K1, L)), K2, h) * _sgn(k1 * l)
        + insert_vv(_hstar_vv(c, fn_bracket(K2, L)), K1, h) * _sgn((k1 + l) * k2)
    )
    t.eq(lhs, rhs)


@_item("thm28", "2.8.4")
def _t284(t: Trial):
    """K horizontal, L_i h-equivariant: derivation rule of h∘[K, ·]∘Λh over the hat bracket"""
    rng = t.rng()
    c = t.conn
    h = c.h
    k = rng.randint(0, t.dim - 1)
    K = t.horizontal(t.vform(rng, k))
    a = rng.randint(1, t.dim)
    b = rng.randint(1, t.dim)
    L1, L2 = t.equivariant(rng, a), t.equivariant(rng, b)
    l1, l2 = a - 1, b - 1

    def hb(A, B):
        return precompose(postcompose(h, fn_bracket(A, B)), h)

    def hat(A, B):
        if A.degree < 1 or B.degree < 1 or A.degree + B.degree - 1 > t.dim:
            return VectorForm.zero(t.chart, A.degree + B.degree - 1)
        return hat_bracket(A, B, c)

    lhs = hb(K, hat(L1, L2))
    rhs = (
        hat(hb(K, L1), L2)
        + hat(L1, hb(K, L2)) * _sgn(k * l1)
        - hb(insert_vv(L1, K, h), L2) * _sgn(k * l1)
        - hb(insert_vv(L2, K, h), L1) * _sgn((l1 + k) * l2)
    )
    t.eq(lhs, rhs)


@_item("thm28", "2.8.5")
def _t285(t: Trial):
    """[Θ^h(K1)+i^h(L1), Θ^h(K2)+i^h(L2)] expanded; K_i horizontal, L_i h-equivariant of degree k_i+1"""
    rng = t.rng()
    c = t.conn
    h = c.h
    k1, k2 = rng.randint(0, t.dim - 1), rng.randint(0, t.dim - 1)
    K1, K2 = t.horizontal(t.vform(rng, k1)), t.horizontal(t.vform(rng, k2))
    L1, L2 = t.equivariant(rng, k1 + 1), t.equivariant(rng, k2 + 1)
    lhs = graded_commutator(theta_h(K1, c) + Insert(L1, c), theta_h(K2, c) + Insert(L2, c))

    def hb(A, B):
        return precompose(postcompose(h, fn_bracket(A, B)), h)

    K = fn_bracket(K1, K2) + insert_vv(L1, K2) - insert_vv(L2, K1) * _sgn(k1 * k2)
    M = (
        alg_bracket(L1, L2, h)
        + hb(L1, K2) * _sgn(k2)
        - hb(L2, K1) * _sgn(k1 * (k2 + 1))
        - _twisted_pair(c, K1, K2)
    )
    t.ops(lhs, theta_h(K, c) + _ih(M, c))


# --------------------------------------------------------------------------
# module structure over Omega(M)


@_item("thm29", "2.9.1")
def _t291(t: Trial):
    """ω horizontal: [ω∧D1, D2] = ω∧[D1,D2] - (-1)^{(q+k1)k2} D2ω ∧ h^*D1"""
    rng = t.rng()
    c = t.conn
    q = rng.randint(0, t.dim - 1)
    w = t.hform(rng, q)
    k1, k2 = rng.randint(0, 1), rng.randint(0, 1)
    D1, D2 = t.derivation(rng, k1), t.derivation(rng, k2)
    lhs = graded_commutator(module_action(w, D1), D2)
    corr = Compose(module_action(D2(w), HStar(c)), D1)
    t.ops(lhs, module_action(w, graded_commutator(D1, D2)) - _sgn((q + k1) * k2) * corr)


@_item("thm29", "2.9.2")
def _t292(t: Trial):
    """ω∧i^h(L) = i^h(ω∧L)"""
    rng = t.rng()
    c = t.conn
    L = t.vform(rng, rng.randint(1, t.dim))
    w = random_form(rng, t.chart, rng.randint(0, t.dim - L.degree + 1))
    t.ops(module_action(w, Insert(L, c)), _ih(wedge_vv(w, L), c))


@_item("thm29", "2.9.3")
def _t293(t: Trial):
    """(ω∧Θ(K))∘h^* = Θ(ω∧K)∘h^* + (-1)^{q+k-1} i^h(dω∧(h∘K))"""
    rng = t.rng()
    c = t.conn
    k = rng.randint(0, t.dim - 1)
    q = rng.randint(0, t.dim - k)
    K = t.vform(rng, k)
    w = random_form(rng, t.chart, q)
    hs = HStar(c)
    lhs = Compose(module_action(w, theta(K)), hs)
    rhs = Compose(theta(wedge_vv(w, K)), hs) + _sgn(q + k - 1) * _ih(wedge_vv(ext_d(w), postcompose(c.h, K)), c)
    t.ops(lhs, rhs)


@_item("thm29", "2.9.4")
def _t294(t: Trial):
    """K, ω horizontal: ω∧Θ^h(K) = Θ^h(ω∧K) + (-1)^{q+k-1} i^h(d^hω∧(h∘K))"""
    rng = t.rng()
    c = t.conn
    k = rng.randint(0, t.dim - 1)
    q = rng.randint(0, t.dim - k)
    K = t.horizontal(t.vform(rng, k))
    w = t.hform(rng, q)
    dhw = cov_d(c)(w)
    rhs = theta_h(wedge_vv(w, K), c) + _sgn(q + k - 1) * _ih(wedge_vv(dhw, postcompose(c.h, K)), c)
    t.ops(module_action(w, theta_h(K, c)), rhs)


@_item("thm29", "2.9.5")
def _t295(t: Trial):
    """ω horizontal, L_j h-equivariant: [ω∧L1, L2]^{∧,h} = ω∧[L1,L2]^{∧,h} - (-1)^{(q+l1)l2} i^h(L2)ω ∧ (h∘L1)"""
    rng = t.rng()
    c = t.conn
    a = rng.randint(1, t.dim)
    b = rng.randint(1, t.dim)
    q = rng.randint(0, max(0, t.dim - a))
    L1, L2 = t.equivariant(rng, a), t.equivariant(rng, b)
    l1, l2 = a - 1, b - 1
    w = t.hform(rng, q)
    wL1 = wedge_vv(w, L1)
    if wL1.degree >= 1:
        t.truth(is_h_equivariant(c, wL1), wL1.degree, "ω∧L not equivariant for horizontal ω")
    lhs = alg_bracket(wL1, L2, c.h) if wL1.degree >= 1 else VectorForm.zero(t.chart, q + a + b - 1)
    rhs = wedge_vv(w, alg_bracket(L1, L2, c.h)) - wedge_vv(insert(L2, w, c.h), postcompose(c.h, L1)) * _sgn((q + l1) * l2)
    t.eq(lhs, rhs)


# --------------------------------------------------------------------------
# horizontal lifts on product bundles


def _base_vform(t: Trial, rng, degree: int) -> VectorForm:
    return random_vector_form(rng, t.bundle.base, degree, max_degree=2, density=0.5)


def _base_family(t: Trial):
    return test_family(t.bundle.base, t.seed % 1000)


def _cross_ops(t: Trial, f, g):
    """Compare two maps Ω(base) → Ω(total) on the base test family."""
    t.checks += 1
    for w in _base_family(t):
        diff = f(w) - g(w)
        if not diff.is_zero():
            t._fail(diff.degree, render_form(diff))
            return


@_item("thm31", "3.1.0", min_dim=2)
def _t310(t: Trial):
    """χ_*K is horizontal with horizontal values; p^* lands in horizontal forms; R̄ = 0"""
    rng = t.rng()
    pb = t.bundle
    c = bl.induced_connection(pb)
    t.zero(cocurvature(c))
    K = bl.chi_star(pb, _base_vform(t, rng, rng.randint(0, pb.m)))
    t.eq(postcompose(c.h, K), K)
    t.eq(precompose(K, c.h), K)
    w = random_form(rng, pb.base, rng.randint(0, pb.m))
    t.truth(horizontality(c, bl.pullback_base(pb, w), "horizontal"), w.degree, "p*ω not horizontal")
    q = rng.randint(0, pb.m)
    w2 = random_form(rng, pb.base, q)
    K2 = _base_vform(t, rng, rng.randint(0, pb.m - q))
    t.eq(bl.chi_star(pb, wedge_vv(w2, K2)), wedge_vv(bl.pullback_base(pb, w2), bl.chi_star(pb, K2)))


@_item("thm31", "3.1.1", min_dim=2)
def _t311(t: Trial):
    """p^*∘i(K) = i(χ_*K)∘p^* = i^h(χ_*K)∘p^*"""
    rng = t.rng()
    pb = t.bundle
    c = bl.induced_connection(pb)
    K = _base_vform(t, rng, rng.randint(0, pb.m))
    cK = bl.chi_star(pb, K)
    p = lambda w: bl.pullback_base(pb, w)  # noqa: E731
    _cross_ops(t, lambda w: p(insert(K, w)), lambda w: insert(cK, p(w)))
    _cross_ops(t, lambda w: p(insert(K, w)), lambda w: insert(cK, p(w), c.h))


@_item("thm31", "3.1.2", min_dim=2)
def _t312(t: Trial):
    """p^*∘Θ(K) = Θ(χ_*K)∘p^* = Θ^h(χ_*K)∘p^*"""
    rng = t.rng()
    pb = t.bundle
    c = bl.induced_connection(pb)
    K = _base_vform(t, rng, rng.randint(0, pb.m))
    cK = bl.chi_star(pb, K)
    p = lambda w: bl.pullback_base(pb, w)  # noqa: E731
    tK, thK = theta(K), theta_h(cK, c)
    tcK = theta(cK)
    _cross_ops(t, lambda w: p(tK(w)), lambda w: tcK(p(w)))
    _cross_ops(t, lambda w: p(tK(w)), lambda w: thK(p(w)))


@_item("thm31", "3.1.3", min_dim=2)
def _t313(t: Trial):
    """i(χ_*K1)χ_*K2 = i^h(χ_*K1)χ_*K2 = χ_*(i(K1)K2)"""
    rng = t.rng()
    pb = t.bundle
    c = bl.induced_connection(pb)
    K1 = _base_vform(t, rng, rng.randint(0, pb.m))
    K2 = _base_vform(t, rng, rng.randint(0, pb.m))
    a, b = bl.chi_star(pb, K1), bl.chi_star(pb, K2)
    t.eq(insert_vv(a, b), bl.chi_star(pb, insert_vv(K1, K2)))
    t.eq(insert_vv(a, b, c.h), bl.chi_star(pb, insert_vv(K1, K2)))


@_item("thm31", "3.1.4", min_dim=2)
def _t314(t: Trial):
    """χ_*[K1,K2]^∧ = [χ_*K1, χ_*K2]^{∧,h} = [χ_*K1, χ_*K2]^∧"""
    rng = t.rng()
    pb = t.bundle
    c = bl.induced_connection(pb)
    K1 = _base_vform(t, rng, rng.randint(1, pb.m))
    K2 = _base_vform(t, rng, rng.randint(1, pb.m))
    a, b = bl.chi_star(pb, K1), bl.chi_star(pb, K2)
    lifted = bl.chi_star(pb, alg_bracket(K1, K2))
    t.eq(lifted, hat_bracket(a, b, c))
    t.eq(lifted, alg_bracket(a, b))


@_item("thm31", "3.1.5", min_dim=2)
def _t315(t: Trial):
    """χ_*[K1,K2] = h∘[χ_*K1, χ_*K2] = h∘[χ_*K1, χ_*K2]∘Λh"""
    rng = t.rng()
    pb = t.bundle
    c = bl.induced_connection(pb)
    K1 = _base_vform(t, rng, rng.randint(0, pb.m))
    K2 = _base_vform(t, rng, rng.randint(0, pb.m - K1.degree))
    a, b = bl.chi_star(pb, K1), bl.chi_star(pb, K2)
    lifted = bl.chi_star(pb, fn_bracket(K1, K2))
    hab = postcompose(c.h, fn_bracket(a, b))
    t.eq(lifted, hab)
    t.eq(lifted, precompose(hab, c.h))


# --------------------------------------------------------------------------
# horizontal forms and the vertical distribution


@_item("lemma23", "hor-depends-on-F", min_dim=2)
def _hor_F(t: Trial):
    """Ω_hor depends only on the vertical distribution"""
    rng = t.rng()
    c = t.conn
    c2 = shear_connection(c, derive_seed(t.seed, "shear"))
    for p in range(t.dim + 1):
        for w in (random_form(rng, t.chart, p), pullback_by(random_form(rng, t.chart, p), c.h)):
            t.truth(horizontality(c, w, "horizontal") == horizontality(c2, w, "horizontal"), p, "horizontality differs")


# --------------------------------------------------------------------------
# runner


def suite_ids() -> List[str]:
    return sorted(SUITES)


def _run_cell(suite_id: str, dim: int, index: int, root_seed: int):
    seed = derive_seed(suite_id, root_seed, dim, index)
    trial = Trial(suite_id, dim, seed)
    skipped = []
    for item in SUITES[suite_id]:
        if dim < item.min_dim:
            skipped.append(item.ident)
            continue
        trial._item = item.ident
        item.fn(trial)
    return dim, index, trial.checks, tuple(skipped), trial.failures


def verify_suite(
    suite_id: str,
    dims: Sequence[int] = (3,),
    trials: int = 10,
    seed: int = 0,
    workers: int = 1,
) -> SuiteReport:
    """Run ``trials`` random trials of a registered suite in every chart dimension."""
    if suite_id not in SUITES:
        raise UnknownSuite(f"unknown suite {suite_id!r}; known: {', '.join(suite_ids())}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dims = tuple(dims)
    for d in dims:
        chart_for(d)
        if suite_id == "thm31" and d < 2:
            raise ValueError("thm31 needs total dimension >= 2")
    cells = [(suite_id, d, i, seed) for d in dims for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, *zip(*cells)))
    else:
        results = [_run_cell(*cell) for cell in cells]
    results.sort(key=lambda r: (r[0], r[1]))
    groups = []
    failed_trials = set()
    failures: List[Failure] = []
    for d in dims:
        rs = [r for r in results if r[0] == d]
        fails = [f for r in rs for f in r[4]]
        failed_trials.update(r[1] for r in rs if r[4])
        failures.extend(fails)
        groups.append(GroupSummary(d, len(rs), sum(r[2] for r in rs), len(fails), rs[0][3] if rs else ()))
    return SuiteReport(
        suite_id=suite_id,
        trials=trials,
        failures=sorted(failures),
        passed=trials - len(failed_trials),
        seed=seed,
        dims=dims,
        groups=groups,
    )
