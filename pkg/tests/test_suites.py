import random

import pytest

from fnforms import Chart, UnknownSuite, make_connection, parse_report, render_report, suite_ids, verify_suite
from fnforms import suites as S
from fnforms.forms import alg_bracket, ext_d, fn_bracket, insert_vv, postcompose, precompose, wedge_vv
from fnforms.operators import Compose, HStar, Insert, graded_commutator, module_action, operator_residual, theta, theta_h
from fnforms.sampling import derive_seed, random_form
from fnforms.suites import Failure, SuiteReport, Trial

ALL = ["bianchi", "fn-axioms", "lemma23", "prop24", "prop25", "thm26", "cor27", "thm28", "thm29", "thm31"]


def test_registry():
    assert suite_ids() == sorted(ALL)
    with pytest.raises(UnknownSuite):
        verify_suite("nope")


@pytest.mark.parametrize("suite", [s for s in ALL if s != "thm31"])
def test_suite_passes_small(suite):
    r = verify_suite(suite, dims=(3,), trials=2, seed=11)
    assert r.ok, render_report(r)
    assert r.passed == 2


def test_bundle_suite_small():
    r = verify_suite("thm31", dims=(2, 3, 4), trials=2, seed=5)
    assert r.ok, render_report(r)
    with pytest.raises(ValueError):
        verify_suite("thm31", dims=(1,), trials=1)


def test_items_needing_dimension_are_skipped():
    r = verify_suite("bianchi", dims=(2,), trials=1)
    assert r.groups[0].skipped == ("1.4.1", "1.4.2")


def test_failure_line_format():
    r = SuiteReport("thm26", 1, [Failure(3, "2.6.7", 2, "(x) x^y")], passed=0, seed=7, dims=(3,))
    text = render_report(r)
    assert "FAIL seed=3 item=2.6.7 deg=2 residual=(x) x^y\n" in text
    assert text.endswith("FAIL 0/1\n")


def test_pass_tail():
    r = verify_suite("cor27", dims=(3,), trials=3)
    assert render_report(r).endswith("PASS 3/3\n")


def test_report_roundtrip():
    r = SuiteReport(
        "thm28",
        4,
        [Failure(9, "2.8.5", 1, "(x + 1) y (*) d/z"), Failure(2, "2.8.1", 3, "(-1/2 z) x^y^z")],
        passed=2,
        seed=1,
        dims=(3, 4),
        groups=[S.GroupSummary(3, 4, 40, 1, ()), S.GroupSummary(4, 4, 40, 1, ("a", "b"))],
    )
    text = render_report(r)
    assert render_report(parse_report(text)) == text
    good = render_report(verify_suite("bianchi", dims=(3,), trials=2))
    assert render_report(parse_report(good)) == good


def test_parallel_matches_serial():
    a = render_report(verify_suite("prop25", dims=(3, 4), trials=3, seed=2, workers=1))
    b = render_report(verify_suite("prop25", dims=(3, 4), trials=3, seed=2, workers=3))
    assert a == b


def test_broken_identity_is_caught(monkeypatch):
    def wrong_sign(t):
        c = t.conn
        t.ops(graded_commutator(HStar(c), theta(c.h)), Insert(t.R * 2 - t.Rbar, c))

    items = list(S.SUITES["cor27"]) + [S.Item("broken", wrong_sign)]
    monkeypatch.setitem(S.SUITES, "cor27", items)
    r = verify_suite("cor27", dims=(3,), trials=6)
    assert not r.ok
    assert {f.item for f in r.failures} == {"broken"}
    assert render_report(r).splitlines()[-1] == f"FAIL {r.passed}/6"


# -- generators --------------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_generators_land_in_hypothesis_class(seed):
    t = Trial("gen", 3, derive_seed("gen", seed))
    c = t.conn
    rng = random.Random(seed)
    for k in range(4):
        K = t.horizontal(t.vform(rng, k))
        assert precompose(K, c.h) == K
        w = t.hform(rng, k)
        assert S.horizontality(c, w, "horizontal")
    for k in range(1, 4):
        assert S.is_h_equivariant(c, t.equivariant(rng, k))


# -- statements that need a correction ----------------------------------------


def _random_cases(n=4):
    for i in range(n):
        t = Trial("lit", 3, derive_seed("lit", i))
        yield t, random.Random(i)


def test_module_identity_literal_form_fails():
    """With Θ^h(ω∧K) on the right (instead of Θ(ω∧K)) the identity breaks."""
    broken = fixed = 0
    for t, rng in _random_cases():
        c = t.conn
        K = t.vform(rng, 1)
        w = random_form(rng, t.chart, 1)
        lhs = Compose(module_action(w, theta(K)), HStar(c))
        corr = -S._ih(wedge_vv(ext_d(w), postcompose(c.h, K)), c)  # sign (-1)^{q+k-1} with q = k = 1
        literal = Compose(theta_h(wedge_vv(w, K), c), HStar(c)) + corr
        corrected = Compose(theta(wedge_vv(w, K)), HStar(c)) + corr
        broken += operator_residual(lhs, literal, t.family) is not None
        fixed += operator_residual(lhs, corrected, t.family) is None
    assert broken == 4 and fixed == 4


def _der_h_bracket_residual(t, K1, K2, L1, L2, sign):
    c = t.conn
    h = c.h
    k1, k2 = K1.degree, K2.degree

    def hb(A, B):
        return precompose(postcompose(h, fn_bracket(A, B)), h)

    lhs = graded_commutator(theta_h(K1, c) + Insert(L1, c), theta_h(K2, c) + Insert(L2, c))
    K = fn_bracket(K1, K2) + insert_vv(L1, K2) - insert_vv(L2, K1) * S._sgn(k1 * k2)
    M = alg_bracket(L1, L2, h) + hb(L1, K2) * S._sgn(k2) - hb(L2, K1) * sign - S._twisted_pair(c, K1, K2)
    return operator_residual(lhs, theta_h(K, c) + S._ih(M, c), t.family)


def test_der_h_bracket_needs_horizontal_K(conn_a):
    """With non-horizontal K_i the expansion fails as soon as R is nonzero."""
    conns = [conn_a] + [S.random_connection(S.chart_for(3), 1, seed=s) for s in (3, 4)]
    for i, c in enumerate(conns):
        assert not S.curvature(c).is_zero()
        t = Trial("lit", 3, derive_seed("lit", i))
        t._conn = c
        rng = random.Random(i)
        K1, K2 = t.vform(rng, 1), t.vform(rng, 1)
        L1, L2 = t.equivariant(rng, 2), t.equivariant(rng, 2)
        assert _der_h_bracket_residual(t, K1, K2, L1, L2, 1) is not None
        assert _der_h_bracket_residual(t, t.horizontal(K1), t.horizontal(K2), L1, L2, 1) is None


def test_der_h_bracket_sign():
    """The sign (-1)^{k1(k2+1)} is the right one wherever the term is nonzero."""
    seen = 0
    for i in range(8):
        t = Trial("sign", 3, derive_seed("sign", 3, i))
        rng = random.Random(i)
        K1, K2 = t.horizontal(t.vform(rng, 1)), t.horizontal(t.vform(rng, 0))
        L1, L2 = t.equivariant(rng, 2), t.equivariant(rng, 1)
        assert _der_h_bracket_residual(t, K1, K2, L1, L2, -1) is None
        term = precompose(postcompose(t.conn.h, fn_bracket(L2, K1)), t.conn.h)
        if not term.is_zero():
            seen += 1
            assert _der_h_bracket_residual(t, K1, K2, L1, L2, 1) is not None
    assert seen >= 2


def test_der_h_bracket_sign_on_connection_a_is_vacuous(conn_a):
    """For k1 = k2 = 1 the sign-carrying term has degree 3 > horizontal rank 2."""
    t = Trial("a", 3, 1)
    t._conn = conn_a
    rng = random.Random(0)
    K1, K2 = t.horizontal(t.vform(rng, 1)), t.horizontal(t.vform(rng, 1))
    L1, L2 = t.equivariant(rng, 2), t.equivariant(rng, 2)
    assert precompose(postcompose(conn_a.h, fn_bracket(L2, K1)), conn_a.h).is_zero()
    assert _der_h_bracket_residual(t, K1, K2, L1, L2, 1) is None
    assert _der_h_bracket_residual(t, K1, K2, L1, L2, -1) is None
