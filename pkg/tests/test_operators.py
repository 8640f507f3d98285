import random

import pytest

from fnforms import (
    Chart,
    DegreeError,
    DerivationCheckFailed,
    NotEquivariant,
    NotInDerH,
    Poly,
    ScalarForm,
    VectorForm,
    apply,
    cocurvature,
    cov_D,
    cov_d,
    curvature,
    d_op,
    decompose,
    decompose_h,
    graded_commutator,
    h_star_op,
    hat_bracket,
    insert_h,
    insert_op,
    module_action,
    operators_equal,
    parse_form,
    precompose,
    postcompose,
    random_connection,
    theta,
    theta_h,
    wedge_vv,
)
from fnforms.forms import alg_bracket
from fnforms.operators import Compose, HStar, Insert, WedgeBy, operator_residual, test_family, zero_operator
from fnforms.sampling import random_form, random_vector_form

C = Chart(("x", "y", "z"))


def f(text):
    return parse_form(C, text)


def test_apply_examples(conn_a):
    assert apply(d_op(C), f("(x y)")) == f("(y) x + (x) y")
    assert apply(h_star_op(conn_a), f("(1) z")) == f("(x) y")
    assert apply(Compose(HStar(conn_a), d_op(C)), f("(z)")) == f("(x) y")


def test_output_degree_is_fixed_for_zero_results(conn_a):
    out = apply(insert_h(curvature(conn_a), conn_a), f("(x)"))
    assert out.is_zero() and out.degree == 1


def test_chart_mismatch(conn_a):
    other = Chart(("a", "b", "c"))
    with pytest.raises(ValueError):
        apply(d_op(C), ScalarForm.dx(other, 0))


def test_commutator_examples(conn_a):
    d = d_op(C)
    assert operators_equal(graded_commutator(d, d), zero_operator(C, 2))
    K = random_vector_form(random.Random(1), C, 1)
    assert operators_equal(theta(K), graded_commutator(insert_op(K), d))
    th = theta_h(conn_a.h, conn_a)
    assert operators_equal(graded_commutator(th, th), 2 * theta_h(curvature(conn_a), conn_a))


def test_theta_of_identity_is_d():
    assert operators_equal(theta(VectorForm.identity(C)), d_op(C))


def test_theta_commutes_with_d():
    K = random_vector_form(random.Random(2), C, 2)
    assert operators_equal(graded_commutator(theta(K), d_op(C)), zero_operator(C, 3))


def test_theta_on_function_is_directional_derivative():
    X = VectorForm.vector_field(C, [Poly.parse(C, "y"), Poly.parse(C, "1"), Poly.parse(C, "0")])
    assert apply(theta(X), f("(x^2 y)")) == f("(2 x y^2 + x^2)")


def test_insert_h_examples(conn_a):
    R = curvature(conn_a)
    assert apply(insert_h(R, conn_a), f("(1) z")) == f("(1) x^y")
    assert apply(insert_h(conn_a.phi, conn_a), f("(1) z")) == f("(1) z + (-x) y")
    assert apply(insert_h(R, conn_a), f("(x y z)")).is_zero()
    with pytest.raises(DegreeError):
        insert_h(VectorForm.coord_field(C, 0), conn_a)


def test_theta_h_examples(conn_a):
    c = conn_a
    assert operators_equal(theta_h(c.phi, c), zero_operator(C, 1))
    assert operators_equal(theta_h(VectorForm.identity(C), c), cov_d(c))
    assert operators_equal(theta_h(cocurvature(c), c), zero_operator(C, 2))


def test_covariant_derivatives(conn_a):
    c = conn_a
    assert apply(cov_D(c), f("(z)")) == f("(x) y")
    assert apply(cov_d(c), f("(1) z")) == f("(1) x^y")
    assert apply(cov_D(c), f("(1) z")).is_zero()
    diff = cov_d(c) - cov_D(c)
    assert apply(diff, f("(1) z")) == apply(insert_h(curvature(c), c), f("(1) z"))
    assert apply(cov_D(c), f("(x) y")) == apply(cov_d(c), f("(x) y"))


def test_decompose_examples(conn_a):
    c = conn_a
    K, L = decompose(graded_commutator(d_op(C), HStar(c)), c)
    assert K == c.phi and L == curvature(c) + cocurvature(c)
    L0 = random_vector_form(random.Random(3), C, 2)
    K, L = decompose(insert_h(L0, c), c)
    assert K.is_zero() and L == L0
    X = random_vector_form(random.Random(4), C, 0)
    K, L = decompose(Compose(theta(X), HStar(c)), c)
    assert K == X and L.is_zero()


def test_decompose_rejects_non_derivations(conn_a):
    with pytest.raises(DerivationCheckFailed):
        decompose(Compose(d_op(C), d_op(C)) + WedgeBy(f("(1) x^y")), conn_a)
    # plain d is a derivation, but not over h*
    with pytest.raises(DerivationCheckFailed):
        decompose(d_op(C), conn_a)


def test_decompose_h_examples(conn_a):
    c = conn_a
    K, L = decompose_h(cov_d(c), c)
    assert K == c.h and L.is_zero()
    K, L = decompose_h(zero_operator(C, 1), c)
    assert K.is_zero() and L.is_zero()
    with pytest.raises(NotInDerH):
        decompose_h(graded_commutator(d_op(C), HStar(c)), c)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_decompose_h_roundtrip(k):
    c = random_connection(C, 1 + k % 2, seed=10 + k)
    rng = random.Random(k)
    K0 = precompose(random_vector_form(rng, C, k), c.h)
    A = random_vector_form(rng, C, k + 1)
    L0 = postcompose(c.h, precompose(A, c.h))
    K, L = decompose_h(theta_h(K0, c) + Insert(L0, c), c)
    assert K == K0 and L == L0


def test_hat_bracket(conn_a):
    c = conn_a
    hh = hat_bracket(c.h, c.h, c)
    assert operators_equal(Insert(hh, c), graded_commutator(insert_h(c.h, c), insert_h(c.h, c)))
    with pytest.raises(NotEquivariant):
        hat_bracket(curvature(c), c.h, c)
    with pytest.raises(DegreeError):
        hat_bracket(VectorForm.coord_field(C, 0), c.h, c)
    # with h = Id the hat bracket is the algebraic bracket
    triv = random_connection(C, 0, seed=0)
    rng = random.Random(5)
    K, L = random_vector_form(rng, C, 1), random_vector_form(rng, C, 2)
    assert hat_bracket(K, L, triv) == alg_bracket(K, L)


def test_module_action(conn_a):
    c = conn_a
    rng = random.Random(6)
    L = random_vector_form(rng, C, 1)
    w = random_form(rng, C, 1)
    assert operators_equal(module_action(w, insert_h(L, c)), insert_h(wedge_vv(w, L), c))
    one = ScalarForm.function(Poly.const(C, 1))
    assert operators_equal(module_action(one, cov_d(c)), cov_d(c))


def test_test_family_shape():
    fam = test_family(C)
    assert len(fam) == 3 + 3 + 3 * 4
    assert [w.degree for w in fam[:6]] == [0, 0, 0, 1, 1, 1]


def test_residual_reports_degree(conn_a):
    res = operator_residual(cov_d(conn_a), cov_D(conn_a))
    assert res is not None and res[0] == 1
