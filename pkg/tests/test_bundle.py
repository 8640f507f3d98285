import random

import pytest

from fnforms import (
    Chart,
    ChartMismatch,
    FiberDependence,
    Poly,
    ScalarForm,
    VectorForm,
    chi_lift,
    chi_star,
    cocurvature,
    curvature,
    horizontality,
    induced_connection,
    make_bundle,
    parse_form,
    postcompose,
    precompose,
    pullback_base,
    render_form,
    wedge,
    wedge_vv,
)
from fnforms.sampling import random_form, random_poly, random_vector_form


def test_trivial_gamma():
    pb = make_bundle(["t"], ["s"], [[0]])
    c = induced_connection(pb)
    assert c.rank == 1
    assert curvature(c).is_zero() and cocurvature(c).is_zero()
    assert chi_lift(pb, VectorForm.coord_field(pb.base, 0)) == VectorForm.coord_field(pb.total, 0)


def test_rank_one_horizontal():
    pb = make_bundle(["t"], ["s"], [["t"]])
    c = induced_connection(pb)
    ht = c.horizontal_fields()[0]
    assert render_form(ht) == "(1) (*) d/t + (t) (*) d/s"
    assert render_form(chi_lift(pb, VectorForm.coord_field(pb.base, 0))) == "(1) (*) d/t + (t) (*) d/s"
    assert curvature(c).is_zero()


def test_recovers_connection_a(conn_a):
    pb = make_bundle(["x", "y"], ["z"], [["0", "x"]])
    c = induced_connection(pb)
    assert c.phi == conn_a.phi
    assert render_form(curvature(c)) == "(1) x^y (*) d/z"
    assert cocurvature(c).is_zero()


def test_chi_star_example():
    pb = make_bundle(["x", "y"], ["z"], [["0", "x"]])
    K = parse_form(pb.base, "(1) x (*) d/y")
    assert render_form(chi_star(pb, K)) == "(1) x (*) d/y + (x) x (*) d/z"


def test_chi_is_fiber_linear():
    pb = make_bundle(["x", "y"], ["z"], [["y", "x z"]])
    X = VectorForm.coord_field(pb.base, 1)
    fpoly = Poly.parse(pb.base, "x^2 + y")
    lhs = chi_lift(pb, X * fpoly)
    rhs = chi_lift(pb, X) * Poly.parse(pb.total, "x^2 + y")
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(5))
def test_chi_star_horizontal_with_horizontal_values(seed):
    rng = random.Random(seed)
    total = Chart(("x", "y", "u", "v"))
    pb = make_bundle(["x", "y"], ["u", "v"], [[random_poly(rng, total) for _ in range(2)] for _ in range(2)])
    c = induced_connection(pb)
    assert cocurvature(c).is_zero()
    K = random_vector_form(rng, pb.base, rng.randint(0, 2), density=0.6)
    L = chi_star(pb, K)
    assert postcompose(c.h, L) == L == precompose(L, c.h)
    w = random_form(rng, pb.base, rng.randint(0, 2 - K.degree))
    assert chi_star(pb, wedge_vv(w, K)) == wedge_vv(pullback_base(pb, w), L)


def test_pullback_base():
    pb = make_bundle(["x", "y"], ["z"], [["0", "x"]])
    c = induced_connection(pb)
    dx = ScalarForm.dx(pb.base, 0)
    assert pullback_base(pb, dx) == ScalarForm.dx(pb.total, 0)
    f = ScalarForm.function(Poly.parse(pb.base, "x y"))
    assert horizontality(c, pullback_base(pb, f), "horizontal")
    rng = random.Random(1)
    a, b = random_form(rng, pb.base, 1), random_form(rng, pb.base, 1)
    assert pullback_base(pb, wedge(a, b)) == wedge(pullback_base(pb, a), pullback_base(pb, b))


def test_fiber_dependence_is_rejected():
    pb = make_bundle(["x", "y"], ["z"], [["0", "x"]])
    with pytest.raises(FiberDependence):
        chi_star(pb, parse_form(pb.total, "(z) x (*) d/y"))
    with pytest.raises(FiberDependence):
        chi_star(pb, parse_form(pb.total, "(1) x (*) d/z"))
    with pytest.raises(FiberDependence):
        pullback_base(pb, parse_form(pb.total, "(1) z"))
    # total-chart data that avoids the fiber is accepted
    assert chi_star(pb, parse_form(pb.total, "(1) x (*) d/y")) == chi_star(pb, parse_form(pb.base, "(1) x (*) d/y"))


def test_name_clash():
    with pytest.raises(ChartMismatch):
        make_bundle(["x", "y"], ["y"], [["0", "0"]])
