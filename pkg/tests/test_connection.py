import random

import pytest

from fnforms import (
    Chart,
    NotIdempotent,
    ScalarForm,
    VectorForm,
    cocurvature,
    curvature,
    fn_bracket,
    fn_bracket_deg1_oracle,
    h_star,
    horizontality,
    is_h_equivariant,
    make_connection,
    parse_form,
    postcompose,
    precompose,
    random_connection,
    render_form,
)
from fnforms.connection import shear_connection
from fnforms.sampling import random_form

C = Chart(("x", "y", "z"))


def test_connection_a_basics(conn_a):
    assert conn_a.rank == 1
    assert postcompose(conn_a.phi, conn_a.phi) == conn_a.phi
    assert render_form(curvature(conn_a)) == "(1) x^y (*) d/z"
    assert cocurvature(conn_a).is_zero()
    assert h_star(conn_a, ScalarForm.dx(C, 2)) == parse_form(C, "(x) y")


def test_connection_a_horizontal_lifts(conn_a):
    hx, hy, hz = conn_a.horizontal_fields()
    assert hx == VectorForm.coord_field(C, 0)
    assert render_form(hy) == "(1) (*) d/y + (x) (*) d/z"
    assert hz.is_zero()


def test_zero_and_identity_projections():
    zero = make_connection(C, [[0] * 3] * 3)
    assert zero.rank == 0 and zero.h == VectorForm.identity(C)
    full = make_connection(C, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert full.rank == 3 and full.h.is_zero()
    assert curvature(zero).is_zero() and cocurvature(full).is_zero()


def test_not_idempotent():
    with pytest.raises(NotIdempotent, match="phi is not idempotent"):
        make_connection(C, [[1, 0, 0], [0, 0, 0], [0, "-x", 2]])


def test_wrong_shape():
    with pytest.raises(ValueError):
        make_connection(C, [[0, 0], [0, 0]])


@pytest.mark.parametrize("dim,rank", [(3, 1), (3, 2), (4, 1), (4, 2), (4, 3)])
def test_random_connection_invariants(dim, rank):
    chart = Chart(("x", "y", "z", "w")[:dim])
    c = random_connection(chart, rank, seed=42, coeff_degree=2)
    Id = VectorForm.identity(chart)
    assert c.rank == rank
    assert postcompose(c.phi, c.phi) == c.phi
    assert postcompose(c.h, c.h) == c.h
    assert postcompose(c.phi, c.h).is_zero() and postcompose(c.h, c.phi).is_zero()
    assert c.phi + c.h == Id
    R, Rb = curvature(c), cocurvature(c)
    assert horizontality(c, R, "horizontal_args") and horizontality(c, R, "vertical_values")
    assert horizontality(c, Rb, "vertical_args") and horizontality(c, Rb, "horizontal_values")
    two = (R + Rb) * 2
    assert fn_bracket(c.phi, c.phi) == two
    assert fn_bracket(c.h, c.h) == two
    assert -fn_bracket(c.phi, c.h) == two
    assert fn_bracket_deg1_oracle(c.phi, c.phi) == two


def test_random_connection_is_deterministic():
    a = random_connection(C, 1, seed=7)
    b = random_connection(C, 1, seed=7)
    assert a.phi == b.phi
    assert random_connection(C, 1, seed=8).phi != a.phi


def test_generator_is_not_degenerate():
    # most random connections have nonzero curvature or cocurvature
    hits = 0
    for s in range(20):
        c = random_connection(C, 1 + s % 2, seed=s)
        hits += not (curvature(c).is_zero() and cocurvature(c).is_zero())
    assert hits >= 14


def test_rank_out_of_range():
    with pytest.raises(ValueError):
        random_connection(C, 4, seed=0)


def test_equivariance(conn_a):
    assert is_h_equivariant(conn_a, conn_a.h)
    assert is_h_equivariant(conn_a, conn_a.phi)
    assert not is_h_equivariant(conn_a, curvature(conn_a))


def test_horizontal_scalar_forms(conn_a):
    assert horizontality(conn_a, parse_form(C, "(x) y"), "horizontal")
    assert not horizontality(conn_a, ScalarForm.dx(C, 2), "horizontal")
    assert horizontality(conn_a, parse_form(C, "(1) z + (-x) y"), "vertical")


@pytest.mark.parametrize("seed", range(4))
def test_horizontal_forms_depend_only_on_vertical_bundle(seed):
    rng = random.Random(seed)
    c = random_connection(C, 1 + seed % 2, seed=seed)
    c2 = shear_connection(c, seed=seed + 50)
    assert c2.phi != c.phi
    # same vertical image
    assert postcompose(c2.phi, c.phi) == c.phi
    for p in range(4):
        w = h_star(c, random_form(rng, C, p))
        assert horizontality(c2, w, "horizontal")
        v = random_form(rng, C, p)
        assert horizontality(c, v, "horizontal") == horizontality(c2, v, "horizontal")
