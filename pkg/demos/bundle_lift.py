"""Lift forms from the base of a product bundle U x S to the total space.

The connection is given by lift coefficients gamma; chi lifts base vectors
horizontally and chi_* lifts vector valued forms.  The lift is a bracket
homomorphism whenever the connection is flat, and the failure is measured
by the curvature otherwise.
"""

from fnforms import chi_lift, chi_star, curvature, fn_bracket, induced_connection, make_bundle, parse_vector_form, render_form

pb = make_bundle(("x", "y"), ("s",), [["s", "x"]])
conn = induced_connection(pb)
print("phi =", render_form(conn.phi))
print("R   =", render_form(curvature(conn)))

X = parse_vector_form(pb.base, "(1) (*) d/x")
Y = parse_vector_form(pb.base, "(1) (*) d/y")
print("\nchi(d/x) =", render_form(chi_lift(pb, X)))
print("chi(d/y) =", render_form(chi_lift(pb, Y)))
print("[chi X, chi Y] =", render_form(fn_bracket(chi_lift(pb, X), chi_lift(pb, Y))))

K = parse_vector_form(pb.base, "(y) x (*) d/y")
print("\nchi_*K =", render_form(chi_star(pb, K)))
