"""Walk through a small connection on R^3 with nonzero curvature.

The horizontal space is spanned by d/x and d/y + x d/z, so the vertical
projection is phi = dz - x dy, tensored with d/z.  Horizontal lifts do not
commute, which shows up as R = dx^dy (*) d/z.
"""

from fnforms import Chart, cocurvature, cov_D, cov_d, curvature, insert, make_connection, parse_scalar_form, render_form
from fnforms.operators import HStar

chart = Chart(("x", "y", "z"))
conn = make_connection(chart, [[0, 0, 0], [0, 0, 0], [0, "-x", 1]])
print("phi   =", render_form(conn.phi))
print("h     =", render_form(conn.h))
print("R     =", render_form(curvature(conn)))
print("Rbar  =", render_form(cocurvature(conn)))

# d^h and D^h agree on functions but differ on 1-forms by the curvature term.
for text in ("(z)", "(1) z", "(x*y) x"):
    w = parse_scalar_form(chart, text)
    Dh, dh = cov_D(conn)(w), cov_d(conn)(w)
    print(f"\nw = {render_form(w)}")
    print("  h*w        =", render_form(HStar(conn)(w)))
    print("  D^h w      =", render_form(Dh))
    print("  d^h w      =", render_form(dh))
    print("  difference =", render_form(dh - Dh))
    print("  i^h(R) w   =", render_form(insert(curvature(conn), w, conn.h)))
