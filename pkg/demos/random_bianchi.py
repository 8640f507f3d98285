"""Check the Bianchi identities on a handful of random connections.

Each connection is a constant projection conjugated by polynomial shears,
so phi stays exactly idempotent while its entries become polynomials.
"""

import sys

from fnforms import Chart, cocurvature, curvature, fn_bracket, insert_vv, random_connection

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
chart = Chart(("x", "y", "z"))
for i in range(4):
    conn = random_connection(chart, 1 + i % 2, seed=seed + i)
    R, Rbar = curvature(conn), cocurvature(conn)
    print(f"connection {i}: rank {conn.rank}")
    # a rank-1 phi in dimension 3 has R != 0, Rbar == 0; rank 2 the other way round
    print("  R == 0:", R.is_zero(), " Rbar == 0:", Rbar.is_zero())
    print("  [R + Rbar, phi] == 0:", fn_bracket(R + Rbar, conn.phi).is_zero())
    print("  [R, phi] == i(R)Rbar + i(Rbar)R:", fn_bracket(R, conn.phi) == insert_vv(R, Rbar) + insert_vv(Rbar, R))
