"""Recover (K, L) from a derivation over h^* built out of known pieces.

Every graded derivation D over h^* splits uniquely as
Theta(K) h^* + i(L); here we build one, forget how, and split it again.
Then we split the commutator [d, h^*], whose pieces are phi and R + Rbar.
"""

import random

from fnforms import Chart, cocurvature, curvature, decompose, graded_commutator, random_connection, theta
from fnforms.operators import Compose, HStar, Insert, d_op
from fnforms.sampling import random_vector_form

chart = Chart(("x", "y", "z"))
conn = random_connection(chart, 1, seed=7)
rng = random.Random(7)
K0 = random_vector_form(rng, chart, 1)
L0 = random_vector_form(rng, chart, 2)

D = Compose(theta(K0), HStar(conn)) + Insert(L0, conn)
K, L = decompose(D, conn)
print("K recovered:", K == K0)
print("L recovered:", L == L0)

K, L = decompose(graded_commutator(d_op(chart), HStar(conn)), conn)
print("[d, h*] -> K == phi:", K == conn.phi)
print("[d, h*] -> L == R + Rbar:", L == curvature(conn) + cocurvature(conn))
