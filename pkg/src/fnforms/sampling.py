"""Deterministic random test data: polynomials, forms, vector-valued forms.

All generators take a :class:`random.Random` so callers control seeding.
Coefficients are small nonzero integers and polynomials are sparse, which
keeps exact computations on generated connections tractable.
"""

from __future__ import annotations

import random
from itertools import combinations

from .forms import ScalarForm, VectorForm
from .poly import Chart, Poly, pack, raw_clean


def derive_seed(*parts) -> int:
    """Counter-based seed derivation: a pure function of ``parts``."""
    rng = random.Random(":".join(str(p) for p in parts))
    return rng.getrandbits(63)


def _random_exponents(rng: random.Random, n: int, max_degree: int):
    deg = rng.randint(0, max_degree)
    exps = [0] * n
    for _ in range(deg):
        exps[rng.randrange(n)] += 1
    return exps


def random_poly(
    rng: random.Random,
    chart: Chart,
    max_degree: int = 2,
    max_terms: int = 2,
    coeff_range: int = 2,
    nonconstant: bool = False,
) -> Poly:
    """Sparse random polynomial of total degree at most ``max_degree``."""
    n = chart.dim
    t = {}
    for _ in range(rng.randint(1, max_terms)):
        c = 0
        while c == 0:
            c = rng.randint(-coeff_range, coeff_range)
        key = pack(_random_exponents(rng, n, max_degree))
        t[key] = t.get(key, 0) + c
    if nonconstant and max_degree > 0 and all(k == 0 for k in t):
        exps = [0] * n
        exps[rng.randrange(n)] = rng.randint(1, max_degree)
        t[pack(exps)] = rng.choice([-1, 1])
    return Poly._raw(chart, raw_clean(t))


def random_form(
    rng: random.Random,
    chart: Chart,
    degree: int,
    max_degree: int = 2,
    density: float = 0.7,
    max_terms: int = 2,
) -> ScalarForm:
    """Random scalar ``degree``-form; each basis coefficient present with probability ``density``."""
    if not 0 <= degree <= chart.dim:
        return ScalarForm.zero(chart, degree)
    coeffs = {}
    basis = list(combinations(range(chart.dim), degree))
    for I in basis:
        if rng.random() < density:
            coeffs[I] = random_poly(rng, chart, max_degree, max_terms)
    if not coeffs:
        coeffs[rng.choice(basis)] = random_poly(rng, chart, max_degree, max_terms)
    return ScalarForm(chart, degree, coeffs)


def random_vector_form(
    rng: random.Random,
    chart: Chart,
    degree: int,
    max_degree: int = 2,
    density: float = 0.35,
    max_terms: int = 1,
) -> VectorForm:
    """Random element of Ω^degree(U; TU); never identically zero when in range."""
    if not 0 <= degree <= chart.dim:
        return VectorForm.zero(chart, degree)
    n = chart.dim
    coeffs = {}
    keys = [(I, j) for I in combinations(range(n), degree) for j in range(n)]
    for key in keys:
        if rng.random() < density:
            coeffs[key] = random_poly(rng, chart, max_degree, max_terms)
    if not coeffs:
        coeffs[rng.choice(keys)] = random_poly(rng, chart, max_degree, max_terms, nonconstant=True)
    return VectorForm(chart, degree, coeffs)

