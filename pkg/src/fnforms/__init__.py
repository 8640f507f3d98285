"""Exact symbolic calculus of vector valued differential forms on charts.

Polynomial coefficients over the rationals, the Frolicher-Nijenhuis
bracket, connections given as projections, and the algebra of graded
derivations over ``h^*``.
"""

from .bundle import ProductBundle, chi_lift, chi_star, induced_connection, make_bundle, pullback_base
from .connection import (
    Connection,
    cocurvature,
    curvature,
    h_star,
    horizontality,
    is_h_equivariant,
    make_connection,
    random_connection,
)
from .errors import (
    ChartMismatch,
    DegreeError,
    DerivationCheckFailed,
    ExtractionInconsistent,
    FiberDependence,
    FnFormsError,
    NonConstantTrace,
    NotEquivariant,
    NotIdempotent,
    NotInDerH,
    ParseError,
    UnknownSuite,
)
from .forms import (
    ScalarForm,
    VectorForm,
    alg_bracket,
    eval_form,
    ext_d,
    fn_bracket,
    fn_bracket_deg1_oracle,
    insert,
    insert_vv,
    lie_bracket,
    lie_derivative,
    postcompose,
    precompose,
    pullback_by,
    render_form,
    wedge,
    wedge_vv,
)
from .io import load_bundle, load_connection, parse_form, parse_scalar_form, parse_vector_form
from .operators import (
    Operator,
    apply,
    cov_D,
    cov_d,
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
    theta,
    theta_h,
)
from .poly import Chart, Poly, Rational, parse_poly, render_poly
from .suites import SuiteReport, parse_report, render_report, suite_ids, verify_suite

__version__ = "0.1.0"
