"""Numerical toolkit for reductive Cartan geometries.

Core objects: matrix Lie algebras with reductive splits (`lie_core`),
concrete geometries built by mutation or from chart metrics (`models`),
curvature and covariant-derivative calculus (`calculus`), trajectory
computations (`transport`), and theorem-level verifiers (`analysis`,
`verify`) surfaced through the `cartan` command line (`cli`).
"""

from .analysis import (
    CompletenessReport,
    GeodesicMapSpec,
    MapReport,
    completeness_report,
    connect_by_geodesic,
    sl2_exp_reachable,
    trotter_probe,
    verify_geodesic_map,
)
from .calculus import (
    CurvatureValue,
    EquivariantField,
    constant_curvature_probe,
    covariant_derivative,
    curvature,
    check_structure_identities,
    star_identity_residual,
    torsion,
)
from .errors import (
    CartanError,
    DegenerateMetric,
    DomainError,
    FieldError,
    InvalidDimension,
    InvalidMutation,
    NoGeodesicFound,
    NotAnIsomorphism,
    NotInAlgebra,
    NumericalFailure,
    OutOfChart,
    ParseError,
    PrincipalLogUndefined,
    SignatureError,
    UnknownModel,
    UnknownSymbol,
    Unsupported,
)
from .expressions import ExpressionAst, parse_expression
from .lie_core import (
    AlgebraVector,
    MatrixAlgebra,
    ModelPair,
    ValidationReport,
    adjoint,
    bracket,
    group_exp,
    group_log,
    validate_reductive,
)
from .models import (
    CATALOG_NAMES,
    Domain,
    GaugeGeometry,
    GaugePoint,
    MetricField,
    MutationGeometry,
    build_gauge_from_metric,
    build_mutation,
    catalog,
    geometry_from_dict,
    geometry_to_dict,
    load_geometry,
    save_geometry,
)
from .transport import (
    GeodesicSpec,
    JacobiState,
    JacobiTrace,
    LiftedCurve,
    Status,
    Trace,
    TraceSample,
    develop,
    geodesic,
    geodesic_lift_curve,
    jacobi_field,
    parallel_transport,
)
from .verify import SUITES, run_all, run_suite

__version__ = "0.1.0"
