"""Numerical machinery for dimensional-reduction geometry.

Subpackages by topic:

- :mod:`kkgeom.liealg` — split Lie algebras, structure-constant validation,
  Killing form, cosmological constant.
- :mod:`kkgeom.exterior` — sparse alternating forms, wedge/interior products,
  the epsilon coframe family and its structural identities.
- :mod:`kkgeom.fieldexpr` — analytic field expressions with exact symbolic
  derivatives.
- :mod:`kkgeom.basegeo` — coframes, anholonomy, the frame Levi-Civita
  connection and base curvature, gauge field strengths.
- :mod:`kkgeom.kkcurv` — the block connection on the total space, its
  curvature by two independent routes, Einstein-Yang-Mills residuals.
- :mod:`kkgeom.bundle` — matrix group representations, adjoint gauge maps,
  path lifting, gauge-covariance verification.
- :mod:`kkgeom.cli` — the batch front end (``kkgeom`` console script).
"""

from .basegeo import (BaseCurvature, ChartSpec, CoframeField, GaugeField,
                      GeometryAtPoint, anholonomy, base_curvature,
                      field_strength, frame_matrix, geometry_at_point,
                      levi_civita, load_fields)
from .bundle import (GroupElement, MatrixRep, PathSpec, adjoint_of,
                     builtin_rep, lift_path, verify_deextra,
                     verify_gauge_covariance)
from .errors import (DegenerateCoframeError, DegenerateMetricError,
                     DegreeError, EvalDomainError, ExprSyntaxError,
                     IntegratorError, KKGeomError, StructuralError,
                     UnknownIdentifierError)
from .exterior import (AlternatingForm, basis_one_form, check_identities,
                       d_substitute, epsilon_form, frame_vector, interior,
                       lie_wedge_1, lie_wedge_2, top_form, wedge)
from .fieldexpr import FieldProvider, diff, evaluate, parse, pretty
from .kkcurv import (EYMResidual, KKConnection, KKCurvature, assemble_omega,
                     cross_check, curvature_direct, eym_residuals,
                     ricci_closed_form)
from .liealg import (LAMBDA_PREFACTOR, LieAlgebraSpec, ValidationReport,
                     bracket, builtin_algebra, cosmological_constant,
                     killing_form, load_spec, su2_algebra, u1_su2_algebra,
                     validate_spec)

__version__ = "0.1.0"
