"""Numerical laboratory for the theta-holomorphic plane axiom on almost Hermitian manifolds."""

from .axiom import (
    ResidualRecord,
    axiom_scan,
    necessary_residuals,
    schur_scan,
    space_form_defect,
    theorem_check,
)
from .charts import ChartMetric, DiffConfig, catalog, hermitian_point, nabla_J_residual, riemann_tensor
from .curvature import constancy_scan, holomorphic_curvature, sectional_curvature
from .planes import TwoPlane, canonical_plane_basis, kahler_angle, make_theta_plane, orthonormalize
from .tensor import (
    CurvatureTensor,
    HermitianPoint,
    complex_space_form_tensor,
    evaluate,
    is_rk,
    pi1,
    pi2,
    real_space_form_tensor,
    symmetry_residuals,
    validate_point,
)

__version__ = "0.1.0"
