"""Kinetostatic conditioning of planar n-revolute manipulators.

The index is the Frobenius distance between the length-normalized Jacobian and
an isotropic model matrix built from a planar point set; the normalizing
length at the best posture is the manipulator's characteristic length.
"""
from .conditioning import (
    ConditioningResult,
    ModelMatrix,
    NormalizedJacobian,
    analyze,
    condition_number,
    conditioning_length,
    frobenius_distance,
    model_matrix,
    normalized_jacobian,
    optimal_alpha,
    z_value,
)
from .errors import (
    ConfigError,
    DegenerateAlignmentError,
    EmptyRegionError,
    IndeterminateRotationError,
    InvalidArgumentError,
    IsocondError,
    PreconditionError,
)
from .geometry import (
    IsotropyReport,
    PointSet2,
    centroid,
    check_isotropy,
    d_rms,
    geometric_inertia,
    reflect_set,
    rotate_set,
    second_moment,
    trivial_set,
    union_sets,
)
from .isocontour import (
    Contour,
    WorkspaceMeasure,
    ZGrid,
    evaluate_grid,
    extract_isocontours,
    workspace_area,
)
from .kinematics import JacobianBlocks, Manipulator, Posture, jacobian, joint_centers, r_vectors
from .optimize import (
    OptimizationConfig,
    OptimumPosture,
    characteristic_length,
    optimum_posture,
    random_audit,
    singularity_proximity,
)

__version__ = "0.1.0"
