"""Construct, deform and certify great circle fibrations of odd-dimensional spheres."""

__version__ = "0.1.0"

from .angles import (
    AngleProfile,
    ComplexSubspace,
    RealSubspace,
    aligning_isometry_conjugate,
    aligning_isometry_real,
    principal_angles_complex,
    principal_angles_conjugate,
    principal_angles_greedy,
    principal_angles_real,
)
from .exceptions import *  # noqa: F401,F403
from .fibration import (
    BumpProfile,
    FibrationBase,
    GermComposite,
    GermSpec,
    build_fibration,
    bump_eval,
    bump_slope,
    eval_base,
    eval_dN,
    extend_germ,
    extend_structure,
    hopf_fibre_through,
    hopf_map,
    slope_sup,
    transversality_margin,
    verify_fibration,
)
from .grassmann import (
    GreatCircle,
    OrientedTwoPlane,
    chart_to_plane,
    hopf_base_chart,
    immersion_check,
    in_bad_set,
    plane_to_chart,
    planes_intersect,
    transverse_to_bad_cone,
)
from .numeric import (
    ConjugateSplit,
    bezout_projectors,
    eigen_split,
    has_real_eigenvalue,
    min_singular_value,
    orthonormalize,
)
from .report import CheckRecord, Report
from .structures import (
    ComplexStructure,
    RetractionPath,
    full_retraction,
    is_orthogonal_structure,
    make_complex_structure,
    mckay_path,
    open_scissors,
)
