"""Branched one-sided minimal surfaces from Weierstrass data.

Construction and verification of the generalized one-sided branched minimal
surfaces indexed by complexity, their period problems, explicit families,
Björling solutions for hypocycloids, isometry groups, and mesh export.
"""

from .algebra import (
    BranchConfiguration,
    LaurentPoly,
    cis_pi,
    expand_product,
    extend_by_pair,
    invert_radial_gap,
    radial_gap,
    residue_at_zero,
)
from .errors import (
    ConvergenceError,
    DomainError,
    HennebergError,
    PeriodError,
    QuadratureError,
    StructureError,
)
from .geometry import (
    AnalyticPlanarCurve,
    BjorlingPatch,
    IsometryCertificate,
    ParameterMap,
    RigidMotion,
    TrigTerm,
    astroid_curve,
    bjorling_solve,
    circle_curve,
    cusp_count,
    enumerate_isometries,
    equator_curve,
    fit_rigid_motion,
    flux_exactness,
    hypocycloid_curve,
    verify_isometry,
)
from .meshing import Mesh, SamplingSpec, build_mesh, read_obj, read_ply, write_obj, write_ply
from .period import (
    FamilyPoint,
    ModuliPoint,
    PeriodResiduals,
    SearchHit,
    brute_search_m1,
    continue_from,
    family_theta2,
    h2_point,
    horizontal_residual_m2,
    horizontal_residual_m2_alt,
    m1_residual,
    period_jacobian_m2,
    period_jacobian_m2_fd,
    period_residuals,
    symmetric_example,
    vertical_residual_m2,
)
from .reports import verification_report
from .surfaces import (
    Hypocycloid,
    SurfaceMap,
    eval_associated,
    eval_h1,
    eval_hm_even,
    eval_hm_odd,
    eval_limit_m2,
    hypocycloid_point,
    limit_m2_data,
    one_sided_descent_residual,
    surface_h1,
    surface_hm,
    surface_integrated,
    surface_limit_m2,
    symmetric_phase,
)
from .weierstrass import (
    Immersion,
    IntegratedForms,
    StabilityReport,
    WeierstrassData,
    default_base,
    form_residues,
    immersion,
    integrate_forms,
    metric_density,
    one_sided_residual,
    phi_forms,
    stability_report,
    unit_normal,
)

__version__ = "0.1.0"
