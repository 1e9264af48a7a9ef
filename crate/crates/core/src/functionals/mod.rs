//! Volumes, sections, the intersection functional, and the closed-form
//! bounds it is compared against.

mod bounds;
mod integrals;
mod measure;
mod special;

pub use bounds::{
    bound_constants, check_theorem, lune_bound, rhs_bound, rhs_from_volume, BoundKind, CheckOptions, ConcaveArgument,
    InequalityReport, ReportQuadrature, Sense, TheoremId, Verdict, REPORT_FORMAT_VERSION,
};
pub use integrals::{
    busemann_functional, intersection_functional, section_volume, section_volume_with, volume, volume_with,
    FunctionalOptions, QuadratureConfig,
};
pub use measure::{DensityKind, RadialDensityMeasure};
pub use special::{
    f_spherical, f_spherical_concave_limit, f_spherical_limit, fn_hyperbolic, fn_hyperbolic_inverse, g_hyperbolic,
    h_hyperbolic, min_inequality_check, phi_ratio_inequality_check, spherical_inner,
};
