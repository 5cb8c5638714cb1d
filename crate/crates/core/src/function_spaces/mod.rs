//! Besov, Besov-Q and tent-space norms computed from wavelet coefficients.

mod besov;
mod cells;
mod params;
mod qspace;
mod report;
mod tent;

pub use besov::{
    besov_norm, besovq_at, besovq_norm, check_embedding, cube_levels, dilate, scaling_check, EmbeddingCheck,
    ScalingCheck,
};
pub use params::{DyadicCube, SpaceParams};
pub use qspace::qspace_norm_direct;
pub use report::{write_reports_csv, NormReport, Witness};
pub use tent::{
    besov_infinity_norm, besov_infinity_parts, log_time_grid, tent_functional, tent_i, tent_ii, tent_iii, tent_iv,
    tent_norm, tent_value_at, CoefficientTrajectory, TentKind, TentNorm,
};
