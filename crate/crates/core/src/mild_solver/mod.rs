//! Mild solutions by Picard iteration on the Duhamel formulation, with an
//! exponential time-differencing reference integrator and paraproduct diagnostics.

mod checkpoint;
mod config;
mod duhamel;
mod etd;
mod paraproduct;
mod picard;
mod stats;
mod trajectory;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use config::SolverConfig;
pub use duhamel::{duhamel_bilinear, duhamel_path, nonlinear_term};
pub use etd::etd_march;
pub use paraproduct::{paraproduct_split, ParaproductSplit};
pub use picard::{picard_solve, IterationDiagnostics, PicardStatus};
pub use stats::{
    bilinear_constant_estimate, iteration_smallness_scan, random_divergence_free, write_scan_csv, BilinearStats,
    ScanRow, ScanTable,
};
pub use trajectory::Trajectory;
