//! Tensor Meyer wavelets on a periodic box and their exact Fourier-domain transforms.

pub mod basis;
pub mod coeffs;
pub mod io;
pub mod profile;
pub mod transform;

pub use basis::{finest_detail_scale, finest_scaling_scale, BasisSpec, WaveletIndex};
pub use coeffs::{CoefficientSet, Shell, ShellKey};
pub use profile::{eps_from_bits, meyer_ramp, omega, psi0, psi1, wavelet_hat, FrequencyProfile};
pub use transform::{analyze, analyze_shell, project_pj, project_qj, synthesize, synthesize_shell, Analysis};
