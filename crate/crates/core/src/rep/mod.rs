//! Unitary irreducible representations, non-abelian Fourier analysis,
//! operator norms, eigenphases and the mixing classifiers.
//!
//! Phases are measured in turns: eigenvalue `e^{2 pi i t}` has phase `t`.

mod cmatrix;
mod fourier;
pub mod io;
mod irreps;
mod mixing;
mod spectral;

use thiserror::Error;

pub use cmatrix::CMatrix;
pub use fourier::{closeness_bound, fourier_coefficient, parseval_residual, Closeness, GDistribution, MASS_TOL};
pub use irreps::{irrep_catalog, validate_irrep_set, Irrep, IrrepSet, ValidationReport, CHAR_TOL, HOM_TOL};
pub use mixing::{
    fixed_space_dim, is_mixing, is_mixing_element_level, ker_subrep_check, MixingVerdict, IDENTITY_TOL,
    PHASE_ZERO_TOL,
};
pub use spectral::{
    char_poly, eigenphases, half_sum_norm_check, op_norm, phase_turns, roots_closed_form, HalfSumCheck,
    UNITARY_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("no irrep catalog entry for group {0:?}")]
    NoCatalogEntry(String),
    #[error("power iteration did not converge")]
    NoConvergence,
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("dimension {dim} exceeds the limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("eigenphase {phase} has magnitude below theta = {theta}")]
    PhaseTooSmall { phase: f64, theta: f64 },
    #[error("masses sum to {total}, not 1")]
    NotADistribution { total: f64 },
}
