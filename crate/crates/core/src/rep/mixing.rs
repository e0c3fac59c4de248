//! Mixing predicates and the eigenspace test for Dedekind groups.

use serde::Serialize;

use super::{eigenphases, CMatrix, IrrepSet, RepError};

/// `rho(g)` within this distance of `I` counts as the identity matrix.
pub const IDENTITY_TOL: f64 = 1e-9;
/// An eigenphase below this many turns counts as eigenvalue 1.
pub const PHASE_ZERO_TOL: f64 = 1e-6;
/// Relative pivot threshold for rank computations.
const RANK_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct MixingVerdict {
    pub mixing: bool,
    /// Smallest eigenphase magnitude (turns) over non-identity images; 0 if not mixing.
    pub theta: f64,
}

/// Matrix-level mixing: every image is either `I` or has no eigenvalue 1.
pub fn is_mixing(set: &IrrepSet) -> Result<MixingVerdict, RepError> {
    let mut theta: f64 = 0.5;
    for rho in &set.irreps {
        for m in &rho.images {
            if m.is_identity(IDENTITY_TOL) {
                continue;
            }
            let smallest = eigenphases(m)?.iter().map(|t| t.abs()).fold(f64::INFINITY, f64::min);
            if smallest < PHASE_ZERO_TOL {
                return Ok(MixingVerdict { mixing: false, theta: 0.0 });
            }
            theta = theta.min(smallest);
        }
    }
    Ok(MixingVerdict { mixing: true, theta })
}

/// Element-level reading: for every nontrivial irrep and every non-identity
/// element, the image has no eigenvalue 1. Kept for comparison only; it fails
/// for every group with a nontrivial quotient, Q8 and Z4 included.
pub fn is_mixing_element_level(set: &IrrepSet, identity: usize) -> Result<bool, RepError> {
    for rho in set.irreps.iter().filter(|r| !r.is_trivial(IDENTITY_TOL)) {
        for (g, m) in rho.images.iter().enumerate() {
            if g == identity {
                continue;
            }
            if eigenphases(m)?.iter().any(|t| t.abs() < PHASE_ZERO_TOL) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Dimension of the fixed space `ker(M - I)`.
pub fn fixed_space_dim(m: &CMatrix) -> usize {
    m.sub(&CMatrix::identity(m.dim())).nullity(RANK_TOL)
}

/// True iff every `ker(rho(g) - I)` is zero or everything, i.e. a
/// subrepresentation of the irreducible `rho`.
pub fn ker_subrep_check(set: &IrrepSet) -> bool {
    set.irreps.iter().all(|rho| {
        rho.images.iter().all(|m| {
            let k = fixed_space_dim(m);
            k == 0 || k == rho.dim
        })
    })
}
