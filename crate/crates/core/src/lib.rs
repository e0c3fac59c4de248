//! Pseudorandom generators for products over finite groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: Cayley-table groups, the named catalog, subgroup queries.
//! * [`rep`]: unitary irreducible representations, non-abelian Fourier
//!   coefficients, operator norms and eigenphases.
//! * [`randomness`]: seeded samplers (small-bias, k-wise, biased marginals)
//!   and exact measurement of their guarantees.
//! * [`models`]: group programs and block products with a spill, restrictions.
//! * [`poly`]: compiling programs over p-groups into low-degree polynomials.
//! * [`prg`]: the generator constructions.
//! * [`harness`]: exact and Monte-Carlo distances, experiments, calibration.

pub mod group;
pub mod harness;
pub mod models;
pub mod poly;
pub mod prg;
pub mod randomness;
pub mod rep;

pub use group::{catalog_group, FiniteGroup};
pub use models::BlockProduct;
pub use randomness::Sampler;


