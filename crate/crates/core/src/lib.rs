//! Projective logarithmic potential theory on complex projective space.
//!
//! The toolkit evaluates the logarithmic kernel `log sin(d/sqrt 2)` and its
//! affine-chart form, potentials and energies of discrete measures, Monte
//! Carlo energies of sampled measures, logarithmic capacity through
//! equilibrium-measure optimization on the simplex, transfinite diameter
//! through Fekete configurations, Chebyshev constants through max-min search,
//! and the Evans construction of measures with prescribed polar sets.
//!
//! All numeric kernels are generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the aliases at the crate root pin the binary64 instances
//! the CLI and the acceptance suite use. Every randomized routine threads an
//! explicit seed and derives per-index streams, so results are reproducible
//! bit-for-bit at any thread count.

pub mod acceptance;
pub mod capacity;
pub mod chebyshev;
pub mod error;
pub mod evans;
pub mod fekete;
pub mod geometry;
pub mod io;
pub mod measures;
mod rng;
pub mod scalar;
pub mod sets;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ProjectivePoint64 = geometry::ProjectivePoint<f64>;
pub type AffinePoint64 = geometry::AffinePoint<f64>;
pub type DiscreteMeasure64 = measures::DiscreteMeasure<f64>;
pub type MeasureSampler64 = measures::MeasureSampler<f64>;
pub type EnergyEstimate64 = measures::EnergyEstimate<f64>;
pub type SetSpec64 = sets::SetSpec<f64>;
pub type FeketeConfig64 = fekete::FeketeConfig<f64>;
pub type FeketeOpts64 = fekete::FeketeOpts<f64>;
pub type ChebyshevResult64 = chebyshev::ChebyshevResult<f64>;
pub type ChebyshevOpts64 = chebyshev::ChebyshevOpts<f64>;
pub type EquilibriumResult64 = capacity::EquilibriumResult<f64>;
pub type EquilibriumOpts64 = capacity::EquilibriumOpts<f64>;
pub type EvansCertificate64 = evans::EvansCertificate<f64>;

pub type ProjectivePoint32 = geometry::ProjectivePoint<f32>;
pub type DiscreteMeasure32 = measures::DiscreteMeasure<f32>;
pub type SetSpec32 = sets::SetSpec<f32>;
