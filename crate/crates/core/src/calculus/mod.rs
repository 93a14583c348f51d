//! Weighted norms, spectral operators, Besov norms, the Wiener mass and
//! the radial fast path.

pub(crate) mod besov;
mod operators;
pub mod radial;
pub(crate) mod wiener;

pub use besov::{besov_norm, lp_norm, BesovSpec, NormResult};
pub use operators::{bessel_potential, mixed_derivative, riesz_laplacian, RIESZ_MEAN_TOLERANCE};
pub use wiener::{radial_magnitudes, wiener_mass, wiener_profile, WienerPoint};
