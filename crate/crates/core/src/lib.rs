//! Numerics for Wiener-algebra membership: FFT-based Fourier transforms on
//! uniform grids, Littlewood–Paley blocks, weighted Besov and Bessel
//! potential norms, chirp models, a symbolic criterion engine and the
//! experiments that tie them together.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod criteria;
pub mod dump;
pub mod error;
pub mod experiments;
pub mod exponent;
mod fft;
pub mod grid;
pub mod models;
pub mod partition;
pub mod smooth;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{
    dilate, fourier_transform, inverse_fourier, pointwise, Grid, Normalization, Operand,
    PointwiseOp, SampledField, Spectrum,
};
pub use models::{ChirpParams, CutoffSpec, ModelField, ModelKind};
pub use partition::DyadicPartition;
pub use weights::WeightSpec;
