//! Uniform grids on `[-L, L)^n` and the continuous Fourier transform
//! `F f(ξ) = ∫ f(x) e^{-i(ξ,x)} dx` realised by rectangle-rule quadrature.
//!
//! Samples sit at `x_j = -L + j h` with `h = 2L/N`; spectra sit at
//! `ξ_m = π m / L` for `m ∈ [-N/2, N/2)`, stored in increasing order of `m`.
//! Both arrays are row-major with axis 1 slowest.

use crate::error::{Error, Result};
use crate::fft::{fft_nd, map_lines};
use crate::models::ModelField;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const MAX_DIM: usize = 3;

/// Fraction of the L2 mass a dilation must keep on the grid.
pub const DILATION_MASS_RETENTION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    points: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width {half_width} must be positive"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{points} samples per axis is not a power of two >= 8"
            )));
        }
        if points.checked_pow(dim as u32).is_none() {
            return Err(Error::InvalidGrid("grid too large".into()));
        }
        Ok(Grid {
            dim,
            half_width,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Total number of samples, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency spacing `π / L`.
    pub fn frequency_step(&self) -> f64 {
        PI / self.half_width
    }

    /// Nyquist frequency `π N / (2L)`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points as f64 / (2.0 * self.half_width)
    }

    /// Quadrature weight `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume element of the frequency lattice, `(π/L)^n`.
    pub fn frequency_cell(&self) -> f64 {
        self.frequency_step().powi(self.dim as i32)
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn frequency(&self, i: usize) -> f64 {
        (i as f64 - (self.points / 2) as f64) * self.frequency_step()
    }

    /// Per-axis indices of a flat index; unused trailing slots are zero.
    pub fn indices(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % self.points;
            rest /= self.points;
        }
        out
    }

    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.indices(flat);
        let mut p = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            p[axis] = self.coordinate(idx[axis]);
        }
        p
    }

    pub fn wavevector(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.indices(flat);
        let mut p = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            p[axis] = self.frequency(idx[axis]);
        }
        p
    }

    pub fn radius(&self, flat: usize) -> f64 {
        norm(&self.position(flat)[..self.dim])
    }

    pub fn frequency_radius(&self, flat: usize) -> f64 {
        norm(&self.wavevector(flat)[..self.dim])
    }

    fn parity(&self, flat: usize) -> bool {
        self.indices(flat)[..self.dim].iter().sum::<usize>() % 2 == 1
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Samples of a function on a [`Grid`].
#[derive(Debug, Clone)]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
    pub label: String,
    model: Option<ModelField>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(SampledField {
            grid,
            values,
            label: label.into(),
            model: None,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledField {
            grid,
            values: vec![Complex64::default(); grid.len()],
            label: "zero".into(),
            model: None,
        }
    }

    /// Evaluate `f` at every grid point.
    pub fn from_fn(
        grid: Grid,
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> Complex64 + Sync,
    ) -> Result<Self> {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.position(i)[..grid.dim]))
            .collect();
        Self::new(grid, values, label)
    }

    pub(crate) fn with_model(mut self, model: ModelField) -> Self {
        self.model = Some(model);
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// The symbolic model these samples came from, if any.
    pub fn model(&self) -> Option<&ModelField> {
        self.model.as_ref()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rectangle-rule `∫|f|^2`.
    pub fn energy(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn add(&self, other: &SampledField) -> Result<SampledField> {
        pointwise(PointwiseOp::Add, self, Operand::Field(other))
    }

    pub fn mul(&self, other: &SampledField) -> Result<SampledField> {
        pointwise(PointwiseOp::Mul, self, Operand::Field(other))
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> SampledField {
        let c = c.into();
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> SampledField {
        self.map(|v| v.conj())
    }

    pub fn abs_pow(&self, p: f64) -> SampledField {
        self.map(|v| Complex64::new(v.norm().powf(p), 0.0))
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SampledField {
        SampledField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            label: self.label.clone(),
            model: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Values approximate `∫ f(x) e^{-i(ξ,x)} dx`.
    ContinuousForward,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    values: Vec<Complex64>,
    pub normalization: Normalization,
}

impl Spectrum {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} spectral values for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Spectrum {
            grid,
            values,
            normalization: Normalization::ContinuousForward,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        Spectrum {
            grid,
            values: vec![Complex64::default(); grid.len()],
            normalization: Normalization::ContinuousForward,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn nyquist(&self) -> f64 {
        self.grid.nyquist()
    }

    /// Multiply by a symbol `σ(ξ)`.
    pub fn apply_symbol(&self, symbol: impl Fn(&[f64]) -> Complex64) -> Spectrum {
        let dim = self.grid.dim;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * symbol(&self.grid.wavevector(i)[..dim]))
            .collect();
        Spectrum {
            grid: self.grid,
            values,
            normalization: self.normalization,
        }
    }

    /// Multiply by a radial real symbol `σ(|ξ|)`.
    pub fn apply_radial(&self, symbol: impl Fn(f64) -> f64) -> Spectrum {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * symbol(self.grid.frequency_radius(i)))
            .collect();
        Spectrum {
            grid: self.grid,
            values,
            normalization: self.normalization,
        }
    }

    /// Discrete `(2π)^{-n} ∫ |F|^2 dξ`.
    pub fn energy(&self) -> f64 {
        let w = self.grid.frequency_cell() / (2.0 * PI).powi(self.grid.dim as i32);
        w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

/// Multiply by `scale · (-1)^{Σ indices}`, one row at a time.
fn checkerboard(grid: &Grid, values: &mut [Complex64], scale: f64) {
    let len = grid.points;
    for (row, line) in values.chunks_exact_mut(len).enumerate() {
        let mut factor = if grid.parity(row * len) { -scale } else { scale };
        for v in line {
            *v *= factor;
            factor = -factor;
        }
    }
}

/// `h^n Σ_j f(x_j) e^{-i(ξ_m, x_j)}` for every lattice frequency.
///
/// The centred sample and frequency lattices turn into a plain DFT once both
/// sides are multiplied by `(-1)^{Σ indices}` (N/2 is even for N >= 8).
pub fn fourier_transform(f: &SampledField) -> Spectrum {
    let grid = f.grid;
    let mut data = f.values.clone();
    checkerboard(&grid, &mut data, 1.0);
    fft_nd(&mut data, grid.dim, grid.points, FftDirection::Forward);
    checkerboard(&grid, &mut data, grid.cell_volume());
    Spectrum {
        grid,
        values: data,
        normalization: Normalization::ContinuousForward,
    }
}

/// `(2π)^{-n} Σ_m F(ξ_m) e^{i(ξ_m,x_j)} (π/L)^n`, the exact inverse of
/// [`fourier_transform`] on the lattice.
pub fn inverse_fourier(spectrum: &Spectrum) -> SampledField {
    let grid = spectrum.grid;
    let mut data = spectrum.values.clone();
    checkerboard(&grid, &mut data, 1.0);
    fft_nd(&mut data, grid.dim, grid.points, FftDirection::Inverse);
    checkerboard(&grid, &mut data, 1.0 / (grid.points as f64 * grid.spacing()).powi(grid.dim as i32));
    SampledField {
        grid,
        values: data,
        label: "inverse_fourier".into(),
        model: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointwiseOp {
    Add,
    Mul,
    Scale,
    Conj,
    AbsPow(f64),
}

#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Field(&'a SampledField),
    Scalar(Complex64),
    None,
}

pub fn pointwise(op: PointwiseOp, a: &SampledField, b: Operand<'_>) -> Result<SampledField> {
    let combine = |f: &dyn Fn(Complex64, Complex64) -> Complex64| -> Result<SampledField> {
        match b {
            Operand::Field(other) => {
                a.grid.check_same(&other.grid)?;
                Ok(SampledField {
                    grid: a.grid,
                    values: a.values.iter().zip(&other.values).map(|(x, y)| f(*x, *y)).collect(),
                    label: format!("{}∘{}", a.label, other.label),
                    model: None,
                })
            }
            Operand::Scalar(c) => Ok(a.map(|x| f(x, c))),
            Operand::None => Err(Error::InvalidParameter("binary op needs an operand".into())),
        }
    };
    match op {
        PointwiseOp::Add => combine(&|x, y| x + y),
        PointwiseOp::Mul | PointwiseOp::Scale => combine(&|x, y| x * y),
        PointwiseOp::Conj => Ok(a.conj()),
        PointwiseOp::AbsPow(p) => Ok(a.abs_pow(p)),
    }
}

/// Samples of `x ↦ f(2^m x)` on the same grid.
///
/// Fields carrying a symbolic model are re-evaluated exactly. Otherwise
/// compression (`m > 0`) picks existing samples and stretching (`m < 0`)
/// uses zero-padded trigonometric interpolation, axis by axis.
pub fn dilate(f: &SampledField, m: i32) -> Result<SampledField> {
    if m == 0 {
        return Ok(f.clone());
    }
    let grid = f.grid;
    let out = match &f.model {
        Some(model) => model.dilated(m).sample(&grid)?,
        None => {
            let mut values = f.values.clone();
            for axis in 0..grid.dim {
                values = if m > 0 {
                    map_lines(&values, grid.dim, grid.points, axis, |line| decimate(line, m))
                } else {
                    map_lines(&values, grid.dim, grid.points, axis, |line| {
                        stretch(line, (-m) as u32)
                    })
                };
            }
            SampledField {
                grid,
                values,
                label: format!("{}(2^{m}·)", f.label),
                model: None,
            }
        }
    };
    let before = f.energy();
    if before > 0.0 {
        let retention = out.energy() * 2f64.powi(m * grid.dim as i32) / before;
        if retention < DILATION_MASS_RETENTION {
            return Err(Error::MassLoss { m, retention });
        }
    }
    Ok(out)
}

fn decimate(line: &[Complex64], m: i32) -> Vec<Complex64> {
    let n = line.len() as i64;
    let factor = 1i64 << m;
    (0..n)
        .map(|j| {
            // index of 2^m x_j on the same lattice
            let src = factor * j - (factor - 1) * n / 2;
            if (0..n).contains(&src) {
                line[src as usize]
            } else {
                Complex64::default()
            }
        })
        .collect()
}

fn stretch(line: &[Complex64], k: u32) -> Vec<Complex64> {
    let n = line.len();
    let factor = 1usize << k;
    let big = n * factor;
    let mut planner = FftPlanner::new();
    let mut coeffs = line.to_vec();
    planner.plan_fft_forward(n).process(&mut coeffs);

    let mut padded = vec![Complex64::default(); big];
    let half = n / 2;
    padded[..half].copy_from_slice(&coeffs[..half]);
    padded[big - half + 1..].copy_from_slice(&coeffs[half + 1..]);
    // split the Nyquist coefficient symmetrically
    padded[half] = coeffs[half] * 0.5;
    padded[big - half] = coeffs[half] * 0.5;
    planner.plan_fft_inverse(big).process(&mut padded);

    let offset = n * (factor - 1) / 2;
    let inv = 1.0 / n as f64;
    (0..n).map(|j| padded[j + offset] * inv).collect()
}
