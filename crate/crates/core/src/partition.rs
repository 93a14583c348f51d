//! Littlewood–Paley dyadic partition of unity on the frequency lattice.

use crate::error::{Error, Result};
use crate::grid::{fourier_transform, inverse_fourier, norm, Grid, SampledField, Spectrum};
use crate::smooth::{flat_exp, smooth_step};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The radial generator: 1 on `[0, 1]`, 0 on `[2, ∞)`.
pub fn chi(t: f64) -> f64 {
    // Complement of the smooth step, computed without cancellation.
    if t <= 1.0 {
        return 1.0;
    }
    if t >= 2.0 {
        return 0.0;
    }
    let down = flat_exp(2.0 - t);
    down / (flat_exp(t - 1.0) + down)
}

/// `φ(t) = χ(t) - χ(2t)`, supported in `[1/2, 2]`.
pub fn phi(t: f64) -> f64 {
    if t <= 1.0 {
        smooth_step(2.0 * t, 1.0, 2.0)
    } else {
        chi(t)
    }
}

/// Partition `{φ(2^{-k}ξ)}` restricted to the blocks `k_lo..=k_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicPartition {
    pub k_lo: i32,
    pub k_hi: i32,
}

/// `(⌈log₂(2π/L)⌉, ⌊log₂(πN/(4L))⌋)`: blocks whose annulus fits between
/// the fundamental frequency and the Nyquist frequency.
pub fn resolvable_range(grid: &Grid) -> (i32, i32) {
    let lo = (2.0 * PI / grid.half_width()).log2().ceil() as i32;
    let hi = (grid.nyquist() / 2.0).log2().floor() as i32;
    (lo, hi)
}

impl DyadicPartition {
    /// The full resolvable range of `grid`.
    pub fn for_grid(grid: &Grid) -> Result<Self> {
        let (k_lo, k_hi) = resolvable_range(grid);
        Self::with_range(k_lo, k_hi)
    }

    pub fn with_range(k_lo: i32, k_hi: i32) -> Result<Self> {
        if k_lo > k_hi {
            return Err(Error::EmptyRange);
        }
        Ok(DyadicPartition { k_lo, k_hi })
    }

    pub fn blocks(&self) -> impl Iterator<Item = i32> {
        self.k_lo..=self.k_hi
    }

    /// `Σ_{k_lo}^{k_hi} φ(2^{-k} t)`, summed block by block.
    pub fn coverage(&self, t: f64) -> f64 {
        self.blocks().map(|k| lp_radial(k, t)).sum()
    }

    /// Symbol of the low-pass remainder below `k_lo`, `χ(2^{1-k_lo} t)`.
    pub fn remainder(&self, t: f64) -> f64 {
        chi(scale2(t, 1 - self.k_lo))
    }
}

fn scale2(t: f64, e: i32) -> f64 {
    t * 2f64.powi(e)
}

fn lp_radial(k: i32, t: f64) -> f64 {
    phi(scale2(t, -k))
}

/// `φ(2^{-k}ξ)`.
pub fn lp_symbol(k: i32, xi: &[f64]) -> f64 {
    lp_radial(k, norm(xi))
}

/// `Fψ(ξ) = 1 - Σ_{k≥1} φ(2^{-k}ξ)`, which telescopes to `χ(|ξ|)`.
pub fn low_pass_symbol(xi: &[f64]) -> f64 {
    chi(norm(xi))
}

fn check_block(grid: &Grid, k: i32) -> Result<()> {
    let lo = scale2(1.0, k - 1);
    let hi = scale2(1.0, k + 1);
    let band_lo = grid.frequency_step();
    let band_hi = grid.nyquist();
    if hi <= band_lo || lo >= band_hi {
        return Err(Error::OutOfBand {
            k,
            lo: band_lo,
            hi: band_hi,
        });
    }
    Ok(())
}

/// `F⁻¹[φ(2^{-k}ξ) Ff]`.
pub fn lp_block(f: &SampledField, k: i32) -> Result<SampledField> {
    check_block(f.grid(), k)?;
    Ok(block_of(&fourier_transform(f), k))
}

pub(crate) fn block_of(spectrum: &Spectrum, k: i32) -> SampledField {
    let mut out = inverse_fourier(&spectrum.apply_radial(|t| lp_radial(k, t)));
    out.label = format!("block {k}");
    out
}

/// Sum of all blocks of `partition` plus the low-pass remainder below it.
pub fn reconstruct(f: &SampledField, partition: &DyadicPartition) -> SampledField {
    let spectrum = fourier_transform(f);
    let mut out = inverse_fourier(&spectrum.apply_radial(|t| partition.remainder(t)));
    for k in partition.blocks() {
        out = out.add(&block_of(&spectrum, k)).expect("same grid");
    }
    out.label = "reconstruction".into();
    out
}

/// `max |Σ_k φ(2^{-k}ξ_m) - 1|` over the nonzero lattice frequencies inside
/// the fully covered band `2^{k_lo} ≤ |ξ| ≤ 2^{k_hi}` of `grid`.
pub fn partition_check(partition: &DyadicPartition, grid: &Grid) -> f64 {
    let (lo, hi) = resolvable_range(grid);
    let (lo, hi) = (scale2(1.0, lo), scale2(1.0, hi));
    (0..grid.len())
        .map(|i| grid.frequency_radius(i))
        .filter(|&t| t > 0.0 && t >= lo && t <= hi)
        .map(|t| (partition.coverage(t) - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Spectral energy fraction left uncovered by a symbol `S(|ξ|)`:
/// `Σ|F|²(1-S)² / Σ|F|²`, zero for a zero spectrum.
pub(crate) fn uncovered_fraction(spectrum: &Spectrum, cover: impl Fn(f64) -> f64) -> f64 {
    let grid = spectrum.grid();
    let mut total = 0.0;
    let mut outside = 0.0;
    for (i, v) in spectrum.values().iter().enumerate() {
        let e = v.norm_sqr();
        let gap = 1.0 - cover(grid.frequency_radius(i));
        total += e;
        outside += e * gap * gap;
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}
