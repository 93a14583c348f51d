use crate::grid::{fourier_transform, SampledField, Spectrum};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WienerPoint {
    pub radius: f64,
    pub mass: f64,
}

/// `(|ξ_m|, |F(ξ_m)|)` sorted by radius (ties by lattice index).
pub fn radial_magnitudes(spectrum: &Spectrum) -> Vec<(f64, f64)> {
    let grid = spectrum.grid();
    let mut out: Vec<(f64, f64)> = spectrum
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (grid.frequency_radius(i), v.norm()))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn mass_weight(spectrum: &Spectrum) -> f64 {
    let grid = spectrum.grid();
    grid.frequency_cell() / (2.0 * PI).powi(grid.dim() as i32)
}

/// `(2π)^{-n} ∫_{|ξ| ≤ R} |Ff| dξ`; `None` integrates the whole lattice.
pub fn wiener_mass(f: &SampledField, radius: Option<f64>) -> f64 {
    let spectrum = fourier_transform(f);
    let r = radius.unwrap_or(f64::INFINITY);
    let grid = spectrum.grid();
    let sum: f64 = spectrum
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.frequency_radius(*i) <= r)
        .map(|(_, v)| v.norm())
        .sum();
    sum * mass_weight(&spectrum)
}

/// `W(R)` at each requested radius, from one transform.
pub fn wiener_profile(f: &SampledField, radii: &[f64]) -> Vec<WienerPoint> {
    profile_of(&fourier_transform(f), radii)
}

pub(crate) fn profile_of(spectrum: &Spectrum, radii: &[f64]) -> Vec<WienerPoint> {
    let weight = mass_weight(spectrum);
    let sorted = radial_magnitudes(spectrum);
    let mut cumulative = Vec::with_capacity(sorted.len());
    let mut acc = 0.0;
    for (_, m) in &sorted {
        acc += m;
        cumulative.push(acc);
    }
    radii
        .iter()
        .map(|&r| {
            let count = sorted.partition_point(|(t, _)| *t <= r);
            let mass = if count == 0 { 0.0 } else { cumulative[count - 1] * weight };
            WienerPoint { radius: r, mass }
        })
        .collect()
}
