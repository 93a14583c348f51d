//! Versioned test ensembles. Members are defined by closed-form spectra,
//! so dilations and grid refinements resample them exactly.

use crate::error::{Error, Result};
use crate::grid::{inverse_fourier, Grid, SampledField, Spectrum};
use crate::models::{ModelField, ModelKind};
use crate::smooth::smooth_step;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const ENSEMBLE_VERSION: u32 = 1;

/// A localized field whose spectrum is a smooth annular bump on
/// `band` times a random trigonometric polynomial:
/// `Ff(ξ) = A(|ξ|) Σ_j c_j e^{-i(ξ, x_j)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLimited {
    pub dim: usize,
    pub band: [f64; 2],
    pub centres: Vec<[f64; 3]>,
    pub coeffs: Vec<Complex64>,
}

impl BandLimited {
    pub fn random(dim: usize, band: [f64; 2], spread: f64, terms: usize, seed: u64) -> Result<Self> {
        if !(band[0] > 0.0 && band[1] >= 4.0 * band[0]) {
            return Err(Error::InvalidParameter(format!(
                "band [{}, {}] needs 0 < lo and hi ≥ 4 lo",
                band[0], band[1]
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut centres = Vec::with_capacity(terms);
        let mut coeffs = Vec::with_capacity(terms);
        for _ in 0..terms {
            let mut c = [0.0; 3];
            for v in c.iter_mut().take(dim) {
                *v = rng.gen_range(-spread..=spread);
            }
            centres.push(c);
            coeffs.push(Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        Ok(BandLimited {
            dim,
            band,
            centres,
            coeffs,
        })
    }

    fn envelope(&self, t: f64) -> f64 {
        let [lo, hi] = self.band;
        smooth_step(t, lo, 2.0 * lo) * (1.0 - smooth_step(t, hi / 2.0, hi))
    }

    /// `Ff(ξ)`.
    pub fn symbol(&self, xi: &[f64]) -> Complex64 {
        let t = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let a = self.envelope(t);
        if a == 0.0 {
            return Complex64::default();
        }
        let sum: Complex64 = self
            .centres
            .iter()
            .zip(&self.coeffs)
            .map(|(x, c)| {
                let phase: f64 = xi.iter().zip(x).map(|(k, y)| k * y).sum();
                c * Complex64::from_polar(1.0, -phase)
            })
            .sum();
        sum * a
    }

    /// Spectrum of `x ↦ f(2^m x)`: `2^{-mn} Ff(2^{-m} ξ)`.
    pub fn spectrum(&self, grid: &Grid, m: i32) -> Result<Spectrum> {
        if grid.dim() != self.dim {
            return Err(Error::GridMismatch("ensemble member dimension".into()));
        }
        let scale = 2f64.powi(-m);
        let amp = scale.powi(self.dim as i32);
        let values = (0..grid.len())
            .map(|i| {
                let mut k = grid.wavevector(i);
                k.iter_mut().for_each(|v| *v *= scale);
                self.symbol(&k[..self.dim]) * amp
            })
            .collect();
        Spectrum::new(*grid, values)
    }

    /// Samples of `x ↦ f(2^m x)`.
    pub fn sample(&self, grid: &Grid, m: i32) -> Result<SampledField> {
        Ok(inverse_fourier(&self.spectrum(grid, m)?))
    }
}

/// One manifest entry: the grid and the seeded recipe for its members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleEntry {
    pub name: &'static str,
    pub dim: usize,
    pub half_width: f64,
    pub points: usize,
    pub band: [f64; 2],
    pub members: usize,
    pub terms: usize,
    pub seed: u64,
    /// Unit-scale Gaussians `e^{-a|x|²}` appended to the random members.
    pub gaussians: &'static [f64],
}

pub const MANIFEST: &[EnsembleEntry] = &[
    EnsembleEntry {
        name: "plancherel-1d",
        dim: 1,
        half_width: 64.0,
        points: 1 << 12,
        band: [1.0, 32.0],
        members: 50,
        terms: 6,
        seed: 0x5eed_0001,
        gaussians: &[],
    },
    EnsembleEntry {
        name: "plancherel-2d",
        dim: 2,
        half_width: 16.0,
        points: 128,
        band: [1.0, 8.0],
        members: 10,
        terms: 4,
        seed: 0x5eed_0002,
        gaussians: &[],
    },
    EnsembleEntry {
        name: "dilation-1d",
        dim: 1,
        half_width: 128.0,
        points: 1 << 13,
        band: [2.0, 8.0],
        members: 8,
        terms: 4,
        seed: 0x5eed_0003,
        gaussians: &[],
    },
    EnsembleEntry {
        name: "holder-1d",
        dim: 1,
        half_width: 64.0,
        points: 1 << 12,
        band: [1.0, 8.0],
        members: 20,
        terms: 4,
        seed: 0x5eed_0004,
        gaussians: &[],
    },
    EnsembleEntry {
        name: "embedding-1d",
        dim: 1,
        half_width: 64.0,
        points: 1 << 11,
        band: [1.0, 16.0],
        members: 8,
        terms: 4,
        seed: 0x5eed_0005,
        gaussians: &[0.5, 2.0],
    },
    EnsembleEntry {
        name: "gn-1d",
        dim: 1,
        half_width: 40.0,
        points: 1 << 14,
        band: [1.0, 8.0],
        members: 6,
        terms: 3,
        seed: 0x5eed_0006,
        gaussians: &[1.0],
    },
];

pub fn manifest_entry(name: &str) -> Result<&'static EnsembleEntry> {
    MANIFEST
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Config(format!("no ensemble {name:?} in manifest v{ENSEMBLE_VERSION}")))
}

/// An ensemble member: a random band-limited field or a Gaussian model.
#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Band(BandLimited),
    Model(ModelField),
}

impl Member {
    pub fn sample(&self, grid: &Grid, m: i32) -> Result<SampledField> {
        match self {
            Member::Band(b) => b.sample(grid, m),
            Member::Model(model) => model.dilated(m).sample(grid),
        }
    }
}

impl EnsembleEntry {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.half_width, self.points)
    }

    /// The same box with `2^k` times as many points per axis.
    pub fn refined_grid(&self, k: u32) -> Result<Grid> {
        Grid::new(self.dim, self.half_width, self.points << k)
    }

    pub fn members(&self) -> Result<Vec<Member>> {
        let spread = self.half_width / 16.0;
        let mut out = (0..self.members)
            .map(|i| {
                BandLimited::random(self.dim, self.band, spread, self.terms, self.seed + i as u64)
                    .map(Member::Band)
            })
            .collect::<Result<Vec<_>>>()?;
        for &a in self.gaussians {
            out.push(Member::Model(ModelField::new(ModelKind::Gaussian {
                a,
                shift: Vec::new(),
            })?));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fourier_transform;

    #[test]
    fn members_are_reproducible() {
        let e = manifest_entry("holder-1d").unwrap();
        assert_eq!(e.members().unwrap(), e.members().unwrap());
        assert_eq!(e.members().unwrap().len(), 20);
        assert!(manifest_entry("nope").is_err());
    }

    #[test]
    fn spectrum_is_band_limited_and_consistent() {
        let e = manifest_entry("dilation-1d").unwrap();
        let g = e.grid().unwrap();
        let Member::Band(b) = &e.members().unwrap()[0] else { unreachable!() };
        let spec = b.spectrum(&g, 0).unwrap();
        for (i, v) in spec.values().iter().enumerate() {
            let r = g.frequency_radius(i);
            if !(2.0..=8.0).contains(&r) {
                assert_eq!(*v, Complex64::default());
            }
        }
        // the sampled field transforms back to its defining spectrum
        let back = fourier_transform(&b.sample(&g, 0).unwrap());
        let err = back
            .values()
            .iter()
            .zip(spec.values())
            .map(|(a, c)| (a - c).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn fields_are_localized() {
        let e = manifest_entry("dilation-1d").unwrap();
        let g = e.grid().unwrap();
        for member in e.members().unwrap() {
            let f = member.sample(&g, -2).unwrap();
            let peak = f.max_abs();
            let edge = f.values()[..g.points() / 16]
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            assert!(edge < 1e-3 * peak, "edge {edge} peak {peak}");
        }
    }
}
