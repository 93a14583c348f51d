//! Radial fast path: Hankel-type transforms and the radial Laplacian for
//! `f(x) = f₀(|x|)`, sampled at midpoints `ρ_j = (j + 1/2) h`.

use crate::error::{Error, Result};
use crate::models::Profile;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_2_PI, PI};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    pub step: f64,
    pub values: Vec<f64>,
}

impl RadialField {
    pub fn from_fn(step: f64, points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(step > 0.0) || points < 8 {
            return Err(Error::InvalidGrid(format!(
                "radial grid needs h > 0 and at least 8 points, got {step}, {points}"
            )));
        }
        let values = (0..points).map(|j| f((j as f64 + 0.5) * step)).collect();
        Ok(RadialField { step, values })
    }

    pub fn from_profile(profile: &Profile, step: f64, points: usize) -> Result<Self> {
        Self::from_fn(step, points, |r| profile.eval(r))
    }

    pub fn radius(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.step
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|j| self.radius(j))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSpectrum {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

fn horner(coeffs: &[f64], v: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * v + c)
}

/// Bessel `J₀` from the classic rational/asymptotic fits (absolute error
/// around 1e-8).
#[allow(clippy::excessive_precision)]
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    let y = x * x;
    if x < 8.0 {
        let num = [
            -184.9052456,
            77392.33017,
            -11214424.18,
            651619640.7,
            -13362590354.0,
            57568490574.0,
        ];
        let den = [
            1.0,
            267.8532712,
            59272.64853,
            9494680.718,
            1029532985.0,
            57568490411.0,
        ];
        horner(&num, y) / horner(&den, y)
    } else {
        let p = [
            0.2093887211e-6,
            -0.2073370639e-5,
            0.2734510407e-4,
            -0.1098628627e-2,
            1.0,
        ];
        let q = [
            -0.934935152e-7,
            0.7621095161e-6,
            -0.6911147651e-5,
            0.1430488765e-3,
            -0.1562499995e-1,
        ];
        let z = 64.0 / y;
        let phase = x - 0.785398164;
        (FRAC_2_PI / x).sqrt() * (phase.cos() * horner(&p, z) - phase.sin() * horner(&q, z) * 8.0 / x)
    }
}

/// `f₀(0)` from the two innermost midpoints of an even profile.
fn origin_value(f0: &RadialField) -> f64 {
    (9.0 * f0.values[0] - f0.values[1]) / 8.0
}

/// Fourier transform of `f₀(|x|)` in dimension `n` at the given radii.
///
/// n = 1: `2∫ f₀ cos(ρξ) dρ`; n = 2: `2π ∫ f₀ ρ J₀(ρξ) dρ`;
/// n = 3: `(4π/ξ) ∫ f₀ ρ sin(ρξ) dρ`. Midpoint quadrature; the n = 2
/// integrand is odd in ρ, so its leading endpoint correction `-h²f₀(0)/24`
/// is added.
pub fn radial_fourier(f0: &RadialField, n: usize, radii: &[f64]) -> Result<RadialSpectrum> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("dimension {n}")));
    }
    let h = f0.step;
    let values = radii
        .iter()
        .map(|&xi| {
            let sum: f64 = match n {
                1 => f0.radii().zip(&f0.values).map(|(r, v)| v * (r * xi).cos()).sum::<f64>() * 2.0,
                2 => {
                    let s: f64 = f0.radii().zip(&f0.values).map(|(r, v)| v * r * bessel_j0(r * xi)).sum();
                    2.0 * PI * (s - h * origin_value(f0) / 24.0)
                }
                _ if xi == 0.0 => f0.radii().zip(&f0.values).map(|(r, v)| v * r * r).sum::<f64>() * 4.0 * PI,
                _ => f0.radii().zip(&f0.values).map(|(r, v)| v * r * (r * xi).sin()).sum::<f64>() * 4.0 * PI / xi,
            };
            sum * h
        })
        .collect();
    Ok(RadialSpectrum {
        radii: radii.to_vec(),
        values,
    })
}

/// Fourth-order central differences, reflecting evenly through the
/// origin and treating the profile as zero past the outer edge.
fn neg_laplacian(f0: &RadialField, n: usize) -> RadialField {
    let m = f0.values.len() as isize;
    let at = |j: isize| -> f64 {
        let j = if j < 0 { -1 - j } else { j };
        if j >= m {
            0.0
        } else {
            f0.values[j as usize]
        }
    };
    let h = f0.step;
    let values = (0..m)
        .map(|j| {
            let (a, b, c, d, e) = (at(j - 2), at(j - 1), at(j), at(j + 1), at(j + 2));
            let d2 = (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h);
            let d1 = (a - 8.0 * b + 8.0 * d - e) / (12.0 * h);
            -(d2 + (n as f64 - 1.0) / f0.radius(j as usize) * d1)
        })
        .collect();
    RadialField {
        step: h,
        values,
    }
}

/// `(-Δ)^{s/2} f` for radial `f` and even `s`, by applying the radial
/// Laplacian `f₀'' + (n-1)/ρ · f₀'` `s/2` times.
pub fn radial_laplacian_pow(f0: &RadialField, s: u32, n: usize) -> Result<RadialField> {
    if !s.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("s = {s} must be even")));
    }
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("dimension {n}")));
    }
    let mut out = f0.clone();
    for _ in 0..s / 2 {
        out = neg_laplacian(&out, n);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::riesz_laplacian;
    use crate::grid::{fourier_transform, Grid, SampledField};
    use num_complex::Complex64;

    fn j0_series(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            term *= -(x * x / 4.0) / (k as f64 * k as f64);
            sum += term;
        }
        sum
    }

    fn j0_integral(x: f64) -> f64 {
        // (1/π) ∫₀^π cos(x sin θ) dθ, trapezoid on a periodic integrand
        let m = 4000;
        (0..m)
            .map(|k| (x * (PI * k as f64 / m as f64).sin()).cos())
            .sum::<f64>()
            / m as f64
    }

    #[test]
    fn j0_matches_independent_oracles() {
        for i in 0..400 {
            let x = i as f64 * 0.05;
            let v = bessel_j0(x);
            assert!((v - j0_series(x)).abs() < 1e-7, "series at {x}");
        }
        for i in 0..200 {
            let x = i as f64 * 0.37;
            assert!((bessel_j0(x) - j0_integral(x)).abs() < 1e-7, "integral at {x}");
        }
        assert_eq!(bessel_j0(-2.5), bessel_j0(2.5));
    }

    fn gauss_profile() -> RadialField {
        RadialField::from_profile(&Profile::Gaussian { a: 0.5 }, 1e-2, 1500).unwrap()
    }

    #[test]
    fn gaussian_closed_forms() {
        let f0 = gauss_profile();
        let radii: Vec<f64> = (0..30).map(|i| i as f64 * 0.25).collect();
        for n in 1..=3 {
            let spec = radial_fourier(&f0, n, &radii).unwrap();
            for (xi, v) in radii.iter().zip(&spec.values) {
                let want = (2.0 * PI).powf(n as f64 / 2.0) * (-xi * xi / 2.0).exp();
                assert!((v - want).abs() < 1e-5, "n={n} ξ={xi}: {v} vs {want}");
            }
        }
        assert!(radial_fourier(&f0, 4, &radii).is_err());
    }

    #[test]
    fn one_dimension_matches_grid_transform() {
        let g = Grid::new(1, 20.0, 4096).unwrap();
        let f = SampledField::from_fn(g, "g", |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0))
            .unwrap();
        let grid_spec = fourier_transform(&f);
        let idx: Vec<usize> = (2048..2048 + 200).step_by(10).collect();
        let radii: Vec<f64> = idx.iter().map(|&i| g.frequency(i)).collect();
        let spec = radial_fourier(&gauss_profile(), 1, &radii).unwrap();
        for (k, &i) in idx.iter().enumerate() {
            assert!((grid_spec.values()[i] - spec.values[k]).norm() < 1e-6);
        }
    }

    #[test]
    fn bump_in_two_dimensions_matches_grid_transform() {
        let profile = Profile::Bump {
            inner: 1.0,
            outer: 2.0,
        };
        let g = Grid::new(2, 6.0, 512).unwrap();
        let f = SampledField::from_fn(g, "bump", |x| {
            Complex64::new(profile.eval((x[0] * x[0] + x[1] * x[1]).sqrt()), 0.0)
        })
        .unwrap();
        let grid_spec = fourier_transform(&f);
        // lattice points on the positive ξ₁ axis
        let row = 256 * 512;
        let cols: Vec<usize> = (0..10).map(|k| 256 + 3 * k).collect();
        let radii: Vec<f64> = cols.iter().map(|&c| g.frequency(c)).collect();
        let f0 = RadialField::from_profile(&profile, 1e-3, 2500).unwrap();
        let spec = radial_fourier(&f0, 2, &radii).unwrap();
        for (k, &c) in cols.iter().enumerate() {
            let v = grid_spec.values()[row + c];
            assert!((v.re - spec.values[k]).abs() < 1e-4, "{}: {} vs {}", radii[k], v.re, spec.values[k]);
        }
    }

    #[test]
    fn laplacian_closed_forms() {
        let f0 = gauss_profile();
        let one = radial_laplacian_pow(&f0, 2, 1).unwrap();
        let three = radial_laplacian_pow(&f0, 2, 3).unwrap();
        for j in 0..800 {
            let r = f0.radius(j);
            let e = (-r * r / 2.0).exp();
            assert!((one.values[j] - (1.0 - r * r) * e).abs() < 1e-6, "n=1 at {r}");
            assert!((three.values[j] - (3.0 - r * r) * e).abs() < 1e-6, "n=3 at {r}");
        }
        assert!(radial_laplacian_pow(&f0, 3, 1).is_err());
        assert_eq!(radial_laplacian_pow(&f0, 0, 2).unwrap(), f0);
    }

    #[test]
    fn fourth_power_matches_spectral() {
        // radial midpoints (2j+1)h coincide with grid points when the radial step is 2h
        let g = Grid::new(1, 20.0, 4096).unwrap();
        let f = SampledField::from_fn(g, "g", |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0))
            .unwrap();
        let spectral = riesz_laplacian(&f, 4.0).unwrap();
        let f0 = RadialField::from_fn(2.0 * g.spacing(), 1024, |r| (-r * r / 2.0).exp()).unwrap();
        let radial = radial_laplacian_pow(&f0, 4, 1).unwrap();
        let peak = spectral.max_abs();
        for j in 0..400 {
            let grid_index = 2048 + 2 * j + 1;
            assert!((g.coordinate(grid_index) - f0.radius(j)).abs() < 1e-12);
            let err = (spectral.values()[grid_index].re - radial.values[j]).abs();
            assert!(err <= 1e-4 * peak, "ρ = {}: {err}", f0.radius(j));
        }
    }
}
