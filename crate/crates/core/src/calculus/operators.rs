use crate::error::{Error, Result};
use crate::grid::{fourier_transform, inverse_fourier, SampledField};
use num_complex::Complex64;

/// `|F(0)| / max|F|` above which a negative-order Riesz power is refused.
pub const RIESZ_MEAN_TOLERANCE: f64 = 1e-10;

/// `(-Δ)^{s/2} f = F⁻¹[|ξ|^s Ff]`, with the symbol set to 0 at `ξ = 0`.
pub fn riesz_laplacian(f: &SampledField, s: f64) -> Result<SampledField> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    let spectrum = fourier_transform(f);
    if s < 0.0 {
        let grid = spectrum.grid();
        let origin = (0..grid.len())
            .find(|&i| grid.frequency_radius(i) == 0.0)
            .expect("the lattice contains ξ = 0");
        let peak = spectrum.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let at_zero = spectrum.values()[origin].norm();
        if at_zero > RIESZ_MEAN_TOLERANCE * peak {
            return Err(Error::SingularSymbol(at_zero));
        }
    }
    let out = spectrum.apply_radial(|t| if t == 0.0 { 0.0 } else { t.powf(s) });
    Ok(labelled(inverse_fourier(&out), format!("riesz({s})")))
}

/// `(I-Δ)^{s/2} f = F⁻¹[(1+|ξ|²)^{s/2} Ff]`.
pub fn bessel_potential(f: &SampledField, s: f64) -> SampledField {
    if s == 0.0 {
        return f.clone();
    }
    let out = fourier_transform(f).apply_radial(|t| (1.0 + t * t).powf(s / 2.0));
    labelled(inverse_fourier(&out), format!("bessel({s})"))
}

/// `D^mask f = F⁻¹[Π_{mask_j = 1} (iξ_j) Ff]`.
pub fn mixed_derivative(f: &SampledField, mask: &[u8]) -> Result<SampledField> {
    let dim = f.grid().dim();
    if mask.len() != dim || mask.iter().any(|&m| m > 1) {
        return Err(Error::InvalidParameter(format!(
            "mask {mask:?} must be a 0/1 vector of length {dim}"
        )));
    }
    if mask.iter().all(|&m| m == 0) {
        return Ok(f.clone());
    }
    let out = fourier_transform(f).apply_symbol(|xi| {
        xi.iter()
            .zip(mask)
            .filter(|(_, &m)| m == 1)
            .fold(Complex64::new(1.0, 0.0), |acc, (x, _)| acc * Complex64::new(0.0, *x))
    });
    Ok(labelled(inverse_fourier(&out), format!("D{mask:?}")))
}

fn labelled(mut f: SampledField, label: String) -> SampledField {
    f.label = label;
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn gaussian(grid: Grid) -> SampledField {
        SampledField::from_fn(grid, "g", |x| {
            Complex64::new((-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp(), 0.0)
        })
        .unwrap()
    }

    fn max_err(f: &SampledField, exact: impl Fn(&[f64]) -> f64) -> f64 {
        let g = f.grid();
        (0..g.len())
            .map(|i| (f.values()[i] - exact(&g.position(i)[..g.dim()])).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn riesz_examples() {
        let g = Grid::new(1, 20.0, 4096).unwrap();
        let f = gaussian(g);
        let lap = riesz_laplacian(&f, 2.0).unwrap();
        assert!(max_err(&lap, |x| (1.0 - x[0] * x[0]) * (-x[0] * x[0] / 2.0).exp()) < 1e-6);
        assert_eq!(riesz_laplacian(&f, 0.0).unwrap().values(), f.values());
        assert!(matches!(riesz_laplacian(&f, -1.0), Err(Error::SingularSymbol(_))));
    }

    #[test]
    fn riesz_first_order_against_quadrature() {
        // Direct rectangle-rule quadrature of (2π)^{-1} ∫ |ξ| √(2π) e^{-ξ²/2} e^{iξx} dξ
        // over the lattice frequencies, without any FFT.
        let g = Grid::new(1, 20.0, 4096).unwrap();
        let f = riesz_laplacian(&gaussian(g), 1.0).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let oracle = |x: f64| {
            (0..g.points())
                .map(|i| {
                    let xi = g.frequency(i);
                    xi.abs() * two_pi.sqrt() * (-xi * xi / 2.0).exp() * (xi * x).cos()
                })
                .sum::<f64>()
                * g.frequency_step()
                / two_pi
        };
        for k in 0..20 {
            let j = 1848 + 20 * k;
            let x = g.coordinate(j);
            let err = (f.values()[j] - oracle(x)).norm();
            assert!(err < 1e-12, "x = {x}: {err}");
        }
    }

    #[test]
    fn riesz_negative_on_mean_free() {
        let g = Grid::new(1, 20.0, 4096).unwrap();
        // x e^{-x²/2} has vanishing mean; (−Δ)^{-1/2} then (−Δ)^{1/2} returns it
        let f = SampledField::from_fn(g, "odd", |x| {
            Complex64::new(x[0] * (-x[0] * x[0] / 2.0).exp(), 0.0)
        })
        .unwrap();
        let back = riesz_laplacian(&riesz_laplacian(&f, -1.0).unwrap(), 1.0).unwrap();
        assert!(max_err(&back, |x| x[0] * (-x[0] * x[0] / 2.0).exp()) < 1e-10);
    }

    #[test]
    fn bessel_examples() {
        let g = Grid::new(1, 20.0, 4096).unwrap();
        let f = gaussian(g);
        let b = bessel_potential(&f, 2.0);
        assert!(max_err(&b, |x| (2.0 - x[0] * x[0]) * (-x[0] * x[0] / 2.0).exp()) < 1e-6);
        assert_eq!(bessel_potential(&f, 0.0).values(), f.values());
        let round = bessel_potential(&bessel_potential(&f, -2.0), 2.0);
        assert!(max_err(&round, |x| (-x[0] * x[0] / 2.0).exp()) < 1e-8);
    }

    #[test]
    fn mixed_derivative_examples() {
        let g1 = Grid::new(1, 20.0, 4096).unwrap();
        let f = gaussian(g1);
        assert_eq!(mixed_derivative(&f, &[0]).unwrap().values(), f.values());
        let d = mixed_derivative(&f, &[1]).unwrap();
        assert!(max_err(&d, |x| -x[0] * (-x[0] * x[0] / 2.0).exp()) < 1e-8);
        let g2 = Grid::new(2, 12.0, 256).unwrap();
        let d2 = mixed_derivative(&gaussian(g2), &[1, 1]).unwrap();
        assert!(max_err(&d2, |x| x[0] * x[1] * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp()) < 1e-8);
        assert!(mixed_derivative(&f, &[1, 0]).is_err());
        assert!(mixed_derivative(&f, &[2]).is_err());
    }
}
