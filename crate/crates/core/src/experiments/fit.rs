use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::partition::resolvable_range;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

pub const MIN_FIT_POINTS: usize = 16;

/// Which logarithm, if any, premultiplies the magnitudes before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogCorrection {
    #[default]
    None,
    /// `|ξ| → ∞`: multiply by `log|ξ|`.
    Large,
    /// `|ξ| → 0`: multiply by `log(1/|ξ|)`.
    Small,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub window: [f64; 2],
    pub rms: f64,
    pub points: usize,
    pub log_correction: LogCorrection,
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms)`.
pub(crate) fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    (slope, intercept, rms)
}

/// Log-log least-squares fit of `magnitude ~ C |ξ|^slope` over the points
/// of `profile` with `|ξ|` in `window`.
pub fn rate_fit(
    profile: &[(f64, f64)],
    window: [f64; 2],
    log_correction: LogCorrection,
) -> Result<FitResult> {
    let [a, b] = window;
    if !(a > 0.0 && a < b) {
        return Err(Error::Fit(format!("empty window [{a}, {b}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(r, m) in profile.iter().filter(|(r, _)| *r >= a && *r <= b) {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Fit(format!("nonpositive magnitude {m} at |ξ| = {r}")));
        }
        let factor = match log_correction {
            LogCorrection::None => 1.0,
            LogCorrection::Large => r.ln(),
            LogCorrection::Small => -r.ln(),
        };
        if !(factor > 0.0) {
            return Err(Error::Fit(format!(
                "log correction undefined at |ξ| = {r}"
            )));
        }
        xs.push(r.ln());
        ys.push((m * factor).ln());
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "window [{a}, {b}] holds {} points, need {MIN_FIT_POINTS}",
            xs.len()
        )));
    }
    let (slope, intercept, rms) = line_fit(&xs, &ys);
    Ok(FitResult {
        slope,
        intercept,
        window,
        rms,
        points: xs.len(),
        log_correction,
    })
}

/// The fit band of `grid`: the resolvable band without its bottom octave
/// and the top half-octave below Nyquist.
pub fn fit_band(grid: &Grid) -> [f64; 2] {
    let (k_lo, _) = resolvable_range(grid);
    [2f64.powi(k_lo + 1), grid.nyquist() / SQRT_2]
}

/// Error unless `window` lies inside [`fit_band`].
pub fn check_window(grid: &Grid, window: [f64; 2]) -> Result<()> {
    let [lo, hi] = fit_band(grid);
    if window[0] < lo || window[1] > hi {
        return Err(Error::Fit(format!(
            "window [{}, {}] leaves the fit band [{lo:.4}, {hi:.4}]",
            window[0], window[1]
        )));
    }
    Ok(())
}

/// `count` log-spaced samples of `f` on `window`.
pub fn log_spaced(window: [f64; 2], count: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let (la, lb) = (window[0].ln(), window[1].ln());
    (0..count)
        .map(|i| {
            let r = match i {
                0 => window[0],
                _ if i + 1 == count => window[1],
                _ => (la + (lb - la) * i as f64 / (count - 1) as f64).exp(),
            };
            (r, f(r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let prof = log_spaced([1.0, 1e4], 64, |r| 3.0 * r.powi(-2));
        let fit = rate_fit(&prof, [1.0, 1e4], LogCorrection::None).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-10, "{}", fit.slope);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-9);
        assert_eq!(fit.points, 64);
    }

    #[test]
    fn log_corrected_power_law() {
        let prof = log_spaced([4.0, 4096.0], 100, |r| 1.0 / (r * r.ln()));
        let fit = rate_fit(&prof, [4.0, 4096.0], LogCorrection::Large).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-6, "{}", fit.slope);
        let small = log_spaced([1e-4, 0.5], 50, |r| r.powf(0.5) / (-r.ln()));
        let fit = rate_fit(&small, [1e-4, 0.5], LogCorrection::Small).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-6);
    }

    #[test]
    fn errors() {
        let prof = log_spaced([1.0, 10.0], 10, |r| r);
        assert!(matches!(rate_fit(&prof, [1.0, 10.0], LogCorrection::None), Err(Error::Fit(_))));
        assert!(rate_fit(&prof, [5.0, 5.0], LogCorrection::None).is_err());
        let mut prof = log_spaced([1.0, 10.0], 20, |r| r);
        prof[3].1 = 0.0;
        assert!(rate_fit(&prof, [1.0, 10.0], LogCorrection::None).is_err());
        let prof = log_spaced([0.5, 10.0], 20, |r| r);
        assert!(rate_fit(&prof, [0.5, 10.0], LogCorrection::Large).is_err());
    }

    #[test]
    fn band_guards() {
        let g = Grid::new(1, 640.0, 1 << 20).unwrap();
        let [lo, hi] = fit_band(&g);
        assert!(lo < 64.0 && hi > 1024.0);
        assert!(check_window(&g, [64.0, 1024.0]).is_ok());
        assert!(check_window(&g, [64.0, g.nyquist()]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_exponent_anywhere(kappa in 0.1f64..4.0, a in 0.0f64..6.0, width in 1.0f64..5.0) {
            let w = [a.exp2(), (a + width).exp2()];
            let prof = log_spaced([1.0, 2048.0], 400, |r| r.powf(-kappa));
            let fit = rate_fit(&prof, w, LogCorrection::None).unwrap();
            prop_assert!((fit.slope + kappa).abs() < 1e-6);
        }
    }
}
