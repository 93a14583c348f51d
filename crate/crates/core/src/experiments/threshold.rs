use super::fit::{check_window, line_fit, rate_fit, FitResult, LogCorrection};
use crate::calculus::wiener::{profile_of, WienerPoint};
use crate::criteria::{evaluate, CriterionCase, CriterionId, Num, Status};
use crate::error::{Error, Result};
use crate::grid::{fourier_transform, Grid, SampledField, Spectrum};
use crate::models::{CutoffSpec, ModelField, ModelKind, DEFAULT_PHASE_PER_CELL};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Required excess of the tail exponent over `n` for a CONVERGENT verdict.
pub const TAIL_MARGIN: f64 = 0.05;
/// Log-spaced shell bins in the tail window.
pub const TAIL_BINS: usize = 64;
/// Octaves below the top radius that form the tail window.
pub const TAIL_OCTAVES: i32 = 3;
/// Largest grid the automatic chirp grid may choose, in points.
pub const MAX_AUTO_POINTS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Divergence {
    Convergent,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailFamily {
    /// `|Ff| ~ |ξ|^{-κ}`
    Power,
    /// `|Ff| ~ |ξ|^{-κ} / log|ξ|`
    PowerLog,
    /// No measurable tail.
    Vanishing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub verdict: Divergence,
    pub family: TailFamily,
    /// Decay exponent `κ` of the selected family (0 for a vanishing tail).
    pub exponent: f64,
    pub plain: Option<FitResult>,
    pub log_corrected: Option<FitResult>,
    pub profile: Vec<WienerPoint>,
    /// `b` in `W(R) ≈ a + b log R` over the top two octaves of `profile`.
    pub log_slope: f64,
    /// `W(R_max) / W(R_max / 2)`.
    pub growth_ratio: f64,
}

/// Mean `|Ff|` over `bins` log-spaced shells covering `window`, at the
/// geometric centre of each nonempty shell.
pub fn shell_profile(spectrum: &Spectrum, window: [f64; 2], bins: usize) -> Vec<(f64, f64)> {
    let grid = spectrum.grid();
    let (la, lb) = (window[0].ln(), window[1].ln());
    let width = (lb - la) / bins as f64;
    let mut sum = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    for (i, v) in spectrum.values().iter().enumerate() {
        let r = grid.frequency_radius(i);
        if r < window[0] || r > window[1] {
            continue;
        }
        let b = (((r.ln() - la) / width) as usize).min(bins - 1);
        sum[b] += v.norm();
        count[b] += 1;
    }
    (0..bins)
        .filter(|&b| count[b] > 0)
        .map(|b| ((la + (b as f64 + 0.5) * width).exp(), sum[b] / count[b] as f64))
        .collect()
}

/// Classify the Wiener tail of `spectrum` from the top [`TAIL_OCTAVES`]
/// below the largest radius in `radii`.
///
/// Plain and log-corrected power laws are both fitted to the shell
/// profile and the one with the smaller residual wins. The verdict is
/// CONVERGENT when its exponent exceeds `n + TAIL_MARGIN`. `W(R)` is
/// reported for inspection only.
pub fn classify_tail(spectrum: &Spectrum, radii: &[f64]) -> Result<TailReport> {
    let grid = spectrum.grid();
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let window = [r_max / 2f64.powi(TAIL_OCTAVES), r_max];
    check_window(grid, window)?;
    let profile = profile_of(spectrum, radii);
    let (log_slope, growth_ratio) = profile_diagnostics(&profile);

    let peak = spectrum.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let shells = shell_profile(spectrum, window, TAIL_BINS);
    let tail_peak = shells.iter().map(|s| s.1).fold(0.0, f64::max);
    if peak == 0.0 || tail_peak <= 1e-12 * peak || shells.iter().any(|s| s.1 <= 0.0) {
        return Ok(TailReport {
            verdict: Divergence::Convergent,
            family: TailFamily::Vanishing,
            exponent: 0.0,
            plain: None,
            log_corrected: None,
            profile,
            log_slope,
            growth_ratio,
        });
    }
    let plain = rate_fit(&shells, window, LogCorrection::None)?;
    let logc = if window[0] > 1.0 {
        Some(rate_fit(&shells, window, LogCorrection::Large)?)
    } else {
        None
    };
    let (family, exponent) = match &logc {
        Some(l) if l.rms < plain.rms => (TailFamily::PowerLog, -l.slope),
        _ => (TailFamily::Power, -plain.slope),
    };
    let verdict = if exponent > grid.dim() as f64 + TAIL_MARGIN {
        Divergence::Convergent
    } else {
        Divergence::Divergent
    };
    Ok(TailReport {
        verdict,
        family,
        exponent,
        plain: Some(plain),
        log_corrected: logc,
        profile,
        log_slope,
        growth_ratio,
    })
}

fn profile_diagnostics(profile: &[WienerPoint]) -> (f64, f64) {
    let Some(top) = profile.iter().map(|p| p.radius).reduce(f64::max) else {
        return (0.0, 1.0);
    };
    let upper: Vec<&WienerPoint> = profile.iter().filter(|p| p.radius >= top / 4.0).collect();
    let slope = if upper.len() >= 2 {
        let x: Vec<f64> = upper.iter().map(|p| p.radius.ln()).collect();
        let y: Vec<f64> = upper.iter().map(|p| p.mass).collect();
        line_fit(&x, &y).0
    } else {
        0.0
    };
    let at = |r: f64| {
        profile
            .iter()
            .find(|p| (p.radius - r).abs() <= 1e-9 * r)
            .map(|p| p.mass)
    };
    let ratio = match (at(top), at(top / 2.0)) {
        (Some(a), Some(b)) if b > 0.0 => a / b,
        _ => 1.0,
    };
    (slope, ratio)
}

/// Sample, transform and classify `field`.
pub fn classify_field(field: &SampledField, radii: &[f64]) -> Result<TailReport> {
    classify_tail(&fourier_transform(field), radii)
}

/// Smallest power-of-two grid that resolves `|ξ| ≤ r_max` for the chirp
/// `|x|^α` in dimension `n`: the stationary points fit inside with 25%
/// margin and the phase advance stays within [`DEFAULT_PHASE_PER_CELL`].
pub fn auto_chirp_grid(alpha: f64, n: usize, radii: &[f64]) -> Result<Grid> {
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    if !(r_min > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    let stationary = |r: f64| (r / alpha).powf(1.0 / (alpha - 1.0));
    let reach = if alpha > 1.0 { stationary(r_max) } else { stationary(r_min) };
    let half_width = (1.25 * reach).max(16.0);
    let window_lo = r_max / 2f64.powi(TAIL_OCTAVES);
    let mut points = 64usize;
    loop {
        let grid = Grid::new(n, half_width, points)?;
        let probe = ModelField::new(ModelKind::Chirp {
            alpha,
            beta: 1.0,
            cutoff: CutoffSpec::default(),
        })?;
        let phase_ok = probe.phase_per_cell(&grid).unwrap_or(0.0) <= DEFAULT_PHASE_PER_CELL;
        if phase_ok && grid.nyquist() / SQRT_2 >= r_max && check_window(&grid, [window_lo, r_max]).is_ok() {
            return Ok(grid);
        }
        points *= 2;
        if points.pow(n as u32) > MAX_AUTO_POINTS {
            return Err(Error::Sampling(format!(
                "no grid up to {MAX_AUTO_POINTS} points resolves α = {alpha}, |ξ| ≤ {r_max} in dimension {n}"
            )));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub prediction: Status,
    pub report: TailReport,
    /// The numeric verdict agrees with the CHIRP criterion.
    pub agrees: bool,
}

/// Expected tail verdict for a CHIRP status.
pub fn expected_divergence(status: Status) -> Option<Divergence> {
    match status {
        Status::Sufficient => Some(Divergence::Convergent),
        Status::SharpFailRegion | Status::Boundary => Some(Divergence::Divergent),
        Status::NotCovered => None,
    }
}

/// Profiles and verdicts for `m_{α,β}` over `betas`, checked against the
/// CHIRP criterion. `grid` defaults to [`auto_chirp_grid`].
pub fn wiener_threshold_sweep(
    alpha: f64,
    n: usize,
    betas: &[f64],
    radii: &[f64],
    grid: Option<Grid>,
    cutoff: CutoffSpec,
) -> Result<Vec<ThresholdRow>> {
    if betas.is_empty() || radii.is_empty() {
        return Err(Error::InvalidParameter("empty β or radius list".into()));
    }
    let grid = match grid {
        Some(g) => g,
        None => auto_chirp_grid(alpha, n, radii)?,
    };
    if grid.dim() != n {
        return Err(Error::InvalidParameter("grid dimension differs from n".into()));
    }
    let models = betas
        .iter()
        .map(|&beta| ModelField::new(ModelKind::Chirp { alpha, beta, cutoff }))
        .collect::<Result<Vec<_>>>()?;
    // Sampling adequacy does not depend on β; check once up front.
    if let Some(first) = models.first() {
        let step = first.phase_per_cell(&grid).unwrap_or(0.0);
        if step > DEFAULT_PHASE_PER_CELL {
            return Err(Error::Sampling(format!(
                "chirp phase advances {step:.4} rad per cell (limit {DEFAULT_PHASE_PER_CELL:.4})"
            )));
        }
    }
    models
        .par_iter()
        .zip(betas.par_iter())
        .map(|(model, &beta)| {
            let report = classify_field(&model.sample(&grid)?, radii)?;
            let case = CriterionCase::new(CriterionId::Chirp, n as u32)
                .alpha(Num::from_decimal(alpha))
                .beta(Num::from_decimal(beta));
            let prediction = evaluate(&case).status;
            let agrees = expected_divergence(prediction) == Some(report.verdict);
            Ok(ThresholdRow {
                alpha,
                beta,
                n,
                prediction,
                report,
                agrees,
            })
        })
        .collect()
}

/// `2^lo, 2^{lo+1}, …, 2^hi`.
pub fn dyadic_radii(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}
