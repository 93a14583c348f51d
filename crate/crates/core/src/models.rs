//! Model functions: the chirp multipliers `m_{α,β}`, their log-damped
//! variants `μ_{α,β}` and `ν_α`, plus Gaussian oracles with closed-form
//! transforms.

use crate::error::{Error, Result};
use crate::grid::{fourier_transform, norm, Grid, SampledField, Spectrum};
use crate::smooth::smooth_step;
use crate::weights::WeightSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Default ceiling on the chirp phase advance per grid cell, in radians.
pub const DEFAULT_PHASE_PER_CELL: f64 = FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub inner: f64,
    pub outer: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec {
            inner: 1.0,
            outer: 2.0,
        }
    }
}

impl CutoffSpec {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        let c = CutoffSpec { inner, outer };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if !(self.inner > 0.0 && self.inner < self.outer && self.outer.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cutoff needs 0 < inner < outer, got {} / {}",
                self.inner, self.outer
            )));
        }
        Ok(())
    }
}

/// The cutoff `ρ`: 0 on `[0, inner]`, 1 on `[outer, ∞)`, C^∞ in between.
pub fn cutoff_rho(spec: &CutoffSpec, t: f64) -> f64 {
    smooth_step(t, spec.inner, spec.outer)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpParams {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
}

impl ChirpParams {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must be positive")));
        }
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidParameter(format!("dimension {n}")));
        }
        Ok(ChirpParams { alpha, beta, n })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) || alpha == 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} must be positive and different from 1"
        )));
    }
    Ok(())
}

/// Radial profiles `f₀(ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Profile {
    /// `e^{-a ρ²}`
    Gaussian { a: f64 },
    /// 1 on `[0, inner]`, 0 beyond `outer`, smooth in between.
    Bump { inner: f64, outer: f64 },
}

impl Profile {
    pub fn eval(&self, rho: f64) -> f64 {
        match *self {
            Profile::Gaussian { a } => (-a * rho * rho).exp(),
            Profile::Bump { inner, outer } => 1.0 - smooth_step(rho, inner, outer),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `e^{-a|x - shift|²}`
    Gaussian {
        a: f64,
        #[serde(default)]
        shift: Vec<f64>,
    },
    /// `e^{-a|x|²} cos((ω, x))`
    ModulatedGaussian { a: f64, omega: Vec<f64> },
    /// `m_{α,β}(x) = ρ(|x|) e^{i|x|^α} / |x|^β`
    Chirp {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        cutoff: CutoffSpec,
    },
    /// `μ_{α,β}(x) = m_{α,β}(x) / log|x|`
    ChirpLog {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        cutoff: CutoffSpec,
    },
    /// `ν_α = μ_{α, nα/2}`
    Nu {
        alpha: f64,
        #[serde(default)]
        cutoff: CutoffSpec,
    },
    RadialProfile { profile: Profile },
    Product { factors: Vec<ModelKind> },
    Weighted {
        model: Box<ModelKind>,
        weight: WeightSpec,
    },
}

impl ModelKind {
    fn validate(&self) -> Result<()> {
        match self {
            ModelKind::Gaussian { a, .. } | ModelKind::ModulatedGaussian { a, .. } => {
                if !(*a > 0.0) {
                    return Err(Error::InvalidParameter(format!("gaussian a = {a}")));
                }
            }
            ModelKind::Chirp {
                alpha,
                beta,
                cutoff,
            } => {
                ChirpParams::new(*alpha, *beta, 1)?;
                cutoff.validate()?;
            }
            ModelKind::ChirpLog {
                alpha,
                beta,
                cutoff,
            } => {
                ChirpParams::new(*alpha, *beta, 1)?;
                check_log_cutoff(cutoff)?;
            }
            ModelKind::Nu { alpha, cutoff } => {
                check_alpha(*alpha)?;
                check_log_cutoff(cutoff)?;
            }
            ModelKind::RadialProfile { profile } => {
                if let Profile::Bump { inner, outer } = profile {
                    CutoffSpec::new(*inner, *outer)?;
                }
            }
            ModelKind::Product { factors } => {
                for f in factors {
                    f.validate()?;
                }
            }
            ModelKind::Weighted { model, weight } => {
                model.validate()?;
                weight.validate()?;
            }
        }
        Ok(())
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let r = norm(x);
        match self {
            ModelKind::Gaussian { a, shift } => {
                let d2: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let d = v - shift.get(i).copied().unwrap_or(0.0);
                        d * d
                    })
                    .sum();
                Complex64::new((-a * d2).exp(), 0.0)
            }
            ModelKind::ModulatedGaussian { a, omega } => {
                let phase: f64 = x.iter().zip(omega).map(|(v, w)| v * w).sum();
                Complex64::new((-a * r * r).exp() * phase.cos(), 0.0)
            }
            ModelKind::Chirp {
                alpha,
                beta,
                cutoff,
            } => chirp_value(*alpha, *beta, cutoff, r),
            ModelKind::ChirpLog {
                alpha,
                beta,
                cutoff,
            } => chirp_log_value(*alpha, *beta, cutoff, r),
            ModelKind::Nu { alpha, cutoff } => {
                chirp_log_value(*alpha, x.len() as f64 * alpha / 2.0, cutoff, r)
            }
            ModelKind::RadialProfile { profile } => Complex64::new(profile.eval(r), 0.0),
            ModelKind::Product { factors } => factors
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f.eval(x)),
            ModelKind::Weighted { model, weight } => model.eval(x) * weight.eval(x),
        }
    }

    /// `(α, inner cutoff radius)` of every chirp factor.
    fn chirp_terms(&self, out: &mut Vec<(f64, f64)>) {
        match self {
            ModelKind::Chirp { alpha, cutoff, .. }
            | ModelKind::ChirpLog { alpha, cutoff, .. }
            | ModelKind::Nu { alpha, cutoff } => out.push((*alpha, cutoff.inner)),
            ModelKind::Product { factors } => factors.iter().for_each(|f| f.chirp_terms(out)),
            ModelKind::Weighted { model, .. } => model.chirp_terms(out),
            _ => {}
        }
    }

    fn vector_dim(&self) -> Option<usize> {
        match self {
            ModelKind::Gaussian { shift, .. } if !shift.is_empty() => Some(shift.len()),
            ModelKind::ModulatedGaussian { omega, .. } => Some(omega.len()),
            _ => None,
        }
    }

    /// Closed-form transform at `xi` for unit scale, when one exists.
    fn closed_form(&self, xi: &[f64]) -> Option<Complex64> {
        let n = xi.len() as i32;
        let gauss = |a: f64, k2: f64| (PI / a).powf(n as f64 / 2.0) * (-k2 / (4.0 * a)).exp();
        match self {
            ModelKind::Gaussian { a, shift } => {
                let k2: f64 = xi.iter().map(|v| v * v).sum();
                let phase: f64 = xi
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * shift.get(i).copied().unwrap_or(0.0))
                    .sum();
                Some(gauss(*a, k2) * Complex64::new(0.0, -phase).exp())
            }
            ModelKind::ModulatedGaussian { a, omega } => {
                let minus: f64 = xi.iter().zip(omega).map(|(v, w)| (v - w) * (v - w)).sum();
                let plus: f64 = xi.iter().zip(omega).map(|(v, w)| (v + w) * (v + w)).sum();
                Some(Complex64::new(0.5 * (gauss(*a, minus) + gauss(*a, plus)), 0.0))
            }
            _ => None,
        }
    }
}

fn check_log_cutoff(cutoff: &CutoffSpec) -> Result<()> {
    cutoff.validate()?;
    if cutoff.inner < 1.0 {
        return Err(Error::InvalidParameter(
            "log-damped chirps need the cutoff to vanish on |x| <= 1".into(),
        ));
    }
    Ok(())
}

fn chirp_value(alpha: f64, beta: f64, cutoff: &CutoffSpec, r: f64) -> Complex64 {
    if r <= cutoff.inner {
        return Complex64::default();
    }
    let amp = cutoff_rho(cutoff, r) / r.powf(beta);
    Complex64::from_polar(amp, r.powf(alpha))
}

fn chirp_log_value(alpha: f64, beta: f64, cutoff: &CutoffSpec, r: f64) -> Complex64 {
    if r <= cutoff.inner.max(1.0) {
        return Complex64::default();
    }
    chirp_value(alpha, beta, cutoff, r) / r.ln()
}

/// A symbolic model evaluated at `scale · x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelField {
    #[serde(flatten)]
    pub kind: ModelKind,
    #[serde(default = "unit", skip_serializing_if = "is_unit")]
    pub scale: f64,
}

fn unit() -> f64 {
    1.0
}

fn is_unit(s: &f64) -> bool {
    *s == 1.0
}

impl ModelField {
    pub fn new(kind: ModelKind) -> Result<Self> {
        kind.validate()?;
        Ok(ModelField { kind, scale: 1.0 })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: ModelField =
            serde_json::from_str(text).map_err(|e| Error::UnknownModel(e.to_string()))?;
        m.kind.validate()?;
        if !(m.scale > 0.0 && m.scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale {}", m.scale)));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model descriptors always serialize")
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        if self.scale == 1.0 {
            return self.kind.eval(x);
        }
        let mut y = [0.0; 3];
        for (d, v) in y.iter_mut().zip(x) {
            *d = v * self.scale;
        }
        self.kind.eval(&y[..x.len()])
    }

    /// The model for `x ↦ f(2^m x)`.
    pub fn dilated(&self, m: i32) -> ModelField {
        ModelField {
            kind: self.kind.clone(),
            scale: self.scale * 2f64.powi(m),
        }
    }

    /// Largest chirp phase advance per cell, `h · α · s^α · r^{α-1}`.
    /// The worst radius is the grid corner `L√n` for `α > 1` and the inner
    /// cutoff for `α < 1`.
    pub fn phase_per_cell(&self, grid: &Grid) -> Option<f64> {
        let mut terms = Vec::new();
        self.kind.chirp_terms(&mut terms);
        let s = self.scale;
        terms
            .into_iter()
            .map(|(alpha, inner)| {
                let reach = if alpha > 1.0 {
                    grid.half_width() * (grid.dim() as f64).sqrt()
                } else {
                    inner / s
                };
                grid.spacing() * alpha * s.powf(alpha) * reach.powf(alpha - 1.0)
            })
            .reduce(f64::max)
    }

    fn check_compatible(&self, grid: &Grid) -> Result<()> {
        if let Some(d) = self.kind.vector_dim() {
            if d != grid.dim() {
                return Err(Error::InvalidParameter(format!(
                    "model vectors have length {d}, grid dimension is {}",
                    grid.dim()
                )));
            }
        }
        Ok(())
    }

    /// Sample on `grid`, refusing chirps whose phase advances more than
    /// [`DEFAULT_PHASE_PER_CELL`] per cell.
    pub fn sample(&self, grid: &Grid) -> Result<SampledField> {
        self.sample_with_limit(grid, DEFAULT_PHASE_PER_CELL)
    }

    pub fn sample_with_limit(&self, grid: &Grid, max_phase: f64) -> Result<SampledField> {
        if let Some(step) = self.phase_per_cell(grid) {
            if step > max_phase {
                return Err(Error::Sampling(format!(
                    "chirp phase advances {step:.4} rad per cell (limit {max_phase:.4})"
                )));
            }
        }
        self.sample_unchecked(grid)
    }

    /// Sample without the phase-resolution check.
    pub fn sample_unchecked(&self, grid: &Grid) -> Result<SampledField> {
        self.check_compatible(grid)?;
        let label = self.to_json();
        Ok(SampledField::from_fn(*grid, label, |x| self.eval(x))?.with_model(self.clone()))
    }

    pub fn has_closed_form(&self) -> bool {
        self.kind.closed_form(&[0.0]).is_some()
    }

    /// Exact transform at `xi`: `s^{-n} F₀(ξ / s)` for scale `s`.
    pub fn closed_form_ft(&self, xi: &[f64]) -> Option<Complex64> {
        let s = self.scale;
        let mut k = [0.0; 3];
        for (d, v) in k.iter_mut().zip(xi) {
            *d = v / s;
        }
        self.kind
            .closed_form(&k[..xi.len()])
            .map(|v| v / s.powi(xi.len() as i32))
    }
}

pub fn chirp(params: &ChirpParams, cutoff: &CutoffSpec, grid: &Grid) -> Result<SampledField> {
    check_dim(params.n, grid)?;
    ModelField::new(ModelKind::Chirp {
        alpha: params.alpha,
        beta: params.beta,
        cutoff: *cutoff,
    })?
    .sample(grid)
}

pub fn chirp_log(params: &ChirpParams, cutoff: &CutoffSpec, grid: &Grid) -> Result<SampledField> {
    check_dim(params.n, grid)?;
    ModelField::new(ModelKind::ChirpLog {
        alpha: params.alpha,
        beta: params.beta,
        cutoff: *cutoff,
    })?
    .sample(grid)
}

pub fn nu(alpha: f64, cutoff: &CutoffSpec, grid: &Grid) -> Result<SampledField> {
    ModelField::new(ModelKind::Nu {
        alpha,
        cutoff: *cutoff,
    })?
    .sample(grid)
}

fn check_dim(n: usize, grid: &Grid) -> Result<()> {
    if n != grid.dim() {
        return Err(Error::InvalidParameter(format!(
            "chirp dimension {n} differs from grid dimension {}",
            grid.dim()
        )));
    }
    Ok(())
}

/// A model sampled on `grid` together with its exact transform on the
/// frequency lattice.
pub fn oracle_pair(model: &ModelField, grid: &Grid) -> Result<(SampledField, Spectrum)> {
    if !model.has_closed_form() {
        return Err(Error::UnknownModel(format!(
            "no closed-form transform for {}",
            model.to_json()
        )));
    }
    let field = model.sample(grid)?;
    let dim = grid.dim();
    let values = (0..grid.len())
        .map(|i| model.closed_form_ft(&grid.wavevector(i)[..dim]).unwrap())
        .collect();
    Ok((field, Spectrum::new(*grid, values)?))
}

/// `max |F_num - F_exact| / max |F_exact|` for an oracle model.
pub fn oracle_error(model: &ModelField, grid: &Grid) -> Result<f64> {
    let (field, exact) = oracle_pair(model, grid)?;
    let num = fourier_transform(&field);
    let peak = exact.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let err = num
        .values()
        .iter()
        .zip(exact.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(err / peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn cutoff_examples() {
        let c = CutoffSpec::default();
        assert_eq!(cutoff_rho(&c, 1.0), 0.0);
        assert_eq!(cutoff_rho(&c, 0.3), 0.0);
        assert_eq!(cutoff_rho(&c, 2.0), 1.0);
        assert_eq!(cutoff_rho(&c, 7.0), 1.0);
        // g(0.5) / (g(0.5) + g(0.5))
        let g = (-1.0f64 / 0.5).exp();
        assert_eq!(cutoff_rho(&c, 1.5), g / (g + g));
        assert_eq!(cutoff_rho(&c, 1.5), 0.5);
        assert!(CutoffSpec::new(2.0, 1.0).is_err());
        assert!(CutoffSpec::new(0.0, 1.0).is_err());
    }

    #[test]
    fn chirp_pointwise_values() {
        let m = ModelField::new(ModelKind::Chirp {
            alpha: 2.0,
            beta: 1.0,
            cutoff: CutoffSpec::default(),
        })
        .unwrap();
        let v = m.eval(&[2.0]);
        let want = Complex64::from_polar(0.5, 4.0);
        assert!((v - want).norm() < 1e-15);
        for r in [0.0, 0.5, 1.0] {
            assert_eq!(m.eval(&[r]), Complex64::default());
            assert_eq!(m.eval(&[r * 0.6, r * 0.8]), Complex64::default());
        }
    }

    #[test]
    fn chirp_parameter_contract() {
        assert!(ChirpParams::new(1.0, 1.0, 1).is_err());
        assert!(ChirpParams::new(0.0, 1.0, 1).is_err());
        assert!(ChirpParams::new(2.0, 0.0, 1).is_err());
        assert!(ChirpParams::new(2.0, 1.5, 4).is_err());
        assert!(ChirpParams::new(2.0, 1.5, 1).is_ok());
    }

    #[test]
    fn chirp_sampling_adequacy() {
        let p = ChirpParams::new(2.0, 1.5, 1).unwrap();
        let c = CutoffSpec::default();
        let coarse = Grid::new(1, 512.0, 1 << 12).unwrap();
        assert!(matches!(chirp(&p, &c, &coarse), Err(Error::Sampling(_))));
        let fine = Grid::new(1, 512.0, 1 << 20).unwrap();
        let f = chirp(&p, &c, &fine).unwrap();
        assert_eq!(f.values().len(), 1 << 20);
        // phase advance h·2L = 1 rad per cell
        let m = f.model().unwrap();
        assert!((m.phase_per_cell(&fine).unwrap() - 1.0).abs() < 1e-12);
        assert!(chirp(&ChirpParams::new(2.0, 1.5, 2).unwrap(), &c, &fine).is_err());
    }

    #[test]
    fn chirp_log_and_nu() {
        let c = CutoffSpec::default();
        let mu = ModelKind::ChirpLog {
            alpha: 2.0,
            beta: 1.0,
            cutoff: c,
        };
        let m = ModelKind::Chirp {
            alpha: 2.0,
            beta: 1.0,
            cutoff: c,
        };
        assert_eq!(mu.eval(&[1.0]), Complex64::default());
        assert_eq!(mu.eval(&[0.2]), Complex64::default());
        let at_e = mu.eval(&[E]);
        assert!((at_e - m.eval(&[E])).norm() < 1e-15);
        // ν_2 in one dimension is μ_{2,1}
        let nu2 = ModelKind::Nu {
            alpha: 2.0,
            cutoff: c,
        };
        for x in [1.3, 2.0, 5.5, 40.0] {
            assert_eq!(nu2.eval(&[x]), mu.eval(&[x]));
        }
        // and μ_{2,2} in two dimensions
        let mu22 = ModelKind::ChirpLog {
            alpha: 2.0,
            beta: 2.0,
            cutoff: c,
        };
        assert_eq!(nu2.eval(&[1.5, 2.0]), mu22.eval(&[1.5, 2.0]));
        let bad = ModelKind::Nu {
            alpha: 2.0,
            cutoff: CutoffSpec {
                inner: 0.5,
                outer: 2.0,
            },
        };
        assert!(ModelField::new(bad).is_err());
    }

    #[test]
    fn chirp_amplitude_and_phase_identities() {
        let c = CutoffSpec::default();
        let g = Grid::new(1, 30.0, 1 << 14).unwrap();
        let p = ChirpParams::new(1.5, 0.7, 1).unwrap();
        let m = chirp(&p, &c, &g).unwrap();
        let mu = chirp_log(&p, &c, &g).unwrap();
        for i in 0..g.len() {
            let r = g.radius(i);
            let v = m.values()[i];
            let want = cutoff_rho(&c, r) / r.powf(0.7);
            if r > 1.0 {
                assert!((v.norm() - want).abs() <= 1e-14 * want.max(1e-300));
                if want > 0.0 {
                    let ph = Complex64::from_polar(1.0, r.powf(1.5));
                    assert!((v / v.norm() - ph).norm() < 1e-12);
                }
                let back = mu.values()[i] * r.ln();
                assert!((back - v).norm() <= 1e-14 * v.norm().max(1e-300));
            } else {
                assert_eq!(v, Complex64::default());
            }
        }
    }

    #[test]
    fn oracle_pairs_match_transform() {
        let g1 = Grid::new(1, 20.0, 4096).unwrap();
        let g2 = Grid::new(2, 20.0, 256).unwrap();
        let cases = [
            (r#"{"kind":"gaussian","a":0.5}"#, g1),
            (r#"{"kind":"gaussian","a":1.0}"#, g2),
            (r#"{"kind":"gaussian","a":0.5,"shift":[1.0]}"#, g1),
            (r#"{"kind":"modulated_gaussian","a":0.5,"omega":[5.0]}"#, g1),
            (r#"{"kind":"modulated_gaussian","a":1.0,"omega":[2.0,-1.0]}"#, g2),
            (r#"{"kind":"gaussian","a":0.5,"scale":2.0}"#, g1),
        ];
        for (json, g) in cases {
            let m = ModelField::from_json(json).unwrap();
            let err = oracle_error(&m, &g).unwrap();
            assert!(err <= 1e-6, "{json}: {err}");
        }
    }

    #[test]
    fn closed_forms_at_named_points() {
        let g = ModelField::from_json(r#"{"kind":"gaussian","a":1.0}"#).unwrap();
        let v = g.closed_form_ft(&[1.0, 1.0]).unwrap();
        assert!((v.re - PI * (-0.5f64).exp()).abs() < 1e-15);
        let s = ModelField::from_json(r#"{"kind":"gaussian","a":0.5,"shift":[1.0]}"#).unwrap();
        let xi = 0.7;
        let want = (2.0 * PI).sqrt() * (-xi * xi / 2.0f64).exp() * Complex64::new(0.0, -xi).exp();
        assert!((s.closed_form_ft(&[xi]).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn unknown_kinds_and_mismatches() {
        assert!(matches!(
            ModelField::from_json(r#"{"kind":"sawtooth","a":1}"#),
            Err(Error::UnknownModel(_))
        ));
        let chirp = ModelField::from_json(r#"{"kind":"chirp","alpha":2,"beta":1}"#).unwrap();
        let g = Grid::new(1, 20.0, 4096).unwrap();
        assert!(matches!(oracle_pair(&chirp, &g), Err(Error::UnknownModel(_))));
        let m = ModelField::from_json(r#"{"kind":"modulated_gaussian","a":1,"omega":[1,2]}"#)
            .unwrap();
        assert!(m.sample(&g).is_err());
    }

    #[test]
    fn descriptor_json_round_trip() {
        let text = r#"{"kind":"weighted","model":{"kind":"nu","alpha":2.0},"weight":{"kind":"power","epsilon":0.5},"scale":0.5}"#;
        let m = ModelField::from_json(text).unwrap();
        let again = ModelField::from_json(&m.to_json()).unwrap();
        assert_eq!(m, again);
        assert_eq!(m.scale, 0.5);
    }
}
