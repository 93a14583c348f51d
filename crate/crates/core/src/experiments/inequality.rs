use super::ensemble::Member;
use crate::calculus::{besov_norm, bessel_potential, lp_norm, riesz_laplacian, wiener_mass, BesovSpec};
use crate::criteria::{derived_exponents, gamma as gamma_exact, CriterionCase, CriterionId, Num};
use crate::error::{Error, Result};
use crate::grid::{Grid, SampledField};
use crate::partition::{lp_block, DyadicPartition};
use crate::weights::{weight_pow, WeightSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Parameters of the product inequality
/// `‖(-Δ)^{τ/2}f‖_p ≤ C ‖(-Δ)^{σ/2}f‖_{L_q(u^{1/(1-γ)})}^{1-δ} ‖(-Δ)^{s/2}f‖_{L_r(v^{1/γ})}^δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnParams {
    pub n: usize,
    pub tau: f64,
    #[serde(default)]
    pub sigma: f64,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    #[serde(default = "WeightSpec::unit")]
    pub u: WeightSpec,
    #[serde(default = "WeightSpec::unit")]
    pub v: WeightSpec,
    /// Overrides the interpolation exponent derived from the other values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub delta: f64,
    /// `rhs = 0 < lhs`: the truncated field broke the inequality's premise.
    pub truncation_artifact: bool,
}

impl GnParams {
    fn case(&self) -> CriterionCase {
        let x = Num::from_decimal;
        CriterionCase::new(CriterionId::Th31, self.n as u32)
            .p(x(self.p))
            .q(x(self.q))
            .r(x(self.r))
            .s(x(self.s))
            .sigma(x(self.sigma))
            .tau(x(self.tau))
    }

    pub fn delta(&self) -> Result<f64> {
        if let Some(d) = self.delta {
            return Ok(d);
        }
        let d = derived_exponents(&self.case());
        d.delta.map(|v| v.to_f64()).ok_or_else(|| {
            Error::InvalidParameter(format!("δ undefined: {}", d.missing.join("; ")))
        })
    }

    /// `(u^{1/(1-γ)}, v^{1/γ})`; unit weights need no `γ`.
    fn weights(&self) -> Result<(WeightSpec, WeightSpec)> {
        if self.u.is_unit() && self.v.is_unit() {
            return Ok((WeightSpec::unit(), WeightSpec::unit()));
        }
        let x = Num::from_decimal;
        let g = gamma_exact(&x(self.p), &x(self.q), &x(self.r))?.to_f64();
        if g <= 0.0 || g >= 1.0 {
            return Err(Error::InvalidParameter(format!("γ = {g} leaves (0, 1)")));
        }
        Ok((weight_pow(&self.u, 1.0 / (1.0 - g)), weight_pow(&self.v, 1.0 / g)))
    }
}

fn riesz_or_identity(f: &SampledField, order: f64) -> Result<SampledField> {
    if order == 0.0 {
        Ok(f.clone())
    } else {
        riesz_laplacian(f, order)
    }
}

pub fn gn_ratio(f: &SampledField, params: &GnParams) -> Result<GnReport> {
    let delta = params.delta()?;
    let (wu, wv) = params.weights()?;
    let unit = WeightSpec::unit();
    let lhs = lp_norm(&riesz_or_identity(f, params.tau)?, params.p, &unit)?;
    let a = lp_norm(&riesz_or_identity(f, params.sigma)?, params.q, &wu)?;
    let b = lp_norm(&riesz_or_identity(f, params.s)?, params.r, &wv)?;
    let rhs = a.powf(1.0 - delta) * b.powf(delta);
    let artifact = rhs == 0.0 && lhs > 0.0;
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(GnReport {
        lhs,
        rhs,
        ratio,
        delta,
        truncation_artifact: artifact,
    })
}

/// `gn_ratio` of `f(2^m ·)` for each `m`.
pub fn gn_dilation_sweep(member: &Member, grid: &Grid, params: &GnParams, ms: &[i32]) -> Result<Vec<(i32, GnReport)>> {
    ms.iter()
        .map(|&m| Ok((m, gn_ratio(&member.sample(grid, m)?, params)?)))
        .collect()
}

/// `‖f‖_p / (‖f‖_{L_q(u^{1/(1-γ)})}^{q(1-γ)/p} ‖f‖_{L_r(v^{1/γ})}^{rγ/p})`
/// for `q < p < r`; at most 1 whenever `u v ≥ 1`.
pub fn holder_ratio(f: &SampledField, p: f64, q: f64, r: f64, u: &WeightSpec, v: &WeightSpec) -> Result<f64> {
    if !(q < p && p < r) {
        return Err(Error::InvalidParameter("needs q < p < r".into()));
    }
    let g = if r.is_infinite() { 0.0 } else { (p - q) / (r - q) };
    if g == 0.0 {
        return Err(Error::InvalidParameter("needs r < ∞".into()));
    }
    let num = lp_norm(f, p, &WeightSpec::unit())?;
    let a = lp_norm(f, q, &weight_pow(u, 1.0 / (1.0 - g)))?;
    let b = lp_norm(f, r, &weight_pow(v, 1.0 / g))?;
    let den = a.powf(q * (1.0 - g) / p) * b.powf(r * g / p);
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

/// `‖f‖_{W_0} / ‖f‖_{Ḃ_{2,1}^{n/2}}` on `grid`.
pub fn b21_ratio(f: &SampledField) -> Result<f64> {
    let n = f.grid().dim() as f64;
    let part = DyadicPartition::for_grid(f.grid())?;
    let b = besov_norm(f, &BesovSpec::homogeneous(n / 2.0, 2.0, 1.0), &part)?.value;
    if b == 0.0 {
        return Err(Error::InvalidParameter("zero field has no ratio".into()));
    }
    Ok(wiener_mass(f, None) / b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableConstant {
    pub coarse: f64,
    pub fine: f64,
}

impl StableConstant {
    /// `|fine / coarse - 1|`.
    pub fn drift(&self) -> f64 {
        (self.fine / self.coarse - 1.0).abs()
    }
}

fn max_over<F>(members: &[Member], grid: &Grid, f: F) -> Result<f64>
where
    F: Fn(&SampledField) -> Result<f64> + Sync,
{
    let vals = members
        .par_iter()
        .map(|m| f(&m.sample(grid, 0)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Largest `‖f‖_{W_0} / ‖f‖_{Ḃ_{2,1}^{n/2}}` over the ensemble on `grid`
/// and on the grid with twice the points.
pub fn b21_bound_audit(members: &[Member], grid: &Grid) -> Result<StableConstant> {
    let fine = Grid::new(grid.dim(), grid.half_width(), grid.points() * 2)?;
    Ok(StableConstant {
        coarse: max_over(members, grid, b21_ratio)?,
        fine: max_over(members, &fine, b21_ratio)?,
    })
}

/// Largest `‖φ_k*f‖_p / (2^{kn(1/q-1/p)} ‖φ_k*f‖_q)` over the blocks of `f`.
pub fn nikolsky_ratio(f: &SampledField, p: f64, q: f64) -> Result<f64> {
    let n = f.grid().dim() as f64;
    let part = DyadicPartition::for_grid(f.grid())?;
    let unit = WeightSpec::unit();
    let mut best: f64 = 0.0;
    for k in part.blocks() {
        let b = lp_block(f, k)?;
        let bq = lp_norm(&b, q, &unit)?;
        if bq <= 1e-14 * f.max_abs().max(1e-300) {
            continue;
        }
        let bp = lp_norm(&b, p, &unit)?;
        best = best.max(bp / (2f64.powf(k as f64 * n * (1.0 / q - 1.0 / p)) * bq));
    }
    Ok(best)
}

pub fn nikolsky_constant(members: &[Member], grid: &Grid, p: f64, q: f64) -> Result<StableConstant> {
    let fine = Grid::new(grid.dim(), grid.half_width(), grid.points() * 2)?;
    Ok(StableConstant {
        coarse: max_over(members, grid, |f| nikolsky_ratio(f, p, q))?,
        fine: max_over(members, &fine, |f| nikolsky_ratio(f, p, q))?,
    })
}

/// Constants of `B_{p,1}^s ⊂ H_p^s ⊂ B_{p,∞}^s` for one field:
/// `(‖f‖_{H_p^s} / ‖f‖_{B_{p,1}^s}, ‖f‖_{B_{p,∞}^s} / ‖f‖_{H_p^s})`.
pub fn embedding_ratios(f: &SampledField, s: f64, p: f64) -> Result<(f64, f64)> {
    let part = DyadicPartition::for_grid(f.grid())?;
    let h = lp_norm(&bessel_potential(f, s), p, &WeightSpec::unit())?;
    let b1 = besov_norm(f, &BesovSpec::inhomogeneous(s, p, 1.0), &part)?.value;
    let binf = besov_norm(f, &BesovSpec::inhomogeneous(s, p, f64::INFINITY), &part)?.value;
    Ok((h / b1, binf / h))
}

pub fn embedding_constants(members: &[Member], grid: &Grid, s: f64, p: f64) -> Result<[StableConstant; 2]> {
    let fine = Grid::new(grid.dim(), grid.half_width(), grid.points() * 2)?;
    let on = |g: &Grid| -> Result<(f64, f64)> {
        let pairs = members
            .par_iter()
            .map(|m| embedding_ratios(&m.sample(g, 0)?, s, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(pairs
            .into_iter()
            .fold((0.0f64, 0.0f64), |acc, (a, b)| (acc.0.max(a), acc.1.max(b))))
    };
    let (c1, c2) = on(grid)?;
    let (f1, f2) = on(&fine)?;
    Ok([
        StableConstant { coarse: c1, fine: f1 },
        StableConstant { coarse: c2, fine: f2 },
    ])
}
