//! Counterexample constructions for the sharpness propositions, checked
//! numerically: finite weighted norms, divergent Wiener tail.
//!
//! Weighted spaces are read multiplicatively here, `‖f w‖_{L_q}` and
//! `‖(I-Δ)^{s/2}(f w)‖_{L_r}`; this is the reading under which the
//! membership inequalities of the constructions hold as stated.

use super::fit::fit_band;
use super::threshold::{auto_chirp_grid, classify_field, dyadic_radii, Divergence, TailReport};
use crate::calculus::besov::scaled_power_sum;
use crate::calculus::bessel_potential;
use crate::criteria::{evaluate, thm_c_expression, CriterionCase, CriterionId, Num, Status, Verdict};
use crate::error::{Error, Result};
use crate::grid::{fourier_transform, Grid, SampledField};
use crate::models::{CutoffSpec, ModelField, ModelKind};
use crate::partition::{resolvable_range, uncovered_fraction};
use crate::weights::WeightSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest relative growth of a norm between truncation radii `L/2` and
/// `L` that still counts as finite.
pub const FINITE_GROWTH_TOL: f64 = 0.05;
/// Largest admissible spectral energy fraction above the top block.
pub const OOB_LIMIT: f64 = 1e-3;
/// Top radius exponent of the Wiener profile: `R ≤ 2^10`.
pub const DEMO_TOP_OCTAVE: i32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorm {
    pub label: String,
    pub exponent: f64,
    pub order: f64,
    pub weight: WeightSpec,
    /// Norm over `|x| ≤ L`.
    pub value: f64,
    /// Norm over `|x| ≤ L/2`.
    pub value_half: f64,
    pub growth: f64,
    pub oob: f64,
    pub finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub prop: CriterionId,
    pub prediction: Verdict,
    pub model: ModelField,
    pub alpha: f64,
    pub beta: f64,
    pub half_width: f64,
    pub points: usize,
    pub norms: Vec<WeightedNorm>,
    /// The same norms with integral weights `∫|g|^p w`, for comparison.
    pub integral_norms: Vec<WeightedNorm>,
    pub tail: TailReport,
    /// Every norm finite and the tail divergent.
    pub counterexample_confirmed: bool,
    pub agrees: bool,
}

fn truncated_lp(values: &[Complex64], grid: &Grid, p: f64, radius: f64) -> f64 {
    let inside: Vec<f64> = values
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.radius(*i) <= radius)
        .map(|(_, v)| v.norm())
        .collect();
    scaled_power_sum(&inside, p) * grid.cell_volume().powf(1.0 / p)
}

fn weighted(f: &SampledField, w: &WeightSpec) -> Result<SampledField> {
    let grid = *f.grid();
    let dim = grid.dim();
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v * w.eval(&grid.position(i)[..dim]))
        .collect();
    SampledField::new(grid, values, format!("{}·w", f.label))
}

/// `‖(I-Δ)^{order/2}(f w)‖_{L_p}` over `|x| ≤ L` and `|x| ≤ L/2`.
pub fn weighted_norm(
    label: &str,
    f: &SampledField,
    p: f64,
    order: f64,
    w: &WeightSpec,
) -> Result<WeightedNorm> {
    let g = weighted(f, w)?;
    let g = if order == 0.0 { g } else { bessel_potential(&g, order) };
    norm_report(label, &g, p, order, w, None)
}

/// `(∫_{|x|≤R} |(I-Δ)^{order/2} f|^p w)^{1/p}` at `R = L, L/2`.
pub fn integral_weighted_norm(
    label: &str,
    f: &SampledField,
    p: f64,
    order: f64,
    w: &WeightSpec,
) -> Result<WeightedNorm> {
    let g = if order == 0.0 { f.clone() } else { bessel_potential(f, order) };
    norm_report(label, &g, p, order, w, Some(w))
}

fn norm_report(
    label: &str,
    g: &SampledField,
    p: f64,
    order: f64,
    w: &WeightSpec,
    integral: Option<&WeightSpec>,
) -> Result<WeightedNorm> {
    let grid = *g.grid();
    let dim = grid.dim();
    let values: Vec<Complex64> = match integral {
        None => g.values().to_vec(),
        Some(iw) => g
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| v * iw.eval(&grid.position(i)[..dim]).powf(1.0 / p))
            .collect(),
    };
    let l = grid.half_width();
    let value = truncated_lp(&values, &grid, p, l);
    let value_half = truncated_lp(&values, &grid, p, l / 2.0);
    let growth = if value > 0.0 { (value - value_half) / value } else { 0.0 };
    let top = 2f64.powi(resolvable_range(&grid).1);
    let oob = uncovered_fraction(&fourier_transform(g), |t| if t <= top { 1.0 } else { 0.0 });
    Ok(WeightedNorm {
        label: label.to_string(),
        exponent: p,
        order,
        weight: w.clone(),
        value,
        value_half,
        growth,
        oob,
        finite: value.is_finite() && growth < FINITE_GROWTH_TOL && oob < OOB_LIMIT,
    })
}

/// The field and its weighted norms `(p, order, weight exponent)` for
/// a proposition.
struct Construction {
    model: ModelField,
    alpha: f64,
    beta: f64,
    norms: Vec<(String, f64, f64, f64)>,
}

fn need(v: &Option<Num>, name: &str) -> Result<f64> {
    v.as_ref()
        .map(|x| x.to_f64())
        .ok_or_else(|| Error::InvalidParameter(format!("missing {name}")))
}

fn construct(case: &CriterionCase, cutoff: CutoffSpec) -> Result<Construction> {
    let n = case.n as f64;
    let eps = need(&case.epsilon, "epsilon")?;
    match case.criterion {
        CriterionId::Prop64b => {
            let alpha = 1.0 + 2.0 * eps / n;
            if alpha < 1.0 {
                return Err(Error::Sampling(format!(
                    "ν_{alpha} diverges at |ξ| → 0; resolving it needs an unbounded box"
                )));
            }
            Ok(Construction {
                model: ModelField::new(ModelKind::Nu { alpha, cutoff })?,
                alpha,
                beta: n * alpha / 2.0,
                norms: vec![
                    (format!("L_2(w_{eps})"), 2.0, 0.0, eps),
                    (format!("H_2^{n}(w_{})", -eps), 2.0, n, -eps),
                ],
            })
        }
        CriterionId::Prop63 | CriterionId::Prop64a => {
            let (q, r, s) = (need(&case.q, "q")?, need(&case.r, "r")?, need(&case.s, "s")?);
            if !(q < 2.0 && r > 2.0) {
                return Err(Error::Sampling(
                    "the r < 2 < q branch diverges at |ξ| → 0; only q < 2 < r is resolvable".into(),
                ));
            }
            let gamma = (2.0 - q) / (r - q);
            // weight exponents of the L_q and H_r^s factors
            let (a, b) = if case.criterion == CriterionId::Prop63 {
                (eps / (1.0 - gamma), -eps / gamma)
            } else {
                (-eps / (1.0 - gamma), eps / gamma)
            };
            let norms = vec![
                (format!("L_{q}(w_{a})"), q, 0.0, a),
                (format!("H_{r}^{s}(w_{b})"), r, s, b),
            ];
            let equality = case.criterion == CriterionId::Prop63
                && thm_c_expression(case.n, case.s.as_ref().unwrap(), case.q.as_ref().unwrap(), case.r.as_ref().unwrap())
                    .is_some_and(|e| e.eq_num(&Num::ratio(1, 2)));
            if equality {
                let alpha = 2.0 / q;
                return Ok(Construction {
                    model: ModelField::new(ModelKind::Nu { alpha, cutoff })?,
                    alpha,
                    beta: n * alpha / 2.0,
                    norms,
                });
            }
            // m_{α, nα/2}: |f w_a| ~ |x|^{a - nα/2}, the order-s derivatives of
            // f w_b ~ |x|^{b - nα/2 + s(α-1)}. Balance the integrability margins
            // q(nα/2 - a) - n and r(nα/2 - b - s(α-1)) - n.
            let lq = |al: f64| q * (n * al / 2.0 - a) - n;
            let hr = |al: f64| r * (n * al / 2.0 - b - s * (al - 1.0)) - n;
            // both linear in α: lq = A1 α + B1, hr = A2 α + B2
            let (b1, a1) = (lq(0.0), lq(1.0) - lq(0.0));
            let (b2, a2) = (hr(0.0), hr(1.0) - hr(0.0));
            let alpha = if (a1 - a2).abs() > 1e-12 { (b2 - b1) / (a1 - a2) } else { f64::NAN };
            if !(alpha > 1.0 && lq(alpha) > 0.0 && hr(alpha) > 0.0) {
                return Err(Error::Sampling(format!(
                    "no chirp m_(α, nα/2) with α > 1 lies in both weighted spaces (balanced α = {alpha:.4})"
                )));
            }
            Ok(Construction {
                model: ModelField::new(ModelKind::Chirp {
                    alpha,
                    beta: n * alpha / 2.0,
                    cutoff,
                })?,
                alpha,
                beta: n * alpha / 2.0,
                norms,
            })
        }
        other => Err(Error::InvalidParameter(format!(
            "{other} has no sharpness construction"
        ))),
    }
}

/// Grid for the demo: resolves the Wiener profile up to `2^DEMO_TOP_OCTAVE`
/// and keeps the chirp's edge frequency below the top dyadic block.
pub fn demo_grid(alpha: f64, n: usize) -> Result<Grid> {
    let radii = dyadic_radii(2, DEMO_TOP_OCTAVE);
    let mut grid = auto_chirp_grid(alpha, n, &radii)?;
    loop {
        let l = grid.half_width() * (n as f64).sqrt();
        let edge = alpha * l.powf(alpha - 1.0);
        if edge <= 2f64.powi(resolvable_range(&grid).1) {
            return Ok(grid);
        }
        let points = grid.points() * 2;
        if points.pow(n as u32) > super::threshold::MAX_AUTO_POINTS {
            return Err(Error::Sampling("demo grid exceeds the size cap".into()));
        }
        grid = Grid::new(n, grid.half_width(), points)?;
    }
}

pub fn sharpness_demo(
    case: &CriterionCase,
    grid: Option<Grid>,
    cutoff: CutoffSpec,
) -> Result<SharpnessReport> {
    let prediction = evaluate(case);
    if prediction.status != Status::SharpFailRegion {
        return Err(Error::NotCovered(format!(
            "{} evaluates to {}: {}",
            case.criterion,
            prediction.status,
            prediction.notes.join("; ")
        )));
    }
    let c = construct(case, cutoff)?;
    let grid = match grid {
        Some(g) => g,
        None => demo_grid(c.alpha, case.n as usize)?,
    };
    let field = c.model.sample(&grid)?;
    let mut norms = Vec::new();
    let mut integral_norms = Vec::new();
    for (label, p, order, w) in &c.norms {
        let weight = WeightSpec::power(*w);
        norms.push(weighted_norm(label, &field, *p, *order, &weight)?);
        integral_norms.push(integral_weighted_norm(label, &field, *p, *order, &weight)?);
    }
    let [_, hi] = fit_band(&grid);
    let top = DEMO_TOP_OCTAVE.min(hi.log2().floor() as i32);
    let tail = classify_field(&field, &dyadic_radii(2, top))?;
    let confirmed = norms.iter().all(|x| x.finite) && tail.verdict == Divergence::Divergent;
    Ok(SharpnessReport {
        prop: case.criterion,
        prediction,
        model: c.model,
        alpha: c.alpha,
        beta: c.beta,
        half_width: grid.half_width(),
        points: grid.points(),
        norms,
        integral_norms,
        tail,
        counterexample_confirmed: confirmed,
        agrees: confirmed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_outside_hypotheses() {
        let case = CriterionCase::new(CriterionId::Prop64b, 1).epsilon(Num::ratio(-1, 1));
        assert!(matches!(
            sharpness_demo(&case, None, CutoffSpec::default()),
            Err(Error::NotCovered(_))
        ));
        let case = CriterionCase::new(CriterionId::Prop63, 1)
            .q(Num::int(1))
            .r(Num::int(4))
            .s(Num::int(1))
            .epsilon(Num::ratio(1, 10));
        assert!(matches!(
            sharpness_demo(&case, None, CutoffSpec::default()),
            Err(Error::NotCovered(_))
        ));
    }

    #[test]
    fn negative_epsilon_needs_low_frequencies() {
        let case = CriterionCase::new(CriterionId::Prop64b, 1).epsilon(Num::ratio(-1, 4));
        assert!(matches!(
            sharpness_demo(&case, None, CutoffSpec::default()),
            Err(Error::Sampling(_))
        ));
    }

    #[test]
    fn prop63_chirp_counterexample() {
        let case = CriterionCase::new(CriterionId::Prop63, 1)
            .q(Num::ratio(3, 2))
            .r(Num::int(4))
            .s(Num::int(1))
            .epsilon(Num::ratio(1, 10));
        let rep = sharpness_demo(&case, None, CutoffSpec::default()).unwrap();
        assert!(rep.alpha > 1.0 && (rep.beta - rep.alpha / 2.0).abs() < 1e-12);
        assert!(rep.norms.iter().all(|n| n.finite), "{:?}", rep.norms);
        assert_eq!(rep.tail.verdict, Divergence::Divergent);
        assert!(rep.agrees);
    }
}
