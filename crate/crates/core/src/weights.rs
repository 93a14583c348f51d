//! Weight families: power `(1+|x|²)^{ε/2}`, log-power
//! `(1+log(1+|x|²))^α`, exponential `e^{±|x|^β}`, products and powers,
//! with an empirical admissibility probe.

use crate::error::{Error, Result};
use crate::grid::norm;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Power { epsilon: f64 },
    LogPower { alpha: f64 },
    Exp { sign: Sign, beta: f64 },
    Product { factors: Vec<WeightSpec> },
    PowerOf { base: Box<WeightSpec>, exponent: f64 },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::unit()
    }
}

impl WeightSpec {
    pub fn unit() -> Self {
        WeightSpec::Power { epsilon: 0.0 }
    }

    pub fn power(epsilon: f64) -> Self {
        WeightSpec::Power { epsilon }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, WeightSpec::Power { epsilon } if *epsilon == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} = {v}")))
            }
        };
        match self {
            WeightSpec::Power { epsilon } => finite(*epsilon, "epsilon"),
            WeightSpec::LogPower { alpha } => finite(*alpha, "alpha"),
            WeightSpec::Exp { beta, .. } => {
                if *beta > 0.0 && *beta <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "exponential weight needs 0 < beta <= 1, got {beta}"
                    )))
                }
            }
            WeightSpec::Product { factors } => factors.iter().try_for_each(|f| f.validate()),
            WeightSpec::PowerOf { base, exponent } => {
                finite(*exponent, "exponent")?;
                base.validate()
            }
        }
    }

    /// `log w(x)`.
    pub fn ln_eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            WeightSpec::Power { epsilon } => {
                if *epsilon == 0.0 {
                    0.0
                } else {
                    0.5 * epsilon * r2.ln_1p()
                }
            }
            WeightSpec::LogPower { alpha } => alpha * (1.0 + r2.ln_1p()).ln(),
            WeightSpec::Exp { sign, beta } => sign.value() * r2.sqrt().powf(*beta),
            WeightSpec::Product { factors } => factors.iter().map(|f| f.ln_eval(x)).sum(),
            WeightSpec::PowerOf { base, exponent } => exponent * base.ln_eval(x),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            WeightSpec::Power { epsilon } if *epsilon == 0.0 => 1.0,
            WeightSpec::Power { epsilon } => (1.0 + x.iter().map(|v| v * v).sum::<f64>()).powf(epsilon / 2.0),
            WeightSpec::Product { factors } => factors.iter().map(|f| f.eval(x)).product(),
            WeightSpec::PowerOf { base, exponent } => base.eval(x).powf(*exponent),
            _ => self.ln_eval(x).exp(),
        }
    }

    /// `|∇w(x)| / w(x)` from the closed-form derivative of a built-in
    /// family; `None` for products and powers.
    pub fn log_gradient(&self, x: &[f64]) -> Option<f64> {
        let r = norm(x);
        match self {
            WeightSpec::Power { epsilon } => Some((epsilon * r / (1.0 + r * r)).abs()),
            WeightSpec::LogPower { alpha } => {
                Some((alpha * 2.0 * r / ((1.0 + r * r) * (1.0 + (r * r).ln_1p()))).abs())
            }
            WeightSpec::Exp { beta, .. } => {
                if r == 0.0 {
                    Some(if *beta == 1.0 { 1.0 } else { f64::INFINITY })
                } else {
                    Some(beta * r.powf(beta - 1.0))
                }
            }
            WeightSpec::Product { .. } | WeightSpec::PowerOf { .. } => None,
        }
    }
}

pub fn weight_eval(w: &WeightSpec, x: &[f64]) -> f64 {
    w.eval(x)
}

/// The weight `w^a`, kept in closed form where the family allows it.
pub fn weight_pow(w: &WeightSpec, a: f64) -> WeightSpec {
    if a == 0.0 {
        return WeightSpec::unit();
    }
    if a == 1.0 {
        return w.clone();
    }
    match w {
        WeightSpec::Power { epsilon } => WeightSpec::Power { epsilon: epsilon * a },
        WeightSpec::LogPower { alpha } => WeightSpec::LogPower { alpha: alpha * a },
        WeightSpec::Exp { sign, beta } if a == -1.0 => WeightSpec::Exp {
            sign: sign.flip(),
            beta: *beta,
        },
        WeightSpec::Exp { .. } => WeightSpec::PowerOf {
            base: Box::new(w.clone()),
            exponent: a,
        },
        WeightSpec::Product { factors } => WeightSpec::Product {
            factors: factors.iter().map(|f| weight_pow(f, a)).collect(),
        },
        WeightSpec::PowerOf { base, exponent } => WeightSpec::PowerOf {
            base: base.clone(),
            exponent: exponent * a,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeMode {
    /// `w(x) ≤ c·w(y)·(1+|x-y|²)^{α/2}`
    Polynomial,
    /// `w(x) ≤ C·w(y)·e^{d|x-y|}`
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub mode: ProbeMode,
    /// `c` (or `C`): smallest constant fitting every sampled pair at `alpha_est`.
    pub c_est: f64,
    /// `α` (or `d`): growth rate of the upper envelope.
    pub alpha_est: f64,
    /// Indices of pairs that break the growth law fitted on shorter distances.
    pub violations: Vec<usize>,
    /// Largest `|∇w|/w` seen, for built-in families.
    pub max_log_gradient: Option<f64>,
}

pub type PointPair = (Vec<f64>, Vec<f64>);

/// `count` seeded pairs `(x, x - z)` with `x` and the displacement `z`
/// uniform in `[-half_width, half_width]^n`.
pub fn random_pairs(n: usize, half_width: f64, count: usize, seed: u64) -> Vec<PointPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-half_width..=half_width)).collect()
    };
    (0..count)
        .map(|_| {
            let x = point(&mut rng);
            let z = point(&mut rng);
            let y = x.iter().zip(&z).map(|(a, b)| a - b).collect();
            (x, y)
        })
        .collect()
}

const ENVELOPE_BINS: usize = 32;
/// Allowed excess of `log w(x)/w(y)` over the extrapolated envelope.
const VIOLATION_SLACK: f64 = std::f64::consts::LN_2;

/// Least-squares slope and intercept of the per-bin maxima of `d` against `t`.
fn envelope_fit(t: &[f64], d: &[f64]) -> (f64, f64) {
    let t_max = t.iter().cloned().fold(0.0, f64::max);
    if t_max == 0.0 {
        return (0.0, d.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
    let mut best = vec![f64::NEG_INFINITY; ENVELOPE_BINS];
    let mut at = vec![0.0; ENVELOPE_BINS];
    for (&ti, &di) in t.iter().zip(d) {
        let b = ((ti / t_max) * ENVELOPE_BINS as f64).min(ENVELOPE_BINS as f64 - 1.0) as usize;
        if di > best[b] {
            best[b] = di;
            at[b] = ti;
        }
    }
    let pts: Vec<(f64, f64)> = at
        .into_iter()
        .zip(best)
        .filter(|(_, v)| v.is_finite())
        .collect();
    let m = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let md = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - md)).sum();
    let slope = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
    (slope, md - slope * mt)
}

fn smallest_constant(t: &[f64], d: &[f64], slope: f64) -> f64 {
    t.iter()
        .zip(d)
        .map(|(ti, di)| di - slope * ti)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Empirical check of the admissibility growth condition on `pairs`.
///
/// The envelope slope is fitted on the pairs at or below the median
/// distance; pairs beyond the median whose log-ratio exceeds that law's
/// extrapolation by more than `ln 2` are reported as violations.
pub fn admissibility_probe(
    w: &WeightSpec,
    pairs: &[PointPair],
    mode: ProbeMode,
) -> Result<ProbeReport> {
    w.validate()?;
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("empty probe sample".into()));
    }
    let mut bad = Vec::new();
    let mut t = Vec::with_capacity(pairs.len());
    let mut d = Vec::with_capacity(pairs.len());
    let mut grad: Option<f64> = None;
    for (x, y) in pairs {
        let (wx, wy) = (w.eval(x), w.eval(y));
        for (v, p) in [(wx, x), (wy, y)] {
            if !(v > 0.0) {
                bad.extend_from_slice(p);
            }
        }
        let gap: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let dist = norm(&gap);
        t.push(match mode {
            ProbeMode::Polynomial => 0.5 * (dist * dist).ln_1p(),
            ProbeMode::Exponential => dist,
        });
        d.push(w.ln_eval(x) - w.ln_eval(y));
        if let Some(gx) = w.log_gradient(x) {
            grad = Some(grad.map_or(gx, |g: f64| g.max(gx)));
        }
    }
    if !bad.is_empty() {
        return Err(Error::NonPositiveWeight(bad));
    }

    let (alpha_est, _) = envelope_fit(&t, &d);
    let c_est = smallest_constant(&t, &d, alpha_est).exp();

    let mut sorted = t.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[sorted.len() / 2];
    let (mut t_fit, mut d_fit) = (Vec::new(), Vec::new());
    for (&ti, &di) in t.iter().zip(&d) {
        if ti <= median {
            t_fit.push(ti);
            d_fit.push(di);
        }
    }
    let (slope, _) = envelope_fit(&t_fit, &d_fit);
    let offset = smallest_constant(&t_fit, &d_fit, slope);
    let violations = t
        .iter()
        .zip(&d)
        .enumerate()
        .filter(|(_, (&ti, &di))| ti > median && di > offset + slope * ti + VIOLATION_SLACK)
        .map(|(i, _)| i)
        .collect();

    Ok(ProbeReport {
        mode,
        c_est,
        alpha_est,
        violations,
        max_log_gradient: grad,
    })
}
