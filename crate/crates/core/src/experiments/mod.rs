//! Reproducible experiments: threshold sweeps, rate fits, inequality
//! audits, sharpness demonstrations and persisted parameter sweeps.

pub mod ensemble;
pub mod fit;
pub mod inequality;
pub mod sharpness;
pub mod threshold;

pub use fit::{rate_fit, FitResult, LogCorrection};
pub use inequality::{b21_bound_audit, gn_ratio, holder_ratio, GnParams, GnReport};
pub use sharpness::{sharpness_demo, SharpnessReport};
pub use threshold::{classify_tail, wiener_threshold_sweep, Divergence, TailReport, ThresholdRow};

use crate::calculus::{besov_norm, BesovSpec};
use crate::criteria::{csv_record, evaluate, CriterionCase, CriterionId, Num, CSV_HEADER};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::models::{CutoffSpec, ModelField};
use crate::partition::DyadicPartition;
use crate::weights::{admissibility_probe, random_pairs, ProbeMode, WeightSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Version of the config and output schemas.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

impl GridParams {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.half_width, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Criterion verdicts over the Cartesian product of `lattice`.
    Classify {
        criterion: CriterionId,
        n: u32,
        lattice: BTreeMap<String, Vec<Num>>,
    },
    /// Wiener profiles and tail verdicts of `m_{α,β}` for each `β`.
    Threshold {
        alpha: f64,
        n: usize,
        betas: Vec<f64>,
        /// Radii `2^lo ..= 2^hi`.
        radii: [i32; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<GridParams>,
        #[serde(default)]
        cutoff: CutoffSpec,
    },
    /// Besov norms of one model over a lattice of `(s, p, q_sum)`.
    Norms {
        model: ModelField,
        grid: GridParams,
        s: Vec<f64>,
        p: Vec<f64>,
        q_sum: Vec<f64>,
        #[serde(default)]
        homogeneous: bool,
        #[serde(default = "WeightSpec::unit")]
        weight: WeightSpec,
    },
    /// Product-inequality ratios over a manifest ensemble and dilations.
    Gn {
        ensemble: String,
        params: GnParams,
        dilations: Vec<i32>,
    },
    /// Admissibility probe of each weight on seeded random pairs.
    Admissibility {
        weights: Vec<WeightSpec>,
        n: usize,
        half_width: f64,
        pairs: usize,
        mode: ProbeMode,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output stem: `<output>.csv` and `<output>.json` are written.
    pub output: PathBuf,
    pub experiment: Experiment,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::Config(format!("empty {what} lattice")));
        match &self.experiment {
            Experiment::Classify { lattice, .. } => {
                if lattice.values().any(|v| v.is_empty()) {
                    return empty("parameter");
                }
                for key in lattice.keys() {
                    if !LATTICE_KEYS.contains(&key.as_str()) {
                        return Err(Error::Config(format!("unknown lattice parameter {key:?}")));
                    }
                }
            }
            Experiment::Threshold { betas, radii, .. } => {
                if betas.is_empty() || radii[0] > radii[1] {
                    return empty("β or radius");
                }
            }
            Experiment::Norms { s, p, q_sum, .. } => {
                if s.is_empty() || p.is_empty() || q_sum.is_empty() {
                    return empty("(s, p, q_sum)");
                }
            }
            Experiment::Gn { dilations, .. } => {
                if dilations.is_empty() {
                    return empty("dilation");
                }
            }
            Experiment::Admissibility { weights, .. } => {
                if weights.is_empty() {
                    return empty("weight");
                }
                if self.seed.is_none() {
                    return Err(Error::Config("admissibility sampling needs a seed".into()));
                }
            }
        }
        Ok(())
    }
}

const LATTICE_KEYS: [&str; 9] = ["p", "q", "r", "s", "sigma", "tau", "epsilon", "alpha", "beta"];

/// Rows in lattice order plus a JSON payload per row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultSet {
    pub experiment_id: String,
    pub schema_version: u32,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub payload: Vec<serde_json::Value>,
}

impl ResultSet {
    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn json_bytes(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self)?;
        out.push(b'\n');
        Ok(out)
    }
}

/// Write `bytes` to a sibling temp file, then rename it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    let tmp = path.with_file_name(name);
    let result = (|| {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Locale-free CSV rendering of a float; infinities print as `inf`.
pub fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e15) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn lattice_points(lattice: &BTreeMap<String, Vec<Num>>) -> Vec<Vec<(String, Num)>> {
    let mut points: Vec<Vec<(String, Num)>> = vec![Vec::new()];
    for (key, values) in lattice {
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.compare(b));
        sorted.dedup_by(|a, b| a.eq_num(b));
        points = points
            .into_iter()
            .flat_map(|p| {
                sorted.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((key.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }
    points
}

fn classify_rows(criterion: CriterionId, n: u32, lattice: &BTreeMap<String, Vec<Num>>) -> Result<ResultSet> {
    let cases: Vec<CriterionCase> = lattice_points(lattice)
        .into_iter()
        .map(|point| {
            let mut c = CriterionCase::new(criterion, n);
            for (k, v) in point {
                let slot = match k.as_str() {
                    "p" => &mut c.p,
                    "q" => &mut c.q,
                    "r" => &mut c.r,
                    "s" => &mut c.s,
                    "sigma" => &mut c.sigma,
                    "tau" => &mut c.tau,
                    "epsilon" => &mut c.epsilon,
                    "alpha" => &mut c.alpha,
                    _ => &mut c.beta,
                };
                *slot = Some(v);
            }
            c
        })
        .collect();
    let verdicts: Vec<_> = cases.par_iter().map(evaluate).collect();
    let mut rs = ResultSet {
        experiment_id: String::new(),
        schema_version: SCHEMA_VERSION,
        header: CSV_HEADER.iter().map(|s| s.to_string()).collect(),
        rows: Vec::new(),
        payload: Vec::new(),
    };
    for (c, v) in cases.iter().zip(&verdicts) {
        rs.rows.push(csv_record(c, v));
        rs.payload.push(serde_json::json!({ "case": c, "verdict": v }));
    }
    Ok(rs)
}

fn empty_set(header: &[&str]) -> ResultSet {
    ResultSet {
        experiment_id: String::new(),
        schema_version: SCHEMA_VERSION,
        header: header.iter().map(|s| s.to_string()).collect(),
        rows: Vec::new(),
        payload: Vec::new(),
    }
}

pub const THRESHOLD_HEADER: [&str; 11] = [
    "alpha", "beta", "n", "radius", "mass", "prediction", "verdict", "family", "exponent", "log_slope", "agrees",
];

/// CSV rows for threshold sweep results, one per profile point.
pub fn threshold_result_set(rows: &[ThresholdRow]) -> Result<ResultSet> {
    let mut rs = empty_set(&THRESHOLD_HEADER);
    for row in rows {
        let rep = &row.report;
        let verdict = serde_json::to_value(rep.verdict)?;
        let family = serde_json::to_value(rep.family)?;
        for p in &rep.profile {
            rs.rows.push(vec![
                fmt_value(row.alpha),
                fmt_value(row.beta),
                row.n.to_string(),
                fmt_value(p.radius),
                fmt_value(p.mass),
                row.prediction.to_string(),
                verdict.as_str().unwrap_or_default().to_string(),
                family.as_str().unwrap_or_default().to_string(),
                fmt_value(rep.exponent),
                fmt_value(rep.log_slope),
                row.agrees.to_string(),
            ]);
        }
        rs.payload.push(serde_json::to_value(row)?);
    }
    Ok(rs)
}

/// Run `config` without touching the file system.
pub fn run(config: &ExperimentConfig) -> Result<ResultSet> {
    config.validate()?;
    let mut rs = match &config.experiment {
        Experiment::Classify { criterion, n, lattice } => classify_rows(*criterion, *n, lattice)?,
        Experiment::Threshold {
            alpha,
            n,
            betas,
            radii,
            grid,
            cutoff,
        } => {
            let mut betas = betas.clone();
            betas.sort_by(f64::total_cmp);
            let grid = grid.as_ref().map(GridParams::grid).transpose()?;
            let rows = wiener_threshold_sweep(
                *alpha,
                *n,
                &betas,
                &threshold::dyadic_radii(radii[0], radii[1]),
                grid,
                *cutoff,
            )?;
            threshold_result_set(&rows)?
        }
        Experiment::Norms {
            model,
            grid,
            s,
            p,
            q_sum,
            homogeneous,
            weight,
        } => {
            let grid = grid.grid()?;
            let field = model.sample(&grid)?;
            let part = DyadicPartition::for_grid(&grid)?;
            let mut points = Vec::new();
            for &sv in s {
                for &pv in p {
                    for &qv in q_sum {
                        points.push((sv, pv, qv));
                    }
                }
            }
            points.sort_by(|a, b| {
                a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2))
            });
            let results = points
                .iter()
                .map(|&(sv, pv, qv)| {
                    let base = if *homogeneous {
                        BesovSpec::homogeneous(sv, pv, qv)
                    } else {
                        BesovSpec::inhomogeneous(sv, pv, qv)
                    };
                    besov_norm(&field, &base.weighted(weight.clone()), &part)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut rs = empty_set(&["s", "p", "q_sum", "value", "oob", "k_lo", "k_hi"]);
            for (&(sv, pv, qv), r) in points.iter().zip(&results) {
                rs.rows.push(vec![
                    fmt_value(sv),
                    fmt_value(pv),
                    fmt_value(qv),
                    fmt_value(r.value),
                    fmt_value(r.oob),
                    r.k_lo.to_string(),
                    r.k_hi.to_string(),
                ]);
                rs.payload.push(serde_json::to_value(r)?);
            }
            rs
        }
        Experiment::Gn {
            ensemble: name,
            params,
            dilations,
        } => {
            let entry = ensemble::manifest_entry(name)?;
            let grid = entry.grid()?;
            let members = entry.members()?;
            let mut ms = dilations.clone();
            ms.sort_unstable();
            ms.dedup();
            let sweeps = members
                .par_iter()
                .map(|m| inequality::gn_dilation_sweep(m, &grid, params, &ms))
                .collect::<Result<Vec<_>>>()?;
            let mut rs = empty_set(&["member", "m", "lhs", "rhs", "ratio", "delta", "truncation_artifact"]);
            for (i, sweep) in sweeps.iter().enumerate() {
                for (m, r) in sweep {
                    rs.rows.push(vec![
                        i.to_string(),
                        m.to_string(),
                        fmt_value(r.lhs),
                        fmt_value(r.rhs),
                        fmt_value(r.ratio),
                        fmt_value(r.delta),
                        r.truncation_artifact.to_string(),
                    ]);
                    rs.payload.push(serde_json::json!({ "member": i, "m": m, "report": r }));
                }
            }
            rs
        }
        Experiment::Admissibility {
            weights,
            n,
            half_width,
            pairs,
            mode,
        } => {
            let seed = config.seed.expect("validated");
            let sample = random_pairs(*n, *half_width, *pairs, seed);
            let mut rs = empty_set(&["weight", "mode", "c_est", "alpha_est", "violations", "max_log_gradient"]);
            for w in weights {
                let rep = admissibility_probe(w, &sample, *mode)?;
                rs.rows.push(vec![
                    serde_json::to_string(w)?,
                    serde_json::to_value(rep.mode)?.as_str().unwrap_or_default().to_string(),
                    fmt_value(rep.c_est),
                    fmt_value(rep.alpha_est),
                    rep.violations.len().to_string(),
                    rep.max_log_gradient.map(fmt_value).unwrap_or_default(),
                ]);
                rs.payload.push(serde_json::to_value(&rep)?);
            }
            rs
        }
    };
    rs.experiment_id = config.experiment_id.clone();
    Ok(rs)
}

/// `(<output>.csv, <output>.json)`.
pub fn output_paths(output: &Path) -> (PathBuf, PathBuf) {
    (output.with_extension("csv"), output.with_extension("json"))
}

/// Run `config` and persist its CSV and JSON atomically.
pub fn sweep(config: &ExperimentConfig) -> Result<ResultSet> {
    let rs = run(config)?;
    let (csv_path, json_path) = output_paths(&config.output);
    write_atomic(&csv_path, &rs.csv_bytes()?)?;
    write_atomic(&json_path, &rs.json_bytes()?)?;
    Ok(rs)
}
