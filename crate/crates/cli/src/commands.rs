use crate::{
    ChirpArgs, ClassifyArgs, Cli, Command, Correction, DemoArgs, FitRateArgs, Format, GnArgs, GridArgs,
    ModelArgs, ModelName, NormArgs, SamplingArgs, SweepArgs, TransformArgs,
};
use std::path::{Path, PathBuf};
use thiserror::Error;
use wiener_core::calculus::{besov_norm, BesovSpec};
use wiener_core::criteria::{csv_record, evaluate, CriterionCase, Status, Verdict, CSV_HEADER};
use wiener_core::dump::write_samples;
use wiener_core::experiments::fit::{check_window, fit_band};
use wiener_core::experiments::inequality::GnParams;
use wiener_core::experiments::threshold::shell_profile;
use wiener_core::experiments::{
    self, fmt_value, output_paths, rate_fit, sharpness_demo, write_atomic, Experiment, ExperimentConfig,
    GridParams, LogCorrection, ResultSet, SCHEMA_VERSION,
};
use wiener_core::models::{oracle_pair, DEFAULT_PHASE_PER_CELL};
use wiener_core::{fourier_transform, CutoffSpec, DyadicPartition, Grid, ModelField, ModelKind, SampledField, WeightSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] wiener_core::Error),
    #[error("NOT_COVERED under --strict: {0}")]
    NotCovered(String),
}

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cli: &Cli) -> Result<()> {
    let ctx = Context { cli };
    match &cli.command {
        Command::Transform(a) => ctx.transform(a),
        Command::Norm(a) => ctx.norm(a),
        Command::Classify(a) => ctx.classify(a),
        Command::Chirp(a) => ctx.chirp(a),
        Command::Sweep(a) => ctx.sweep(a),
        Command::FitRate(a) => ctx.fit_rate(a),
        Command::GnCheck(a) => ctx.gn_check(a),
        Command::Demo(a) => ctx.demo(a),
    }
}

struct Context<'a> {
    cli: &'a Cli,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn result_set(id: &str, header: &[&str]) -> ResultSet {
    ResultSet {
        experiment_id: id.into(),
        schema_version: SCHEMA_VERSION,
        header: header.iter().map(|s| s.to_string()).collect(),
        rows: Vec::new(),
        payload: Vec::new(),
    }
}

fn print_csv(header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(header).map_err(wiener_core::Error::from)?;
    for row in rows {
        w.write_record(row).map_err(wiener_core::Error::from)?;
    }
    w.flush().map_err(|e| wiener_core::Error::io("<stdout>", e))?;
    Ok(())
}

fn cutoff(pair: Option<(f64, f64)>) -> Result<CutoffSpec> {
    Ok(match pair {
        Some((inner, outer)) => CutoffSpec::new(inner, outer)?,
        None => CutoffSpec::default(),
    })
}

fn model_from(args: &ModelArgs) -> Result<ModelField> {
    if let Some(json) = &args.model_json {
        return Ok(ModelField::from_json(json)?);
    }
    let name = args.model.ok_or_else(|| usage("--model or --model-json is required"))?;
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(format!("--model {name:?} needs {flag}")));
    let cutoff = cutoff(args.cutoff)?;
    let kind = match name {
        ModelName::Gaussian => ModelKind::Gaussian {
            a: args.a,
            shift: args.shift.clone(),
        },
        ModelName::ModulatedGaussian => ModelKind::ModulatedGaussian {
            a: args.a,
            omega: args.omega.clone(),
        },
        ModelName::Chirp => ModelKind::Chirp {
            alpha: need(args.alpha, "--alpha")?,
            beta: need(args.beta, "--beta")?,
            cutoff,
        },
        ModelName::ChirpLog => ModelKind::ChirpLog {
            alpha: need(args.alpha, "--alpha")?,
            beta: need(args.beta, "--beta")?,
            cutoff,
        },
        ModelName::Nu => ModelKind::Nu {
            alpha: need(args.alpha, "--alpha")?,
            cutoff,
        },
    };
    let mut model = ModelField::new(kind)?;
    if let Some(s) = args.scale {
        if !(s > 0.0 && s.is_finite()) {
            return Err(usage(format!("--scale must be positive, got {s}")));
        }
        model.scale = s;
    }
    Ok(model)
}

fn grid_from(g: &GridArgs) -> Result<Grid> {
    Ok(Grid::new(g.n, g.half_width, g.points)?)
}

fn sample(model: &ModelField, grid: &Grid, s: &SamplingArgs) -> Result<SampledField> {
    Ok(if s.allow_undersampled {
        model.sample_unchecked(grid)?
    } else {
        model.sample_with_limit(grid, s.max_phase.unwrap_or(DEFAULT_PHASE_PER_CELL))?
    })
}

fn optional_grid(n: usize, half_width: Option<f64>, points: Option<usize>) -> Result<Option<Grid>> {
    match (half_width, points) {
        (Some(l), Some(p)) => Ok(Some(Grid::new(n, l, p)?)),
        _ => Ok(None),
    }
}

impl Context<'_> {
    fn progress(&self, msg: impl AsRef<str>) {
        if !self.cli.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// CSV on stdout, or `<out>.csv` and `<out>.json` written atomically.
    fn emit(&self, rs: &ResultSet, out: Option<&Path>) -> Result<()> {
        match out {
            None => print_csv(&rs.header, &rs.rows),
            Some(stem) => {
                let (csv_path, json_path) = output_paths(stem);
                write_atomic(&csv_path, &rs.csv_bytes()?)?;
                write_atomic(&json_path, &rs.json_bytes()?)?;
                self.progress(format!("wrote {} and {}", csv_path.display(), json_path.display()));
                Ok(())
            }
        }
    }

    fn transform(&self, a: &TransformArgs) -> Result<()> {
        let model = model_from(&a.model)?;
        let grid = grid_from(&a.grid)?;
        let (field, exact) = if a.check_oracle {
            if let Some(step) = model.phase_per_cell(&grid) {
                self.progress(format!("phase per cell {step:.4}"));
            }
            let (f, e) = oracle_pair(&model, &grid)?;
            (f, Some(e))
        } else {
            (sample(&model, &grid, &a.sampling)?, None)
        };
        let spectrum = fourier_transform(&field);
        let peak = spectrum.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = exact.map(|e| {
            let scale = e.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            spectrum
                .values()
                .iter()
                .zip(e.values())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
                / scale
        });
        if let Some(path) = &a.out {
            let mut bytes = Vec::new();
            write_samples(&grid, spectrum.values(), &mut bytes)?;
            write_atomic(path, &bytes)?;
            self.progress(format!("wrote spectrum to {}", path.display()));
        }
        let header = ["model", "n", "L", "N", "nyquist", "peak", "max_rel_err"].map(String::from);
        let row = vec![
            model.to_json(),
            grid.dim().to_string(),
            fmt_value(grid.half_width()),
            grid.points().to_string(),
            fmt_value(grid.nyquist()),
            fmt_value(peak),
            err.map(fmt_value).unwrap_or_default(),
        ];
        print_csv(&header, &[row])
    }

    fn norm(&self, a: &NormArgs) -> Result<()> {
        let model = model_from(&a.model)?;
        let grid = grid_from(&a.grid)?;
        let field = sample(&model, &grid, &a.sampling)?;
        let weight = match (&a.weight_json, a.weight_epsilon) {
            (Some(json), _) => serde_json::from_str(json).map_err(|e| usage(format!("--weight-json: {e}")))?,
            (None, Some(eps)) => WeightSpec::power(eps),
            (None, None) => WeightSpec::unit(),
        };
        let part = DyadicPartition::for_grid(&grid)?;
        let mut rs = result_set("norm", &["s", "p", "q_sum", "value", "oob", "k_lo", "k_hi"]);
        for &s in &a.s {
            for &p in &a.p {
                for &q in &a.q_sum {
                    let spec = if a.homogeneous {
                        BesovSpec::homogeneous(s, p, q)
                    } else {
                        BesovSpec::inhomogeneous(s, p, q)
                    };
                    let r = besov_norm(&field, &spec.weighted(weight.clone()), &part)?;
                    rs.rows.push(vec![
                        fmt_value(s),
                        fmt_value(p),
                        fmt_value(q),
                        fmt_value(r.value),
                        fmt_value(r.oob),
                        r.k_lo.to_string(),
                        r.k_hi.to_string(),
                    ]);
                    rs.payload.push(serde_json::to_value(&r).map_err(wiener_core::Error::from)?);
                }
            }
        }
        self.emit(&rs, a.out.as_deref())
    }

    fn classify(&self, a: &ClassifyArgs) -> Result<()> {
        let mut case = CriterionCase::new(a.criterion, a.n);
        case.p = a.p.clone();
        case.q = a.q.clone();
        case.r = a.r.clone();
        case.s = a.s.clone();
        case.sigma = a.sigma.clone();
        case.tau = a.tau.clone();
        case.epsilon = a.epsilon.clone();
        case.alpha = a.alpha.clone();
        case.beta = a.beta.clone();
        let verdict = evaluate(&case);
        match a.format {
            Format::Csv => print_csv(
                &CSV_HEADER.map(String::from),
                &[csv_record(&case, &verdict)],
            )?,
            Format::Json => {
                let v = serde_json::json!({ "schema_version": SCHEMA_VERSION, "case": case, "verdict": verdict });
                println!("{}", serde_json::to_string_pretty(&v).map_err(wiener_core::Error::from)?);
            }
        }
        self.strict_check(&verdict)
    }

    fn strict_check(&self, verdict: &Verdict) -> Result<()> {
        if self.cli.strict && verdict.status == Status::NotCovered {
            return Err(CliError::NotCovered(verdict.notes.join("; ")));
        }
        Ok(())
    }

    fn chirp(&self, a: &ChirpArgs) -> Result<()> {
        let grid = optional_grid(a.n, a.half_width, a.points)?.map(|g| GridParams {
            n: g.dim(),
            half_width: g.half_width(),
            points: g.points(),
        });
        let config = ExperimentConfig {
            experiment_id: "chirp".into(),
            seed: self.cli.seed,
            output: a.out.clone().unwrap_or_else(|| PathBuf::from("chirp")),
            experiment: Experiment::Threshold {
                alpha: a.alpha,
                n: a.n,
                betas: a.beta.clone(),
                radii: [a.sweep_radii.0, a.sweep_radii.1],
                grid,
                cutoff: cutoff(a.cutoff)?,
            },
        };
        let rs = experiments::run(&config)?;
        for row in &rs.payload {
            self.progress(format!(
                "beta {}: {} (exponent {:.4}, prediction {})",
                row["beta"],
                row["report"]["verdict"].as_str().unwrap_or_default(),
                row["report"]["exponent"].as_f64().unwrap_or(f64::NAN),
                row["prediction"].as_str().unwrap_or_default()
            ));
        }
        self.emit(&rs, a.out.as_deref())
    }

    fn sweep(&self, a: &SweepArgs) -> Result<()> {
        // Overrides land before validation so --seed can satisfy it.
        let text = std::fs::read_to_string(&a.config).map_err(|e| wiener_core::Error::io(&a.config, e))?;
        let mut raw: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| wiener_core::Error::Config(format!("{}: {e}", a.config.display())))?;
        if let Some(obj) = raw.as_object_mut() {
            if let Some(out) = &a.out {
                obj.insert("output".into(), out.to_string_lossy().into());
            }
            if let Some(seed) = self.cli.seed {
                obj.insert("seed".into(), seed.into());
            }
        }
        let config = ExperimentConfig::from_json(&raw.to_string())?;
        let rs = experiments::sweep(&config)?;
        let (csv_path, json_path) = output_paths(&config.output);
        self.progress(format!(
            "{}: {} rows, wrote {} and {}",
            rs.experiment_id,
            rs.rows.len(),
            csv_path.display(),
            json_path.display()
        ));
        Ok(())
    }

    fn fit_rate(&self, a: &FitRateArgs) -> Result<()> {
        let correction = match a.log_correction {
            Correction::None => LogCorrection::None,
            Correction::Large => LogCorrection::Large,
            Correction::Small => LogCorrection::Small,
        };
        let (profile, window) = match &a.input {
            Some(path) => {
                let profile = read_profile(path)?;
                let window = match a.window {
                    Some((lo, hi)) => [lo, hi],
                    None => {
                        let lo = profile.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                        let hi = profile.iter().map(|p| p.0).fold(0.0, f64::max);
                        [lo, hi]
                    }
                };
                (profile, window)
            }
            None => {
                let model = model_from(&a.model)?;
                let grid = grid_from(&a.grid)?;
                let window = match a.window {
                    Some((lo, hi)) => [lo, hi],
                    None => fit_band(&grid),
                };
                check_window(&grid, window)?;
                let spectrum = fourier_transform(&sample(&model, &grid, &a.sampling)?);
                (shell_profile(&spectrum, window, a.bins), window)
            }
        };
        let fit = rate_fit(&profile, window, correction)?;
        self.progress(format!("fitted {} points", fit.points));
        let header = ["slope", "intercept", "window_lo", "window_hi", "rms", "points", "log_correction"];
        let row = vec![
            fmt_value(fit.slope),
            fmt_value(fit.intercept),
            fmt_value(fit.window[0]),
            fmt_value(fit.window[1]),
            fmt_value(fit.rms),
            fit.points.to_string(),
            format!("{:?}", fit.log_correction).to_lowercase(),
        ];
        print_csv(&header.map(String::from), &[row])
    }

    fn gn_check(&self, a: &GnArgs) -> Result<()> {
        let params = GnParams {
            n: a.n,
            tau: a.tau,
            sigma: a.sigma,
            s: a.s,
            p: a.p,
            q: a.q,
            r: a.r,
            u: WeightSpec::power(a.u_epsilon),
            v: WeightSpec::power(a.v_epsilon),
            delta: a.delta,
        };
        let config = ExperimentConfig {
            experiment_id: "gn-check".into(),
            seed: self.cli.seed,
            output: a.out.clone().unwrap_or_else(|| PathBuf::from("gn-check")),
            experiment: Experiment::Gn {
                ensemble: a.ensemble.clone(),
                params,
                dilations: a.dilations.clone(),
            },
        };
        let rs = experiments::run(&config)?;
        let ratio_col = rs.header.iter().position(|h| h == "ratio").expect("ratio column");
        let worst = rs
            .rows
            .iter()
            .filter_map(|r| r[ratio_col].parse::<f64>().ok())
            .fold(0.0, f64::max);
        self.progress(format!("largest ratio {worst:.6} over {} rows", rs.rows.len()));
        self.emit(&rs, a.out.as_deref())
    }

    fn demo(&self, a: &DemoArgs) -> Result<()> {
        let mut case = CriterionCase::new(a.criterion, a.n);
        case.epsilon = Some(a.epsilon.clone());
        case.q = a.q.clone();
        case.r = a.r.clone();
        case.s = a.s.clone();
        let grid = optional_grid(a.n as usize, a.half_width, a.points)?;
        let report = match sharpness_demo(&case, grid, CutoffSpec::default()) {
            Ok(r) => r,
            Err(wiener_core::Error::NotCovered(msg)) => {
                let verdict = evaluate(&case);
                self.progress(format!("no counterexample: {msg}"));
                print_csv(&CSV_HEADER.map(String::from), &[csv_record(&case, &verdict)])?;
                if self.cli.strict {
                    return Err(CliError::NotCovered(msg));
                }
                return Ok(());
            }
            Err(e) => return Err(e.into()),
        };
        let mut rs = result_set(
            "demo",
            &[
                "criterion", "alpha", "beta", "L", "N", "label", "exponent", "order", "value", "value_half",
                "growth", "oob", "finite", "tail_verdict", "tail_exponent", "prediction", "confirmed", "agrees",
            ],
        );
        let tail = serde_json::to_value(report.tail.verdict).map_err(wiener_core::Error::from)?;
        for w in &report.norms {
            rs.rows.push(vec![
                report.prop.to_string(),
                fmt_value(report.alpha),
                fmt_value(report.beta),
                fmt_value(report.half_width),
                report.points.to_string(),
                w.label.clone(),
                fmt_value(w.exponent),
                fmt_value(w.order),
                fmt_value(w.value),
                fmt_value(w.value_half),
                fmt_value(w.growth),
                fmt_value(w.oob),
                w.finite.to_string(),
                tail.as_str().unwrap_or_default().to_string(),
                fmt_value(report.tail.exponent),
                report.prediction.status.to_string(),
                report.counterexample_confirmed.to_string(),
                report.agrees.to_string(),
            ]);
        }
        rs.payload.push(serde_json::to_value(&report).map_err(wiener_core::Error::from)?);
        self.progress(format!(
            "{}: counterexample {}",
            report.prop,
            if report.counterexample_confirmed { "confirmed" } else { "not confirmed" }
        ));
        self.emit(&rs, a.out.as_deref())
    }
}

/// `(radius, magnitude)` pairs from the first two columns of a headed CSV.
fn read_profile(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_path(path).map_err(wiener_core::Error::from)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(wiener_core::Error::from)?;
        let field = |j: usize| -> Result<f64> {
            rec.get(j)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| {
                    wiener_core::Error::Fit(format!("{}: row {} column {} is not a number", path.display(), i + 1, j + 1))
                        .into()
                })
        };
        out.push((field(0)?, field(1)?));
    }
    Ok(out)
}
