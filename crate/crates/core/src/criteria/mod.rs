//! Symbolic evaluation of the membership criteria and sharpness regions,
//! with the derived exponents `γ, θ, δ, λ, σ₁`.

mod num;

pub use num::{Num, ParseNumError, FLOAT_MARGIN};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CriterionId {
    #[serde(rename = "THM_A")]
    ThmA,
    #[serde(rename = "THM_B")]
    ThmB,
    #[serde(rename = "PQ_1D")]
    Pq1d,
    #[serde(rename = "THM_C")]
    ThmC,
    #[serde(rename = "TH31")]
    Th31,
    #[serde(rename = "TH32")]
    Th32,
    #[serde(rename = "COR33")]
    Cor33,
    #[serde(rename = "COR34")]
    Cor34,
    #[serde(rename = "COR35")]
    Cor35,
    #[serde(rename = "PROP63")]
    Prop63,
    #[serde(rename = "PROP64a")]
    Prop64a,
    #[serde(rename = "PROP64b")]
    Prop64b,
    #[serde(rename = "CHIRP")]
    Chirp,
}

impl CriterionId {
    pub const ALL: [CriterionId; 13] = [
        CriterionId::ThmA,
        CriterionId::ThmB,
        CriterionId::Pq1d,
        CriterionId::ThmC,
        CriterionId::Th31,
        CriterionId::Th32,
        CriterionId::Cor33,
        CriterionId::Cor34,
        CriterionId::Cor35,
        CriterionId::Prop63,
        CriterionId::Prop64a,
        CriterionId::Prop64b,
        CriterionId::Chirp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::ThmA => "THM_A",
            CriterionId::ThmB => "THM_B",
            CriterionId::Pq1d => "PQ_1D",
            CriterionId::ThmC => "THM_C",
            CriterionId::Th31 => "TH31",
            CriterionId::Th32 => "TH32",
            CriterionId::Cor33 => "COR33",
            CriterionId::Cor34 => "COR34",
            CriterionId::Cor35 => "COR35",
            CriterionId::Prop63 => "PROP63",
            CriterionId::Prop64a => "PROP64a",
            CriterionId::Prop64b => "PROP64b",
            CriterionId::Chirp => "CHIRP",
        }
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CriterionId {
    type Err = Error;

    /// Case-insensitive; `-` and `_` are interchangeable (`thm-c`, `THM_C`).
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        CriterionId::ALL
            .into_iter()
            .find(|c| c.as_str().to_ascii_uppercase() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown criterion {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Sufficient,
    SharpFailRegion,
    Boundary,
    NotCovered,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Sufficient => "SUFFICIENT",
            Status::SharpFailRegion => "SHARP_FAIL_REGION",
            Status::Boundary => "BOUNDARY",
            Status::NotCovered => "NOT_COVERED",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionCase {
    pub criterion: CriterionId,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Num>,
}

macro_rules! setter {
    ($($name:ident),*) => {
        $(
            pub fn $name(mut self, v: impl Into<Num>) -> Self {
                self.$name = Some(v.into());
                self
            }
        )*
    };
}

impl CriterionCase {
    pub fn new(criterion: CriterionId, n: u32) -> Self {
        CriterionCase {
            criterion,
            n,
            p: None,
            q: None,
            r: None,
            s: None,
            sigma: None,
            tau: None,
            epsilon: None,
            alpha: None,
            beta: None,
        }
    }

    setter!(p, q, r, s, sigma, tau, epsilon, alpha, beta);

    fn nn(&self) -> Num {
        Num::int(self.n as i64)
    }

    /// `(p, τ, σ)` after the criterion's fixed choices and defaults.
    fn resolved(&self) -> (Option<Num>, Option<Num>, Option<Num>) {
        let half_n = Num::ratio(self.n as i64, 2);
        match self.criterion {
            CriterionId::Th31 => (self.p.clone(), self.tau.clone(), self.sigma.clone()),
            CriterionId::Th32 => (
                Some(Num::int(2)),
                Some(half_n),
                Some(self.sigma.clone().unwrap_or_else(Num::zero)),
            ),
            CriterionId::ThmC
            | CriterionId::Cor33
            | CriterionId::Cor34
            | CriterionId::Cor35
            | CriterionId::Prop63
            | CriterionId::Prop64a => (Some(Num::int(2)), Some(half_n), Some(Num::zero())),
            _ => (self.p.clone(), self.tau.clone(), self.sigma.clone()),
        }
    }

    fn has_approx(&self) -> bool {
        [
            &self.p,
            &self.q,
            &self.r,
            &self.s,
            &self.sigma,
            &self.tau,
            &self.epsilon,
            &self.alpha,
            &self.beta,
        ]
        .iter()
        .any(|v| matches!(v, Some(Num::Approx(_))))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub gamma: Option<Num>,
    pub theta: Option<Num>,
    pub delta: Option<Num>,
    pub lambda: Option<Num>,
    pub sigma1: Option<Num>,
    /// `s - n/r = σ - n/q`: the interpolation inequality has no exponent.
    pub delta_degenerate: bool,
    /// Why an entry is absent.
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: CriterionId,
    pub status: Status,
    pub derived: Derived,
    pub notes: Vec<String>,
}

/// `γ(p,q,r)`: `(p-q)/(r-q)` when `q < p < r`, `(q-p)/(q-r)` when
/// `r < p < q`. An infinite outer exponent gives the limits 0 and 1.
pub fn gamma(p: &Num, q: &Num, r: &Num) -> Result<Num> {
    if p.is_inf() {
        return Err(Error::InvalidParameter("γ needs a finite p".into()));
    }
    if q.lt(p) && p.lt(r) {
        if r.is_inf() {
            return Ok(Num::zero());
        }
        return Ok(p.sub(q).div(&r.sub(q)).expect("r > q"));
    }
    if r.lt(p) && p.lt(q) {
        if q.is_inf() {
            return Ok(Num::int(1));
        }
        return Ok(q.sub(p).div(&q.sub(r)).expect("q > r"));
    }
    Err(Error::InvalidParameter(format!(
        "γ needs q < p < r or r < p < q, got p={p}, q={q}, r={r}"
    )))
}

/// All exponents that are defined for `case`; the rest are listed in
/// `missing`.
pub fn derived_exponents(case: &CriterionCase) -> Derived {
    let (p, tau, sigma) = case.resolved();
    let n = case.nn();
    let mut d = Derived::default();
    let (q, r, s) = (case.q.clone(), case.r.clone(), case.s.clone());

    match (&p, &q, &r) {
        (Some(p), Some(q), Some(r)) => match gamma(p, q, r) {
            Ok(g) => d.gamma = Some(g),
            Err(e) => d.missing.push(format!("gamma: {e}")),
        },
        _ => d.missing.push("gamma: needs p, q, r".into()),
    }

    match (&p, &q, &r) {
        (Some(p), Some(q), Some(r)) => {
            let num = q.recip().sub(&p.recip());
            match num.div(&q.recip().sub(&r.recip())) {
                Some(l) => d.lambda = Some(l),
                None => d.missing.push("lambda: q = r".into()),
            }
        }
        _ => d.missing.push("lambda: needs p, q, r".into()),
    }

    match (&tau, &sigma, &s) {
        (Some(t), Some(sg), Some(s)) => match t.sub(sg).div(&s.sub(sg)) {
            Some(th) => d.theta = Some(th),
            None => d.missing.push("theta: s = σ".into()),
        },
        _ => d.missing.push("theta: needs τ, σ, s".into()),
    }

    match (&p, &q, &sigma) {
        (Some(p), Some(q), Some(sg)) => {
            d.sigma1 = Some(sg.sub(&n.mul(&q.recip().sub(&p.recip()))));
        }
        _ => d.missing.push("sigma1: needs σ, q, p".into()),
    }

    match (&p, &q, &r, &s, &tau, &sigma) {
        (Some(p), Some(q), Some(r), Some(s), Some(t), Some(sg)) => {
            let num = t.sub(sg).add(&n.mul(&q.recip().sub(&p.recip())));
            let den = s.sub(sg).add(&n.mul(&q.recip().sub(&r.recip())));
            match num.div(&den) {
                Some(v) => d.delta = Some(v),
                None => {
                    d.delta_degenerate = true;
                    d.missing.push("delta: s - n/r = σ - n/q".into());
                }
            }
        }
        _ => d.missing.push("delta: needs p, q, r, s, τ, σ".into()),
    }
    d
}

/// `(1 - n/(2s))/q + (n/(2s))/r`.
pub fn thm_c_expression(n: u32, s: &Num, q: &Num, r: &Num) -> Option<Num> {
    let a = Num::int(n as i64).div(&s.mul(&Num::int(2)))?;
    Some(Num::int(1).sub(&a).mul(&q.recip()).add(&a.mul(&r.recip())))
}

struct Eval<'a> {
    case: &'a CriterionCase,
    notes: Vec<String>,
}

type Step = std::result::Result<Status, String>;

impl Eval<'_> {
    fn need(&self, v: &Option<Num>, name: &str) -> std::result::Result<Num, String> {
        v.clone().ok_or_else(|| format!("missing parameter {name}"))
    }

    fn run(&mut self) -> Step {
        let c = self.case;
        let n = c.nn();
        let half = Num::ratio(1, 2);
        let one = Num::int(1);
        let two = Num::int(2);
        if !(1..=3).contains(&c.n) {
            return Err(format!("dimension {} outside 1..=3", c.n));
        }
        match c.criterion {
            CriterionId::ThmA => {
                let s = self.need(&c.s, "s")?;
                let h = n.mul(&half);
                Ok(match s.compare(&h) {
                    Ordering::Greater => Status::Sufficient,
                    Ordering::Equal => Status::Boundary,
                    Ordering::Less => return Err("order s < n/2".into()),
                })
            }
            CriterionId::ThmB => {
                let p = self.need(&c.p, "p")?;
                if p.gt(&one) && p.le(&two) {
                    Ok(Status::Sufficient)
                } else {
                    Err("needs 1 < p ≤ 2".into())
                }
            }
            CriterionId::Pq1d => {
                if c.n != 1 {
                    return Err("one-dimensional criterion".into());
                }
                let p = self.need(&c.p, "p")?;
                let q = self.need(&c.q, "q")?;
                if !(p.ge(&one) && !p.is_inf()) {
                    return Err("needs 1 ≤ p < ∞".into());
                }
                if !(q.gt(&one) && !q.is_inf()) {
                    return Err("needs 1 < q < ∞".into());
                }
                Ok(match p.recip().add(&q.recip()).compare(&one) {
                    Ordering::Greater => Status::Sufficient,
                    Ordering::Less => Status::SharpFailRegion,
                    Ordering::Equal if p.eq_num(&two) && q.eq_num(&two) => {
                        self.notes.push("p = q = 2 special case".into());
                        Status::Sufficient
                    }
                    Ordering::Equal => Status::Boundary,
                })
            }
            CriterionId::ThmC => {
                let (q, r, s) = (self.need(&c.q, "q")?, self.need(&c.r, "r")?, self.need(&c.s, "s")?);
                if !q.is_positive() {
                    return Err("needs 0 < q ≤ ∞".into());
                }
                if !(r.gt(&one) && !r.is_inf()) {
                    return Err("needs 1 < r < ∞".into());
                }
                if !s.gt(&n.mul(&r.recip())) {
                    return Err("needs s > n/r".into());
                }
                if q.eq_num(&two) && r.eq_num(&two) {
                    self.notes.push("q = r = 2 special case".into());
                    return Ok(Status::Sufficient);
                }
                let e = thm_c_expression(c.n, &s, &q, &r).expect("s > 0");
                Ok(match e.compare(&half) {
                    Ordering::Greater => Status::Sufficient,
                    Ordering::Equal => Status::Boundary,
                    Ordering::Less => {
                        if q.gt(&one) && !q.is_inf() && s.is_integer() {
                            Status::SharpFailRegion
                        } else {
                            return Err("below the threshold but outside the sharpness hypotheses (1 < q < ∞, s ∈ ℕ)".into());
                        }
                    }
                })
            }
            CriterionId::Th31 | CriterionId::Th32 => self.th31(),
            CriterionId::Cor33 | CriterionId::Cor34 | CriterionId::Cor35 => self.corollary(),
            CriterionId::Prop63 => {
                let (q, r, s) = self.sharp_hypotheses()?;
                let e = thm_c_expression(c.n, &s, &q, &r).expect("s > 0");
                if e.le(&half) {
                    if e.eq_num(&half) {
                        self.notes.push("equality: counterexample ν_{2/q}".into());
                    } else {
                        self.notes.push("counterexample m_{α,β} with 2β ≤ nα".into());
                    }
                    Ok(Status::SharpFailRegion)
                } else {
                    Err("threshold expression exceeds 1/2".into())
                }
            }
            CriterionId::Prop64a => {
                let (q, r, s) = self.sharp_hypotheses()?;
                if !(q.lt(&two) && two.lt(&r)) {
                    return Err("needs 1 ≤ q < 2 < r < ∞".into());
                }
                let e = thm_c_expression(c.n, &s, &q, &r).expect("s > 0");
                if !e.gt(&half) {
                    return Err("threshold expression ≤ 1/2 (see PROP63)".into());
                }
                let eps = self.need(&c.epsilon, "epsilon")?;
                let bound = n
                    .mul(&r.sub(&two))
                    .mul(&two.sub(&q))
                    .div(&two.mul(&r.sub(&q)))
                    .expect("r > q");
                if eps.gt(&bound) {
                    self.notes.push(format!("ε > {bound}: flipped weights admit a counterexample"));
                    Ok(Status::SharpFailRegion)
                } else {
                    Err(format!("needs ε > {bound}"))
                }
            }
            CriterionId::Prop64b => {
                let eps = self.need(&c.epsilon, "epsilon")?;
                let floor = n.mul(&half).mul(&Num::int(-1));
                if !eps.gt(&floor) {
                    return Err("needs ε > -n/2".into());
                }
                if eps.eq_num(&Num::zero()) {
                    self.notes.push("ε = 0: unweighted q = r = 2 case".into());
                    return Ok(Status::Sufficient);
                }
                self.notes.push(format!("counterexample ν_{{1+2ε/n}} in L_2(w_ε) ∩ H_2^{}(w_-ε)", c.n));
                Ok(Status::SharpFailRegion)
            }
            CriterionId::Chirp => {
                let a = self.need(&c.alpha, "alpha")?;
                let b = self.need(&c.beta, "beta")?;
                if !(a.is_positive() && b.is_positive()) || a.is_inf() || b.is_inf() {
                    return Err("needs α, β > 0".into());
                }
                if a.eq_num(&one) {
                    return Err("α = 1 excluded".into());
                }
                let h = n.mul(&a).mul(&half);
                Ok(match b.compare(&h) {
                    Ordering::Greater => {
                        self.notes.push("IN_W0".into());
                        Status::Sufficient
                    }
                    Ordering::Equal => {
                        self.notes.push("NOT in W0 (β/α = n/2)".into());
                        Status::SharpFailRegion
                    }
                    Ordering::Less => {
                        self.notes.push("NOT in W0".into());
                        Status::SharpFailRegion
                    }
                })
            }
        }
    }

    /// Ordering, `σ < s` and the three strict conditions of the
    /// Besov-level interpolation theorem.
    fn th31(&mut self) -> Step {
        let c = self.case;
        let (p, tau, sigma) = c.resolved();
        let p = self.need(&p, "p")?;
        let tau = self.need(&tau, "tau")?;
        let sigma = self.need(&sigma, "sigma")?;
        let (q, r, s) = (self.need(&c.q, "q")?, self.need(&c.r, "r")?, self.need(&c.s, "s")?);
        if !(q.is_positive() && r.is_positive()) {
            return Err("needs q, r > 0".into());
        }
        let low_q = q.lt(&p) && p.lt(&r);
        let low_r = r.lt(&p) && p.lt(&q);
        if !(low_q || low_r) {
            return Err("needs q < p < r or r < p < q".into());
        }
        if !sigma.lt(&s) {
            return Err("needs σ < s".into());
        }
        let n = c.nn();
        let mut checks = Vec::new();
        if low_q {
            checks.push(("σ-τ < n(1/q-1/p)", n.mul(&q.recip().sub(&p.recip())).compare(&sigma.sub(&tau))));
        }
        if low_r {
            checks.push(("n(1/r-1/p) < s-τ", s.sub(&tau).compare(&n.mul(&r.recip().sub(&p.recip())))));
        }
        let theta = tau.sub(&sigma).div(&s.sub(&sigma)).expect("σ < s");
        let lhs = Num::int(1).sub(&theta).mul(&q.recip()).add(&theta.mul(&r.recip()));
        checks.push(("(1-θ)/q + θ/r > 1/p", lhs.compare(&p.recip())));
        self.combine(checks)
    }

    fn combine(&mut self, checks: Vec<(&str, Ordering)>) -> Step {
        let mut status = Status::Sufficient;
        for (label, ord) in checks {
            match ord {
                Ordering::Greater => {}
                Ordering::Equal => {
                    self.notes.push(format!("equality in {label}"));
                    status = Status::Boundary;
                }
                Ordering::Less => return Err(format!("violates {label}")),
            }
        }
        Ok(status)
    }

    fn corollary(&mut self) -> Step {
        let c = self.case;
        let (q, r, s) = (self.need(&c.q, "q")?, self.need(&c.r, "r")?, self.need(&c.s, "s")?);
        let (one, two, half) = (Num::int(1), Num::int(2), Num::ratio(1, 2));
        let n = c.nn();
        if !s.is_positive() || s.is_inf() {
            return Err("needs s > 0".into());
        }
        let low_q = q.is_positive() && q.lt(&two) && two.lt(&r) && !r.is_inf();
        let low_r = c.criterion == CriterionId::Cor33 && one.lt(&r) && r.lt(&two) && two.lt(&q);
        if !(low_q || low_r) {
            return Err(match c.criterion {
                CriterionId::Cor33 => "needs 0 < q < 2 < r < ∞ or 1 < r < 2 < q ≤ ∞",
                _ => "needs 0 < q < 2 < r < ∞",
            }
            .into());
        }
        if c.criterion == CriterionId::Cor35 && !(s.is_integer() && s.to_f64() as i64 % 2 == 0) {
            return Err("radial form needs s even".into());
        }
        let mut checks = Vec::new();
        if low_q {
            // σ - τ < n(1/q - 1/2) with σ = 0, τ = n/2, i.e. 1/q > 0
            checks.push(("σ-τ < n(1/q-1/p)", q.recip().compare(&Num::zero())));
        }
        if low_r {
            checks.push(("s > n/r", s.compare(&n.mul(&r.recip()))));
        }
        let e = thm_c_expression(c.n, &s, &q, &r).expect("s > 0");
        let ord = e.compare(&half);
        if ord == Ordering::Less {
            for (label, o) in &checks {
                if *o == Ordering::Less {
                    return Err(format!("violates {label}"));
                }
            }
            return if self.sharp_hypotheses().is_ok() {
                self.notes.push("inside the PROP63 counterexample region".into());
                Ok(Status::SharpFailRegion)
            } else {
                Err("below the threshold but outside the sharpness hypotheses".into())
            };
        }
        checks.push(("(1-n/2s)/q + (n/2s)/r > 1/2", ord));
        let status = self.combine(checks)?;
        if let Some(g) = derived_exponents(c).gamma {
            self.notes.push(format!("γ = {g}"));
        }
        Ok(status)
    }

    /// `1 ≤ q < 2 < r < ∞` or `1 ≤ r < 2 < q < ∞`, `s > n/2`, `s ∈ ℕ`.
    fn sharp_hypotheses(&self) -> std::result::Result<(Num, Num, Num), String> {
        let c = self.case;
        let (q, r, s) = (self.need(&c.q, "q")?, self.need(&c.r, "r")?, self.need(&c.s, "s")?);
        let (one, two) = (Num::int(1), Num::int(2));
        let finite = !q.is_inf() && !r.is_inf();
        let a = one.le(&q) && q.lt(&two) && two.lt(&r);
        let b = one.le(&r) && r.lt(&two) && two.lt(&q);
        if !(finite && (a || b)) {
            return Err("needs 1 ≤ q < 2 < r < ∞ or 1 ≤ r < 2 < q < ∞".into());
        }
        if !(s.gt(&c.nn().mul(&Num::ratio(1, 2))) && s.is_integer()) {
            return Err("needs s > n/2, s ∈ ℕ".into());
        }
        Ok((q, r, s))
    }
}

/// Classify `case`. Parameters outside a criterion's stated range yield
/// `NOT_COVERED` with the reason in `notes`.
pub fn evaluate(case: &CriterionCase) -> Verdict {
    let mut ev = Eval {
        case,
        notes: Vec::new(),
    };
    let status = match ev.run() {
        Ok(s) => s,
        Err(reason) => {
            ev.notes.push(reason);
            Status::NotCovered
        }
    };
    let derived = derived_exponents(case);
    if derived.delta_degenerate {
        ev.notes.push("δ degenerate: s - n/r = σ - n/q".into());
    }
    if case.has_approx() {
        ev.notes.push(format!("floating-point comparisons with margin {FLOAT_MARGIN:e}"));
    }
    Verdict {
        criterion: case.criterion,
        status,
        derived,
        notes: ev.notes,
    }
}

pub const CSV_HEADER: [&str; 18] = [
    "criterion_id",
    "n",
    "p",
    "q",
    "r",
    "s",
    "sigma",
    "tau",
    "epsilon",
    "alpha",
    "beta",
    "status",
    "gamma",
    "theta",
    "delta",
    "lambda",
    "sigma1",
    "notes",
];

fn cell(v: &Option<Num>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV record in [`CSV_HEADER`] order; exact values print as `a/b`.
pub fn csv_record(case: &CriterionCase, verdict: &Verdict) -> Vec<String> {
    let d = &verdict.derived;
    vec![
        case.criterion.to_string(),
        case.n.to_string(),
        cell(&case.p),
        cell(&case.q),
        cell(&case.r),
        cell(&case.s),
        cell(&case.sigma),
        cell(&case.tau),
        cell(&case.epsilon),
        cell(&case.alpha),
        cell(&case.beta),
        verdict.status.to_string(),
        cell(&d.gamma),
        cell(&d.theta),
        cell(&d.delta),
        cell(&d.lambda),
        cell(&d.sigma1),
        verdict.notes.join("; "),
    ]
}
