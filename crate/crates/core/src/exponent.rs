//! Serde helpers for exponents in `(0, ∞]`, written as numbers or `"inf"`.

use serde::{de, Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Text(t) => parse(&t).ok_or_else(|| de::Error::custom(format!("bad exponent {t:?}"))),
    }
}

/// Parse `"inf"`, `"∞"`, a decimal or a fraction `a/b`.
pub fn parse(text: &str) -> Option<f64> {
    let t = text.trim();
    if matches!(t, "inf" | "Inf" | "infinity" | "∞") {
        return Some(f64::INFINITY);
    }
    if let Some((a, b)) = t.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return Some(a / b);
    }
    t.parse().ok()
}
