//! Exact weights.
//!
//! Edge weights and Dirichlet parameters are kept as rationals so that
//! divergence and class-sum identities can be checked with zero tolerance.
//! They are only converted to `f64` when a sampler needs them.

use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational weight.
pub type Weight = Ratio<i128>;

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_weight(s: &str) -> Result<Weight> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse {s:?} as a rational \"p/q\""));
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (
            i128::from_str(p.trim()).map_err(|_| bad())?,
            i128::from_str(q.trim()).map_err(|_| bad())?,
        ),
        None => (i128::from_str(s).map_err(|_| bad())?, 1),
    };
    if den == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(num, den))
}

/// Formats a weight as `"p/q"`, always with an explicit denominator.
pub fn format_weight(w: &Weight) -> String {
    format!("{}/{}", w.numer(), w.denom())
}

/// Lossy conversion for samplers.
pub fn weight_to_f64(w: &Weight) -> f64 {
    w.to_f64().unwrap_or_else(|| *w.numer() as f64 / *w.denom() as f64)
}

pub(crate) fn sum_weights<'a>(ws: impl IntoIterator<Item = &'a Weight>) -> Weight {
    ws.into_iter().fold(Weight::zero(), |acc, w| acc + w)
}

/// Serde adapter storing a [`Weight`] as its `"p/q"` string.
pub mod as_string {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::{format_weight, parse_weight, Weight};

    pub fn serialize<S: Serializer>(w: &Weight, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_weight(w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Weight, D::Error> {
        let s = String::deserialize(d)?;
        parse_weight(&s).map_err(de::Error::custom)
    }
}
