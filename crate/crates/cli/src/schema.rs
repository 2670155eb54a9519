//! Curve file schema: a versioned JSON document listing equations, each
//! optionally carrying factored forms for odd primes.
//!
//! Integer values are accepted both as JSON numbers and as decimal strings,
//! and are emitted as strings whenever they could exceed the exact-integer
//! range of doubles.  All validation happens on load: monic even degree,
//! squarefree, nonzero c, and factored forms that multiply back to f.

use hyperfibre::certify::CurveInput;
use hyperfibre::poly::Poly;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveFile {
    pub schema_version: u32,
    pub curves: Vec<CurveEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveEntry {
    pub label: String,
    #[serde(with = "big_int")]
    pub c: BigInt,
    #[serde(with = "big_int_vec")]
    pub f: Vec<BigInt>,
    #[serde(default = "default_base_degree")]
    pub base_residue_degree: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub odd_primes: Vec<OddPrimeFactors>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OddPrimeFactors {
    pub p: u64,
    #[serde(with = "big_int_vec_vec")]
    pub factors: Vec<Vec<BigInt>>,
}

fn default_base_degree() -> usize {
    1
}

/// A curve entry together with its validated equation.
#[derive(Debug, Clone)]
pub struct PreparedCurve {
    pub entry: CurveEntry,
    pub input: CurveInput,
}

impl PreparedCurve {
    pub fn factors_for(&self, p: u64) -> Option<&Vec<Vec<BigInt>>> {
        self.entry
            .odd_primes
            .iter()
            .find(|o| o.p == p)
            .map(|o| &o.factors)
    }
}

/// Encodes an integer as a JSON number when it is exactly representable in
/// a double, as a decimal string otherwise.
pub fn int_to_json(x: &BigInt) -> serde_json::Value {
    const LIMIT: i64 = (1 << 53) - 1;
    match x.to_i64() {
        Some(v) if (-LIMIT..=LIMIT).contains(&v) => serde_json::Value::from(v),
        _ => serde_json::Value::String(x.to_string()),
    }
}

fn int_from_json(v: &serde_json::Value) -> Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(format!("integer expected, got non-integer number {n}"))
            }
        }
        serde_json::Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|e| format!("bad integer string {s:?}: {e}")),
        other => Err(format!("integer expected, got {other}")),
    }
}

mod big_int {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        int_to_json(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        int_from_json(&v).map_err(D::Error::custom)
    }
}

mod big_int_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(int_to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter().map(|x| int_from_json(x).map_err(D::Error::custom)).collect()
    }
}

mod big_int_vec_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        xs.iter()
            .map(|row| row.iter().map(int_to_json).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let v = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        v.iter()
            .map(|row| {
                row.iter()
                    .map(|x| int_from_json(x).map_err(D::Error::custom))
                    .collect()
            })
            .collect()
    }
}

pub fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Loads and validates a curve file.
pub fn load(path: &Path) -> Result<Vec<PreparedCurve>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: CurveFile =
        serde_json::from_str(&text).map_err(|e| format!("{}: schema error: {e}", path.display()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "{}: schema error: unsupported schema_version {} (expected {SCHEMA_VERSION})",
            path.display(),
            file.schema_version
        ));
    }
    if file.curves.is_empty() {
        return Err(format!("{}: schema error: no curves", path.display()));
    }
    let mut out = Vec::with_capacity(file.curves.len());
    for entry in file.curves {
        let label = entry.label.clone();
        let input = CurveInput::new(entry.c.clone(), entry.f.clone(), entry.base_residue_degree)
            .map_err(|e| format!("curve {label:?}: schema error: {e}"))?;
        for odd in &entry.odd_primes {
            if odd.p == 2 || !is_small_prime(odd.p) {
                return Err(format!(
                    "curve {label:?}: schema error: odd_primes entry {} is not an odd prime",
                    odd.p
                ));
            }
            let mut product = Poly::constant(BigInt::from(1));
            for factor in &odd.factors {
                let poly = Poly::from_coeffs(factor.clone());
                match poly.degree() {
                    Some(d) if d == 1 || d == 2 => {}
                    _ => {
                        return Err(format!(
                            "curve {label:?}: schema error: factor for p = {} must have degree 1 or 2",
                            odd.p
                        ))
                    }
                }
                product = product.mul(&poly);
            }
            if product != Poly::from_coeffs(entry.f.clone()) {
                return Err(format!(
                    "curve {label:?}: schema error: factors for p = {} do not multiply to f",
                    odd.p
                ));
            }
        }
        out.push(PreparedCurve { entry, input });
    }
    Ok(out)
}
