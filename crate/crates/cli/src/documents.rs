//! JSON documents read and written by the command-line tool.

use std::fs;
use std::path::Path;

use hankel_spectral::{Error, SymbolCoefficients, ZetaSequence};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A complex number written as `[re, im]` or as a bare real.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Number> for Complex64 {
    fn from(n: Number) -> Self {
        match n {
            Number::Real(re) => Complex64::new(re, 0.0),
            Number::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Adding zero turns `-0.0` into `0.0`.
fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re + 0.0, c.im + 0.0]).collect()
}

fn complexes(values: &[Number]) -> Vec<Complex64> {
    values.iter().map(|&n| n.into()).collect()
}

#[derive(Debug, Serialize)]
pub struct SpectralOut {
    pub zeta: Vec<[f64; 2]>,
}

impl SpectralOut {
    pub fn new(z: &ZetaSequence) -> Self {
        Self {
            zeta: pairs(z.entries()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SymbolOut {
    pub coefficients: Vec<[f64; 2]>,
}

impl SymbolOut {
    pub fn new(c: &SymbolCoefficients) -> Self {
        Self {
            coefficients: pairs(c.coeffs()),
        }
    }
}

/// Any of the accepted input documents.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Spectral(Vec<Complex64>),
    Symbol(SymbolCoefficients),
    Rational {
        numer: Vec<Complex64>,
        denom: Vec<Complex64>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralIn {
    zeta: Vec<Number>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolIn {
    coefficients: Vec<Number>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalIn {
    numer: Vec<Number>,
    denom: Vec<Number>,
}

pub fn read_input(path: &Path) -> Result<Input, Error> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_input(&text).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::InvalidInput(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_input(text: &str) -> Result<Input, Error> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let invalid = |e: serde_json::Error| Error::InvalidInput(e.to_string());
    let has = |key: &str| value.get(key).is_some();
    if has("zeta") {
        let doc: SpectralIn = serde_json::from_value(value).map_err(invalid)?;
        Ok(Input::Spectral(complexes(&doc.zeta)))
    } else if has("coefficients") {
        let doc: SymbolIn = serde_json::from_value(value).map_err(invalid)?;
        Ok(Input::Symbol(SymbolCoefficients::new(complexes(&doc.coefficients))))
    } else if has("numer") || has("denom") {
        let doc: RationalIn = serde_json::from_value(value).map_err(invalid)?;
        Ok(Input::Rational {
            numer: complexes(&doc.numer),
            denom: complexes(&doc.denom),
        })
    } else {
        Err(Error::InvalidInput(
            "expected a document with \"zeta\", \"coefficients\" or \"numer\"/\"denom\"".into(),
        ))
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorDocument {
    pub code: &'static str,
    pub message: String,
    pub context: Value,
}

impl ErrorDocument {
    pub fn new(err: &Error) -> Self {
        let context = match serde_json::to_value(err) {
            Ok(Value::Object(mut map)) if map.len() == 1 => {
                match map.values_mut().next().map(Value::take) {
                    Some(Value::Object(mut fields)) => {
                        // Documents count entries from one.
                        if let Some(index) = fields.get("index").and_then(Value::as_u64) {
                            fields.insert("index".into(), (index + 1).into());
                        }
                        Value::Object(fields)
                    }
                    Some(Value::String(detail)) => serde_json::json!({ "detail": detail }),
                    _ => serde_json::json!({}),
                }
            }
            _ => serde_json::json!({}),
        };
        Self {
            code: err.code(),
            message: err.to_string(),
            context,
        }
    }
}
