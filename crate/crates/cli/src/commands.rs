use std::fs;
use std::path::Path;

use hankel_spectral::generating_function::{self as genfun_mod, j_resolvent, j_resolvent_stabilized};
use hankel_spectral::hankel_forward::forward_map_detailed;
use hankel_spectral::inverse_map::{reconstruct_until_decay, DecayStop};
use hankel_spectral::kernel_analysis::{inner_generator, verify_generator};
use hankel_spectral::rational_symbols::{expand_rational, kronecker_ranks_with, RankOptions};
use hankel_spectral::spectral_data::evaluate_identities;
use hankel_spectral::{forward_map, reconstruct, Error, ForwardOptions, Result, SymbolCoefficients, ZetaSequence};
use serde_json::{json, Value};

use crate::documents::{read_input, Input, SpectralOut, SymbolOut};
use crate::Io;

/// Coefficients kept when a symbol is rebuilt from spectral data for another check.
const REBUILD_LIMIT: usize = 1 << 17;
const REBUILD_STOP: DecayStop = DecayStop {
    threshold: 1e-16,
    run: 8,
};

pub struct Csv {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

/// What a command produced: a JSON document, an optional CSV series, and
/// an optional failure raised after the outputs were computed.
pub struct Outcome {
    json: Value,
    csv: Option<Csv>,
    failure: Option<Error>,
}

impl Outcome {
    fn new(json: Value) -> Self {
        Self {
            json,
            csv: None,
            failure: None,
        }
    }

    fn with_csv(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.csv = Some(Csv { header, rows });
        self
    }

    fn failing_if(mut self, failure: Option<Error>) -> Self {
        self.failure = failure;
        self
    }

    pub fn write(self, io: &Io) -> Result<Option<Error>> {
        let text = serde_json::to_string_pretty(&self.json).map_err(|e| Error::InvalidInput(e.to_string()))? + "\n";
        match &io.out {
            Some(path) => write_file(path, text.as_bytes())?,
            None => print!("{text}"),
        }
        if let (Some(path), Some(csv)) = (&io.csv, &self.csv) {
            let mut writer = csv::Writer::from_writer(Vec::new());
            let io_err = |e: csv::Error| Error::InvalidInput(e.to_string());
            writer.write_record(&csv.header).map_err(io_err)?;
            for row in &csv.rows {
                writer.write_record(row).map_err(io_err)?;
            }
            let bytes = writer.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
            write_file(path, &bytes)?;
        }
        Ok(self.failure)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn num(v: f64) -> String {
    (v + 0.0).to_string()
}

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize")
}

fn spectral_input(io: &Io) -> Result<ZetaSequence> {
    match read_input(&io.input)? {
        Input::Spectral(raw) => ZetaSequence::new(raw),
        _ => Err(Error::InvalidInput(
            "expected a spectral document {\"zeta\": ...}".into(),
        )),
    }
}

fn symbol_input(io: &Io) -> Result<SymbolCoefficients> {
    match read_input(&io.input)? {
        Input::Symbol(c) => Ok(c),
        _ => Err(Error::InvalidInput(
            "expected a symbol document {\"coefficients\": ...}".into(),
        )),
    }
}

fn forward_options(size: usize) -> ForwardOptions {
    ForwardOptions {
        max_size: size,
        ..ForwardOptions::default()
    }
}

pub fn forward(io: &Io, tol: f64, size: usize) -> Result<Outcome> {
    let c = symbol_input(io)?;
    let opts = ForwardOptions {
        stabilization_tol: tol,
        ..forward_options(size)
    };
    let result = forward_map_detailed(&c, &opts)?;
    let z = &result.zeta;
    let (phi, theta) = (z.phi(), z.theta());
    let rows = (0..z.rank())
        .map(|j| {
            let sigma = if z.is_boundary(j) { 0.0 } else { z.sigma()[j] };
            vec![
                (j + 1).to_string(),
                num(z.rho()[j]),
                num(phi[j]),
                num(sigma),
                num(theta.get(j).copied().unwrap_or(0.0)),
            ]
        })
        .collect();
    Ok(Outcome::new(to_json(&SpectralOut::new(z))).with_csv(vec!["j", "rho", "phi", "sigma", "theta"], rows))
}

fn coefficient_rows(c: &SymbolCoefficients) -> Vec<Vec<String>> {
    c.coeffs()
        .iter()
        .enumerate()
        .map(|(n, v)| vec![n.to_string(), num(v.re), num(v.im), num(v.norm())])
        .collect()
}

pub fn inverse(io: &Io, nmax: usize, full: bool) -> Result<Outcome> {
    let z = spectral_input(io)?;
    let c = if full {
        reconstruct(&z, nmax)?
    } else {
        reconstruct_until_decay(&z, nmax, DecayStop::default())?
    };
    Ok(Outcome::new(to_json(&SymbolOut::new(&c))).with_csv(vec!["n", "re", "im", "abs"], coefficient_rows(&c)))
}

pub fn roundtrip(io: &Io, tol: f64, nmax: usize, size: usize) -> Result<Outcome> {
    let opts = forward_options(size);
    let (direction, compared, max_abs, max_rel) = match read_input(&io.input)? {
        Input::Spectral(raw) => {
            let z = ZetaSequence::new(raw)?;
            let c = reconstruct_until_decay(&z, REBUILD_LIMIT, REBUILD_STOP)?;
            let back = forward_map(&c, &opts)?;
            if back.entries().len() != z.entries().len() {
                return Err(Error::ToleranceExceeded {
                    identity: format!(
                        "roundtrip length {} against {}",
                        back.entries().len(),
                        z.entries().len()
                    ),
                    residual: f64::INFINITY,
                    tolerance: tol,
                });
            }
            let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
            for (a, b) in z.entries().iter().zip(back.entries()) {
                let d = (a - b).norm();
                max_abs = max_abs.max(d);
                max_rel = max_rel.max(d / a.norm());
            }
            ("inverse_then_forward", z.entries().len(), max_abs, max_rel)
        }
        Input::Symbol(c) => {
            let z = forward_map(&c, &opts)?;
            let count = nmax.min(c.len().saturating_sub(1));
            let back = reconstruct(&z, count)?;
            let scale = c.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
            let max_abs = (0..=count).map(|n| (c.get(n) - back.get(n)).norm()).fold(0.0, f64::max);
            let max_rel = if scale > 0.0 { max_abs / scale } else { max_abs };
            ("forward_then_inverse", count + 1, max_abs, max_rel)
        }
        Input::Rational { .. } => {
            return Err(Error::InvalidInput(
                "roundtrip takes a spectral or symbol document".into(),
            ))
        }
    };
    let passed = max_rel <= tol;
    let report = json!({
        "direction": direction,
        "compared": compared,
        "max_abs_error": max_abs,
        "max_relative_error": max_rel,
        "tolerance": tol,
        "passed": passed,
    });
    let failure = (!passed).then(|| Error::ToleranceExceeded {
        identity: format!("roundtrip {direction}"),
        residual: max_rel,
        tolerance: tol,
    });
    Ok(Outcome::new(report).failing_if(failure))
}

pub fn kernel(io: &Io, nmax: usize, samples: usize, size: usize, tol: f64) -> Result<Outcome> {
    let z = spectral_input(io)?;
    let report = inner_generator(&z, nmax)?;
    let c = reconstruct(&z, 2 * size.max(1))?;
    let check = verify_generator(&c, &report, samples, size, tol)?;
    let mut json = to_json(&report);
    json["verification"] = json!({
        "samples": samples,
        "size": size,
        "modulus_deviation": check.modulus_deviation,
        "annihilation_residual": check.annihilation_residual,
        "shifted_residual": check.shifted_residual,
        "extra_line_residual": check.extra_line_residual,
    });
    let rows = check
        .boundary_samples
        .iter()
        .map(|(t, m)| vec![num(*t), num(*m)])
        .collect();
    Ok(Outcome::new(json).with_csv(vec!["t", "modulus"], rows))
}

pub fn identities(io: &Io, tol: f64) -> Result<Outcome> {
    let z = spectral_input(io)?;
    let report = evaluate_identities(&z, tol)?;
    let failure = report
        .worst()
        .filter(|w| w.residual > tol)
        .map(|w| Error::ToleranceExceeded {
            identity: format!("{}[m={}, p={}]", w.identity.name(), w.m, w.p),
            residual: w.residual,
            tolerance: tol,
        });
    let mut json = to_json(&report);
    json["passed"] = json!(failure.is_none());
    Ok(Outcome::new(json).failing_if(failure))
}

pub fn genfun(
    io: &Io,
    symbol: Option<&Path>,
    (xmin, xmax, points): (f64, f64, usize),
    size: Option<usize>,
    tol: f64,
) -> Result<Outcome> {
    let (z, c) = match read_input(&io.input)? {
        Input::Spectral(raw) => {
            let z = ZetaSequence::new(raw)?;
            let c = match symbol {
                Some(path) => match read_input(path)? {
                    Input::Symbol(c) => c,
                    _ => return Err(Error::InvalidInput("--symbol expects a symbol document".into())),
                },
                None => reconstruct_until_decay(&z, REBUILD_LIMIT, REBUILD_STOP)?,
            };
            (z, c)
        }
        Input::Symbol(c) => (forward_map(&c, &ForwardOptions::default())?, c),
        Input::Rational { .. } => return Err(Error::InvalidInput("genfun takes a spectral or symbol document".into())),
    };
    if points == 0 || xmin.is_nan() || xmax.is_nan() || xmin > xmax {
        return Err(Error::InvalidInput("the grid needs points > 0 and xmin <= xmax".into()));
    }
    let mut samples = Vec::with_capacity(points);
    let mut rows = Vec::with_capacity(points);
    let mut worst = 0.0f64;
    for k in 0..points {
        let x = if points == 1 {
            xmin
        } else {
            xmin + (xmax - xmin) * k as f64 / (points - 1) as f64
        };
        let resolvent = match size {
            Some(s) => j_resolvent(&c, x, s)?,
            None => j_resolvent_stabilized(&c, x, 1e-12, 32, 1 << 16)?.0,
        };
        let mut sample = genfun_mod::sample(&z, None, x)?;
        sample.j_resolvent = Some(resolvent);
        let trace = genfun_mod::trace_logderiv_check(&z, x)?;
        let residual = (sample.j_product - resolvent).abs() / sample.j_product.abs();
        worst = worst.max(residual).max(sample.spread());
        rows.push(vec![num(x), num(sample.j_product), num(resolvent), num(residual)]);
        let mut entry = to_json(&sample);
        entry["reciprocity_residual"] = json!(sample.reciprocity_residual());
        entry["trace_residual"] = json!(trace.residual);
        samples.push(entry);
    }
    let passed = worst <= tol;
    let json = json!({
        "tolerance": tol,
        "max_relative_disagreement": worst,
        "passed": passed,
        "samples": samples,
    });
    let failure = (!passed).then(|| Error::ToleranceExceeded {
        identity: "generating function forms".into(),
        residual: worst,
        tolerance: tol,
    });
    Ok(Outcome::new(json)
        .with_csv(vec!["x", "J_product", "J_resolvent", "residual"], rows)
        .failing_if(failure))
}

pub fn rank(io: &Io, tol: f64, size: usize, nmax: usize) -> Result<Outcome> {
    let c = match read_input(&io.input)? {
        Input::Symbol(c) => c,
        Input::Rational { numer, denom } => expand_rational(&numer, &denom, nmax)?,
        Input::Spectral(_) => return Err(Error::InvalidInput("rank takes a symbol or rational document".into())),
    };
    let opts = RankOptions {
        tol,
        max_size: size,
        ..RankOptions::default()
    };
    let pattern = kronecker_ranks_with(&c, &opts)?;
    let mut json = to_json(&pattern);
    json["dimension"] = json!(pattern.class.dimension());
    Ok(Outcome::new(json))
}
