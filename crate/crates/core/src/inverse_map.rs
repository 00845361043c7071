//! Inverse spectral map: `ĉ(n) = X·AⁿY`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::Result;
use crate::hankel_forward::SymbolCoefficients;
use crate::spectral_data::{build_a, validate_zeta, AOperator, ZetaSequence, DEFAULT_INTERLACING_MARGIN};

/// Early-stop rule for [`reconstruct_until_decay`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayStop {
    /// Coefficients below `threshold · ρ₁` count as negligible.
    pub threshold: f64,
    /// Number of consecutive negligible coefficients that ends the expansion.
    pub run: usize,
}

impl Default for DecayStop {
    fn default() -> Self {
        Self {
            threshold: 1e-14,
            run: 8,
        }
    }
}

/// `c₀..c_{n_max}` from the recurrence `v₀ = Y`, `v_{n+1} = A v_n`, `c_n = X·v_n`.
pub fn reconstruct(z: &ZetaSequence, n_max: usize) -> Result<SymbolCoefficients> {
    let op = build_a(z)?;
    Ok(SymbolCoefficients::new(iterate(&op, &op.x_vec, n_max, None)))
}

/// Like [`reconstruct`], but stops once the coefficients have decayed.
pub fn reconstruct_until_decay(z: &ZetaSequence, n_max: usize, stop: DecayStop) -> Result<SymbolCoefficients> {
    let op = build_a(z)?;
    let floor = stop.threshold * z.rho().first().copied().unwrap_or(0.0);
    Ok(SymbolCoefficients::new(iterate(
        &op,
        &op.x_vec,
        n_max,
        Some((floor, stop.run)),
    )))
}

/// `L·AⁿY` for `n = 0..=n_max`, with an optional `(floor, run)` early stop.
pub(crate) fn iterate(
    op: &AOperator,
    left: &DVector<Complex64>,
    n_max: usize,
    stop: Option<(f64, usize)>,
) -> Vec<Complex64> {
    if op.dim() == 0 {
        return vec![Complex64::new(0.0, 0.0); n_max + 1];
    }
    let mut v = op.y_complex();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut quiet = 0;
    for n in 0..=n_max {
        let c = left.iter().zip(v.iter()).map(|(l, x)| l * x).sum::<Complex64>();
        out.push(c);
        if let Some((floor, run)) = stop {
            quiet = if c.norm() < floor { quiet + 1 } else { 0 };
            if quiet >= run {
                break;
            }
        }
        if n < n_max {
            v = &op.a * v;
        }
    }
    out
}

/// Spectral data of a real symbol from the signed eigenvalues of `Γ_c`
/// and `Γ_c̃`: `ζ_{2j−1} = λ_j`, `ζ_{2j} = μ_j`.
pub fn real_case_embed(lambda: &[f64], mu: &[f64]) -> Result<ZetaSequence> {
    let mut raw = Vec::with_capacity(lambda.len() + mu.len());
    for (j, &l) in lambda.iter().enumerate() {
        raw.push(Complex64::new(l, 0.0));
        if let Some(&m) = mu.get(j) {
            raw.push(Complex64::new(m, 0.0));
        }
    }
    if mu.len() > lambda.len() {
        raw.extend(mu[lambda.len()..].iter().map(|&m| Complex64::new(m, 0.0)));
    }
    validate_zeta(raw, DEFAULT_INTERLACING_MARGIN)
}
