//! The generating function `J(x) = ((I − x H_u²)⁻¹ 1 | 1)` for real `x`.
//!
//! Three equal forms are available: the interlaced product
//! `Π (1 − σ_j² x)/(1 − ρ_j² x)`, the partial fractions
//! `1 + x Σ ν_j² ρ_j²/(1 − x ρ_j²)`, and the resolvent itself, evaluated on
//! a truncation of `ΓΓ*`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hankel_forward::SymbolCoefficients;
use crate::linalg::{self, HankelOperator};
use crate::spectral_data::{compute_weights, ZetaSequence};

/// Relative distance to a pole below which evaluation is refused.
pub const POLE_MARGIN: f64 = 1e-8;

/// Truncations above this size use conjugate gradients when `x ≤ 0`.
const DENSE_LIMIT: usize = 128;

fn check_poles(values: &[f64], x: f64) -> Result<()> {
    for &v in values.iter().filter(|&&v| v > 0.0) {
        let pole = 1.0 / (v * v);
        if (x - pole).abs() <= POLE_MARGIN * pole {
            return Err(Error::NearPole { x, pole });
        }
    }
    Ok(())
}

/// `Π_j (1 − σ_j² x)/(1 − ρ_j² x)`.
pub fn j_product(z: &ZetaSequence, x: f64) -> Result<f64> {
    check_poles(z.rho(), x)?;
    Ok(z.rho()
        .iter()
        .zip(z.sigma())
        .map(|(r, s)| (1.0 - s * s * x) / (1.0 - r * r * x))
        .product())
}

/// `1 + x Σ_j ν_j² ρ_j²/(1 − x ρ_j²)`.
pub fn j_partial_fraction(z: &ZetaSequence, x: f64) -> Result<f64> {
    check_poles(z.rho(), x)?;
    let weights = compute_weights(z)?;
    let sum: f64 = weights
        .nu_sq
        .iter()
        .zip(z.rho())
        .map(|(n, r)| n * r * r / (1.0 - x * r * r))
        .sum();
    Ok(1.0 + x * sum)
}

/// `J′(x) = Σ_j ν_j² ρ_j²/(1 − x ρ_j²)²`, the derivative of the partial fractions.
pub fn j_derivative(z: &ZetaSequence, x: f64) -> Result<f64> {
    check_poles(z.rho(), x)?;
    let weights = compute_weights(z)?;
    Ok(weights
        .nu_sq
        .iter()
        .zip(z.rho())
        .map(|(n, r)| {
            let d = 1.0 - x * r * r;
            n * r * r / (d * d)
        })
        .sum())
}

/// `((I − xΓΓ*)⁻¹ e₀)₀` on the `size × size` truncation.
pub fn j_resolvent(c: &SymbolCoefficients, x: f64, size: usize) -> Result<f64> {
    let size = size.max(1);
    let mut rhs = vec![Complex64::new(0.0, 0.0); size];
    rhs[0] = Complex64::new(1.0, 0.0);
    if x <= 0.0 && size > DENSE_LIMIT {
        let gamma = HankelOperator::new(c.coeffs(), size, 0);
        let apply = |v: &[Complex64]| -> Vec<Complex64> {
            let g = gamma.apply_gram(v);
            v.iter().zip(g).map(|(a, b)| a - b * x).collect()
        };
        let y = linalg::conjugate_gradient(apply, &rhs, 1e-14, 4 * size).ok_or(Error::SingularSystem { x })?;
        return Ok(y[0].re);
    }
    let gamma = linalg::dense_hankel(c.coeffs(), size, 0);
    let gram = &gamma * gamma.adjoint();
    let system = DMatrix::identity(size, size) - gram * Complex64::new(x, 0.0);
    let y = system
        .lu()
        .solve(&DVector::from_vec(rhs))
        .filter(|y| y.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        .ok_or(Error::SingularSystem { x })?;
    Ok(y[0].re)
}

/// [`j_resolvent`] with truncations doubled from `min_size` until two
/// successive values agree within `tol` relative, or the truncation holds
/// every coefficient.
///
/// Returns the value and the truncation size used.
pub fn j_resolvent_stabilized(
    c: &SymbolCoefficients,
    x: f64,
    tol: f64,
    min_size: usize,
    max_size: usize,
) -> Result<(f64, usize)> {
    let exact = c.len().max(1);
    let mut size = min_size.max(1).min(exact);
    let mut previous = j_resolvent(c, x, size)?;
    while size < exact {
        if size >= max_size {
            return Err(Error::NoConvergence { max_size });
        }
        size = (2 * size).min(exact).min(max_size);
        let value = j_resolvent(c, x, size)?;
        if (value - previous).abs() <= tol * value.abs() {
            return Ok((value, size));
        }
        previous = value;
    }
    Ok((previous, size))
}

/// `1/J(x) = 1 − x (C + Σ_{σ_m > 0} κ_m²/(1 − x σ_m²))`, with the constant `C`.
pub fn inverse_j(z: &ZetaSequence, x: f64) -> Result<(f64, f64)> {
    check_poles(z.sigma(), x)?;
    let weights = compute_weights(z)?;
    let constant = weights.c_constant(z);
    let sum: f64 = weights
        .kappa_sq
        .iter()
        .zip(z.sigma())
        .filter(|(_, s)| **s > 0.0)
        .map(|(k, s)| k / (1.0 - x * s * s))
        .sum();
    Ok((1.0 - x * (constant + sum), constant))
}

/// Both sides of `Σ_j (ρ_j²/(1 − ρ_j² x) − σ_j²/(1 − σ_j² x)) = J′(x)/J(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceCheck {
    pub x: f64,
    pub trace_side: f64,
    pub log_derivative: f64,
    /// `|trace_side − log_derivative|`.
    pub residual: f64,
    /// `|trace_side − J′_fd/J|` with a central difference of the product form.
    pub finite_difference_residual: f64,
}

/// Compares the trace sum with `J′/J`, taking `J` from the product and
/// `J′` from the partial fractions.
pub fn trace_logderiv_check(z: &ZetaSequence, x: f64) -> Result<TraceCheck> {
    check_poles(z.rho(), x)?;
    check_poles(z.sigma(), x)?;
    let trace_side: f64 = z
        .rho()
        .iter()
        .zip(z.sigma())
        .map(|(r, s)| r * r / (1.0 - r * r * x) - s * s / (1.0 - s * s * x))
        .sum();
    let j = j_product(z, x)?;
    let log_derivative = j_derivative(z, x)? / j;

    let h = 1e-5 * x.abs().max(1e-3);
    let fd = (j_product(z, x + h)? - j_product(z, x - h)?) / (2.0 * h);
    Ok(TraceCheck {
        x,
        trace_side,
        log_derivative,
        residual: (trace_side - log_derivative).abs(),
        finite_difference_residual: (trace_side - fd / j).abs(),
    })
}

/// All forms of `J` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenFunSample {
    pub x: f64,
    pub j_product: f64,
    pub j_partial_fraction: f64,
    pub j_resolvent: Option<f64>,
    pub inv_j_value: f64,
    pub c_constant: f64,
}

impl GenFunSample {
    /// Largest pairwise relative difference among the available `J` values.
    pub fn spread(&self) -> f64 {
        let mut values = vec![self.j_product, self.j_partial_fraction];
        values.extend(self.j_resolvent);
        let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        (max - min) / scale
    }

    /// `|J · (1/J) − 1|`.
    pub fn reciprocity_residual(&self) -> f64 {
        (self.j_product * self.inv_j_value - 1.0).abs()
    }
}

/// Evaluates every form at `x`; the resolvent needs the symbol and a truncation size.
pub fn sample(z: &ZetaSequence, symbol: Option<(&SymbolCoefficients, usize)>, x: f64) -> Result<GenFunSample> {
    let (inv_j_value, c_constant) = inverse_j(z, x)?;
    Ok(GenFunSample {
        x,
        j_product: j_product(z, x)?,
        j_partial_fraction: j_partial_fraction(z, x)?,
        j_resolvent: symbol.map(|(c, size)| j_resolvent(c, x, size)).transpose()?,
        inv_j_value,
        c_constant,
    })
}
