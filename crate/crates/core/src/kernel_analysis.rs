//! Kernels of `H_u` and `K_u` and their inner generators.
//!
//! `ker H_u = φ L²₊` with `φ` inner unless the kernel is trivial. At finite
//! length the case is fixed by parity: an even sequence has `Σν² < 1` and
//! `φ = (1−Σν²)^{−1/2}(1 − Σ α_n zⁿ)` with `α_n = Y·AⁿY`; an odd sequence
//! has `1` in the range of `H_u` and `φ = zψ` with
//! `ψ = (Σν_j²/ρ_j²)^{−1/2} Σ β_n zⁿ`, `β_n = W·AⁿY`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hankel_forward::SymbolCoefficients;
use crate::linalg::HankelOperator;
use crate::spectral_data::{build_a_with, compute_weights, AOperator, ZetaSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// Conditions for `ker H_u = {0}` hold.
    TrivialKernel,
    /// `1` is not in the closure of the range: `Σν² < 1`.
    CaseOneNotInClosure,
    /// `1` is in the range: `Σν² = 1` and `Σν²/ρ² < ∞`.
    CaseTwoInRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelRelation {
    /// `ker K_u = ker H_u`.
    Equal,
    /// `ker K_u = ker H_u ⊕ C·H_u⁻¹(1)`.
    ExtraLine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCriteria {
    /// `Σ ν_j²`.
    pub nu_sum: f64,
    /// `1 − Σν² = Π σ_j²/ρ_j²`, evaluated as the product.
    pub nu_deficit: f64,
    /// `Σ ν_j²/ρ_j²`.
    pub nu_over_rho_sum: f64,
    /// `p_N = ρ_{N+1}^{−2} Π_{j≤N} σ_j²/ρ_j²` for `N = 0..rank−1`.
    pub p_sequence: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    pub case_tag: CaseTag,
    pub kernel_relation: KernelRelation,
    pub criteria: KernelCriteria,
    /// `(1−Σν²)^{−1/2}` or `(Σν²/ρ²)^{−1/2}`.
    pub normalization: f64,
    /// Coefficients of `φ`, empty until a generator is computed.
    pub generator_coeffs: Vec<Complex64>,
    /// Power of `z` factored out of `φ`: `φ = z^{z_shift} ψ`.
    pub z_shift: usize,
    /// Estimated modulus of the omitted tail of the generator series.
    pub tail_estimate: f64,
}

impl KernelReport {
    /// Coefficients of `ψ`, i.e. of `φ` with the `z_shift` removed.
    pub fn psi_coeffs(&self) -> &[Complex64] {
        &self.generator_coeffs[self.z_shift.min(self.generator_coeffs.len())..]
    }

    pub fn has_generator(&self) -> bool {
        !self.generator_coeffs.is_empty()
    }
}

/// Case classification and criterion values.
pub fn classify_kernel(z: &ZetaSequence) -> Result<KernelReport> {
    let weights = compute_weights(z)?;
    Ok(classify_with(z, &weights.nu_sq))
}

fn classify_with(z: &ZetaSequence, nu_sq: &[f64]) -> KernelReport {
    let rho = z.rho();
    let sigma = z.sigma();
    let nu_sum: f64 = nu_sq.iter().sum();
    let nu_deficit: f64 = rho.iter().zip(sigma).map(|(r, s)| (s / r).powi(2)).product();
    let nu_over_rho_sum: f64 = nu_sq.iter().zip(rho).map(|(n, r)| n / (r * r)).sum();
    let mut p_sequence = Vec::with_capacity(rho.len());
    let mut product = 1.0;
    for j in 0..rho.len() {
        p_sequence.push(product / (rho[j] * rho[j]));
        product *= (sigma[j] / rho[j]).powi(2);
    }
    let (case_tag, kernel_relation, normalization) = if z.is_odd() {
        (
            CaseTag::CaseTwoInRange,
            KernelRelation::ExtraLine,
            nu_over_rho_sum.powf(-0.5),
        )
    } else {
        (
            CaseTag::CaseOneNotInClosure,
            KernelRelation::Equal,
            nu_deficit.powf(-0.5),
        )
    };
    KernelReport {
        case_tag,
        kernel_relation,
        criteria: KernelCriteria {
            nu_sum,
            nu_deficit,
            nu_over_rho_sum,
            p_sequence,
        },
        normalization,
        generator_coeffs: Vec::new(),
        z_shift: 0,
        tail_estimate: 0.0,
    }
}

/// Classification together with the generator coefficients `φ₀..φ_{n_max}`.
pub fn inner_generator(z: &ZetaSequence, n_max: usize) -> Result<KernelReport> {
    let weights = compute_weights(z)?;
    let mut report = classify_with(z, &weights.nu_sq);
    let op = build_a_with(z, &weights);
    let norm = report.normalization;
    match report.case_tag {
        CaseTag::TrivialKernel => return Err(Error::TrivialKernelCase),
        CaseTag::CaseOneNotInClosure => {
            let (alpha, tail) = series(&op, &op.y_complex(), n_max);
            let mut coeffs: Vec<Complex64> = alpha.iter().map(|a| -a * norm).collect();
            // 1 − α₀ = Π σ²/ρ² exactly; the product avoids the cancellation.
            coeffs[0] = Complex64::new(report.criteria.nu_deficit * norm, 0.0);
            report.generator_coeffs = coeffs;
            report.tail_estimate = tail * norm;
        }
        CaseTag::CaseTwoInRange => {
            let (beta, tail) = series(&op, &op.w_vec, n_max.saturating_sub(1));
            report.generator_coeffs = std::iter::once(Complex64::new(0.0, 0.0))
                .chain(beta.iter().map(|b| b * norm))
                .collect();
            report.z_shift = 1;
            report.tail_estimate = tail * norm;
        }
    }
    Ok(report)
}

/// `L·AⁿY` for `n = 0..=n_max` and a geometric estimate of `Σ_{n>n_max} |L·AⁿY|`.
fn series(op: &AOperator, left: &nalgebra::DVector<Complex64>, n_max: usize) -> (Vec<Complex64>, f64) {
    let mut v = op.y_complex();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut norms = Vec::with_capacity(n_max + 2);
    for _ in 0..=n_max {
        out.push(left.iter().zip(v.iter()).map(|(l, x)| l * x).sum());
        norms.push(v.norm());
        v = &op.a * v;
    }
    norms.push(v.norm());
    let next = *norms.last().unwrap();
    if next == 0.0 {
        return (out, 0.0);
    }
    // Worst contraction ratio over the last few iterates.
    let window = norms.len().saturating_sub(6);
    let q = norms[window..]
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .fold(0.0, f64::max);
    let tail = if q < 1.0 {
        left.norm() * next / (1.0 - q)
    } else {
        f64::INFINITY
    };
    (out, tail)
}

/// Numerical checks of a generator against the symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorVerification {
    /// `max_t | |φ(e^{it})| − 1 |`.
    pub modulus_deviation: f64,
    /// `‖Γ conj(φ̂)‖ / ‖φ̂‖`.
    pub annihilation_residual: f64,
    /// `‖Γ̃ conj(φ̂)‖ / ‖φ̂‖`, membership of `φ` in `ker K_u`.
    pub shifted_residual: f64,
    /// `‖Γ̃ conj(ψ̂)‖ / ‖ψ̂‖` for the extra line of `ker K_u`, odd case only.
    pub extra_line_residual: Option<f64>,
    pub tail_estimate: f64,
    /// `(t, |φ(e^{it})|)` at the sample points.
    pub boundary_samples: Vec<(f64, f64)>,
}

/// Samples `|φ|` on the circle and measures kernel membership with
/// `size × size` Hankel truncations.
///
/// Fails with `TruncationTooShort` when the generator's tail estimate
/// exceeds `tol`.
pub fn verify_generator(
    c: &SymbolCoefficients,
    report: &KernelReport,
    samples: usize,
    size: usize,
    tol: f64,
) -> Result<GeneratorVerification> {
    if !report.has_generator() {
        return Err(Error::TrivialKernelCase);
    }
    if report.tail_estimate.is_nan() || report.tail_estimate > tol {
        return Err(Error::TruncationTooShort {
            tail: report.tail_estimate,
            tolerance: tol,
        });
    }
    let phi = &report.generator_coeffs;
    let boundary_samples: Vec<(f64, f64)> = (0..samples)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / samples as f64;
            (t, evaluate_on_circle(phi, t).norm())
        })
        .collect();
    let modulus_deviation = boundary_samples
        .iter()
        .map(|(_, m)| (m - 1.0).abs())
        .fold(0.0, f64::max);

    let gamma = HankelOperator::new(c.coeffs(), size, 0);
    let gamma_shift = HankelOperator::new(c.coeffs(), size, 1);
    let annihilation_residual = relative_image(&gamma, phi);
    let shifted_residual = relative_image(&gamma_shift, phi);
    let extra_line_residual =
        (report.case_tag == CaseTag::CaseTwoInRange).then(|| relative_image(&gamma_shift, report.psi_coeffs()));
    Ok(GeneratorVerification {
        modulus_deviation,
        annihilation_residual,
        shifted_residual,
        extra_line_residual,
        tail_estimate: report.tail_estimate,
        boundary_samples,
    })
}

/// `Σ a_n e^{int}` by Horner's rule.
pub fn evaluate_on_circle(coeffs: &[Complex64], t: f64) -> Complex64 {
    let w = Complex64::from_polar(1.0, t);
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * w + a)
}

fn relative_image(op: &HankelOperator, h: &[Complex64]) -> f64 {
    let mut x = vec![Complex64::new(0.0, 0.0); op.size()];
    for (dst, src) in x.iter_mut().zip(h) {
        *dst = *src;
    }
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let image = op.apply_antilinear(&x);
    image.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() / norm
}

/// Trend-based reading of the kernel conditions on an infinite sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendAdvisory {
    pub suggested: CaseTag,
    pub terms: usize,
    /// `Σ_{j≤terms} (1 − σ_j²/ρ_j²)`.
    pub deficit_partial_sum: f64,
    /// `max_{N<terms} log p_N`.
    pub log_p_max: f64,
    /// Growth of the deficit sum over `[N/2, N]` relative to `[N/4, N/2]`.
    pub deficit_growth_ratio: f64,
    /// Same ratio for `log p_N`.
    pub log_p_growth_ratio: f64,
}

/// Ratio of late to early dyadic growth above which a partial sum is read as divergent.
pub const DIVERGENCE_RATIO: f64 = 0.75;

/// Reads the two kernel conditions from the first `terms` values of
/// closed-form sequences `ρ_j`, `σ_j` (`j ≥ 1`).
///
/// A partial sum whose growth over `[N/2, N]` is at least
/// [`DIVERGENCE_RATIO`] times its growth over `[N/4, N/2]` is read as
/// divergent. Finite data cannot decide a limit, so the result is only a
/// suggestion.
pub fn kernel_trend<R, S>(rho: R, sigma: S, terms: usize) -> TrendAdvisory
where
    R: Fn(usize) -> f64,
    S: Fn(usize) -> f64,
{
    let terms = terms.max(8);
    let mut deficit = Vec::with_capacity(terms + 1);
    let mut log_p = Vec::with_capacity(terms + 1);
    let mut sum = 0.0;
    let mut log_product = 0.0;
    deficit.push(0.0);
    for j in 1..=terms {
        log_p.push(log_product - 2.0 * rho(j).ln());
        let ratio = sigma(j) / rho(j);
        sum += 1.0 - ratio * ratio;
        log_product += 2.0 * ratio.ln();
        deficit.push(sum);
    }
    let mut running = f64::NEG_INFINITY;
    let log_p_sup: Vec<f64> = log_p
        .iter()
        .map(|&v| {
            running = running.max(v);
            running
        })
        .collect();
    let growth = |seq: &[f64]| {
        let n = seq.len() - 1;
        let late = seq[n] - seq[n / 2];
        let early = seq[n / 2] - seq[n / 4];
        if early > 0.0 {
            late / early
        } else if late > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let deficit_growth_ratio = growth(&deficit);
    let log_p_growth_ratio = growth(&log_p_sup);
    let sum_diverges = deficit_growth_ratio >= DIVERGENCE_RATIO;
    let p_diverges = log_p_growth_ratio >= DIVERGENCE_RATIO;
    let suggested = match (sum_diverges, p_diverges) {
        (false, _) => CaseTag::CaseOneNotInClosure,
        (true, false) => CaseTag::CaseTwoInRange,
        (true, true) => CaseTag::TrivialKernel,
    };
    TrendAdvisory {
        suggested,
        terms,
        deficit_partial_sum: sum,
        log_p_max: running,
        deficit_growth_ratio,
        log_p_growth_ratio,
    }
}
