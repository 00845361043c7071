//! Interlaced spectral data and the algebra built on it.
//!
//! A [`ZetaSequence`] holds `ζ₁, ζ₂, …` with strictly decreasing moduli.
//! Odd-indexed entries carry the singular values `ρ_j` of `H_u` and the
//! angles `φ_j`, even-indexed entries carry `σ_j` and `θ_j` for `K_u`:
//! `ζ_{2j−1} = ρ_j e^{−iφ_j}`, `ζ_{2j} = σ_j e^{−iθ_j}`.
//!
//! Indices in the Rust API are zero-based (`j = 0` is `ρ₁`). Serialized
//! reports use one-based indices.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum relative gap between consecutive moduli.
pub const DEFAULT_INTERLACING_MARGIN: f64 = 1e-10;

/// Largest magnitude accepted for the log of a weight.
const LOG_RANGE: f64 = 700.0;

/// Validated, interlaced spectral data.
///
/// An odd-length input (rank pattern `V(2N−1)`) is stored with an implicit
/// trailing `σ_N = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaSequence {
    entries: Vec<Complex64>,
    rho: Vec<f64>,
    sigma: Vec<f64>,
}

impl ZetaSequence {
    /// Validates `raw` with the default interlacing margin.
    pub fn new(raw: Vec<Complex64>) -> Result<Self> {
        validate_zeta(raw, DEFAULT_INTERLACING_MARGIN)
    }

    /// Builds spectral data from moduli and angles, `ζ_{2j−1} = ρ_j e^{−iφ_j}`,
    /// `ζ_{2j} = σ_j e^{−iθ_j}`.
    pub fn from_polar(rho: &[f64], phi: &[f64], sigma: &[f64], theta: &[f64]) -> Result<Self> {
        if rho.len() != phi.len() || sigma.len() != theta.len() {
            return Err(Error::InvalidInput("each modulus needs exactly one angle".into()));
        }
        let mut raw = Vec::with_capacity(rho.len() + sigma.len());
        for j in 0..rho.len().max(sigma.len()) {
            if let Some(r) = rho.get(j) {
                raw.push(Complex64::from_polar(*r, -phi[j]));
            }
            if let Some(s) = sigma.get(j) {
                raw.push(Complex64::from_polar(*s, -theta[j]));
            }
        }
        Self::new(raw)
    }

    /// The empty sequence, i.e. the zero symbol.
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
            rho: Vec::new(),
            sigma: Vec::new(),
        }
    }

    /// Entries as given, without the implicit trailing zero.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Number of `ρ` values, `N`.
    pub fn rank(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True for the `V(2N−1)` pattern, `σ_N = 0`.
    pub fn is_odd(&self) -> bool {
        self.entries.len() % 2 == 1
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// `σ_1..σ_N`, with `σ_N = 0` for odd sequences.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `ζ_{2j+1}` for zero-based `j`.
    pub fn rho_entry(&self, j: usize) -> Complex64 {
        self.entries[2 * j]
    }

    /// `ζ_{2m+2}` for zero-based `m`, zero on the boundary of an odd sequence.
    pub fn sigma_entry(&self, m: usize) -> Complex64 {
        self.entries.get(2 * m + 1).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// `φ_j = −arg ζ_{2j−1}` in `(−π, π]`.
    pub fn phi(&self) -> Vec<f64> {
        (0..self.rank())
            .map(|j| principal_angle(-self.rho_entry(j).arg()))
            .collect()
    }

    /// `θ_m = −arg ζ_{2m}` in `(−π, π]`, zero where `σ_m = 0`.
    pub fn theta(&self) -> Vec<f64> {
        (0..self.rank())
            .map(|m| {
                let s = self.sigma_entry(m);
                if s.norm() == 0.0 {
                    0.0
                } else {
                    principal_angle(-s.arg())
                }
            })
            .collect()
    }

    /// True when `m` indexes the zero `σ` of an odd sequence.
    pub fn is_boundary(&self, m: usize) -> bool {
        self.is_odd() && m + 1 == self.rank()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.im.abs() <= tol * z.norm().max(1.0))
    }
}

/// Maps an angle into `(−π, π]`.
pub fn principal_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Checks strict decrease of the moduli and canonicalizes the sequence.
///
/// A trailing zero on an even-length input is the explicit form of the odd
/// pattern and is dropped. Any other zero is rejected.
pub fn validate_zeta(raw: Vec<Complex64>, margin: f64) -> Result<ZetaSequence> {
    let mut entries = raw;
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite entry".into()));
    }
    if entries.len().is_multiple_of(2) && entries.last().is_some_and(|z| z.norm() == 0.0) {
        entries.pop();
    }
    for (index, z) in entries.iter().enumerate() {
        if z.norm() == 0.0 {
            return Err(Error::ZeroEntry { index });
        }
    }
    for (index, pair) in entries.windows(2).enumerate() {
        let (left, right) = (pair[0].norm(), pair[1].norm());
        if left - right < margin * left {
            return Err(Error::InterlacingViolation { index, left, right });
        }
    }
    let rho: Vec<f64> = entries.iter().step_by(2).map(|z| z.norm()).collect();
    let mut sigma: Vec<f64> = entries.iter().skip(1).step_by(2).map(|z| z.norm()).collect();
    sigma.resize(rho.len(), 0.0);
    Ok(ZetaSequence { entries, rho, sigma })
}

/// The interpolation weights `ν_j²` and `κ_m²`.
///
/// For an odd sequence the boundary weight `κ_N²` (where `σ_N = 0`) is kept:
/// it equals the constant `C` of the `1/J` expansion, so every identity can
/// be evaluated uniformly over `m = 1..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub nu_sq: Vec<f64>,
    pub kappa_sq: Vec<f64>,
    pub log_nu_sq: Vec<f64>,
    pub log_kappa_sq: Vec<f64>,
    boundary: bool,
}

impl WeightTable {
    pub fn nu(&self) -> Vec<f64> {
        self.nu_sq.iter().map(|v| v.sqrt()).collect()
    }

    pub fn nu_sum(&self) -> f64 {
        self.nu_sq.iter().sum()
    }

    /// True when the last `κ²` belongs to a zero `σ`.
    pub fn has_boundary(&self) -> bool {
        self.boundary
    }

    /// The constant `C`: zero when `Σν² < 1`, `(Σ ν_j²/ρ_j²)⁻¹` when `Σν² = 1`.
    ///
    /// At finite length `Σν² = 1` exactly when the sequence is odd.
    pub fn c_constant(&self, z: &ZetaSequence) -> f64 {
        if !self.boundary {
            return 0.0;
        }
        let s: f64 = self.nu_sq.iter().zip(z.rho()).map(|(n, r)| n / (r * r)).sum();
        1.0 / s
    }
}

/// `ν_j² = (1 − σ_j²/ρ_j²) Π_{k≠j} (ρ_j² − σ_k²)/(ρ_j² − ρ_k²)` and
/// `κ_m² = (ρ_m² − σ_m²) Π_{ℓ≠m} (σ_m² − ρ_ℓ²)/(σ_m² − σ_ℓ²)`.
///
/// Every factor is positive under strict interlacing, so both products are
/// accumulated as sums of logarithms and exponentiated once.
pub fn compute_weights(z: &ZetaSequence) -> Result<WeightTable> {
    let rho = z.rho();
    let sigma = z.sigma();
    let n = rho.len();
    // a² − b² as (a − b)(a + b) keeps close moduli accurate.
    let log_diff_sq = |a: f64, b: f64| ((a - b).abs() * (a + b)).ln();

    let mut log_nu_sq = Vec::with_capacity(n);
    let mut log_kappa_sq = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = log_diff_sq(rho[j], sigma[j]) - 2.0 * rho[j].ln();
        for k in (0..n).filter(|&k| k != j) {
            acc += log_diff_sq(rho[j], sigma[k]) - log_diff_sq(rho[j], rho[k]);
        }
        log_nu_sq.push(acc);

        let mut acc = log_diff_sq(rho[j], sigma[j]);
        for l in (0..n).filter(|&l| l != j) {
            acc += log_diff_sq(sigma[j], rho[l]) - log_diff_sq(sigma[j], sigma[l]);
        }
        log_kappa_sq.push(acc);
    }
    let exponentiate = |logs: &[f64]| -> Result<Vec<f64>> {
        logs.iter()
            .enumerate()
            .map(|(index, &l)| {
                if l.is_finite() && l.abs() <= LOG_RANGE {
                    Ok(l.exp())
                } else {
                    Err(Error::Overflow {
                        index,
                        log_magnitude: l,
                    })
                }
            })
            .collect()
    };
    Ok(WeightTable {
        nu_sq: exponentiate(&log_nu_sq)?,
        kappa_sq: exponentiate(&log_kappa_sq)?,
        log_nu_sq,
        log_kappa_sq,
        boundary: z.is_odd(),
    })
}

/// The matrix `A` of the inverse formula with the vectors `X`, `Y`, `W`.
#[derive(Debug, Clone)]
pub struct AOperator {
    pub a: DMatrix<Complex64>,
    /// `X_j = ν_j ζ_{2j−1}`.
    pub x_vec: DVector<Complex64>,
    /// `Y_j = ν_j`.
    pub y_vec: DVector<f64>,
    /// `W_j = ν_j ζ_{2j−1} / ρ_j²`.
    pub w_vec: DVector<Complex64>,
}

impl AOperator {
    pub fn dim(&self) -> usize {
        self.y_vec.len()
    }

    pub fn y_complex(&self) -> DVector<Complex64> {
        self.y_vec.map(|v| Complex64::new(v, 0.0))
    }
}

pub fn build_a(z: &ZetaSequence) -> Result<AOperator> {
    let weights = compute_weights(z)?;
    Ok(build_a_with(z, &weights))
}

/// `A_{jk} = Σ_m ν_j ν_k ζ_{2k−1} κ_m² ζ_{2m} / ((ρ_j² − σ_m²)(ρ_k² − σ_m²))`.
///
/// Terms with `σ_m = 0` vanish and are skipped.
pub fn build_a_with(z: &ZetaSequence, weights: &WeightTable) -> AOperator {
    let n = z.rank();
    let rho = z.rho();
    let sigma = z.sigma();
    let nu = weights.nu();
    let mut a = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for m in (0..n).filter(|&m| sigma[m] > 0.0) {
        let scale = z.sigma_entry(m) * weights.kappa_sq[m];
        let left: Vec<f64> = (0..n)
            .map(|j| nu[j] / ((rho[j] - sigma[m]) * (rho[j] + sigma[m])))
            .collect();
        for k in 0..n {
            let right = z.rho_entry(k) * left[k] * scale;
            for j in 0..n {
                a[(j, k)] += right * left[j];
            }
        }
    }
    AOperator {
        a,
        x_vec: DVector::from_fn(n, |j, _| z.rho_entry(j) * nu[j]),
        y_vec: DVector::from_vec(nu.clone()),
        w_vec: DVector::from_fn(n, |j, _| z.rho_entry(j) * (nu[j] / (rho[j] * rho[j]))),
    }
}

/// The rank-one factor `A^(m)` with entries
/// `ν_j/(ρ_j² − σ_m²) · ν_k ζ_{2k−1}/(ρ_k² − σ_m²) · κ_m² ζ_{2m}`.
///
/// `m` is zero-based.
pub fn rank_one_factor(z: &ZetaSequence, m: usize) -> Result<DMatrix<Complex64>> {
    let weights = compute_weights(z)?;
    rank_one_factor_with(z, &weights, m)
}

pub fn rank_one_factor_with(z: &ZetaSequence, weights: &WeightTable, m: usize) -> Result<DMatrix<Complex64>> {
    let n = z.rank();
    if m >= n {
        return Err(Error::IndexOutOfRange { index: m, len: n });
    }
    let sigma_m = z.sigma()[m];
    if sigma_m == 0.0 {
        return Err(Error::ZeroSigma { index: m });
    }
    let rho = z.rho();
    let nu = weights.nu();
    let denom = |j: usize| (rho[j] - sigma_m) * (rho[j] + sigma_m);
    let scale = z.sigma_entry(m) * weights.kappa_sq[m];
    Ok(DMatrix::from_fn(n, n, |j, k| {
        z.rho_entry(k) * (nu[j] / denom(j) * nu[k] / denom(k)) * scale
    }))
}

/// Which algebraic identity a report row checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `Σ_j ρ_j²ν_j²/(ρ_j² − σ_m²) = 1`.
    NuAtSigmaPoles,
    /// `Σ_j κ_j²/(ρ_m² − σ_j²) + C/ρ_m² = 1`.
    KappaAtRhoPoles,
    /// `κ_m κ_p Σ_j ρ_j²ν_j²/((ρ_j² − σ_m²)(ρ_j² − σ_p²)) = δ_mp`.
    NuOrthogonality,
    /// `ν_m ν_p Σ_j σ_j²κ_j²/((σ_j² − ρ_m²)(σ_j² − ρ_p²)) + ν_m ν_p = δ_mp`.
    KappaOrthogonality,
    /// `Σ_j ν_j² + Π_j σ_j²/ρ_j² = 1`.
    NuMass,
    /// `Σ_m κ_m² = Σ_m (ρ_m² − σ_m²)`, relative.
    KappaMass,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::NuAtSigmaPoles,
        Identity::KappaAtRhoPoles,
        Identity::NuOrthogonality,
        Identity::KappaOrthogonality,
        Identity::NuMass,
        Identity::KappaMass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::NuAtSigmaPoles => "nu_at_sigma_poles",
            Identity::KappaAtRhoPoles => "kappa_at_rho_poles",
            Identity::NuOrthogonality => "nu_orthogonality",
            Identity::KappaOrthogonality => "kappa_orthogonality",
            Identity::NuMass => "nu_mass",
            Identity::KappaMass => "kappa_mass",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Pass,
    Fail,
    /// Involves the zero `σ_N` of an odd sequence; reported, not judged.
    Boundary,
}

/// One evaluated identity. `m` and `p` are one-based; zero means unused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub identity: Identity,
    pub m: usize,
    pub p: usize,
    pub residual: f64,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub tolerance: f64,
    pub c_constant: f64,
    pub records: Vec<IdentityRecord>,
}

impl IdentityReport {
    /// Worst judged (non-boundary) residual for `identity`.
    pub fn max_residual(&self, identity: Identity) -> f64 {
        self.records
            .iter()
            .filter(|r| r.identity == identity && r.status != RowStatus::Boundary)
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }

    pub fn worst(&self) -> Option<&IdentityRecord> {
        self.records
            .iter()
            .filter(|r| r.status != RowStatus::Boundary)
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != RowStatus::Fail)
    }
}

/// Evaluates every identity and labels rows against `tol`.
///
/// The orthogonality identities are reported in their normalized form
/// (both sides scaled by `κ_m κ_p` or `ν_m ν_p`), which turns them into
/// Gram-matrix checks with dimensionless residuals.
pub fn evaluate_identities(z: &ZetaSequence, tol: f64) -> Result<IdentityReport> {
    let weights = compute_weights(z)?;
    let n = z.rank();
    let rho_sq: Vec<f64> = z.rho().iter().map(|r| r * r).collect();
    let sigma_sq: Vec<f64> = z.sigma().iter().map(|s| s * s).collect();
    let nu_sq = &weights.nu_sq;
    let kappa_sq = &weights.kappa_sq;
    let c_constant = weights.c_constant(z);
    let mut records = Vec::new();
    let mut push = |identity, m: usize, p: usize, residual: f64, boundary: bool| {
        let status = if boundary {
            RowStatus::Boundary
        } else if residual <= tol {
            RowStatus::Pass
        } else {
            RowStatus::Fail
        };
        records.push(IdentityRecord {
            identity,
            m,
            p,
            residual,
            status,
        });
    };

    for m in 0..n {
        let lhs: f64 = (0..n).map(|j| rho_sq[j] * nu_sq[j] / (rho_sq[j] - sigma_sq[m])).sum();
        push(Identity::NuAtSigmaPoles, m + 1, 0, (lhs - 1.0).abs(), z.is_boundary(m));
    }
    for m in 0..n {
        // κ² at a zero σ is C, so the uniform sum already carries C/ρ_m².
        let lhs: f64 = (0..n).map(|j| kappa_sq[j] / (rho_sq[m] - sigma_sq[j])).sum();
        push(Identity::KappaAtRhoPoles, m + 1, 0, (lhs - 1.0).abs(), false);
    }
    for m in 0..n {
        for p in 0..n {
            let sum: f64 = (0..n)
                .map(|j| rho_sq[j] * nu_sq[j] / ((rho_sq[j] - sigma_sq[m]) * (rho_sq[j] - sigma_sq[p])))
                .sum();
            let lhs = sum * (kappa_sq[m] * kappa_sq[p]).sqrt();
            let rhs = if m == p { 1.0 } else { 0.0 };
            push(
                Identity::NuOrthogonality,
                m + 1,
                p + 1,
                (lhs - rhs).abs(),
                z.is_boundary(m) || z.is_boundary(p),
            );
        }
    }
    for m in 0..n {
        for p in 0..n {
            let sum: f64 = (0..n)
                .map(|j| sigma_sq[j] * kappa_sq[j] / ((sigma_sq[j] - rho_sq[m]) * (sigma_sq[j] - rho_sq[p])))
                .sum();
            let scale = (nu_sq[m] * nu_sq[p]).sqrt();
            let lhs = (sum + 1.0) * scale;
            let rhs = if m == p { 1.0 } else { 0.0 };
            push(Identity::KappaOrthogonality, m + 1, p + 1, (lhs - rhs).abs(), false);
        }
    }

    let log_ratio: f64 = z.rho().iter().zip(z.sigma()).map(|(r, s)| 2.0 * (s / r).ln()).sum();
    let product = log_ratio.exp();
    push(Identity::NuMass, 0, 0, (weights.nu_sum() + product - 1.0).abs(), false);

    let gaps: f64 = (0..n).map(|j| rho_sq[j] - sigma_sq[j]).sum();
    let kappa_total: f64 = kappa_sq.iter().sum();
    let kappa_residual = if gaps > 0.0 {
        (kappa_total - gaps).abs() / gaps
    } else {
        0.0
    };
    push(Identity::KappaMass, 0, 0, kappa_residual, false);

    Ok(IdentityReport {
        tolerance: tol,
        c_constant,
        records,
    })
}

/// Like [`evaluate_identities`], failing with the worst row when any
/// judged residual exceeds `tol`.
pub fn identity_report(z: &ZetaSequence, tol: f64) -> Result<IdentityReport> {
    let report = evaluate_identities(z, tol)?;
    if let Some(worst) = report.worst() {
        if worst.residual > tol {
            return Err(Error::ToleranceExceeded {
                identity: format!("{}[m={}, p={}]", worst.identity.name(), worst.m, worst.p),
                residual: worst.residual,
                tolerance: tol,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(values: &[f64]) -> ZetaSequence {
        ZetaSequence::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn validate_accepts_positive_pair() {
        let z = real(&[2.0, 0.5]);
        assert_eq!(z.rank(), 1);
        assert_eq!(z.rho(), &[2.0]);
        assert_eq!(z.sigma(), &[0.5]);
        assert_eq!(z.phi(), vec![0.0]);
        assert_eq!(z.theta(), vec![0.0]);
    }

    #[test]
    fn validate_rejects_increasing_moduli() {
        let err = ZetaSequence::new(vec![Complex64::new(2.0, 0.0), Complex64::new(2.5, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::InterlacingViolation { index: 0, .. }));
    }

    #[test]
    fn validate_rejects_near_ties_and_interior_zeros() {
        let err = ZetaSequence::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0 - 1e-12)]).unwrap_err();
        assert!(matches!(err, Error::InterlacingViolation { .. }));
        let err = ZetaSequence::new(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap_err();
        assert_eq!(err, Error::ZeroEntry { index: 2 });
    }

    #[test]
    fn empty_sequence_is_zero_symbol() {
        let z = ZetaSequence::new(vec![]).unwrap();
        assert!(z.is_empty());
        assert_eq!(z.rank(), 0);
        let a = build_a(&z).unwrap();
        assert_eq!(a.dim(), 0);
    }

    #[test]
    fn trailing_zero_canonicalizes_to_odd() {
        let z = real(&[3.0, 0.0]);
        assert!(z.is_odd());
        assert_eq!(z.entries().len(), 1);
        assert_eq!(z.sigma(), &[0.0]);
    }

    #[test]
    fn angles_are_principal() {
        let z = ZetaSequence::new(vec![Complex64::new(-2.0, 0.0), Complex64::new(0.0, -1.0)]).unwrap();
        assert_eq!(z.phi(), vec![PI]);
        assert!(close(z.theta()[0], PI / 2.0, 1e-15));
        assert_eq!(principal_angle(-PI), PI);
        assert_eq!(principal_angle(3.0 * PI), PI);
    }

    #[test]
    fn weights_two_levels() {
        let z = real(&[2.0, 1.5, 1.0, 0.5]);
        let w = compute_weights(&z).unwrap();
        let expected_nu = [0.546875, 0.3125];
        let expected_kappa = [1.09375, 1.40625];
        for (a, b) in w.nu_sq.iter().zip(expected_nu) {
            assert!(close(*a, b, 1e-14), "{a} vs {b}");
        }
        for (a, b) in w.kappa_sq.iter().zip(expected_kappa) {
            assert!(close(*a, b, 1e-14), "{a} vs {b}");
        }
        assert!(close(w.nu_sum(), 0.859375, 1e-14));
        assert!(close(w.nu_sum(), 1.0 - (2.25 * 0.25) / (4.0 * 1.0), 1e-14));
        assert!(close(w.kappa_sq.iter().sum(), 2.5, 1e-14));
    }

    #[test]
    fn weights_single_level() {
        let w = compute_weights(&real(&[2.0, 0.5])).unwrap();
        assert!(close(w.nu_sq[0], 0.9375, 1e-15));
        assert!(close(w.kappa_sq[0], 3.75, 1e-15));
        assert_eq!(w.c_constant(&real(&[2.0, 0.5])), 0.0);
    }

    #[test]
    fn weights_zero_sigma() {
        let a = 1.7;
        let z = real(&[a]);
        let w = compute_weights(&z).unwrap();
        assert!(close(w.nu_sq[0], 1.0, 1e-15));
        assert!(close(w.kappa_sq[0], a * a, 1e-15));
        assert!(w.has_boundary());
        assert!(close(w.c_constant(&z), a * a, 1e-15));
    }

    #[test]
    fn boundary_kappa_equals_c_constant() {
        let z = real(&[3.0, 2.0, 1.2, 0.7, 0.4]);
        let w = compute_weights(&z).unwrap();
        assert!(close(w.kappa_sq[2], w.c_constant(&z), 1e-12));
        assert!(close(w.nu_sum(), 1.0, 1e-13));
    }

    #[test]
    fn weights_overflow_is_reported() {
        // Steeply decaying levels push the deep weights below f64 range.
        let mut values = Vec::new();
        let mut v = 1.0;
        for _ in 0..400 {
            values.push(v);
            v *= 0.3;
        }
        let z = real(&values);
        assert!(matches!(compute_weights(&z), Err(Error::Overflow { .. })));
    }

    #[test]
    fn a_single_level_closed_form() {
        let op = build_a(&real(&[2.0, 0.5])).unwrap();
        assert!((op.a[(0, 0)] - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        let constant = build_a(&real(&[1.3])).unwrap();
        assert_eq!(constant.a[(0, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rank_one_factor_cases() {
        let z = real(&[2.0, 0.5]);
        let f = rank_one_factor(&z, 0).unwrap();
        assert!((f[(0, 0)] - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        assert!(close(f[(0, 0)].norm_sqr(), 1.0 - 0.9375, 1e-14));

        let z = real(&[2.0, 1.5, 1.0, 0.5]);
        let gram: DMatrix<Complex64> = (0..2)
            .map(|m| {
                let f = rank_one_factor(&z, m).unwrap();
                &f * f.adjoint()
            })
            .fold(DMatrix::zeros(2, 2), |acc, g| acc + g);
        assert!(close(gram[(0, 0)].re, 1.0 - 0.546875, 1e-13));
        assert!(close(gram[(1, 1)].re, 1.0 - 0.3125, 1e-13));

        assert_eq!(
            rank_one_factor(&real(&[1.5]), 0).unwrap_err(),
            Error::ZeroSigma { index: 0 }
        );
        assert!(matches!(
            rank_one_factor(&z, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn identity_single_level_arithmetic() {
        let report = identity_report(&real(&[2.0, 0.5]), 1e-14).unwrap();
        let first = &report.records[0];
        assert_eq!(first.identity, Identity::NuAtSigmaPoles);
        // 4 · 0.9375 / (4 − 0.25) = 1
        assert!(first.residual < 1e-15);
    }

    #[test]
    fn identity_two_levels_all_small() {
        let report = identity_report(&real(&[2.0, 1.5, 1.0, 0.5]), 1e-12).unwrap();
        assert!(report.passed());
        assert!(report.records.iter().all(|r| r.residual < 1e-12));
    }

    #[test]
    fn identity_boundary_rows_are_flagged() {
        let a = 1.7;
        let report = evaluate_identities(&real(&[a]), 1e-12).unwrap();
        assert!(close(report.c_constant, a * a, 1e-15));
        let kappa_row = report
            .records
            .iter()
            .find(|r| r.identity == Identity::KappaAtRhoPoles)
            .unwrap();
        assert_eq!(kappa_row.status, RowStatus::Pass);
        assert!(kappa_row.residual < 1e-15);
        let boundary: Vec<_> = report
            .records
            .iter()
            .filter(|r| r.status == RowStatus::Boundary)
            .collect();
        assert_eq!(boundary.len(), 2);
        assert!(boundary.iter().all(|r| r.residual < 1e-14));
    }

    #[test]
    fn identity_report_flags_tolerance() {
        let z = real(&[2.0, 1.5, 1.0, 0.5]);
        let err = identity_report(&z, 0.0).unwrap_err();
        assert!(matches!(err, Error::ToleranceExceeded { .. }) || err.is_tolerance_failure());
    }
}
