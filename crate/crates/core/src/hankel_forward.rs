//! Forward spectral map: symbol coefficients to interlaced spectral data.
//!
//! For a symbol `u = Σ c_n zⁿ`, the antilinear operator `H_u` acts on
//! coefficient vectors as `x ↦ Γ conj(x)` with `Γ_{np} = c_{n+p}`, and
//! `K_u = H_u T_z` acts through the shifted matrix `Γ̃_{np} = c_{n+p+1}`.
//! Eigenvectors of `ΓΓ*` are phase-fixed so that `Γ conj(e) = ρ e` holds
//! exactly, which leaves them determined up to sign and makes the angles
//! `φ_j = arg (1|e_j)²` and `θ_j = arg (u|f_j)²` well defined.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, HankelOperator};
use crate::spectral_data::{principal_angle, validate_zeta, ZetaSequence, DEFAULT_INTERLACING_MARGIN};

/// Fourier coefficients `c₀..c_M` of a symbol.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolCoefficients {
    coeffs: Vec<Complex64>,
}

impl SymbolCoefficients {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `c_n`, zero past the stored coefficients.
    pub fn get(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// True when every imaginary part is below `tol` times the largest modulus.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }

    /// `(u|h) = Σ c_n conj(h_n)` over the first `h.len()` coefficients.
    pub fn pairing(&self, h: &[Complex64]) -> Complex64 {
        self.coeffs.iter().zip(h).map(|(c, v)| c * v.conj()).sum()
    }
}

/// Dense truncations of `Γ_c` and `Γ_{c̃}`.
#[derive(Debug, Clone)]
pub struct HankelPair {
    pub gamma: DMatrix<Complex64>,
    pub gamma_shift: DMatrix<Complex64>,
    pub truncation_size: usize,
}

pub fn build_hankel_pair(c: &SymbolCoefficients, size: usize) -> HankelPair {
    assert!(size >= 1, "truncation size must be positive");
    HankelPair {
        gamma: linalg::dense_hankel(c.coeffs(), size, 0),
        gamma_shift: linalg::dense_hankel(c.coeffs(), size, 1),
        truncation_size: size,
    }
}

/// Tunables of the forward map.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOptions {
    /// Singular values below `retention · ρ₁` are exact zeros.
    pub retention: f64,
    /// Minimum relative gap `1 − (b/a)²` between consecutive interlaced values.
    pub gap_tol: f64,
    /// Relative change of every `ζ` entry accepted as converged truncation.
    pub stabilization_tol: f64,
    pub min_size: usize,
    pub max_size: usize,
    /// Largest collinearity defect `‖Γ conj(v) − χ v‖`, relative to `ρ₁`.
    pub phase_tol: f64,
    /// Smallest accepted `|(1|e_j)|` and `|(u|f_j)| / ρ₁`.
    pub pairing_tol: f64,
    /// Interlacing margin for the resulting spectral data.
    pub margin: f64,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        Self {
            retention: 1e-12,
            gap_tol: 1e-6,
            stabilization_tol: 1e-10,
            min_size: 32,
            max_size: 4096,
            phase_tol: 1e-8,
            pairing_tol: 1e-13,
            margin: DEFAULT_INTERLACING_MARGIN,
        }
    }
}

/// One phase-fixed antilinear eigenpair.
#[derive(Debug, Clone)]
pub struct AntilinearPair {
    /// `ρ_j` or `σ_j`.
    pub value: f64,
    /// Unit vector with `Γ conj(e) = value · e`.
    pub vector: DVector<Complex64>,
    /// `(1|e_j)` or `(u|f_j)`.
    pub pairing: Complex64,
    /// `φ_j` or `θ_j` in `(−π, π]`.
    pub angle: f64,
    /// `‖Γ conj(e) − value · e‖`.
    pub residual: f64,
}

impl AntilinearPair {
    /// `value · e^{−i angle}`.
    pub fn zeta(&self) -> Complex64 {
        Complex64::from_polar(self.value, -self.angle)
    }
}

#[derive(Debug, Clone)]
pub struct PhaseFixedEigensystem {
    /// Pairs of `H_u` (`ρ_j`, `e_j`, `φ_j`).
    pub h: Vec<AntilinearPair>,
    /// Pairs of `K_u` (`σ_j`, `f_j`, `θ_j`).
    pub k: Vec<AntilinearPair>,
    pub truncation_size: usize,
}

impl PhaseFixedEigensystem {
    /// Interlaced `ζ₁, ζ₂, …`.
    pub fn zeta_entries(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.h.len() + self.k.len());
        for j in 0..self.h.len() {
            out.push(self.h[j].zeta());
            if let Some(f) = self.k.get(j) {
                out.push(f.zeta());
            }
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Which {
    H,
    K,
}

/// Phase-fixed eigensystems of `H_u` and `K_u` from a dense pair.
pub fn phase_fixed_eigensystem(
    pair: &HankelPair,
    c: &SymbolCoefficients,
    opts: &ForwardOptions,
) -> Result<PhaseFixedEigensystem> {
    let size = pair.truncation_size;
    let dense_apply = |m: &DMatrix<Complex64>| {
        let m = m.clone();
        move |x: &[Complex64]| -> Vec<Complex64> {
            let v = DVector::from_iterator(x.len(), x.iter().map(|z| z.conj()));
            (&m * v).iter().copied().collect()
        }
    };
    let svd_h = nalgebra::SVD::new(pair.gamma.clone(), true, false);
    let svd_k = nalgebra::SVD::new(pair.gamma_shift.clone(), true, false);
    let h = (
        svd_h.singular_values.as_slice().to_vec(),
        svd_h.u.expect("left vectors requested"),
    );
    let k = (
        svd_k.singular_values.as_slice().to_vec(),
        svd_k.u.expect("left vectors requested"),
    );
    assemble(
        h,
        k,
        &dense_apply(&pair.gamma),
        &dense_apply(&pair.gamma_shift),
        c,
        size,
        opts,
    )
}

/// Phase-fixed eigensystems at truncation `size`, using structured products.
pub fn structured_eigensystem(
    c: &SymbolCoefficients,
    size: usize,
    opts: &ForwardOptions,
) -> Result<PhaseFixedEigensystem> {
    let gamma = HankelOperator::new(c.coeffs(), size, 0);
    let gamma_shift = HankelOperator::new(c.coeffs(), size, 1);
    // Keep a margin below the retention threshold so that borderline values
    // are still resolved before being dropped.
    let drop_tol = (opts.retention * 1e-2).max(1e-15);
    let svd_h = linalg::compressed_svd(&gamma, drop_tol);
    let svd_k = linalg::compressed_svd(&gamma_shift, drop_tol);
    assemble(
        (svd_h.values, svd_h.left),
        (svd_k.values, svd_k.left),
        &|x: &[Complex64]| gamma.apply_antilinear(x),
        &|x: &[Complex64]| gamma_shift.apply_antilinear(x),
        c,
        size,
        opts,
    )
}

fn assemble(
    h: (Vec<f64>, DMatrix<Complex64>),
    k: (Vec<f64>, DMatrix<Complex64>),
    apply_h: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    apply_k: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    c: &SymbolCoefficients,
    size: usize,
    opts: &ForwardOptions,
) -> Result<PhaseFixedEigensystem> {
    let rho1 = h.0.first().copied().unwrap_or(0.0);
    if rho1 == 0.0 {
        return Ok(PhaseFixedEigensystem {
            h: Vec::new(),
            k: Vec::new(),
            truncation_size: size,
        });
    }
    let threshold = opts.retention * rho1;
    let n_h = h.0.iter().take_while(|&&s| s > threshold).count();
    let n_k = k.0.iter().take_while(|&&s| s > threshold).count();
    check_interlacing(&h.0[..n_h], &k.0[..n_k], opts.gap_tol)?;

    let h_pairs = fix_phases(&h.0[..n_h], &h.1, apply_h, Which::H, c, rho1, opts)?;
    let k_pairs = fix_phases(&k.0[..n_k], &k.1, apply_k, Which::K, c, rho1, opts)?;
    Ok(PhaseFixedEigensystem {
        h: h_pairs,
        k: k_pairs,
        truncation_size: size,
    })
}

fn check_interlacing(rho: &[f64], sigma: &[f64], gap_tol: f64) -> Result<()> {
    if sigma.len() > rho.len() || sigma.len() + 1 < rho.len() {
        return Err(Error::NonGeneric {
            reason: format!(
                "{} singular values of the Hankel matrix against {} of the shifted one",
                rho.len(),
                sigma.len()
            ),
        });
    }
    let mut merged = Vec::with_capacity(rho.len() + sigma.len());
    for j in 0..rho.len() {
        merged.push(rho[j]);
        if let Some(s) = sigma.get(j) {
            merged.push(*s);
        }
    }
    for (i, w) in merged.windows(2).enumerate() {
        let ratio = w[1] / w[0];
        if 1.0 - ratio * ratio < gap_tol {
            return Err(Error::NonGeneric {
                reason: format!(
                    "interlaced values {} and {} ({} and {}) are not separated by the relative gap {gap_tol:e}",
                    i + 1,
                    i + 2,
                    w[0],
                    w[1]
                ),
            });
        }
    }
    Ok(())
}

fn fix_phases(
    values: &[f64],
    vectors: &DMatrix<Complex64>,
    apply: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    which: Which,
    c: &SymbolCoefficients,
    rho1: f64,
    opts: &ForwardOptions,
) -> Result<Vec<AntilinearPair>> {
    values
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            let v: Vec<Complex64> = vectors.column(index).iter().copied().collect();
            let w = apply(&v);
            let chi: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            let defect = w
                .iter()
                .zip(&v)
                .map(|(wi, vi)| (wi - chi * vi).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if defect > opts.phase_tol * rho1 {
                return Err(Error::PhaseInstability { index, defect });
            }
            let rotation = Complex64::from_polar(1.0, chi.arg() / 2.0);
            let e: Vec<Complex64> = v.iter().map(|x| x * rotation).collect();
            let image = apply(&e);
            let residual = image
                .iter()
                .zip(&e)
                .map(|(a, b)| (a - b * value).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let (pairing, floor) = match which {
                Which::H => (e[0].conj(), opts.pairing_tol),
                Which::K => (c.pairing(&e), opts.pairing_tol * rho1),
            };
            if pairing.norm() < floor {
                return Err(Error::VanishingPairing {
                    index,
                    magnitude: pairing.norm(),
                });
            }
            let angle = principal_angle((pairing * pairing).arg());
            Ok(AntilinearPair {
                value,
                vector: DVector::from_vec(e),
                pairing,
                angle,
                residual,
            })
        })
        .collect()
}

/// Result of the forward map with the eigensystem it came from.
#[derive(Debug, Clone)]
pub struct ForwardResult {
    pub zeta: ZetaSequence,
    pub eigensystem: PhaseFixedEigensystem,
}

/// `χ(u) = (ρ_j e^{−iφ_j}, σ_j e^{−iθ_j})`.
pub fn forward_map(c: &SymbolCoefficients, opts: &ForwardOptions) -> Result<ZetaSequence> {
    forward_map_detailed(c, opts).map(|r| r.zeta)
}

/// Forward map with truncation stabilization.
///
/// Sizes double from `min_size` until every retained `ζ` entry moves by
/// less than `stabilization_tol` relative, until all coefficients are
/// inside the truncation (the truncation is then exact), or until
/// `max_size` is exceeded. Non-generic spectra at intermediate sizes only
/// count as failures at the final size.
pub fn forward_map_detailed(c: &SymbolCoefficients, opts: &ForwardOptions) -> Result<ForwardResult> {
    let exact_size = c.len().max(1);
    let mut size = opts.min_size.max(1).min(exact_size);
    let mut previous: Option<Vec<Complex64>> = None;
    loop {
        let is_exact = size >= exact_size;
        match structured_eigensystem(c, size, opts) {
            Ok(system) => {
                let entries = system.zeta_entries();
                let stable = previous
                    .as_ref()
                    .is_some_and(|p| is_stable(p, &entries, opts.stabilization_tol));
                if is_exact || stable {
                    let zeta = validate_zeta(entries, opts.margin)?;
                    return Ok(ForwardResult {
                        zeta,
                        eigensystem: system,
                    });
                }
                previous = Some(entries);
            }
            Err(err) if is_exact || size >= opts.max_size => return Err(err),
            Err(_) => previous = None,
        }
        if size >= opts.max_size {
            return Err(Error::NoConvergence {
                max_size: opts.max_size,
            });
        }
        size = (2 * size).min(exact_size).min(opts.max_size);
    }
}

fn is_stable(previous: &[Complex64], current: &[Complex64], tol: f64) -> bool {
    previous.len() == current.len()
        && previous
            .iter()
            .zip(current)
            .all(|(p, c)| (p - c).norm() <= tol * c.norm())
}
