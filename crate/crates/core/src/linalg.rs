//! Structured linear algebra for truncated Hankel operators.
//!
//! A size-`s` truncation of a Hankel operator is never materialized on the
//! hot paths. Products `Γx` are correlations of the coefficient sequence with
//! `x`, evaluated with an FFT once the problem is large enough, and the
//! dominant singular subspace is extracted with an adaptive randomized range
//! finder followed by a small dense SVD.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

const DIRECT_PRODUCT_LIMIT: usize = 1 << 14;
const DENSE_SVD_LIMIT: usize = 96;
const OVERSAMPLING: usize = 10;
const PROBES: usize = 4;
const RANGE_SEED: u64 = 0x6861_6e6b_656c;

/// Dense `size × size` Hankel matrix with entries `coeffs[n + p + shift]`,
/// zero beyond the end of `coeffs`.
pub fn dense_hankel(coeffs: &[Complex64], size: usize, shift: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(size, size, |n, p| {
        coeffs.get(n + p + shift).copied().unwrap_or(Complex64::new(0.0, 0.0))
    })
}

/// The truncated Hankel operator `(Γx)_n = Σ_p c_{n+p+shift} x_p`, `0 ≤ n, p < size`.
pub struct HankelOperator {
    size: usize,
    coeffs: Vec<Complex64>,
    spectral: Option<FftKernel>,
}

struct FftKernel {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    coeffs_hat: Vec<Complex64>,
}

impl HankelOperator {
    pub fn new(coeffs: &[Complex64], size: usize, shift: usize) -> Self {
        // Entries only reach index 2·size − 2 (plus the shift).
        let used = coeffs.len().saturating_sub(shift).min((2 * size).saturating_sub(1));
        let coeffs: Vec<Complex64> = coeffs.iter().skip(shift).take(used).copied().collect();
        let spectral = if size * coeffs.len() > DIRECT_PRODUCT_LIMIT {
            let len = (coeffs.len() + size).next_power_of_two();
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(len);
            let inverse = planner.plan_fft_inverse(len);
            let mut coeffs_hat = vec![Complex64::new(0.0, 0.0); len];
            coeffs_hat[..coeffs.len()].copy_from_slice(&coeffs);
            forward.process(&mut coeffs_hat);
            Some(FftKernel {
                len,
                forward,
                inverse,
                coeffs_hat,
            })
        } else {
            None
        };
        Self { size, coeffs, spectral }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The coefficients `c_{shift}, c_{shift+1}, …` actually entering the matrix.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `Γx`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.size, "vector length must match the truncation size");
        match &self.spectral {
            None => (0..self.size)
                .map(|n| self.coeffs.iter().skip(n).zip(x).map(|(c, xp)| c * xp).sum())
                .collect(),
            Some(kernel) => {
                // Correlation as a convolution with the reversed vector:
                // (c * rev(x))_{n + size - 1} = Σ_p c_{n+p} x_p.
                let mut buf = vec![Complex64::new(0.0, 0.0); kernel.len];
                for (q, xq) in x.iter().rev().enumerate() {
                    buf[q] = *xq;
                }
                kernel.forward.process(&mut buf);
                for (b, ch) in buf.iter_mut().zip(&kernel.coeffs_hat) {
                    *b *= ch;
                }
                kernel.inverse.process(&mut buf);
                let scale = 1.0 / kernel.len as f64;
                buf[self.size - 1..2 * self.size - 1]
                    .iter()
                    .map(|v| v * scale)
                    .collect()
            }
        }
    }

    /// `Γ conj(x)`, the coordinate form of the antilinear Hankel operator.
    pub fn apply_antilinear(&self, x: &[Complex64]) -> Vec<Complex64> {
        let conj: Vec<Complex64> = x.iter().map(|v| v.conj()).collect();
        self.apply(&conj)
    }

    /// `ΓΓ* x`, using `Γ* = conj(Γ)` for the symmetric `Γ`.
    pub fn apply_gram(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.apply_antilinear(&self.apply_antilinear(x))
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        dense_hankel(&self.coeffs, self.size, 0)
    }
}

/// Singular values (descending) and left singular vectors of a truncated
/// Hankel operator, restricted to the numerically nonzero part.
#[derive(Debug, Clone)]
pub struct LowRankSvd {
    pub values: Vec<f64>,
    /// `size × values.len()`, orthonormal columns.
    pub left: DMatrix<Complex64>,
}

/// Singular values above `drop_tol · σ₁` and their left singular vectors.
///
/// Small operators use a dense SVD. Larger ones use a randomized range
/// finder whose width doubles until fresh random probes show that the
/// captured range misses less than `drop_tol · σ₁`.
pub fn compressed_svd(op: &HankelOperator, drop_tol: f64) -> LowRankSvd {
    let size = op.size();
    if size <= DENSE_SVD_LIMIT {
        let svd = nalgebra::SVD::new(op.to_dense(), true, false);
        let u = svd.u.expect("left singular vectors requested");
        return truncate(svd.singular_values.as_slice(), &u, drop_tol);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(RANGE_SEED);
    let mut width = (2 * OVERSAMPLING).min(size);
    loop {
        let sketch = DMatrix::from_fn(size, width, |_, _| random_complex(&mut rng));
        let range = apply_columns(op, &sketch);
        let q = range.qr().q();

        // B = Q^H Γ, built row by row from Γ conj(q_i) since Γ is symmetric.
        let gamma_conj_q = apply_columns(op, &q.map(|v| v.conj()));
        let b = gamma_conj_q.transpose();
        let svd = nalgebra::SVD::new(b, true, false);
        let u_small = svd.u.expect("left singular vectors requested");
        let values = svd.singular_values.as_slice();
        let top = values.first().copied().unwrap_or(0.0);

        let captured = values.iter().filter(|&&s| s > drop_tol * top).count();
        let saturated = captured + OVERSAMPLING > width;
        if width < size && (saturated || range_defect(op, &q, &mut rng) > drop_tol * top) {
            width = (2 * width).min(size);
            continue;
        }
        let left = &q * u_small;
        return truncate(values, &left, drop_tol);
    }
}

fn truncate(values: &[f64], left: &DMatrix<Complex64>, drop_tol: f64) -> LowRankSvd {
    let top = values.first().copied().unwrap_or(0.0);
    let keep = if top > 0.0 {
        values.iter().take_while(|&&s| s > drop_tol * top).count()
    } else {
        0
    };
    LowRankSvd {
        values: values[..keep].to_vec(),
        left: left.columns(0, keep).into_owned(),
    }
}

/// Largest residual `‖(I − QQ^H) Γω‖ / ‖ω‖` over a few fresh random probes.
fn range_defect(op: &HankelOperator, q: &DMatrix<Complex64>, rng: &mut ChaCha8Rng) -> f64 {
    let size = op.size();
    (0..PROBES)
        .map(|_| {
            let omega: Vec<Complex64> = (0..size).map(|_| random_complex(rng)).collect();
            let norm = omega.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let y = DVector::from_vec(op.apply(&omega));
            let proj = q * (q.adjoint() * &y);
            (y - proj).norm() / norm
        })
        .fold(0.0, f64::max)
}

fn apply_columns(op: &HankelOperator, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let cols: Vec<DVector<Complex64>> = m
        .column_iter()
        .map(|col| {
            let x: Vec<Complex64> = col.iter().copied().collect();
            DVector::from_vec(op.apply(&x))
        })
        .collect();
    DMatrix::from_columns(&cols)
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Conjugate gradients for a Hermitian positive definite operator.
///
/// Returns `None` when the iteration stalls or meets a non-positive
/// curvature direction.
pub fn conjugate_gradient<F>(apply: F, rhs: &[Complex64], rel_tol: f64, max_iter: usize) -> Option<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let rhs_norm = dot(rhs, rhs).re.sqrt();
    let mut x = vec![Complex64::new(0.0, 0.0); rhs.len()];
    if rhs_norm == 0.0 {
        return Some(x);
    }
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    for _ in 0..max_iter {
        if rr.sqrt() <= rel_tol * rhs_norm {
            return Some(x);
        }
        let ap = apply(&p);
        let curvature = dot(&p, &ap).re;
        if curvature <= 0.0 || !curvature.is_finite() {
            return None;
        }
        let alpha = rr / curvature;
        for ((xi, ri), (pi, api)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
            *xi += pi * alpha;
            *ri -= api * alpha;
        }
        let rr_next = dot(&r, &r).re;
        let beta = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + *pi * beta;
        }
        rr = rr_next;
    }
    (rr.sqrt() <= 1e3 * rel_tol * rhs_norm).then_some(x)
}

/// Spectral norm of a small dense matrix.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    nalgebra::SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn wavy(len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|n| {
                let t = n as f64;
                c(
                    0.9f64.powi(n as i32) * (0.3 * t).cos(),
                    0.8f64.powi(n as i32) * (0.7 * t).sin(),
                )
            })
            .collect()
    }

    #[test]
    fn fft_product_matches_dense() {
        let coeffs = wavy(500);
        let op = HankelOperator::new(&coeffs, 300, 1);
        assert!(op.spectral.is_some());
        let x: Vec<Complex64> = (0..300).map(|p| c((p as f64).sin(), 1.0 / (1.0 + p as f64))).collect();
        let dense = dense_hankel(&coeffs, 300, 1) * DVector::from_vec(x.clone());
        let fast = op.apply(&x);
        let err = fast
            .iter()
            .zip(dense.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "err = {err:e}");
    }

    #[test]
    fn direct_product_matches_dense() {
        let coeffs = wavy(7);
        let op = HankelOperator::new(&coeffs, 5, 0);
        assert!(op.spectral.is_none());
        let x = vec![c(1.0, -1.0), c(0.5, 0.0), c(0.0, 2.0), c(-1.0, 0.25), c(3.0, 0.0)];
        let dense = dense_hankel(&coeffs, 5, 0) * DVector::from_vec(x.clone());
        for (a, b) in op.apply(&x).iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn compressed_svd_matches_dense_svd() {
        // Rank-two symbol: two geometric modes.
        let coeffs: Vec<Complex64> = (0..400)
            .map(|n| c(0.7, 0.2) * c(0.6, 0.3).powi(n) + c(-0.4, 0.1) * c(-0.2, 0.5).powi(n))
            .collect();
        let op = HankelOperator::new(&coeffs, 200, 0);
        let fast = compressed_svd(&op, 1e-14);
        let dense = nalgebra::SVD::new(op.to_dense(), false, false);
        assert_eq!(fast.values.len(), 2);
        for (a, b) in fast.values.iter().zip(dense.singular_values.iter()) {
            assert!((a - b).abs() < 1e-13 * b.max(1.0), "{a} vs {b}");
        }
        let gram = fast.left.adjoint() * &fast.left;
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn cg_solves_shifted_gram_system() {
        let coeffs = wavy(40);
        let op = HankelOperator::new(&coeffs, 40, 0);
        let mut rhs = vec![c(0.0, 0.0); 40];
        rhs[0] = c(1.0, 0.0);
        let x = -2.0;
        let sol = conjugate_gradient(
            |v| {
                let g = op.apply_gram(v);
                v.iter().zip(g).map(|(a, b)| a - b * x).collect()
            },
            &rhs,
            1e-14,
            400,
        )
        .unwrap();
        let dense = op.to_dense();
        let system = DMatrix::identity(40, 40) - (&dense * dense.adjoint()) * c(x, 0.0);
        let residual = system * DVector::from_vec(sol) - DVector::from_vec(rhs);
        assert!(residual.norm() < 1e-12);
    }
}
