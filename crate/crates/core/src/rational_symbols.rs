//! Rational symbols and Kronecker ranks.
//!
//! A symbol has a finite-rank Hankel operator exactly when it is rational
//! and holomorphic on the closed disc. With `N = rank Γ`, the class `V(2N)`
//! has `rank Γ̃ = N` and `V(2N−1)` has `rank Γ̃ = N − 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hankel_forward::SymbolCoefficients;
use crate::linalg::{self, HankelOperator};

/// Roots of the denominator must have modulus above `1 + ROOT_MARGIN`.
pub const ROOT_MARGIN: f64 = 1e-9;

/// Largest deviation of `denom(0)` from 1 accepted as normalized.
const NORMALIZATION_TOL: f64 = 1e-12;

/// Power series of `numer/denom` up to `z^{n_max}`.
pub fn expand_rational(numer: &[Complex64], denom: &[Complex64], n_max: usize) -> Result<SymbolCoefficients> {
    let denom = trim(denom);
    let lead = denom.first().copied().unwrap_or(Complex64::new(0.0, 0.0));
    if (lead - 1.0).norm() > NORMALIZATION_TOL {
        return Err(Error::NormalizationError {
            re: lead.re,
            im: lead.im,
        });
    }
    if let Some(modulus) = smallest_root_modulus(denom) {
        if modulus <= 1.0 + ROOT_MARGIN {
            return Err(Error::DenominatorRootInDisc { modulus });
        }
    }
    let mut c: Vec<Complex64> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut value = numer.get(n).copied().unwrap_or_default();
        for (k, d) in denom.iter().enumerate().skip(1).take(n) {
            value -= d * c[n - k];
        }
        c.push(value);
    }
    Ok(SymbolCoefficients::new(c))
}

fn trim(p: &[Complex64]) -> &[Complex64] {
    let len = p.iter().rposition(|v| v.norm() != 0.0).map_or(0, |i| i + 1);
    &p[..len]
}

/// Smallest root modulus of `1 + d₁z + … + d_k z^k`, `None` for constants.
///
/// The reversed polynomial `z^k + d₁z^{k−1} + … + d_k` is monic and has the
/// reciprocal roots, so its companion matrix needs no division.
pub fn smallest_root_modulus(denom: &[Complex64]) -> Option<f64> {
    let denom = trim(denom);
    let k = denom.len().checked_sub(1).filter(|&k| k > 0)?;
    let mut companion = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
    for i in 1..k {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..k {
        companion[(0, i)] = -denom[i + 1];
    }
    let largest = nalgebra::Schur::new(companion)
        .eigenvalues()?
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    Some(1.0 / largest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "n")]
pub enum RankClass {
    /// `V(2N)`: `rank Γ = rank Γ̃ = N`.
    Even(usize),
    /// `V(2N−1)`: `rank Γ = N`, `rank Γ̃ = N − 1`.
    Odd(usize),
    /// Ranks kept growing with the truncation, or do not fit either pattern.
    NotFiniteRank,
}

impl RankClass {
    /// `V(D)` with `D = rank Γ + rank Γ̃`, or `None` for infinite rank.
    pub fn dimension(self) -> Option<usize> {
        match self {
            RankClass::Even(n) => Some(2 * n),
            RankClass::Odd(n) => Some(2 * n - 1),
            RankClass::NotFiniteRank => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankPattern {
    pub rank_h: usize,
    pub rank_k: usize,
    pub class: RankClass,
    /// Truncation size at which the ranks were accepted.
    pub size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOptions {
    /// Singular values above `tol · ρ₁` count towards the rank.
    pub tol: f64,
    pub min_size: usize,
    pub max_size: usize,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            min_size: 16,
            max_size: 1024,
        }
    }
}

/// Numerical ranks of `Γ` and `Γ̃` with the default truncation schedule.
pub fn kronecker_ranks(c: &SymbolCoefficients, tol: f64) -> Result<RankPattern> {
    kronecker_ranks_with(
        c,
        &RankOptions {
            tol,
            ..RankOptions::default()
        },
    )
}

/// Ranks are accepted once two successive doublings agree, or as soon as
/// the truncation contains every coefficient.
pub fn kronecker_ranks_with(c: &SymbolCoefficients, opts: &RankOptions) -> Result<RankPattern> {
    let exact = c.len().max(1);
    let mut size = opts.min_size.max(1).min(exact);
    let mut history: Vec<(usize, usize)> = Vec::new();
    loop {
        let ranks = ranks_at(c, size, opts.tol);
        if size >= exact || history.last() == Some(&ranks) {
            return Ok(classify(ranks, size));
        }
        history.push(ranks);
        if size >= opts.max_size {
            // Ranks that grew at each of the last two doublings are read as unbounded.
            let growing = history.len() >= 3 && history[history.len() - 3..].windows(2).all(|w| w[1].0 > w[0].0);
            if growing {
                return Ok(RankPattern {
                    rank_h: ranks.0,
                    rank_k: ranks.1,
                    class: RankClass::NotFiniteRank,
                    size,
                });
            }
            return Err(Error::Inconclusive {
                max_size: opts.max_size,
            });
        }
        size = (2 * size).min(exact).min(opts.max_size);
    }
}

fn classify((rank_h, rank_k): (usize, usize), size: usize) -> RankPattern {
    let class = if rank_k == rank_h {
        RankClass::Even(rank_h)
    } else if rank_k + 1 == rank_h {
        RankClass::Odd(rank_h)
    } else {
        RankClass::NotFiniteRank
    };
    RankPattern {
        rank_h,
        rank_k,
        class,
        size,
    }
}

fn ranks_at(c: &SymbolCoefficients, size: usize, tol: f64) -> (usize, usize) {
    let gamma = HankelOperator::new(c.coeffs(), size, 0);
    let gamma_shift = HankelOperator::new(c.coeffs(), size, 1);
    let h = linalg::compressed_svd(&gamma, tol * 1e-2).values;
    let k = linalg::compressed_svd(&gamma_shift, tol * 1e-2).values;
    let top = h.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return (0, 0);
    }
    let count = |values: &[f64]| values.iter().filter(|&&s| s > tol * top).count();
    (count(&h), count(&k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(values: &[f64]) -> Vec<Complex64> {
        values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    #[test]
    fn blaschke_expansion() {
        let c = expand_rational(&cx(&[-0.5, 1.0]), &cx(&[1.0, -0.5]), 5).unwrap();
        let expected = [-0.5, 0.75, 0.375, 0.1875, 0.09375, 0.046875];
        for (v, e) in c.coeffs().iter().zip(expected) {
            assert!((v.re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_expansion() {
        let c = expand_rational(&cx(&[1.875]), &cx(&[1.0, -0.25]), 20).unwrap();
        for n in 0..=20 {
            assert!((c.get(n).re - 1.875 * 0.25f64.powi(n as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejected_denominators() {
        assert!(matches!(
            expand_rational(&cx(&[1.0]), &cx(&[1.0, -1.0]), 4),
            Err(Error::DenominatorRootInDisc { .. })
        ));
        assert!(matches!(
            expand_rational(&cx(&[1.0]), &cx(&[1.0, 0.0, 4.0]), 4),
            Err(Error::DenominatorRootInDisc { .. })
        ));
        assert!(matches!(
            expand_rational(&cx(&[1.0]), &cx(&[2.0, -1.0]), 4),
            Err(Error::NormalizationError { .. })
        ));
        assert!(matches!(
            expand_rational(&cx(&[1.0]), &[], 4),
            Err(Error::NormalizationError { .. })
        ));
    }

    #[test]
    fn root_modulus_from_companion() {
        // (1 − z/2)(1 − z/3) = 1 − (5/6) z + z²/6
        let m = smallest_root_modulus(&cx(&[1.0, -5.0 / 6.0, 1.0 / 6.0])).unwrap();
        assert!((m - 2.0).abs() < 1e-12);
        assert_eq!(smallest_root_modulus(&cx(&[1.0, 0.0])), None);
    }

    #[test]
    fn rank_examples() {
        let constant = kronecker_ranks(&SymbolCoefficients::from_real(&[2.5]), 1e-10).unwrap();
        assert_eq!((constant.rank_h, constant.rank_k), (1, 0));
        assert_eq!(constant.class, RankClass::Odd(1));
        assert_eq!(constant.class.dimension(), Some(1));

        let blaschke = expand_rational(&cx(&[-0.5, 1.0]), &cx(&[1.0, -0.5]), 200).unwrap();
        let p = kronecker_ranks(&blaschke, 1e-10).unwrap();
        assert_eq!((p.rank_h, p.rank_k), (2, 1));
        assert_eq!(p.class.dimension(), Some(3));

        let geometric = expand_rational(&cx(&[1.875]), &cx(&[1.0, -0.25]), 200).unwrap();
        let p = kronecker_ranks(&geometric, 1e-10).unwrap();
        assert_eq!((p.rank_h, p.rank_k), (1, 1));
        assert_eq!(p.class, RankClass::Even(1));
    }

    #[test]
    fn slowly_decaying_symbol_is_not_finite_rank() {
        let c = SymbolCoefficients::new((0..4096).map(|n| Complex64::new(1.0 / (n as f64 + 1.0), 0.0)).collect());
        let opts = RankOptions {
            tol: 1e-14,
            min_size: 8,
            max_size: 32,
        };
        let p = kronecker_ranks_with(&c, &opts).unwrap();
        assert_eq!(p.class, RankClass::NotFiniteRank);

        let single_size = RankOptions {
            tol: 1e-14,
            min_size: 32,
            max_size: 32,
        };
        assert!(matches!(
            kronecker_ranks_with(&c, &single_size),
            Err(Error::Inconclusive { max_size: 32 })
        ));
    }
}
