#![allow(dead_code)]

use hankel_spectral::ZetaSequence;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real_zeta(values: &[f64]) -> ZetaSequence {
    ZetaSequence::new(values.iter().map(|&v| cx(v, 0.0)).collect()).unwrap()
}

/// Entry count for `n` levels of either parity.
pub fn random_length<R: Rng>(rng: &mut R, n: usize) -> usize {
    if rng.random_bool(0.5) {
        2 * n
    } else {
        2 * n - 1
    }
}

/// Moduli from `first` downwards with successive ratios in `ratios`, random phases.
pub fn geometric_zeta<R: Rng>(rng: &mut R, len: usize, first: f64, ratios: (f64, f64)) -> ZetaSequence {
    let mut modulus = first;
    let raw = (0..len)
        .map(|_| {
            let entry = Complex64::from_polar(modulus, rng.random_range(-PI..PI));
            modulus *= rng.random_range(ratios.0..ratios.1);
            entry
        })
        .collect();
    ZetaSequence::new(raw).unwrap()
}

/// Moduli drawn log-uniformly from `[lo, hi]` and sorted, random phases.
pub fn log_uniform_zeta<R: Rng>(rng: &mut R, len: usize, lo: f64, hi: f64) -> ZetaSequence {
    loop {
        let mut moduli: Vec<f64> = (0..len).map(|_| (rng.random_range(lo.ln()..hi.ln())).exp()).collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        let raw = moduli
            .iter()
            .map(|&m| Complex64::from_polar(m, rng.random_range(-PI..PI)))
            .collect();
        if let Ok(z) = ZetaSequence::new(raw) {
            return z;
        }
    }
}

/// `Π (1 − z/r)` in increasing powers.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![cx(1.0, 0.0)];
    for r in roots {
        let mut q = p.clone();
        q.push(cx(0.0, 0.0));
        for k in 1..q.len() {
            q[k] -= p[k - 1] / r;
        }
        p = q;
    }
    p
}

/// A rational symbol of class `V(2n)` (`odd == false`) or `V(2n−1)`.
pub fn random_rational<R: Rng>(rng: &mut R, n: usize, odd: bool) -> (Vec<Complex64>, Vec<Complex64>) {
    let degree = if odd { n - 1 } else { n };
    let roots: Vec<Complex64> = (0..degree)
        .map(|_| Complex64::from_polar(rng.random_range(1.2..3.0), rng.random_range(-PI..PI)))
        .collect();
    let numer = (0..n)
        .map(|_| cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    (numer, poly_from_roots(&roots))
}

pub fn max_relative_entry_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / x.norm())
        .fold(0.0, f64::max)
}

/// `ν_j²` and `κ_m²` by direct products, without logarithms.
pub fn naive_weights(rho: &[f64], sigma: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = rho.len();
    let nu = (0..n)
        .map(|j| {
            let mut v = 1.0 - sigma[j].powi(2) / rho[j].powi(2);
            for k in (0..n).filter(|&k| k != j) {
                v *= (rho[j].powi(2) - sigma[k].powi(2)) / (rho[j].powi(2) - rho[k].powi(2));
            }
            v
        })
        .collect();
    let kappa = (0..n)
        .map(|m| {
            let mut v = rho[m].powi(2) - sigma[m].powi(2);
            for l in (0..n).filter(|&l| l != m) {
                v *= (sigma[m].powi(2) - rho[l].powi(2)) / (sigma[m].powi(2) - sigma[l].powi(2));
            }
            v
        })
        .collect();
    (nu, kappa)
}
