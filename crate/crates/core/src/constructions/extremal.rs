//! The test family `f_N(z) = N^{1/p-2} a z / (1 - a z)^2`, `a = 1 - 1/N`, its
//! Bergman rescaling, and the averaged coefficients built from it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeff::CoeffSeq;
use crate::error::{check_p, Error, Result};
use crate::norms::{hp_norm, NormReport};
use crate::par::CompensatedSum;

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Parameter(format!("N = {n} must be at least 2")));
    }
    Ok(())
}

fn radius(n: usize) -> f64 {
    1.0 - 1.0 / n as f64
}

/// Relative size of the neglected geometric tail that a truncation must reach.
const TAIL_TOL: f64 = 1e-10;

fn peak(n: usize) -> f64 {
    let a = radius(n);
    let m = -1.0 / a.ln();
    [m.floor().max(1.0), m.ceil().max(1.0)]
        .iter()
        .map(|&k| k * a.powf(k))
        .fold(0.0, f64::max)
}

fn tail_ok(n: usize, truncation: usize) -> bool {
    let t = truncation as f64;
    radius(n).powf(t) * t * t <= TAIL_TOL * peak(n)
}

/// Smallest truncation accepted by [`extremal_fn`] for this `N`.
pub fn min_truncation(n: usize) -> usize {
    let n = n.max(2);
    let mut hi = 8 * n;
    if tail_ok(n, hi) {
        return hi;
    }
    let mut lo = hi;
    while !tail_ok(n, hi) {
        lo = hi;
        hi *= 2;
    }
    // a^t t^2 is decreasing past t = 2N, so bisection is valid here
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if tail_ok(n, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Coefficients `n a^n / N^{2-1/p}`, `n = 0..=truncation`.
pub fn extremal_series(p: f64, n: usize, truncation: usize) -> Result<CoeffSeq> {
    check_p(p)?;
    check_n(n)?;
    let required = min_truncation(n);
    if truncation < required {
        return Err(Error::TruncationTooSmall {
            n,
            truncation,
            required,
        });
    }
    let a = radius(n);
    let scale = (n as f64).powf(1.0 / p - 2.0);
    let mut an = 1.0;
    CoeffSeq::from_fn(truncation, |k| {
        let v = k as f64 * an * scale;
        an *= a;
        Complex64::new(v, 0.0)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalFn {
    pub series: CoeffSeq,
    pub hp_norm: NormReport,
}

pub fn extremal_fn(p: f64, n: usize, truncation: usize) -> Result<ExtremalFn> {
    let series = extremal_series(p, n, truncation)?;
    let hp_norm = hp_norm(&series, p)?;
    Ok(ExtremalFn { series, hp_norm })
}

/// `sum_{j=1}^k j a^j`, compensated.
fn weighted_geometric(k: usize, a: f64) -> f64 {
    let mut s = CompensatedSum::default();
    let mut aj = 1.0;
    for j in 1..=k {
        aj *= a;
        s.add(j as f64 * aj);
    }
    s.value()
}

/// `(alpha_{k,N}, beta_{k,N})` with `alpha = (k N^{2-1/p})^{-1} sum_{n<=k} n a^n`
/// and `beta = 1/alpha`.
pub fn alpha_beta(p: f64, n: usize, k: usize) -> Result<(f64, f64)> {
    check_p(p)?;
    check_n(n)?;
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let alpha = weighted_geometric(k, radius(n)) / (k as f64 * (n as f64).powf(2.0 - 1.0 / p));
    Ok((alpha, 1.0 / alpha))
}

/// `beta_{k,N}` for `k = N..=2N`.
pub fn beta_values(p: f64, n: usize) -> Result<Vec<f64>> {
    (n..=2 * n).map(|k| alpha_beta(p, n, k).map(|ab| ab.1)).collect()
}

fn check_bergman(p: f64, alpha: f64) -> Result<()> {
    check_p(p)?;
    if !(alpha > -1.0 && alpha < 2.0 * p - 2.0) {
        return Err(Error::AlphaRange(alpha));
    }
    Ok(())
}

/// `g_N = N^{(alpha+1)/p} f_N`.
pub fn bergman_gn(p: f64, alpha: f64, n: usize, truncation: usize) -> Result<CoeffSeq> {
    check_bergman(p, alpha)?;
    let f = extremal_series(p, n, truncation)?;
    Ok(f.scale(Complex64::new((n as f64).powf((alpha + 1.0) / p), 0.0)))
}

/// `(gamma_{k,N}, delta_{k,N})` with `gamma = N^{(1+alpha)/p} alpha_{k,N}`, `delta = 1/gamma`.
pub fn gamma_delta(p: f64, alpha: f64, n: usize, k: usize) -> Result<(f64, f64)> {
    check_bergman(p, alpha)?;
    let (a, _) = alpha_beta(p, n, k)?;
    let gamma = (n as f64).powf((1.0 + alpha) / p) * a;
    Ok((gamma, 1.0 / gamma))
}

/// `delta_{k,N}` for `k = N..=2N`.
pub fn delta_values(p: f64, alpha: f64, n: usize) -> Result<Vec<f64>> {
    (n..=2 * n)
        .map(|k| gamma_delta(p, alpha, n, k).map(|gd| gd.1))
        .collect()
}

/// `(phi_N, psi_N)`: `psi_N` has coefficient `n` equal to
/// `1 / sum_{k=1}^{n+N} k a^k` for `n < N`, and `phi_N = z^N psi_N`.
pub fn phi_psi_n(n: usize, a: f64) -> Result<(CoeffSeq, CoeffSeq)> {
    check_n(n)?;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Parameter(format!("a = {a} outside (0, 1)")));
    }
    let mut s = CompensatedSum::default();
    let mut aj = 1.0;
    for j in 1..n {
        aj *= a;
        s.add(j as f64 * aj);
    }
    let mut psi = Vec::with_capacity(n);
    for j in n..2 * n {
        aj *= a;
        s.add(j as f64 * aj);
        psi.push(Complex64::new(1.0 / s.value(), 0.0));
    }
    let mut phi = vec![Complex64::new(0.0, 0.0); n];
    phi.extend_from_slice(&psi);
    Ok((CoeffSeq::new(phi)?, CoeffSeq::new(psi)?))
}
