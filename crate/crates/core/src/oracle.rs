//! Independent reference computations used by tests and the self-check suite.
//! Each one avoids the code path it is compared against: dense linear algebra
//! instead of matrix-free iteration, closed forms instead of quadrature,
//! moment identities instead of enumeration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coeff::CoeffSeq;
use crate::rhaly::SequenceSpec;

/// Largest singular value of the dense `n x n` section, via SVD.
pub fn dense_opnorm(eta: &SequenceSpec, n: usize) -> f64 {
    let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        if j <= i {
            eta.realize(i)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    m.singular_values().max()
}

/// `sum_{n=lo}^{hi} (n + shift)^{-s}`, summed from the small end.
pub fn block_power_sum(lo: usize, hi: usize, s: f64, shift: usize) -> f64 {
    (lo..=hi).rev().map(|n| ((n + shift) as f64).powf(-s)).sum()
}

/// `||f||_{A^2_alpha}` from `||z^n||^2 = prod_{j=1}^n j / (j + alpha + 1)`.
pub fn bergman_p2(f: &CoeffSeq, alpha: f64) -> f64 {
    let mut w = 1.0;
    let mut total = 0.0;
    for (n, a) in f.coeffs().iter().enumerate() {
        if n > 0 {
            w *= n as f64 / (n as f64 + alpha + 1.0);
        }
        total += a.norm_sqr() * w;
    }
    total.sqrt()
}

/// `E |sum s_j c_j|^q` over independent uniform signs, for `q` in `{2, 4}`, from
/// the moment expansion
/// `E|S|^4 = 2 (sum |c|^2)^2 + |sum c^2|^2 - 2 sum |c|^4`.
pub fn sign_moment_even(c: &[Complex64], q: u32) -> f64 {
    let l2: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    match q {
        2 => l2,
        4 => {
            let sq: Complex64 = c.iter().map(|x| x * x).sum();
            let l4: f64 = c.iter().map(|x| x.norm_sqr().powi(2)).sum();
            2.0 * l2 * l2 + sq.norm_sqr() - 2.0 * l4
        }
        _ => panic!("only q = 2 and q = 4 have closed forms here"),
    }
}

/// Min and max of `E|sum s_j c_j e^{i j theta}|^4` over `theta = 2 pi k / grid`.
pub fn rotated_fourth_moment_range(c: &[Complex64], grid: usize) -> (f64, f64) {
    (0..grid)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
            let rot: Vec<Complex64> = c
                .iter()
                .enumerate()
                .map(|(j, x)| x * Complex64::from_polar(1.0, j as f64 * theta))
                .collect();
            sign_moment_even(&rot, 4)
        })
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// `N sum_{n=N}^{2N-1} (n+1)^{-2}`: squared `H^2` block profile entry of the
/// Cesàro generating function at smoothness `1/2`.
pub fn cesaro_block_p2(n: usize) -> f64 {
    n as f64 * block_power_sum(n, 2 * n - 1, 2.0, 1)
}

/// Dense application of `R_(eta)` by explicit double sums.
pub fn dense_apply(eta: &SequenceSpec, f: &CoeffSeq) -> Vec<Complex64> {
    (0..=eta.truncation())
        .map(|n| eta.realize(n) * (0..=n).map(|k| f.coeff(k)).sum::<Complex64>())
        .collect()
}
