//! Piecewise-linear profiles on `[0, 4]` and the trigonometric kernels they
//! generate, `W_n(e^{i theta}) = sum_{k=0}^{4n} Psi(k/n) e^{i k theta}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeff::{inverse_fft, CoeffSeq};
use crate::error::{Error, Result};

/// Upper bound for `sup |(1 - e^{i theta})^2 W_n| / Lip(Psi)`.
pub const W_KERNEL_BOUND: f64 = 14.0;

/// Right end of the support.
const SUPPORT: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonalProfile {
    knots: Vec<(f64, f64)>,
    lipschitz_constant: f64,
}

impl PolygonalProfile {
    /// Knots must have strictly increasing `x` inside `[0, 4]` and vanish at both ends.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidKnots("need at least two knots".into()));
        }
        if knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
            return Err(Error::InvalidKnots("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidKnots("x must increase strictly".into()));
        }
        let (first, last) = (knots[0], knots[knots.len() - 1]);
        if first.0 < 0.0 || last.0 > SUPPORT {
            return Err(Error::InvalidKnots("knots must lie in [0, 4]".into()));
        }
        if first.1 != 0.0 || last.1 != 0.0 {
            return Err(Error::InvalidKnots("profile must vanish at the end knots".into()));
        }
        let lipschitz_constant = knots
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            knots,
            lipschitz_constant,
        })
    }

    /// `Psi(x) = min(x, 4 - x)` on `[0, 4]`.
    pub fn tent() -> Self {
        Self::new(vec![(0.0, 0.0), (2.0, 2.0), (4.0, 0.0)]).expect("valid tent")
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.lipschitz_constant
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0].0 || x >= k[k.len() - 1].0 {
            return 0.0;
        }
        let i = k.partition_point(|p| p.0 <= x);
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.knots.iter().map(|&(x, y)| (x, lambda * y)).collect())
    }
}

/// Profile through `(0,0)`, `(k/N, v_k)` for `k = N..=2N`, and `(4,0)`.
pub fn polygonal_psi(values: &[f64], n: usize) -> Result<PolygonalProfile> {
    if n == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    if values.len() != n + 1 {
        return Err(Error::ShapeMismatch {
            expected: n + 1,
            got: values.len(),
        });
    }
    let mut knots = Vec::with_capacity(n + 3);
    knots.push((0.0, 0.0));
    for (i, &v) in values.iter().enumerate() {
        knots.push(((n + i) as f64 / n as f64, v));
    }
    knots.push((SUPPORT, 0.0));
    PolygonalProfile::new(knots)
}

/// `H_N(z) = sum_{k=0}^{4N} Psi(k/N) z^k`.
pub fn h_poly(psi: &PolygonalProfile, n: usize) -> Result<CoeffSeq> {
    if n == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    CoeffSeq::from_fn(4 * n, |k| Complex64::new(psi.eval(k as f64 / n as f64), 0.0))
}

/// `sup_{theta != 0} |(1 - e^{i theta})^2 W_n(e^{i theta})| / Lip(Psi)` over
/// `max(theta_grid, 16 n)` equispaced angles; zero for the zero profile.
pub fn w_kernel(psi: &PolygonalProfile, n: usize, theta_grid: usize) -> Result<f64> {
    let w = h_poly(psi, n)?;
    let lip = psi.lipschitz_constant();
    if lip == 0.0 {
        return Ok(0.0);
    }
    // (1 - z)^2 W has coefficients c_k - 2 c_{k-1} + c_{k-2}.
    let len = theta_grid.max(16 * n);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for k in 0..=w.degree() + 2 {
        let c = |j: isize| {
            if j < 0 {
                Complex64::new(0.0, 0.0)
            } else {
                w.coeff(j as usize)
            }
        };
        let k = k as isize;
        buf[k as usize] = c(k) - 2.0 * c(k - 1) + c(k - 2);
    }
    inverse_fft(&mut buf);
    let sup = buf[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(sup / lip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::extremal::beta_values;
    use approx::assert_relative_eq;

    #[test]
    fn knots_are_validated() {
        assert!(PolygonalProfile::new(vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(PolygonalProfile::new(vec![(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(PolygonalProfile::new(vec![(0.0, 0.0), (5.0, 0.0)]).is_err());
        assert!(matches!(
            polygonal_psi(&[1.0; 3], 4),
            Err(Error::ShapeMismatch { expected: 5, got: 3 })
        ));
    }

    #[test]
    fn lipschitz_examples() {
        assert_eq!(polygonal_psi(&[0.0; 9], 8).unwrap().lipschitz_constant(), 0.0);
        // one bump of height 2 at x = 1, neighbours zero at 1 -+ 1/8
        let mut v = vec![0.0; 9];
        v[0] = 2.0;
        let p = polygonal_psi(&v, 8).unwrap();
        assert_relative_eq!(p.lipschitz_constant(), 16.0);
        assert_eq!(PolygonalProfile::tent().lipschitz_constant(), 1.0);
        assert_relative_eq!(PolygonalProfile::tent().eval(1.5), 1.5);
        assert_eq!(PolygonalProfile::tent().eval(4.5), 0.0);
    }

    #[test]
    fn kernel_bound_examples() {
        assert_eq!(
            w_kernel(&polygonal_psi(&[0.0; 5], 4).unwrap(), 4, 64).unwrap(),
            0.0
        );
        let tent = w_kernel(&PolygonalProfile::tent(), 32, 32 * 32).unwrap();
        assert!(tent <= W_KERNEL_BOUND, "{tent}");
        let psi = polygonal_psi(&beta_values(2.0, 64).unwrap(), 64).unwrap();
        assert!(w_kernel(&psi, 64, 32 * 64).unwrap() <= W_KERNEL_BOUND);
    }

    #[test]
    fn kernel_matches_direct_evaluation() {
        let psi = polygonal_psi(&beta_values(1.5, 8).unwrap(), 8).unwrap();
        let w = h_poly(&psi, 8).unwrap();
        let len = 16 * 8;
        let direct = (1..len)
            .map(|j| {
                let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / len as f64);
                ((Complex64::new(1.0, 0.0) - z).powi(2) * w.eval(z)).norm()
            })
            .fold(0.0, f64::max);
        let fast = w_kernel(&psi, 8, len).unwrap();
        assert_relative_eq!(fast, direct / psi.lipschitz_constant(), max_relative = 1e-12);
    }

    #[test]
    fn kernel_ratio_is_scale_invariant() {
        let psi = polygonal_psi(&beta_values(2.0, 16).unwrap(), 16).unwrap();
        let base = w_kernel(&psi, 16, 512).unwrap();
        for lambda in [0.5, 4.0] {
            let r = w_kernel(&psi.scaled(lambda).unwrap(), 16, 512).unwrap();
            // powers of two scale every intermediate exactly
            assert_eq!(r, base);
        }
    }

    #[test]
    fn h_poly_layout() {
        let h = h_poly(&PolygonalProfile::tent(), 2).unwrap();
        assert_eq!(h.degree(), 8);
        let re: Vec<f64> = h.coeffs().iter().map(|c| c.re).collect();
        assert_eq!(re, [0.0, 0.5, 1.0, 1.5, 2.0, 1.5, 1.0, 0.5, 0.0]);
    }
}
