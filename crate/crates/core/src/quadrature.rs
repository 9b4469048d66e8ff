//! Radial quadrature for integrals of the form `int_0^1 (1-r)^a g(r) dr`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Gauss-Jacobi nodes and weights for `(1-x)^a` on `[-1, 1]`, via Golub-Welsch.
fn gauss_jacobi_symmetric(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    // Monic recurrence of the Jacobi polynomials P^(a,0).
    let b = 0.0;
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        *d = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
    }
    for (i, o) in off.iter_mut().enumerate() {
        let k = (i + 1) as f64;
        let s = 2.0 * k + ab;
        let num = 4.0 * k * (k + a) * (k + b) * (k + ab);
        let den = s * s * (s + 1.0) * (s - 1.0);
        *o = (num / den).sqrt();
    }
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        t[(k, k)] = diag[k];
        if k + 1 < n {
            t[(k, k + 1)] = off[k];
            t[(k + 1, k)] = off[k];
        }
    }
    let mu0 = 2f64.powf(a + 1.0) / (a + 1.0);
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

/// Gauss-Jacobi rule for `int_0^1 (1-r)^a g(r) dr`.
pub fn gauss_jacobi_unit(n: usize, a: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if a <= -1.0 || !a.is_finite() {
        return Err(Error::AlphaRange(a));
    }
    if n == 0 {
        return Err(Error::Parameter("quadrature needs at least one node".into()));
    }
    let (x, w) = gauss_jacobi_symmetric(n, a);
    let scale = 2f64.powf(-a - 1.0);
    Ok((
        x.into_iter().map(|x| 0.5 * (1.0 + x)).collect(),
        w.into_iter().map(|w| w * scale).collect(),
    ))
}

/// Gauss-Legendre rule on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    gauss_jacobi_unit(n, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialKind {
    /// A single Gauss-Jacobi rule with `nodes` points.
    Jacobi { nodes: usize },
    /// Legendre pieces on `[1-2^{1-j}, 1-2^{-j}]`, `j = 1..levels`, then a
    /// Jacobi piece on `[1-2^{-levels}, 1]`, each with `per_level` nodes.
    Dyadic { levels: u32, per_level: usize },
}

/// Quadrature rule for `int_0^1 (1-r)^exponent g(r) dr`: the weight is folded
/// into `weights`, so the integral is `sum w_j g(r_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RadialKind,
    pub exponent: f64,
}

pub const DEFAULT_JACOBI_NODES: usize = 64;
pub const DEFAULT_PER_LEVEL: usize = 16;

impl RadialGrid {
    pub fn jacobi(nodes: usize, exponent: f64) -> Result<Self> {
        let (x, w) = gauss_jacobi_unit(nodes, exponent)?;
        Ok(Self {
            nodes: x,
            weights: w,
            kind: RadialKind::Jacobi { nodes },
            exponent,
        })
    }

    pub fn dyadic(levels: u32, per_level: usize, exponent: f64) -> Result<Self> {
        if levels == 0 || levels > 60 {
            return Err(Error::Parameter(format!("dyadic levels {levels} outside 1..=60")));
        }
        let (lx, lw) = gauss_legendre_unit(per_level)?;
        let (jx, jw) = gauss_jacobi_unit(per_level, exponent)?;
        let mut nodes = Vec::with_capacity(per_level * (levels as usize + 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for j in 1..=levels {
            let lo = 1.0 - 2f64.powi(1 - j as i32);
            let len = 2f64.powi(-(j as i32));
            for (x, w) in lx.iter().zip(&lw) {
                let r = lo + len * x;
                nodes.push(r);
                weights.push(len * w * (1.0 - r).powf(exponent));
            }
        }
        let len = 2f64.powi(-(levels as i32));
        let lo = 1.0 - len;
        let scale = len.powf(exponent + 1.0);
        for (x, w) in jx.iter().zip(&jw) {
            nodes.push(lo + len * x);
            weights.push(scale * w);
        }
        Ok(Self {
            nodes,
            weights,
            kind: RadialKind::Dyadic { levels, per_level },
            exponent,
        })
    }

    /// Default grid for series of the given degree. Low degrees use one
    /// 64-node Jacobi rule; higher degrees resolve the `1/degree` boundary
    /// layer with a dyadic composite rule.
    pub fn for_degree(degree: usize, exponent: f64) -> Result<Self> {
        if degree <= 128 {
            Self::jacobi(DEFAULT_JACOBI_NODES, exponent)
        } else {
            let levels = (usize::BITS - degree.leading_zeros()) + 3;
            Self::dyadic(levels, DEFAULT_PER_LEVEL, exponent)
        }
    }

    /// Same layout with twice the nodes per piece.
    pub fn refined(&self) -> Result<Self> {
        match self.kind {
            RadialKind::Jacobi { nodes } => Self::jacobi(2 * nodes, self.exponent),
            RadialKind::Dyadic { levels, per_level } => Self::dyadic(levels, 2 * per_level, self.exponent),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_j w_j g(r_j)`, evaluated in parallel and summed in a fixed order.
    pub fn integrate<F>(&self, g: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let vals = par::map_range(self.nodes.len(), |j| self.weights[j] * g(self.nodes[j]));
        par::pairwise_sum(&vals)
    }

    /// Fallible variant of [`integrate`](Self::integrate); the first error in node
    /// order wins.
    pub fn try_integrate<F>(&self, g: F) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        let vals = par::map_range(self.nodes.len(), |j| {
            g(self.nodes[j]).map(|v| self.weights[j] * v)
        });
        let vals: Result<Vec<f64>> = vals.into_iter().collect();
        Ok(par::pairwise_sum(&vals?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// `int_0^1 (1-r)^a r^k dr = k! / ((a+1)(a+2)...(a+k+1))`.
    fn beta_moment(k: usize, a: f64) -> f64 {
        let mut v = 1.0 / (a + 1.0);
        for i in 1..=k {
            v *= i as f64 / (a + 1.0 + i as f64);
        }
        v
    }

    #[test]
    fn jacobi_is_exact_on_polynomials() {
        for &a in &[0.0, 0.5, 1.0, 2.0, -0.5, 3.25] {
            let g = RadialGrid::jacobi(12, a).unwrap();
            for k in 0..24 {
                let q = g.integrate(|r| r.powi(k as i32));
                assert_relative_eq!(q, beta_moment(k, a), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn nodes_increase_and_weights_are_positive() {
        for grid in [
            RadialGrid::jacobi(64, 1.0).unwrap(),
            RadialGrid::dyadic(14, 16, 0.0).unwrap(),
            RadialGrid::dyadic(6, 8, 2.5).unwrap(),
        ] {
            assert!(grid.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(grid.nodes.iter().all(|&r| r > 0.0 && r < 1.0));
            assert!(grid.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn dyadic_integrates_the_weight() {
        for &a in &[0.0, 1.0, 2.0] {
            let g = RadialGrid::dyadic(10, 16, a).unwrap();
            assert_relative_eq!(g.integrate(|_| 1.0), 1.0 / (a + 1.0), max_relative = 1e-13);
            assert_relative_eq!(
                g.integrate(|r| r.powi(5)),
                beta_moment(5, a),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn dyadic_resolves_boundary_layers() {
        // int_0^1 r^(2n) dr for large n concentrates within 1/n of r = 1.
        let n = 4096;
        let g = RadialGrid::for_degree(n, 0.0).unwrap();
        let q = g.integrate(|r| r.powi(2 * n as i32));
        assert_relative_eq!(q, 1.0 / (2 * n + 1) as f64, max_relative = 1e-10);
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(matches!(RadialGrid::jacobi(8, -1.0), Err(Error::AlphaRange(_))));
    }
}
