//! Integral means and the norms built from them.
//!
//! Angular integrals use the trapezoid rule on an oversampled [`CircleGrid`];
//! radial integrals use a [`RadialGrid`] whose weight exponent must match the
//! space. Every public `*_norm` returns a [`NormReport`] carrying the relative
//! change under one doubling of all grids.

use serde::{Deserialize, Serialize};

use crate::coeff::{CircleGrid, CoeffSeq};
use crate::error::{check_p, Error, Result};
use crate::par;
use crate::quadrature::RadialGrid;

/// Reports whose `refinement_delta` exceeds this are flagged.
pub const FLAG_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub grid_points: usize,
    pub radial_nodes: usize,
    pub refinement_delta: f64,
}

impl NormReport {
    pub fn flagged(&self) -> bool {
        self.refinement_delta.is_nan() || self.refinement_delta > FLAG_THRESHOLD
    }
}

fn relative_delta(base: f64, fine: f64) -> f64 {
    let scale = base.abs().max(fine.abs());
    if scale == 0.0 {
        0.0
    } else {
        (fine - base).abs() / scale
    }
}

/// Default angular grid: `max(1024, 8 (degree + 1))`.
pub fn default_grid_points(degree: usize) -> usize {
    (8 * (degree + 1)).max(1024)
}

fn check_radius_closed(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::RadiusRange(r))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::AlphaRange(alpha))
    }
}

/// `M_p(r, f)^p` on `m` angles. For `p = 2` the trapezoid sum equals the
/// Parseval sum exactly, so that is used instead.
pub(crate) fn mp_pow(f: &CoeffSeq, r: f64, p: f64, m: usize) -> Result<f64> {
    let grid = CircleGrid::new(m, r)?;
    grid.check(f.degree())?;
    if p == 2.0 {
        let mut rn = 1.0;
        let terms: Vec<f64> = f
            .coeffs()
            .iter()
            .map(|a| {
                let t = a.norm_sqr() * rn;
                rn *= r * r;
                t
            })
            .collect();
        return Ok(par::pairwise_sum(&terms));
    }
    let vals = f.evaluate_on_circle(&grid)?;
    let terms: Vec<f64> = vals.iter().map(|v| v.norm().powf(p)).collect();
    Ok(par::pairwise_sum(&terms) / m as f64)
}

/// `M_p(r, f)` on the default grid, without a refinement pass.
pub fn mean_mp_value(f: &CoeffSeq, r: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    check_radius_closed(r)?;
    Ok(mp_pow(f, r, p, default_grid_points(f.degree()))?.powf(1.0 / p))
}

pub fn mean_mp(f: &CoeffSeq, r: f64, p: f64, m: usize) -> Result<NormReport> {
    check_p(p)?;
    check_radius_closed(r)?;
    let base = mp_pow(f, r, p, m)?.powf(1.0 / p);
    let fine = mp_pow(f, r, p, 2 * m)?.powf(1.0 / p);
    Ok(NormReport {
        value: base,
        grid_points: m,
        radial_nodes: 0,
        refinement_delta: relative_delta(base, fine),
    })
}

/// `||f||_{H^p}`; for a polynomial the supremum of the means is the value at `r = 1`.
pub fn hp_norm(f: &CoeffSeq, p: f64) -> Result<NormReport> {
    mean_mp(f, 1.0, p, default_grid_points(f.degree()))
}

pub fn hp_norm_with(f: &CoeffSeq, p: f64, m: usize) -> Result<NormReport> {
    mean_mp(f, 1.0, p, m)
}

/// `||f||_{H^p}` on the default grid, without a refinement pass.
pub fn hp_norm_value(f: &CoeffSeq, p: f64) -> Result<f64> {
    mean_mp_value(f, 1.0, p)
}

fn check_grid(grid: &RadialGrid, wanted: f64) -> Result<()> {
    if (grid.exponent - wanted).abs() > 1e-12 * wanted.abs().max(1.0) {
        return Err(Error::GridMismatch {
            grid: grid.exponent,
            wanted,
        });
    }
    Ok(())
}

/// `||f||^p_{A^p_alpha}` written as `(alpha+1) int_0^1 (1-r)^alpha 2r(1+r)^alpha M_p^p(r) dr`.
fn bergman_pow(f: &CoeffSeq, p: f64, alpha: f64, grid: &RadialGrid, m: usize) -> Result<f64> {
    let integral = grid.try_integrate(|r| Ok(2.0 * r * (1.0 + r).powf(alpha) * mp_pow(f, r, p, m)?))?;
    Ok((alpha + 1.0) * integral)
}

/// Base and refined values of `||f||^p_{A^p_alpha}`.
fn bergman_pow_pair(f: &CoeffSeq, p: f64, alpha: f64, grid: &RadialGrid, m: usize) -> Result<(f64, f64)> {
    let base = bergman_pow(f, p, alpha, grid, m)?;
    let fine = bergman_pow(f, p, alpha, &grid.refined()?, 2 * m)?;
    Ok((base, fine))
}

pub fn bergman_norm(f: &CoeffSeq, p: f64, alpha: f64, grid: &RadialGrid) -> Result<NormReport> {
    bergman_norm_with(f, p, alpha, grid, default_grid_points(f.degree()))
}

pub fn bergman_norm_with(
    f: &CoeffSeq,
    p: f64,
    alpha: f64,
    grid: &RadialGrid,
    m: usize,
) -> Result<NormReport> {
    check_p(p)?;
    check_alpha(alpha)?;
    check_grid(grid, alpha)?;
    let (base, fine) = bergman_pow_pair(f, p, alpha, grid, m)?;
    let (base, fine) = (base.powf(1.0 / p), fine.powf(1.0 / p));
    Ok(NormReport {
        value: base,
        grid_points: m,
        radial_nodes: grid.len(),
        refinement_delta: relative_delta(base, fine),
    })
}

/// `||f||_{A^p_alpha}` without a refinement pass.
pub fn bergman_norm_value(f: &CoeffSeq, p: f64, alpha: f64, grid: &RadialGrid) -> Result<f64> {
    check_p(p)?;
    check_alpha(alpha)?;
    check_grid(grid, alpha)?;
    Ok(bergman_pow(f, p, alpha, grid, default_grid_points(f.degree()))?.powf(1.0 / p))
}

/// `(|f(0)|^p + ||f'||^p_{A^p_alpha})^{1/p}`.
pub fn dirichlet_norm(f: &CoeffSeq, p: f64, alpha: f64, grid: &RadialGrid) -> Result<NormReport> {
    check_p(p)?;
    check_alpha(alpha)?;
    check_grid(grid, alpha)?;
    let df = f.derivative();
    let m = default_grid_points(df.degree());
    let head = f.coeff(0).norm().powf(p);
    let (base, fine) = bergman_pow_pair(&df, p, alpha, grid, m)?;
    let (base, fine) = ((head + base).powf(1.0 / p), (head + fine).powf(1.0 / p));
    Ok(NormReport {
        value: base,
        grid_points: m,
        radial_nodes: grid.len(),
        refinement_delta: relative_delta(base, fine),
    })
}

/// [`dirichlet_norm`] without a refinement pass.
pub fn dirichlet_norm_value(f: &CoeffSeq, p: f64, alpha: f64, grid: &RadialGrid) -> Result<f64> {
    check_p(p)?;
    check_alpha(alpha)?;
    check_grid(grid, alpha)?;
    let df = f.derivative();
    let m = default_grid_points(df.degree());
    Ok((f.coeff(0).norm().powf(p) + bergman_pow(&df, p, alpha, grid, m)?).powf(1.0 / p))
}

/// Radial weight exponent `p (1 - 1/q)` of the mixed-norm space.
pub fn xqp_exponent(q: f64, p: f64) -> f64 {
    p * (1.0 - 1.0 / q)
}

/// Factor relating the `q = p` mixed norm to the Dirichlet-type norm with
/// `alpha = p - 1`: the latter carries the probability normalization `alpha + 1 = p`.
pub fn xqp_normalization(p: f64) -> f64 {
    p
}

fn check_qp(q: f64, p: f64) -> Result<()> {
    check_p(p)?;
    check_p(q)?;
    if q > p {
        return Err(Error::ParamOrder { q, p });
    }
    Ok(())
}

fn xqp_pow(f: &CoeffSeq, q: f64, p: f64, grid: &RadialGrid, m: usize) -> Result<f64> {
    let df = f.derivative();
    let integral = grid.try_integrate(|r| Ok(mp_pow(&df, r, q, m)?.powf(p / q)))?;
    Ok(f.coeff(0).norm().powf(p) + integral)
}

/// `(|f(0)|^p + int_0^1 (1-r)^{p(1-1/q)} M_q^p(r, f') dr)^{1/p}`.
pub fn xqp_norm(f: &CoeffSeq, q: f64, p: f64, grid: &RadialGrid) -> Result<NormReport> {
    check_qp(q, p)?;
    check_grid(grid, xqp_exponent(q, p))?;
    let m = default_grid_points(f.degree().saturating_sub(1));
    let base = xqp_pow(f, q, p, grid, m)?.powf(1.0 / p);
    let fine = xqp_pow(f, q, p, &grid.refined()?, 2 * m)?.powf(1.0 / p);
    Ok(NormReport {
        value: base,
        grid_points: m,
        radial_nodes: grid.len(),
        refinement_delta: relative_delta(base, fine),
    })
}

/// [`xqp_norm`] without a refinement pass.
pub fn xqp_norm_value(f: &CoeffSeq, q: f64, p: f64, grid: &RadialGrid) -> Result<f64> {
    check_qp(q, p)?;
    check_grid(grid, xqp_exponent(q, p))?;
    let m = default_grid_points(f.degree().saturating_sub(1));
    Ok(xqp_pow(f, q, p, grid, m)?.powf(1.0 / p))
}

fn check_smoothness(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::SmoothnessRange(alpha))
    }
}

/// `(1-r)^{1-alpha} M_p(r, f')`.
pub fn beta(f: &CoeffSeq, p: f64, alpha: f64, r: f64) -> Result<f64> {
    check_p(p)?;
    check_smoothness(alpha)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::RadiusRange(r));
    }
    let df = f.derivative();
    let m = default_grid_points(df.degree());
    Ok((1.0 - r).powf(1.0 - alpha) * mp_pow(&df, r, p, m)?.powf(1.0 / p))
}

/// Maximum of [`beta`] over `radii`, evaluated in parallel.
pub fn beta_sup(f: &CoeffSeq, p: f64, alpha: f64, radii: &[f64]) -> Result<f64> {
    let vals: Result<Vec<f64>> = par::map_slice(radii, |&r| beta(f, p, alpha, r))
        .into_iter()
        .collect();
    Ok(vals?.into_iter().fold(0.0, f64::max))
}

/// `r_j = 1 - 2^{-j}`, `j = 1..=levels`.
pub fn dyadic_radii(levels: u32) -> Vec<f64> {
    (1..=levels).map(|j| 1.0 - 2f64.powi(-(j as i32))).collect()
}

/// Upper limit of the dyadic ladder.
pub const MAX_LADDER: u32 = 14;

/// Ladder depth for a series of the given degree: radii closer to the circle
/// than `1/degree` only see the truncation, so the ladder stops there.
pub fn default_ladder(degree: usize) -> u32 {
    let bits = usize::BITS - 1 - (degree + 1).leading_zeros();
    bits.clamp(1, MAX_LADDER)
}
