//! Dyadic block profiles and mean Lipschitz membership.
//!
//! A function lies in `Lambda^p_alpha` when `N^alpha ||Delta_N f||_{H^p}` stays
//! bounded over dyadic `N`, and in `lambda^p_alpha` when it tends to zero. From a
//! truncated series this can only be judged by trends, so the verdict is a
//! thresholded read of a log-log fit with `Inconclusive` as a real outcome.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coeff::CoeffSeq;
use crate::error::{check_p, Error, Result};
use crate::norms::{self, dyadic_radii, hp_norm_value};
use crate::par;

pub const MIN_LEVELS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockProfile {
    pub exponent_alpha: f64,
    pub p: f64,
    /// `(N, N^alpha ||Delta_N f||_{H^p})` for `N = 2^k`, `k = 1..=K`.
    pub entries: Vec<(usize, f64)>,
    pub slope: f64,
    pub tail_ratio: f64,
}

impl BlockProfile {
    pub fn levels(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    pub fn median(&self) -> f64 {
        let mut v: Vec<f64> = self.entries.iter().map(|e| e.1).collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n == 0 {
            0.0
        } else if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }

    /// `max / median`; infinite when the median vanishes but the max does not.
    pub fn spread(&self) -> f64 {
        let (max, med) = (self.max(), self.median());
        if max == 0.0 {
            1.0
        } else if med == 0.0 {
            f64::INFINITY
        } else {
            max / med
        }
    }

    /// Largest entry of the fitted tail window over the median of all entries.
    /// Unlike [`BlockProfile::spread`] this stays small for decaying profiles,
    /// whose maximum sits at the first block.
    pub fn tail_spread(&self) -> f64 {
        let k = self.entries.len();
        let max = self.entries[tail_start(k)..]
            .iter()
            .map(|e| e.1)
            .fold(0.0, f64::max);
        let med = self.median();
        if max == 0.0 {
            1.0
        } else if med == 0.0 {
            f64::INFINITY
        } else {
            max / med
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,scaled_norm\n");
        for (n, v) in &self.entries {
            let _ = writeln!(out, "{n},{v:e}");
        }
        out
    }
}

/// Least-squares slope of `ln y` against `ln x` over the points with `y > 0`;
/// zero when fewer than two such points remain.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// First entry of the window the slope is fitted over.
fn tail_start(k: usize) -> usize {
    k.div_ceil(2).saturating_sub(1)
}

fn assemble(p: f64, alpha: f64, entries: Vec<(usize, f64)>) -> BlockProfile {
    let k = entries.len();
    let tail: Vec<(f64, f64)> = entries[tail_start(k)..]
        .iter()
        .map(|&(n, v)| (n as f64, v))
        .collect();
    let slope = loglog_slope(&tail);
    let max = entries.iter().map(|e| e.1).fold(0.0, f64::max);
    let tail_ratio = if max > 0.0 { entries[k - 1].1 / max } else { 0.0 };
    BlockProfile {
        exponent_alpha: alpha,
        p,
        entries,
        slope,
        tail_ratio,
    }
}

fn check_levels(f: &CoeffSeq, levels: u32) -> Result<()> {
    let required = (1usize << (levels + 1)) - 1;
    if levels < MIN_LEVELS || f.degree() < required {
        return Err(Error::DegreeTooSmall {
            degree: f.degree(),
            k: levels,
            required,
        });
    }
    Ok(())
}

/// Largest admissible profile depth for a series of the given degree.
pub fn max_levels(degree: usize) -> u32 {
    (usize::BITS - 1 - (degree + 1).leading_zeros()).saturating_sub(1)
}

/// `N^alpha ||Delta_N f||_{H^p}` for `N = 2, 4, ..., 2^levels`.
///
/// Needs `degree >= 2^(levels+1) - 1` so the last block is complete. Blocks are
/// normed after moving them down to degree 0, which leaves `H^p` norms unchanged.
pub fn block_profile(f: &CoeffSeq, p: f64, alpha: f64, levels: u32) -> Result<BlockProfile> {
    check_p(p)?;
    check_levels(f, levels)?;
    let norms: Result<Vec<(usize, f64)>> = par::map_range(levels as usize, |i| {
        let n = 1usize << (i + 1);
        let block = f.window(n, 2 * n - 1)?;
        Ok((n, (n as f64).powf(alpha) * hp_norm_value(&block, p)?))
    })
    .into_iter()
    .collect();
    Ok(assemble(p, alpha, norms?))
}

/// `N^(alpha-1) ||(Delta_N f)'||_{H^p}`, the derivative form of the same condition.
pub fn derivative_profile(f: &CoeffSeq, p: f64, alpha: f64, levels: u32) -> Result<BlockProfile> {
    check_p(p)?;
    check_levels(f, levels)?;
    let norms: Result<Vec<(usize, f64)>> = par::map_range(levels as usize, |i| {
        let n = 1usize << (i + 1);
        let block = f.slice(n, 2 * n - 1)?.derivative().window(n - 1, 2 * n - 2)?;
        Ok((n, (n as f64).powf(alpha - 1.0) * hp_norm_value(&block, p)?))
    })
    .into_iter()
    .collect();
    Ok(assemble(p, alpha - 1.0, norms?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub eps_slope: f64,
    pub eps_tail: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            eps_slope: 0.05,
            eps_tail: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    BigLambda,
    LittleLambda,
    Neither,
    Inconclusive,
}

impl Membership {
    /// True for both the big-O and little-o classes.
    pub fn is_bounded(self) -> bool {
        matches!(self, Membership::BigLambda | Membership::LittleLambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub space: Membership,
    pub profile: BlockProfile,
    pub thresholds: Thresholds,
}

pub fn classify_membership(profile: &BlockProfile, thresholds: Thresholds) -> MembershipVerdict {
    let Thresholds { eps_slope, eps_tail } = thresholds;
    let bounded = profile.tail_spread() <= 1.0 / eps_tail;
    let space = if profile.slope <= eps_slope && bounded {
        if profile.tail_ratio <= eps_tail {
            Membership::LittleLambda
        } else {
            Membership::BigLambda
        }
    } else if profile.slope >= 2.0 * eps_slope {
        Membership::Neither
    } else {
        Membership::Inconclusive
    };
    MembershipVerdict {
        space,
        profile: profile.clone(),
        thresholds,
    }
}

/// `beta_sup(f - S_N f)` for each `N`, over the dyadic ladder matched to the degree.
pub fn partial_sum_convergence(f: &CoeffSeq, p: f64, alpha: f64, ns: &[usize]) -> Result<Vec<f64>> {
    let radii = dyadic_radii(norms::default_ladder(f.degree()));
    ns.iter()
        .map(|&n| {
            let tail = f.sub(&f.partial_sum(n));
            norms::beta_sup(&tail, p, alpha, &radii)
        })
        .collect()
}

/// `f_r(z) = f(r z)`.
pub fn dilate(f: &CoeffSeq, r: f64) -> Result<CoeffSeq> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::RadiusRange(r));
    }
    let mut rn = 1.0;
    CoeffSeq::new(
        f.coeffs()
            .iter()
            .map(|a| {
                let v = a * rn;
                rn *= r;
                v
            })
            .collect(),
    )
}
