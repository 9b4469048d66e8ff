//! The Rhaly operator `R_(eta)`: `a_n -> eta_n * sum_{k<=n} a_k`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coeff::CoeffSeq;
use crate::constructions::extremal;
use crate::error::{check_p, Error, Result};
use crate::lipschitz::loglog_slope;
use crate::norms::hp_norm_value;
use crate::par;

mod complex_list {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Real(f64),
        Pair([f64; 2]),
    }

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries
            .into_iter()
            .map(|e| match e {
                Entry::Real(x) => Complex64::new(x, 0.0),
                Entry::Pair([re, im]) => Complex64::new(re, im),
            })
            .collect())
    }
}

/// Finite positive-support surrogate for a measure on `[0, 1)`: atoms `(t_j, m_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DiscreteMeasure {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for (j, &(t, m)) in atoms.iter().enumerate() {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::InvalidMeasure(format!(
                    "atom {j} at t = {t} outside [0, 1)"
                )));
            }
            if !m.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom {j} has non-finite mass")));
            }
        }
        if atoms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidMeasure(
                "atom positions must increase strictly".into(),
            ));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Midpoint discretization of Lebesgue measure on `[0, 1)` with `n` atoms.
    pub fn lebesgue(n: usize) -> Self {
        let h = 1.0 / n as f64;
        Self {
            atoms: (0..n).map(|j| ((j as f64 + 0.5) * h, h)).collect(),
        }
    }

    /// `mu([r, 1))`.
    pub fn tail_mass(&self, r: f64) -> f64 {
        let masses: Vec<f64> = self.atoms.iter().filter(|a| a.0 >= r).map(|a| a.1).collect();
        par::pairwise_sum(&masses)
    }

    fn all_positive(&self) -> bool {
        self.atoms.iter().all(|a| a.1 >= 0.0)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let atoms = Vec::<(f64, f64)>::deserialize(d)?;
        DiscreteMeasure::new(atoms).map_err(serde::de::Error::custom)
    }
}

/// Law for the multiplier sequence `eta_n`, `n = 0..=truncation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawSpec")]
pub enum SequenceSpec {
    /// Explicit values; entries are reals or `[re, im]` pairs. Values past the
    /// list read as zero up to `truncation`.
    Literal {
        #[serde(with = "complex_list")]
        values: Vec<Complex64>,
        truncation: usize,
    },
    /// `eta_n = c (n+1)^{-s}`.
    PowerLaw { c: f64, s: f64, truncation: usize },
    /// `eta_n = 1/(n+1)`.
    Cesaro { truncation: usize },
    /// `eta_0 = 0`, `eta_n = 1/n`: the coefficients of `log 1/(1-z)`.
    Log { truncation: usize },
    /// `eta_n = int t^n dmu(t)`.
    MeasureMoments {
        atoms: DiscreteMeasure,
        truncation: usize,
    },
    /// `eta_n = signs[n] * base_n`.
    Signed { base: Box<SequenceSpec>, signs: Vec<i8> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawSpec {
    Literal {
        #[serde(with = "complex_list")]
        values: Vec<Complex64>,
        truncation: Option<usize>,
    },
    PowerLaw {
        c: f64,
        s: f64,
        truncation: usize,
    },
    Cesaro {
        truncation: usize,
    },
    Log {
        truncation: usize,
    },
    MeasureMoments {
        atoms: DiscreteMeasure,
        truncation: usize,
    },
    Signed {
        base: Box<SequenceSpec>,
        signs: Vec<i8>,
    },
}

impl TryFrom<RawSpec> for SequenceSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = match raw {
            RawSpec::Literal { values, truncation } => {
                let truncation = truncation.unwrap_or(values.len().saturating_sub(1));
                SequenceSpec::Literal { values, truncation }
            }
            RawSpec::PowerLaw { c, s, truncation } => SequenceSpec::PowerLaw { c, s, truncation },
            RawSpec::Cesaro { truncation } => SequenceSpec::Cesaro { truncation },
            RawSpec::Log { truncation } => SequenceSpec::Log { truncation },
            RawSpec::MeasureMoments { atoms, truncation } => {
                SequenceSpec::MeasureMoments { atoms, truncation }
            }
            RawSpec::Signed { base, signs } => SequenceSpec::Signed { base, signs },
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Monotonicity a spec can certify without inspecting its realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    /// Nonnegative reals, nonincreasing from `n = 1` on.
    NonnegDecreasing,
    /// `|eta_n|` nonincreasing from `n = 1` on.
    ModulusDecreasing,
}

impl SequenceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.truncation() < 1 {
            return bad("truncation must be at least 1".into());
        }
        match self {
            SequenceSpec::Literal { values, .. } => {
                if let Some(i) = values
                    .iter()
                    .position(|v| !(v.re.is_finite() && v.im.is_finite()))
                {
                    return bad(format!("literal value {i} is not finite"));
                }
            }
            SequenceSpec::PowerLaw { c, s, .. } => {
                if !c.is_finite() || !s.is_finite() {
                    return bad("power law parameters must be finite".into());
                }
            }
            SequenceSpec::Signed { base, signs } => {
                base.validate()?;
                if signs.len() < base.truncation() + 1 {
                    return bad(format!(
                        "{} signs for truncation {}",
                        signs.len(),
                        base.truncation()
                    ));
                }
                if signs.iter().any(|s| *s != 1 && *s != -1) {
                    return bad("signs must be +1 or -1".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn truncation(&self) -> usize {
        match self {
            SequenceSpec::Literal { truncation, .. }
            | SequenceSpec::PowerLaw { truncation, .. }
            | SequenceSpec::Cesaro { truncation }
            | SequenceSpec::Log { truncation }
            | SequenceSpec::MeasureMoments { truncation, .. } => *truncation,
            SequenceSpec::Signed { base, .. } => base.truncation(),
        }
    }

    /// `eta_n`; zero past the truncation.
    pub fn realize(&self, n: usize) -> Complex64 {
        if n > self.truncation() {
            return Complex64::new(0.0, 0.0);
        }
        match self {
            SequenceSpec::Literal { values, .. } => values.get(n).copied().unwrap_or_default(),
            SequenceSpec::PowerLaw { c, s, .. } => Complex64::new(c * ((n + 1) as f64).powf(-s), 0.0),
            SequenceSpec::Cesaro { .. } => Complex64::new(1.0 / (n + 1) as f64, 0.0),
            SequenceSpec::Log { .. } => Complex64::new(if n == 0 { 0.0 } else { 1.0 / n as f64 }, 0.0),
            SequenceSpec::MeasureMoments { atoms, .. } => {
                let terms: Vec<f64> = atoms.atoms().iter().map(|&(t, m)| m * t.powi(n as i32)).collect();
                Complex64::new(par::pairwise_sum(&terms), 0.0)
            }
            SequenceSpec::Signed { base, signs } => base.realize(n) * signs[n] as f64,
        }
    }

    /// `eta_0, ..., eta_truncation`.
    pub fn realize_all(&self) -> Vec<Complex64> {
        (0..=self.truncation()).map(|n| self.realize(n)).collect()
    }

    /// Same law with a different truncation. `Signed` and `Literal` specs keep
    /// their stored data and may only shrink.
    pub fn with_truncation(&self, truncation: usize) -> Result<SequenceSpec> {
        let spec = match self {
            SequenceSpec::Literal { values, .. } => SequenceSpec::Literal {
                values: values.clone(),
                truncation,
            },
            SequenceSpec::PowerLaw { c, s, .. } => SequenceSpec::PowerLaw {
                c: *c,
                s: *s,
                truncation,
            },
            SequenceSpec::Cesaro { .. } => SequenceSpec::Cesaro { truncation },
            SequenceSpec::Log { .. } => SequenceSpec::Log { truncation },
            SequenceSpec::MeasureMoments { atoms, .. } => SequenceSpec::MeasureMoments {
                atoms: atoms.clone(),
                truncation,
            },
            SequenceSpec::Signed { base, signs } => SequenceSpec::Signed {
                base: Box::new(base.with_truncation(truncation)?),
                signs: signs.clone(),
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Monotonicity certificate. Index 0 is excluded: changing `eta_0` is a
    /// rank-one perturbation and never affects boundedness.
    pub fn monotonicity(&self) -> Option<Monotonicity> {
        match self {
            SequenceSpec::PowerLaw { c, s, .. } if *c >= 0.0 && *s >= 0.0 => {
                Some(Monotonicity::NonnegDecreasing)
            }
            SequenceSpec::PowerLaw { s, .. } if *s >= 0.0 => Some(Monotonicity::ModulusDecreasing),
            SequenceSpec::Cesaro { .. } | SequenceSpec::Log { .. } => Some(Monotonicity::NonnegDecreasing),
            SequenceSpec::MeasureMoments { atoms, .. } if atoms.all_positive() => {
                Some(Monotonicity::NonnegDecreasing)
            }
            SequenceSpec::Signed { base, .. } => base.monotonicity().map(|_| Monotonicity::ModulusDecreasing),
            SequenceSpec::Literal { .. } | SequenceSpec::MeasureMoments { .. } => {
                let v = self.realize_all();
                let tail = &v[1.min(v.len())..];
                let real_nonneg = tail.iter().all(|x| x.im == 0.0 && x.re >= 0.0);
                let decreasing = tail.windows(2).all(|w| w[1].norm() <= w[0].norm());
                match (decreasing, real_nonneg) {
                    (true, true) => Some(Monotonicity::NonnegDecreasing),
                    (true, false) => Some(Monotonicity::ModulusDecreasing),
                    _ => None,
                }
            }
            SequenceSpec::PowerLaw { .. } => None,
        }
    }
}

/// `R_(eta) f`. The input is padded to the truncation, so the output always has
/// degree `truncation`: `R 1 = F_(eta)` needs the full tail of constant prefix sums.
pub fn apply_rhaly(eta: &SequenceSpec, f: &CoeffSeq) -> Result<CoeffSeq> {
    let truncation = eta.truncation();
    if f.degree() > truncation {
        return Err(Error::TruncationMismatch {
            degree: f.degree(),
            truncation,
        });
    }
    let sums = f.resized(truncation).prefix_sums();
    CoeffSeq::new(
        sums.coeffs()
            .iter()
            .enumerate()
            .map(|(n, s)| eta.realize(n) * s)
            .collect(),
    )
}

/// `F_(eta)(z) = sum eta_n z^n`.
pub fn generating_function(eta: &SequenceSpec) -> CoeffSeq {
    CoeffSeq::new(eta.realize_all()).expect("validated spec realizes to finite values")
}

/// `G_(eta)(z) = z F'_(eta)(z)`.
pub fn g_function(eta: &SequenceSpec) -> CoeffSeq {
    generating_function(eta).derivative().shift()
}

/// Moments `int t^n dmu`, `n = 0..=truncation`, as a literal spec.
pub fn moments(mu: &DiscreteMeasure, truncation: usize) -> Result<SequenceSpec> {
    let spec = SequenceSpec::MeasureMoments {
        atoms: mu.clone(),
        truncation,
    };
    spec.validate()?;
    Ok(SequenceSpec::Literal {
        values: spec.realize_all(),
        truncation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub constant: f64,
    /// `(r, mu([r,1)) / (1-r))`.
    pub ratios: Vec<(f64, f64)>,
    /// Log-log slope of the ratios against `1/(1-r)` over the second half of the radii.
    pub tail_slope: f64,
    pub is_carleson_at_scale: bool,
}

/// Trend slope above which the Carleson ratios count as unbounded.
pub const CARLESON_SLOPE: f64 = 0.1;

pub fn carleson_check(mu: &DiscreteMeasure, radii: &[f64]) -> Result<CarlesonReport> {
    if let Some(&r) = radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::RadiusRange(r));
    }
    let ratios: Vec<(f64, f64)> = radii.iter().map(|&r| (r, mu.tail_mass(r) / (1.0 - r))).collect();
    let constant = ratios.iter().map(|x| x.1).fold(0.0, f64::max);
    let half = radii.len() / 2;
    let tail: Vec<(f64, f64)> = ratios[half..]
        .iter()
        .map(|&(r, v)| (1.0 / (1.0 - r), v))
        .collect();
    let tail_slope = loglog_slope(&tail);
    Ok(CarlesonReport {
        constant,
        ratios,
        tail_slope,
        is_carleson_at_scale: tail_slope <= CARLESON_SLOPE,
    })
}

/// `R_N f = S_N (R f)`.
pub fn truncated_operator(eta: &SequenceSpec, n: usize, f: &CoeffSeq) -> Result<CoeffSeq> {
    if n > eta.truncation() {
        return Err(Error::TruncationMismatch {
            degree: n,
            truncation: eta.truncation(),
        });
    }
    Ok(apply_rhaly(eta, f)?.partial_sum(n))
}

/// `eta^(N)`: zero up to `N`, equal to `eta` beyond, so `R_(eta^(N)) = R - R_N`.
pub fn tail_spec(eta: &SequenceSpec, n: usize) -> Result<SequenceSpec> {
    if n > eta.truncation() {
        return Err(Error::TruncationMismatch {
            degree: n,
            truncation: eta.truncation(),
        });
    }
    let values = eta
        .realize_all()
        .into_iter()
        .enumerate()
        .map(|(k, v)| if k <= n { Complex64::new(0.0, 0.0) } else { v })
        .collect();
    Ok(SequenceSpec::Literal {
        values,
        truncation: eta.truncation(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateMethod {
    PowerIteration,
    FamilySearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpNormEstimate {
    pub lower: f64,
    pub method: EstimateMethod,
    pub witness: CoeffSeq,
    pub iterations: usize,
    pub residual: f64,
}

/// Section `A` of the matrix restricted to the first `n` rows and columns.
struct Section {
    eta: Vec<Complex64>,
}

impl Section {
    /// `(A v)_k = eta_k sum_{j<=k} v_j`.
    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        v.iter()
            .zip(&self.eta)
            .map(|(x, e)| {
                acc += x;
                e * acc
            })
            .collect()
    }

    /// `(A* w)_k = sum_{j>=k} conj(eta_j) w_j`.
    fn adjoint(&self, w: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); w.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..w.len()).rev() {
            acc += self.eta[k].conj() * w[k];
            out[k] = acc;
        }
        out
    }
}

fn l2(v: &[Complex64]) -> f64 {
    let sq: Vec<f64> = v.iter().map(|x| x.norm_sqr()).collect();
    par::pairwise_sum(&sq).sqrt()
}

struct PowerRun {
    lower: f64,
    vector: Vec<Complex64>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn power_run(a: &Section, start: Vec<Complex64>, max_iter: usize, tol: f64) -> PowerRun {
    let norm = l2(&start);
    let mut v: Vec<Complex64> = start.into_iter().map(|x| x / norm).collect();
    let mut lambda = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut w = a.adjoint(&a.apply(&v));
    while iterations < max_iter {
        iterations += 1;
        let next_lambda: f64 = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        let wn = l2(&w);
        if wn == 0.0 {
            lambda = 0.0;
            converged = true;
            break;
        }
        let done = (next_lambda - lambda).abs() <= tol * next_lambda.abs();
        lambda = next_lambda;
        if done {
            converged = true;
            break;
        }
        v = w.into_iter().map(|x| x / wn).collect();
        w = a.adjoint(&a.apply(&v));
    }
    let av = a.apply(&v);
    let lower = l2(&av);
    let ata = a.adjoint(&av);
    let resid: Vec<Complex64> = ata.iter().zip(&v).map(|(x, y)| x - y * lambda).collect();
    PowerRun {
        lower,
        vector: v,
        iterations,
        residual: l2(&resid),
        converged,
    }
}

/// Largest singular value of the `n x n` section by power iteration on `A* A`.
///
/// Starts from the normalized all-ones vector and once more from a seeded random
/// vector; the larger estimate wins, the first on ties.
pub fn opnorm_h2(
    eta: &SequenceSpec,
    n: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<OpNormEstimate> {
    if n == 0 || n > eta.truncation() + 1 {
        return Err(Error::TruncationMismatch {
            degree: n,
            truncation: eta.truncation(),
        });
    }
    let a = Section {
        eta: (0..n).map(|k| eta.realize(k)).collect(),
    };
    let ones = vec![Complex64::new(1.0, 0.0); n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let runs = [
        power_run(&a, ones, max_iter, tol),
        power_run(&a, random, max_iter, tol),
    ];
    let best = if runs[1].lower > runs[0].lower {
        &runs[1]
    } else {
        &runs[0]
    };
    let estimate = OpNormEstimate {
        lower: best.lower,
        method: EstimateMethod::PowerIteration,
        witness: CoeffSeq::new(best.vector.clone())?,
        iterations: runs[0].iterations + runs[1].iterations,
        residual: best.residual,
    };
    if runs.iter().all(|r| r.converged) {
        Ok(estimate)
    } else {
        Err(Error::NoConvergence(Box::new(estimate)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateFamily {
    /// Monomials `z^k` and truncated Szego kernels `1/(1 - w z)`.
    CoordinateDisks,
    /// The extremal family `f_N`.
    ExtremalFn,
    /// Seeded random complex polynomials.
    RandomPoly,
    /// `(n+1)^{-sigma}` profiles near the critical decay `sigma = 1/p`.
    PowerProfiles,
}

fn candidates(
    family: CandidateFamily,
    p: f64,
    truncation: usize,
    budget: usize,
    seed: u64,
) -> Result<Vec<CoeffSeq>> {
    let budget = budget.max(1);
    let mut out = Vec::with_capacity(budget);
    match family {
        CandidateFamily::CoordinateDisks => {
            out.push(CoeffSeq::constant(Complex64::new(1.0, 0.0)));
            let mut k = 1;
            while out.len() < budget.div_ceil(2) && k <= truncation {
                out.push(CoeffSeq::from_fn(k, |j| {
                    Complex64::new(if j == k { 1.0 } else { 0.0 }, 0.0)
                })?);
                k *= 2;
            }
            let mut j = 1;
            while out.len() < budget {
                let w = 1.0 - 2f64.powi(-j);
                if w.powi(truncation as i32) > 1e-3 {
                    break;
                }
                out.push(CoeffSeq::from_fn(truncation, |n| {
                    Complex64::new(w.powi(n as i32), 0.0)
                })?);
                j += 1;
            }
        }
        CandidateFamily::ExtremalFn => {
            let mut n = 2;
            while out.len() < budget {
                if extremal::min_truncation(n) > truncation {
                    break;
                }
                out.push(extremal::extremal_fn(p, n, truncation)?.series);
                n = (n * 3).div_ceil(2);
            }
        }
        CandidateFamily::RandomPoly => {
            let degree = truncation.min(256);
            for i in 0..budget {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                out.push(CoeffSeq::from_fn(degree, |_| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })?);
            }
        }
        CandidateFamily::PowerProfiles => {
            let lo = 1.0 / p - 0.5;
            for i in 0..budget {
                let sigma = lo + 1.0 * (i as f64 + 0.5) / budget as f64;
                out.push(CoeffSeq::from_fn(truncation, |n| {
                    Complex64::new(((n + 1) as f64).powf(-sigma), 0.0)
                })?);
            }
        }
    }
    Ok(out)
}

/// Lower bound `max ||R f||_{H^p} / ||f||_{H^p}` over a candidate family.
pub fn opnorm_lower_hp(
    eta: &SequenceSpec,
    p: f64,
    family: CandidateFamily,
    budget: usize,
    seed: u64,
) -> Result<OpNormEstimate> {
    check_p(p)?;
    let cands = candidates(family, p, eta.truncation(), budget, seed)?;
    let ratios: Result<Vec<f64>> = par::map_slice(&cands, |f| {
        let den = hp_norm_value(f, p)?;
        if den == 0.0 {
            return Ok(0.0);
        }
        Ok(hp_norm_value(&apply_rhaly(eta, f)?, p)? / den)
    })
    .into_iter()
    .collect();
    let ratios = ratios?;
    let best = par::argmax_first(&ratios).unwrap_or(0);
    Ok(OpNormEstimate {
        lower: ratios.get(best).copied().unwrap_or(0.0),
        method: EstimateMethod::FamilySearch,
        witness: cands[best].clone(),
        iterations: cands.len(),
        residual: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn lit(v: &[f64]) -> SequenceSpec {
        SequenceSpec::Literal {
            values: v.iter().map(|&x| c(x)).collect(),
            truncation: v.len() - 1,
        }
    }

    #[test]
    fn apply_examples() {
        let eta = SequenceSpec::PowerLaw {
            c: 2.0,
            s: 0.7,
            truncation: 9,
        };
        let one = CoeffSeq::from_real(&[1.0]).unwrap();
        assert_eq!(apply_rhaly(&eta, &one).unwrap(), generating_function(&eta));
        let ces = SequenceSpec::Cesaro { truncation: 3 };
        let out = apply_rhaly(&ces, &CoeffSeq::from_real(&[0., 1., 0., 0.]).unwrap()).unwrap();
        for (a, b) in out.coeffs().iter().zip([0.0, 0.5, 1.0 / 3.0, 0.25]) {
            assert_relative_eq!(a.re, b);
        }
        let zero = lit(&[0.0; 5]);
        let f = CoeffSeq::from_real(&[1., 2., 3.]).unwrap();
        assert!(apply_rhaly(&zero, &f)
            .unwrap()
            .coeffs()
            .iter()
            .all(|z| z.norm() == 0.0));
        assert!(matches!(
            apply_rhaly(&ces, &CoeffSeq::zeros(4)),
            Err(Error::TruncationMismatch {
                degree: 4,
                truncation: 3
            })
        ));
    }

    #[test]
    fn generating_function_examples() {
        let f = generating_function(&SequenceSpec::Cesaro { truncation: 5 });
        assert_relative_eq!(f.coeff(4).re, 0.2);
        assert_eq!(
            generating_function(&lit(&[1., 2., 3.])),
            CoeffSeq::from_real(&[1., 2., 3.]).unwrap()
        );
        let p = generating_function(&SequenceSpec::PowerLaw {
            c: 1.0,
            s: 2.0,
            truncation: 3,
        });
        assert_relative_eq!(p.coeff(2).re, 1.0 / 9.0);
        let g = g_function(&lit(&[1., 1., 1.]));
        assert_eq!(g, CoeffSeq::from_real(&[0., 1., 2.]).unwrap());
    }

    #[test]
    fn moment_examples() {
        let delta0 = DiscreteMeasure::new(vec![(0.0, 1.0)]).unwrap();
        let m = moments(&delta0, 4).unwrap().realize_all();
        assert_eq!(m[0].re, 1.0);
        assert!(m[1..].iter().all(|x| x.re == 0.0));
        let half = DiscreteMeasure::new(vec![(0.5, 1.0)]).unwrap();
        assert_eq!(moments(&half, 6).unwrap().realize(6).re, 2f64.powi(-6));
        let leb = moments(&DiscreteMeasure::lebesgue(1024), 64).unwrap();
        for n in 0..=64 {
            assert!((leb.realize(n).re - 1.0 / (n + 1) as f64).abs() < 1e-3);
        }
        assert!(DiscreteMeasure::new(vec![(0.5, 1.0), (0.5, 1.0)]).is_err());
        assert!(DiscreteMeasure::new(vec![(1.0, 1.0)]).is_err());
    }

    #[test]
    fn carleson_examples() {
        let radii: Vec<f64> = (1..=12).map(|j| 1.0 - 2f64.powi(-j)).collect();
        let leb = carleson_check(&DiscreteMeasure::lebesgue(1 << 14), &radii).unwrap();
        assert!((leb.constant - 1.0).abs() < 0.01 && leb.is_carleson_at_scale);
        let pt = carleson_check(
            &DiscreteMeasure::new(vec![(0.5, 0.3)]).unwrap(),
            &[0.25, 0.5, 0.75],
        )
        .unwrap();
        assert_relative_eq!(pt.constant, 0.6);
        let atoms: Vec<(f64, f64)> = (1..=20)
            .map(|j| (1.0 - 2f64.powi(-j), 2f64.powf(-j as f64 / 2.0)))
            .collect();
        let bad = carleson_check(&DiscreteMeasure::new(atoms).unwrap(), &radii).unwrap();
        assert!(!bad.is_carleson_at_scale, "{}", bad.tail_slope);
    }

    #[test]
    fn truncated_operator_examples() {
        let ces = SequenceSpec::Cesaro { truncation: 2 };
        let f = CoeffSeq::from_real(&[1., 1., 1.]).unwrap();
        assert_eq!(
            truncated_operator(&ces, 2, &f).unwrap(),
            apply_rhaly(&ces, &f).unwrap()
        );
        assert_eq!(truncated_operator(&ces, 0, &f).unwrap().coeffs(), &[c(1.0)]);
        assert_eq!(
            truncated_operator(&ces, 1, &f).unwrap().coeffs(),
            &[c(1.0), c(1.0)]
        );
        let tail = tail_spec(&ces, 1).unwrap();
        let split = truncated_operator(&ces, 1, &f)
            .unwrap()
            .add(&apply_rhaly(&tail, &f).unwrap());
        assert_eq!(split, apply_rhaly(&ces, &f).unwrap());
    }

    #[test]
    fn power_iteration_examples() {
        let e0 = lit(&[1.0, 0.0, 0.0, 0.0]);
        assert_relative_eq!(
            opnorm_h2(&e0, 4, 1000, 1e-14, 1).unwrap().lower,
            1.0,
            max_relative = 1e-12
        );
        assert_eq!(opnorm_h2(&lit(&[0.0; 4]), 4, 1000, 1e-14, 1).unwrap().lower, 0.0);
        let ces = SequenceSpec::Cesaro { truncation: 255 };
        for n in [64, 256] {
            let est = opnorm_h2(&ces, n, 100_000, 1e-15, 7).unwrap();
            let svd = oracle::dense_opnorm(&ces, n);
            assert!(
                (est.lower - svd).abs() <= 1e-8 * svd,
                "{n}: {} vs {svd}",
                est.lower
            );
            let w = &est.witness;
            let a = Section {
                eta: (0..n).map(|k| ces.realize(k)).collect(),
            };
            assert_relative_eq!(
                l2(&a.apply(w.coeffs())) / l2(w.coeffs()),
                est.lower,
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn family_search_examples() {
        let zero = lit(&[0.0; 9]);
        assert_eq!(
            opnorm_lower_hp(&zero, 2.0, CandidateFamily::CoordinateDisks, 8, 0)
                .unwrap()
                .lower,
            0.0
        );
        let e0 = lit(&[1.0, 0.0, 0.0, 0.0]);
        let est = opnorm_lower_hp(&e0, 1.5, CandidateFamily::CoordinateDisks, 8, 0).unwrap();
        assert!(est.lower >= 1.0 - 1e-12);
        assert_eq!(est.witness, CoeffSeq::from_real(&[1.0]).unwrap());
    }

    #[test]
    fn family_search_tracks_section_norm() {
        let ces = SequenceSpec::Cesaro { truncation: 1023 };
        let exact = opnorm_h2(&ces, 1024, 100_000, 1e-14, 3).unwrap().lower;
        let est = opnorm_lower_hp(&ces, 2.0, CandidateFamily::PowerProfiles, 64, 0).unwrap();
        assert!(est.lower <= exact * (1.0 + 1e-9));
        assert!(est.lower >= 0.95 * exact, "{} vs {exact}", est.lower);
    }

    #[test]
    fn spec_json() {
        let s: SequenceSpec =
            serde_json::from_str(r#"{"kind":"power_law","c":1.0,"s":1.0,"truncation":4096}"#).unwrap();
        assert_eq!(
            s,
            SequenceSpec::PowerLaw {
                c: 1.0,
                s: 1.0,
                truncation: 4096
            }
        );
        let l: SequenceSpec = serde_json::from_str(r#"{"kind":"literal","values":[1, [0, 2]]}"#).unwrap();
        assert_eq!(l.truncation(), 1);
        assert_eq!(l.realize(1), Complex64::new(0.0, 2.0));
        let back: SequenceSpec = serde_json::from_str(&serde_json::to_string(&l).unwrap()).unwrap();
        assert_eq!(back, l);
        let m: SequenceSpec = serde_json::from_str(
            r#"{"kind":"measure_moments","atoms":[[0.0,0.5],[0.5,0.5]],"truncation":3}"#,
        )
        .unwrap();
        assert_relative_eq!(m.realize(1).re, 0.25);
        let bad = serde_json::from_str::<SequenceSpec>(
            r#"{"kind":"signed","base":{"kind":"log","truncation":3},"signs":[1,1]}"#,
        );
        assert!(bad.is_err());
        assert!(serde_json::from_str::<SequenceSpec>(r#"{"kind":"cesaro","truncation":0}"#).is_err());
    }

    #[test]
    fn monotonicity_certificates() {
        assert_eq!(
            SequenceSpec::Cesaro { truncation: 4 }.monotonicity(),
            Some(Monotonicity::NonnegDecreasing)
        );
        assert_eq!(
            lit(&[0.0, 3.0, 2.0, 2.0]).monotonicity(),
            Some(Monotonicity::NonnegDecreasing)
        );
        assert_eq!(
            lit(&[0.0, -3.0, 2.0]).monotonicity(),
            Some(Monotonicity::ModulusDecreasing)
        );
        assert_eq!(lit(&[1.0, 1.0, 2.0]).monotonicity(), None);
        let signed = SequenceSpec::Signed {
            base: Box::new(SequenceSpec::Log { truncation: 3 }),
            signs: vec![1, -1, 1, -1],
        };
        assert_eq!(signed.monotonicity(), Some(Monotonicity::ModulusDecreasing));
        assert_eq!(signed.realize(3).re, -1.0 / 3.0);
    }

    fn arb_f(max_deg: usize) -> impl Strategy<Value = CoeffSeq> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=max_deg + 1)
            .prop_map(|v| CoeffSeq::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn linearity(f in arb_f(128), g in arb_f(128), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let eta = SequenceSpec::PowerLaw { c: 1.3, s: 0.9, truncation: 128 };
            let lhs = apply_rhaly(&eta, &f.scale(c(a)).add(&g.scale(c(b)))).unwrap();
            let rhs = apply_rhaly(&eta, &f).unwrap().scale(c(a)).add(&apply_rhaly(&eta, &g).unwrap().scale(c(b)));
            for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((x - y).norm() <= 1e-12 * x.norm().max(y.norm()).max(1.0));
            }
        }

        #[test]
        fn factorization_identity(f in arb_f(128), vals in prop::collection::vec(-1.0f64..1.0, 129)) {
            let eta = SequenceSpec::Literal { values: vals.iter().map(|&x| c(x)).collect(), truncation: 128 };
            let lhs = apply_rhaly(&eta, &f).unwrap().shift().derivative();
            let kernel = generating_function(&eta).shift().derivative();
            let rhs = kernel.hadamard(&f.resized(128).prefix_sums());
            prop_assert_eq!(lhs.degree(), rhs.degree());
            for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(b.norm()));
            }
        }

        #[test]
        fn section_norms_nest(s in 0.3f64..1.5) {
            let eta = SequenceSpec::PowerLaw { c: 1.0, s, truncation: 256 };
            let mut prev = 0.0;
            for n in [8, 32, 128] {
                let v = opnorm_h2(&eta, n, 200_000, 1e-14, 5).unwrap().lower;
                prop_assert!(v >= prev * (1.0 - 1e-9));
                prev = v;
            }
        }
    }
}
