//! Boundedness and compactness verdicts for `R_(eta)`.
//!
//! Each verdict cites the result it rests on and carries the numbers that
//! decided it. Where the theory leaves a gap (Hardy spaces with `p > 2` between
//! the necessary and the sufficient condition, and `H^1` in general) the answer
//! is `Inconclusive` rather than a guess.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coeff::CoeffSeq;
use crate::constructions::extremal::{extremal_series, min_truncation};
use crate::error::{Error, Result};
use crate::lipschitz::{
    block_profile, classify_membership, loglog_slope, max_levels, Membership, MembershipVerdict, Thresholds,
};
use crate::norms::{dirichlet_norm_value, hp_norm_value, xqp_exponent, xqp_norm_value};
use crate::par;
use crate::quadrature::RadialGrid;
use crate::rhaly::{apply_rhaly, generating_function, tail_spec, Monotonicity, SequenceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    Bounded,
    Compact,
    Unbounded,
    NotBounded,
    Inconclusive,
}

impl Conclusion {
    pub fn is_bounded(self) -> bool {
        matches!(self, Conclusion::Bounded | Conclusion::Compact)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    Thm1a,
    Thm1b,
    Thm1c,
    Thm2a,
    Thm2c,
    /// Between the necessary condition at `p` and the sufficient one below `p`.
    Thm1Gap,
    Thm3,
    Thm7,
    Thm4i,
    Thm4iii,
    Prop8,
    Thm6i,
    Thm6ii,
    Thm6iii,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Hardy { p: f64 },
    Bergman { p: f64, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub name: String,
    pub value: Value,
}

impl Evidence {
    fn new(name: impl Into<String>, value: Value) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub conclusion: Conclusion,
    pub theorem: Theorem,
    pub space: Space,
    pub evidence: Vec<Evidence>,
    /// Conclusions implied by the main one; `Compact` always lists `Bounded`.
    pub also: Vec<Conclusion>,
}

impl Verdict {
    fn new(conclusion: Conclusion, theorem: Theorem, space: Space, evidence: Vec<Evidence>) -> Self {
        let also = if conclusion == Conclusion::Compact {
            vec![Conclusion::Bounded]
        } else {
            Vec::new()
        };
        Self {
            conclusion,
            theorem,
            space,
            evidence,
            also,
        }
    }
}

/// Deepest profile the classifier asks for.
pub const PROFILE_LEVELS: u32 = 12;

/// Profile depth used for a generating function of this degree.
pub fn profile_levels(degree: usize) -> u32 {
    max_levels(degree).min(PROFILE_LEVELS)
}

fn membership(f: &CoeffSeq, p: f64, thresholds: Thresholds) -> Result<MembershipVerdict> {
    let profile = block_profile(f, p, 1.0 / p, profile_levels(f.degree()))?;
    Ok(classify_membership(&profile, thresholds))
}

fn membership_evidence(label: &str, mv: &MembershipVerdict) -> Evidence {
    Evidence::new(
        label,
        json!({
            "membership": mv.space,
            "p": mv.profile.p,
            "slope": mv.profile.slope,
            "tail_ratio": mv.profile.tail_ratio,
            "spread": mv.profile.spread(),
            "entries": mv.profile.entries,
        }),
    )
}

fn check_open_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::PRange(p))
    }
}

/// `q = 2 + (p-2) k / 8`, `k = 1..=7`.
pub fn q_grid(p: f64) -> Vec<f64> {
    (1..=7).map(|k| 2.0 + (p - 2.0) * k as f64 / 8.0).collect()
}

fn from_membership(m: Membership, bounded: Theorem, compact: Theorem) -> (Conclusion, Theorem) {
    match m {
        Membership::BigLambda => (Conclusion::Bounded, bounded),
        Membership::LittleLambda => (Conclusion::Compact, compact),
        Membership::Neither => (Conclusion::NotBounded, bounded),
        Membership::Inconclusive => (Conclusion::Inconclusive, bounded),
    }
}

/// Verdict on `H^p`, `1 < p < infinity`, from the mean Lipschitz class of `F_(eta)`.
pub fn classify_hardy(eta: &SequenceSpec, p: f64, thresholds: Thresholds) -> Result<Verdict> {
    check_open_p(p)?;
    let f = generating_function(eta);
    let space = Space::Hardy { p };
    if p <= 2.0 {
        let mv = membership(&f, p, thresholds)?;
        let (c, t) = from_membership(mv.space, Theorem::Thm1a, Theorem::Thm2a);
        return Ok(Verdict::new(
            c,
            t,
            space,
            vec![membership_evidence("profile_at_p", &mv)],
        ));
    }
    let qs = q_grid(p);
    let profiles: Result<Vec<MembershipVerdict>> =
        qs.iter().map(|&q| membership(&f, q, thresholds)).collect();
    let profiles = profiles?;
    let mut evidence: Vec<Evidence> = Vec::new();
    for (q, mv) in qs.iter().zip(&profiles) {
        evidence.push(membership_evidence(&format!("profile_at_q={q}"), mv));
        match mv.space {
            Membership::BigLambda => {
                return Ok(Verdict::new(Conclusion::Bounded, Theorem::Thm1c, space, evidence))
            }
            Membership::LittleLambda => {
                return Ok(Verdict::new(Conclusion::Compact, Theorem::Thm2c, space, evidence))
            }
            _ => {}
        }
    }
    let at_p = membership(&f, p, thresholds)?;
    evidence.push(membership_evidence("profile_at_p", &at_p));
    if at_p.space == Membership::Neither {
        Ok(Verdict::new(
            Conclusion::NotBounded,
            Theorem::Thm1b,
            space,
            evidence,
        ))
    } else {
        Ok(Verdict::new(
            Conclusion::Inconclusive,
            Theorem::Thm1Gap,
            space,
            evidence,
        ))
    }
}

/// Verdict on `A^p_alpha`. Necessity is only claimed for `alpha < 2p - 2`.
pub fn classify_bergman(eta: &SequenceSpec, p: f64, alpha: f64, thresholds: Thresholds) -> Result<Verdict> {
    check_open_p(p)?;
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(Error::AlphaRange(alpha));
    }
    let theorem = if alpha == 0.0 {
        Theorem::Thm3
    } else {
        Theorem::Thm7
    };
    let f = generating_function(eta);
    let mv = membership(&f, p, thresholds)?;
    let (mut c, _) = from_membership(mv.space, theorem, theorem);
    if c == Conclusion::NotBounded && alpha >= 2.0 * p - 2.0 {
        c = Conclusion::Inconclusive;
    }
    Ok(Verdict::new(
        c,
        theorem,
        Space::Bergman { p, alpha },
        vec![membership_evidence("profile_at_p", &mv)],
    ))
}

/// Slope above which a trend counts as growth.
pub const GROWTH_SLOPE: f64 = 0.1;
/// Slope below which a trend counts as bounded.
pub const FLAT_SLOPE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Evidence {
    pub ns: Vec<usize>,
    /// `N^{-1} sum_{n<=N} n |eta_n|`.
    pub sum_ratios: Vec<f64>,
    pub sum_slope: f64,
    /// `||(Delta_N F)'||_{H^1} / log N`.
    pub block_ratios: Vec<f64>,
    pub block_slope: f64,
    /// `||S_N F'||_{H^1}`.
    pub derivative_norms: Vec<f64>,
    pub derivative_converged: bool,
    pub verdict: Verdict,
}

fn tail_half(ns: &[usize], vals: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = ns.iter().zip(vals).map(|(&n, &v)| (n as f64, v)).collect();
    loglog_slope(&pts[(pts.len() / 2).min(pts.len().saturating_sub(2))..])
}

/// Increments of a convergent sequence shrink; a logarithmically divergent one
/// has roughly constant increments.
fn looks_convergent(vals: &[f64]) -> bool {
    if vals.len() < 3 {
        return false;
    }
    let inc: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let last = *inc.last().unwrap();
    let first = inc[0];
    let scale = vals.last().unwrap().abs().max(f64::MIN_POSITIVE);
    last <= 0.25 * first && last / scale < 0.01
}

/// Necessary conditions for boundedness on `H^1` and the sufficient condition
/// `F' in H^1` for compactness. `ns` must be powers of two with `2N - 1` within
/// the truncation.
pub fn h1_necessary(eta: &SequenceSpec, ns: &[usize]) -> Result<H1Evidence> {
    let trunc = eta.truncation();
    if ns.is_empty() {
        return Err(Error::Parameter("no block sizes given".into()));
    }
    if let Some(&n) = ns
        .iter()
        .find(|&&n| n < 2 || !n.is_power_of_two() || 2 * n - 1 > trunc)
    {
        return Err(Error::Parameter(format!(
            "block size {n} must be a power of two with 2N - 1 <= {trunc}"
        )));
    }
    let f = generating_function(eta);
    let df = f.derivative();
    let sum_ratios: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let terms: Vec<f64> = (0..=n).map(|k| k as f64 * eta.realize(k).norm()).collect();
            par::pairwise_sum(&terms) / n as f64
        })
        .collect();
    let block_ratios: Result<Vec<f64>> = par::map_slice(ns, |&n| {
        let block = f.slice(n, 2 * n - 1)?.derivative().window(n - 1, 2 * n - 2)?;
        Ok(hp_norm_value(&block, 1.0)? / (n as f64).ln())
    })
    .into_iter()
    .collect();
    let block_ratios = block_ratios?;
    let derivative_norms: Result<Vec<f64>> = par::map_slice(ns, |&n| hp_norm_value(&df.partial_sum(n), 1.0))
        .into_iter()
        .collect();
    let derivative_norms = derivative_norms?;
    let sum_slope = tail_half(ns, &sum_ratios);
    let block_slope = tail_half(ns, &block_ratios);
    let derivative_converged = looks_convergent(&derivative_norms);
    let evidence = vec![
        Evidence::new("sum_ratio_slope", json!(sum_slope)),
        Evidence::new("block_ratio_slope", json!(block_slope)),
        Evidence::new("derivative_converged", json!(derivative_converged)),
    ];
    let space = Space::Hardy { p: 1.0 };
    let verdict = if sum_slope >= GROWTH_SLOPE {
        Verdict::new(Conclusion::NotBounded, Theorem::Thm6ii, space, evidence)
    } else if block_slope >= GROWTH_SLOPE {
        Verdict::new(Conclusion::NotBounded, Theorem::Thm6iii, space, evidence)
    } else if derivative_converged {
        Verdict::new(Conclusion::Compact, Theorem::Thm6i, space, evidence)
    } else {
        Verdict::new(Conclusion::Inconclusive, Theorem::Thm6i, space, evidence)
    };
    Ok(H1Evidence {
        ns: ns.to_vec(),
        sum_ratios,
        sum_slope,
        block_ratios,
        block_slope,
        derivative_norms,
        derivative_converged,
        verdict,
    })
}

/// `(n, n |eta_n|)` at `n = 2, 4, ..., 2^J` with `2^J <= truncation`.
pub fn weighted_ladder(eta: &SequenceSpec) -> Vec<(f64, f64)> {
    let top = usize::BITS - 1 - eta.truncation().leading_zeros();
    (1..=top)
        .map(|j| {
            let n = 1usize << j;
            (n as f64, n as f64 * eta.realize(n).norm())
        })
        .collect()
}

/// Verdict for monotone sequences from the growth of `n |eta_n|` alone.
pub fn decreasing_rule(eta: &SequenceSpec, p: f64) -> Result<Verdict> {
    let cert = eta.monotonicity().ok_or(Error::NotMonotone)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::PRange(p));
    }
    let ladder = weighted_ladder(eta);
    let slope = loglog_slope(&ladder[ladder.len() / 2..]);
    let evidence = vec![
        Evidence::new("n_eta_n", json!(ladder)),
        Evidence::new("slope", json!(slope)),
        Evidence::new("certificate", json!(cert)),
    ];
    let space = Space::Hardy { p };
    let grows = slope >= GROWTH_SLOPE;
    let flat = slope <= FLAT_SLOPE;
    let v = match cert {
        Monotonicity::NonnegDecreasing if p > 1.0 && grows => {
            Verdict::new(Conclusion::NotBounded, Theorem::Thm4iii, space, evidence)
        }
        Monotonicity::NonnegDecreasing if p > 1.0 && flat => {
            Verdict::new(Conclusion::Bounded, Theorem::Thm4iii, space, evidence)
        }
        _ if p <= 2.0 && grows => Verdict::new(Conclusion::NotBounded, Theorem::Prop8, space, evidence),
        _ if p >= 2.0 && flat => Verdict::new(Conclusion::Bounded, Theorem::Thm4i, space, evidence),
        Monotonicity::NonnegDecreasing => {
            Verdict::new(Conclusion::Inconclusive, Theorem::Thm4iii, space, evidence)
        }
        Monotonicity::ModulusDecreasing => {
            Verdict::new(Conclusion::Inconclusive, Theorem::Prop8, space, evidence)
        }
    };
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DppReport {
    pub p: f64,
    pub q: f64,
    pub corpus_size: usize,
    /// `max ||R f||_{D^p_{p-1}} / ||f||_{H^p}` over the corpus.
    pub dpp_constant: f64,
    /// `max ||R f||_{X_{q,p}} / ||f||_{H^p}` over the corpus.
    pub xqp_constant: f64,
    /// `(N, max ||(R - R_N) f||_{X_{q,p}} / ||f||_{H^p})`.
    pub tail: Vec<(usize, f64)>,
}

fn corpus_max<F>(corpus: &[CoeffSeq], p: f64, image: F) -> Result<f64>
where
    F: Fn(&CoeffSeq) -> Result<f64> + Sync + Send,
{
    let ratios: Result<Vec<f64>> = par::map_slice(corpus, |f| {
        let den = hp_norm_value(f, p)?;
        if den == 0.0 {
            Ok(0.0)
        } else {
            Ok(image(f)? / den)
        }
    })
    .into_iter()
    .collect();
    Ok(ratios?.into_iter().fold(0.0, f64::max))
}

/// Fitted embedding constants for `R : H^p -> D^p_{p-1}` and `H^p -> X_{q,p}`,
/// plus the decay of the tail operators `R - R_N`.
pub fn dpp_embedding_check(
    eta: &SequenceSpec,
    p: f64,
    q: f64,
    corpus: &[CoeffSeq],
    tail_ns: &[usize],
) -> Result<DppReport> {
    check_open_p(p)?;
    let trunc = eta.truncation();
    let corpus: Vec<CoeffSeq> = corpus.iter().filter(|f| f.degree() <= trunc).cloned().collect();
    let gd = RadialGrid::for_degree(trunc, p - 1.0)?;
    let gx = RadialGrid::for_degree(trunc, xqp_exponent(q, p))?;
    let dpp_constant = corpus_max(&corpus, p, |f| {
        dirichlet_norm_value(&apply_rhaly(eta, f)?, p, p - 1.0, &gd)
    })?;
    let xqp_constant = corpus_max(&corpus, p, |f| xqp_norm_value(&apply_rhaly(eta, f)?, q, p, &gx))?;
    let mut tail = Vec::with_capacity(tail_ns.len());
    for &n in tail_ns {
        let t = tail_spec(eta, n)?;
        let v = corpus_max(&corpus, p, |f| xqp_norm_value(&apply_rhaly(&t, f)?, q, p, &gx))?;
        tail.push((n, v));
    }
    Ok(DppReport {
        p,
        q,
        corpus_size: corpus.len(),
        dpp_constant,
        xqp_constant,
        tail,
    })
}

/// Number of random polynomials in [`standard_corpus`].
pub const CORPUS_RANDOM: usize = 20;
/// Their degree.
pub const CORPUS_DEGREE: usize = 256;

/// `{f_N : N = 2, 4, ..., 64}` (those fitting the truncation) plus
/// [`CORPUS_RANDOM`] seeded random complex polynomials of degree
/// `min(256, truncation)`.
pub fn standard_corpus(p: f64, truncation: usize, seed: u64) -> Result<Vec<CoeffSeq>> {
    let mut out = Vec::new();
    for n in [2, 4, 8, 16, 32, 64] {
        let t = min_truncation(n);
        if t <= truncation {
            out.push(extremal_series(p, n, t)?);
        }
    }
    let degree = truncation.min(CORPUS_DEGREE);
    for i in 0..CORPUS_RANDOM {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        out.push(CoeffSeq::from_fn(degree, |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })?);
    }
    Ok(out)
}
