//! The acceptance battery. Every criterion runs at fixed truncations, seeds and
//! tolerances and reports each individual check, so a failing run says which
//! number missed which bound.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classifier::{
    classify_bergman, classify_hardy, decreasing_rule, dpp_embedding_check, h1_necessary, standard_corpus,
    weighted_ladder, Conclusion, Theorem, GROWTH_SLOPE,
};
use crate::coeff::CoeffSeq;
use crate::constructions::extremal::{bergman_gn, beta_values, delta_values, min_truncation};
use crate::constructions::kernel::{polygonal_psi, w_kernel, PolygonalProfile, W_KERNEL_BOUND};
use crate::constructions::rademacher::{construct_upsilon, khinchine_report, Upsilon};
use crate::error::Result;
use crate::lipschitz::{block_profile, classify_membership, loglog_slope, Membership, Thresholds};
use crate::norms::{
    bergman_norm, bergman_norm_value, beta, beta_sup, default_ladder, dyadic_radii, hp_norm_value,
    mean_mp_value,
};
use crate::oracle;
use crate::par;
use crate::quadrature::RadialGrid;
use crate::rhaly::{generating_function, opnorm_h2, SequenceSpec};

pub const CRITERIA: u32 = 12;

/// Seed shared by every randomized criterion.
pub const SUITE_SEED: u64 = 7;

/// Degree `2^13 - 1`, enough for a depth-12 block profile.
const DEEP: usize = (1 << 13) - 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Outcome {
    /// `criterion N: PASS name`.
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2}: {} {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name
        )
    }

    /// The checks that failed, one per line.
    pub fn failures(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("  {}: {}", c.label, c.value))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub version: String,
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<Outcome>,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, label: impl Into<String>, pass: bool, value: Value) {
        self.0.push(Check {
            label: label.into(),
            pass,
            value,
        });
    }
}

/// Shared state across criteria; the counterexample is built once.
#[derive(Default)]
pub struct Context {
    upsilon: OnceLock<std::result::Result<Upsilon, String>>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    fn upsilon(&self) -> Result<&Upsilon> {
        self.upsilon
            .get_or_init(|| construct_upsilon(1.5, 10, 4096, SUITE_SEED).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| crate::Error::Parameter(e.clone()))
    }
}

pub fn criterion_name(id: u32) -> &'static str {
    match id {
        1 => "cesaro boundedness",
        2 => "compact example",
        3 => "counterexample reproduction",
        4 => "signed log kernel bounded for p >= 2",
        5 => "lipschitz kernel bound",
        6 => "l2 operator norm of the cesaro section",
        7 => "inequality suites",
        8 => "monotone rule",
        9 => "bergman mirror",
        10 => "khinchine exactness",
        11 => "partial sum convergence",
        12 => "determinism across thread counts",
        _ => "unknown",
    }
}

/// Runs one criterion. Errors from the numerics become a failed check.
pub fn run_criterion(id: u32, ctx: &Context) -> Outcome {
    let mut checks = Checks::default();
    let res = match id {
        1 => cesaro(&mut checks),
        2 => compact(&mut checks),
        3 => counterexample(ctx, &mut checks),
        4 => signed_log_bounded(ctx, &mut checks),
        5 => kernel_bound(&mut checks),
        6 => section_norms(&mut checks),
        7 => inequalities(&mut checks),
        8 => monotone(&mut checks),
        9 => bergman(&mut checks),
        10 => khinchine(&mut checks),
        11 => convergence(&mut checks),
        12 => determinism(&mut checks),
        _ => Err(crate::Error::Parameter(format!("no criterion {id}"))),
    };
    if let Err(e) = res {
        checks.add(
            "error",
            false,
            json!({"code": e.code(), "message": e.to_string()}),
        );
    }
    let passed = !checks.0.is_empty() && checks.0.iter().all(|c| c.pass);
    Outcome {
        id,
        name: criterion_name(id).to_string(),
        passed,
        checks: checks.0,
    }
}

pub fn run_suite() -> SuiteReport {
    let ctx = Context::new();
    let criteria: Vec<Outcome> = (1..=CRITERIA).map(|id| run_criterion(id, &ctx)).collect();
    SuiteReport {
        version: crate::VERSION.to_string(),
        seed: SUITE_SEED,
        passed: criteria.iter().all(|o| o.passed),
        criteria,
    }
}

fn t() -> Thresholds {
    Thresholds::default()
}

fn band(vals: &[f64]) -> f64 {
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi / lo
}

fn power(s: f64) -> SequenceSpec {
    SequenceSpec::PowerLaw {
        c: 1.0,
        s,
        truncation: DEEP,
    }
}

fn cesaro(c: &mut Checks) -> Result<()> {
    let spec = SequenceSpec::Cesaro { truncation: DEEP };
    let f = generating_function(&spec);
    for p in [1.5, 2.0, 3.0] {
        let prof = block_profile(&f, p, 1.0 / p, 12)?;
        c.add(
            format!("p={p} |slope| < 0.1"),
            prof.slope.abs() < 0.1,
            json!(prof.slope),
        );
        c.add(
            format!("p={p} max/median < 2"),
            prof.spread() < 2.0,
            json!(prof.spread()),
        );
        let v = classify_hardy(&spec, p, t())?;
        c.add(
            format!("p={p} classify_hardy = Bounded"),
            v.conclusion == Conclusion::Bounded,
            json!({"conclusion": v.conclusion, "theorem": v.theorem}),
        );
        if p == 2.0 {
            let worst = prof
                .entries
                .iter()
                .map(|&(n, v)| {
                    let want = oracle::cesaro_block_p2(n).sqrt();
                    (v - want).abs() / want
                })
                .fold(0.0, f64::max);
            c.add(
                "p=2 entries match closed form to 1e-8",
                worst <= 1e-8,
                json!(worst),
            );
        }
    }
    Ok(())
}

fn compact(c: &mut Checks) -> Result<()> {
    let spec = power(1.2);
    let f = generating_function(&spec);
    let mv = classify_membership(&block_profile(&f, 2.0, 0.5, 12)?, t());
    c.add(
        "membership = LittleLambda",
        mv.space == Membership::LittleLambda,
        json!({"membership": mv.space, "slope": mv.profile.slope}),
    );
    c.add(
        "tail_ratio < 0.2",
        mv.profile.tail_ratio < 0.2,
        json!(mv.profile.tail_ratio),
    );
    let corpus = standard_corpus(2.0, DEEP, SUITE_SEED)?;
    let r = dpp_embedding_check(&spec, 2.0, 2.0, &corpus, &[64, 256, 1024])?;
    let decreasing = r.tail.windows(2).all(|w| w[1].1 < w[0].1);
    c.add(
        "tail operator ratios strictly decrease",
        decreasing,
        json!(r.tail),
    );
    c.add(
        "embedding constants finite",
        r.dpp_constant.is_finite() && r.xqp_constant.is_finite(),
        json!({"dpp": r.dpp_constant, "xqp": r.xqp_constant}),
    );
    Ok(())
}

fn counterexample(ctx: &Context, c: &mut Checks) -> Result<()> {
    let u = ctx.upsilon()?;
    for b in &u.blocks {
        let ones = vec![Complex64::new(1.0, 0.0); b.len];
        let a = khinchine_report(&ones, 1.5, 4096, SUITE_SEED)?.lower_const;
        let bound = 0.5 * a * 2f64.powf(b.k as f64 / 2.0);
        c.add(
            format!("k={} block norm >= 0.5 A 2^(k/2)", b.k),
            b.norm >= bound,
            json!({"norm": b.norm, "bound": bound, "A": a}),
        );
    }
    let v = classify_hardy(&u.spec, 1.5, t())?;
    c.add(
        "classify_hardy(p=1.5) = NotBounded",
        v.conclusion == Conclusion::NotBounded,
        json!({"conclusion": v.conclusion, "theorem": v.theorem}),
    );
    let ns: Vec<usize> = (2..=9).map(|j| 1usize << j).collect();
    let h1 = h1_necessary(&u.spec, &ns)?;
    c.add(
        "H1 block bound O(log N) breached",
        h1.verdict.conclusion == Conclusion::NotBounded && h1.verdict.theorem == Theorem::Thm6iii,
        json!({"block_slope": h1.block_slope, "block_ratios": h1.block_ratios}),
    );
    Ok(())
}

fn signed_log_bounded(ctx: &Context, c: &mut Checks) -> Result<()> {
    let u = ctx.upsilon()?;
    for p in [2.0, 3.0] {
        let v = classify_hardy(&u.spec, p, t())?;
        c.add(
            format!("p={p} classifies bounded"),
            v.conclusion.is_bounded(),
            json!({"conclusion": v.conclusion, "theorem": v.theorem}),
        );
    }
    let f = u.series();
    let radii = dyadic_radii(default_ladder(f.degree()));
    let betas: Result<Vec<f64>> = radii.iter().map(|&r| beta(&f, 2.0, 0.5, r)).collect();
    let betas = betas?;
    c.add(
        "beta(F,2,1/2) max/min < 3 over dyadic radii",
        band(&betas) < 3.0,
        json!(betas),
    );
    Ok(())
}

fn kernel_bound(c: &mut Checks) -> Result<()> {
    let limit = W_KERNEL_BOUND * (1.0 + 1e-3);
    let mut cases: Vec<(String, PolygonalProfile, usize)> =
        vec![("tent".into(), PolygonalProfile::tent(), 32)];
    for n in [16, 64, 256] {
        cases.push((
            format!("cesaro beta N={n}"),
            polygonal_psi(&beta_values(2.0, n)?, n)?,
            n,
        ));
    }
    for n in [64, 256] {
        cases.push((
            format!("bergman delta N={n}"),
            polygonal_psi(&delta_values(2.0, 0.0, n)?, n)?,
            n,
        ));
    }
    for (label, psi, n) in cases {
        let r = w_kernel(&psi, n, 32 * n)?;
        c.add(format!("{label} sup ratio <= 14"), r <= limit, json!(r));
    }
    Ok(())
}

fn section_norms(c: &mut Checks) -> Result<()> {
    let spec = SequenceSpec::Cesaro { truncation: 4095 };
    let mut vals = Vec::new();
    for n in [64, 256, 1024, 4096] {
        let est = opnorm_h2(&spec, n, 200_000, 1e-15, SUITE_SEED)?;
        if n <= 256 {
            let want = oracle::dense_opnorm(&spec, n);
            let err = (est.lower - want).abs() / want;
            c.add(
                format!("N={n} matches dense SVD to 1e-8"),
                err <= 1e-8,
                json!({"power": est.lower, "svd": want}),
            );
        }
        vals.push(est.lower);
    }
    c.add(
        "strictly increasing in N",
        vals.windows(2).all(|w| w[1] > w[0]),
        json!(vals),
    );
    c.add("all below 2", vals.iter().all(|&v| v < 2.0), json!(vals));
    c.add("at least 1.8 at N=4096", vals[3] >= 1.8, json!(vals[3]));
    Ok(())
}

const TRIALS: usize = 200;
const SLACK: f64 = 1e-9;

fn random_poly(rng: &mut ChaCha8Rng) -> Result<CoeffSeq> {
    let d = rng.random_range(1..=64usize);
    CoeffSeq::from_fn(d, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn trial_rng(stream: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    rng.set_stream((stream << 32) | i as u64);
    rng
}

/// Largest excess `lhs - rhs` over the trials.
fn worst(excess: Result<Vec<f64>>) -> Result<f64> {
    Ok(excess?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn inequalities(c: &mut Checks) -> Result<()> {
    let idx: Vec<usize> = (0..TRIALS).collect();
    let conv = worst(
        par::map_slice(&idx, |&i| {
            let mut rng = trial_rng(1, i);
            let (f, g) = (random_poly(&mut rng)?, random_poly(&mut rng)?);
            let p = rng.random_range(1.0..4.0);
            let r = rng.random_range(0.05..0.95);
            let lhs = mean_mp_value(&f.hadamard(&g), r, p)?;
            Ok(lhs - hp_norm_value(&f, 1.0)? * mean_mp_value(&g, r, p)?)
        })
        .into_iter()
        .collect(),
    )?;
    c.add("M_p(r, f*g) <= |f|_H1 M_p(r, g)", conv <= SLACK, json!(conv));
    let square = worst(
        par::map_slice(&idx, |&i| {
            let mut rng = trial_rng(2, i);
            let (f, g) = (random_poly(&mut rng)?, random_poly(&mut rng)?);
            let p = rng.random_range(1.0..4.0);
            let r: f64 = rng.random_range(0.05..0.95);
            let lhs = mean_mp_value(&f.hadamard(&g), r * r, p)?;
            Ok(lhs - mean_mp_value(&f, r, 1.0)? * mean_mp_value(&g, r, p)?)
        })
        .into_iter()
        .collect(),
    )?;
    c.add(
        "M_p(r^2, f*g) <= M_1(r, f) M_p(r, g)",
        square <= SLACK,
        json!(square),
    );
    let hardy = worst(
        par::map_slice(&idx, |&i| {
            let mut rng = trial_rng(3, i);
            let f = random_poly(&mut rng)?;
            let lhs: f64 = f
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, a)| a.norm() / (n + 1) as f64)
                .sum();
            Ok(lhs - std::f64::consts::PI * hp_norm_value(&f, 1.0)?)
        })
        .into_iter()
        .collect(),
    )?;
    c.add("sum |a_n|/(n+1) <= pi |f|_H1", hardy <= 1e-8, json!(hardy));
    // the implicit constant is only fitted and reported
    let mut fitted = Vec::new();
    for (k, (p, alpha)) in [(1.5, 0.0), (2.0, 0.0), (3.0, 1.0)].into_iter().enumerate() {
        let grid = RadialGrid::for_degree(64, alpha)?;
        let ratios: Result<Vec<f64>> = par::map_slice(&idx, |&i| {
            let mut rng = trial_rng(4 + k as u64, i);
            let (f, g) = (random_poly(&mut rng)?, random_poly(&mut rng)?);
            let num = bergman_norm_value(&f.hadamard(&g), p, alpha, &grid)?;
            Ok(num / (hp_norm_value(&f, p)? * bergman_norm_value(&g, p, alpha, &grid)?))
        })
        .into_iter()
        .collect();
        let cst = ratios?.into_iter().fold(0.0, f64::max);
        fitted.push(json!({"p": p, "alpha": alpha, "C": cst}));
        c.add(
            format!("bergman convolution constant finite p={p} alpha={alpha}"),
            cst.is_finite(),
            json!(cst),
        );
    }
    c.add("fitted bergman constants", true, Value::Array(fitted));
    Ok(())
}

fn monotone(c: &mut Checks) -> Result<()> {
    for s in [0.8, 1.0, 1.2] {
        let spec = power(s);
        let want_bounded = s >= 1.0;
        for p in [1.5, 2.0, 3.0] {
            let v = classify_hardy(&spec, p, t())?;
            let ok = if want_bounded {
                v.conclusion.is_bounded()
            } else {
                v.conclusion == Conclusion::NotBounded
            };
            c.add(
                format!("s={s} p={p} classify_hardy"),
                ok,
                json!({"conclusion": v.conclusion, "theorem": v.theorem}),
            );
            let d = decreasing_rule(&spec, p)?;
            c.add(
                format!("s={s} p={p} decreasing rule agrees"),
                d.conclusion.is_bounded() == v.conclusion.is_bounded()
                    && d.conclusion != Conclusion::Inconclusive,
                json!({"conclusion": d.conclusion, "theorem": d.theorem}),
            );
        }
    }
    let ladder: Vec<(f64, f64)> = weighted_ladder(&power(0.8))
        .into_iter()
        .filter(|&(n, _)| n <= 4096.0)
        .collect();
    let slope = loglog_slope(&ladder[ladder.len() / 2..]);
    c.add(
        "s=0.8 n eta_n trend detected by n=4096",
        slope >= GROWTH_SLOPE,
        json!(slope),
    );
    Ok(())
}

fn bergman(c: &mut Checks) -> Result<()> {
    for s in [0.8, 1.0, 1.2] {
        let v = classify_bergman(&power(s), 2.0, 0.0, t())?;
        let ok = if s >= 1.0 {
            v.conclusion.is_bounded()
        } else {
            v.conclusion == Conclusion::NotBounded
        };
        c.add(
            format!("s={s} classify_bergman"),
            ok,
            json!({"conclusion": v.conclusion, "theorem": v.theorem}),
        );
    }
    let mut norms = Vec::new();
    for n in [16, 32, 64, 128, 256] {
        let g = bergman_gn(2.0, 0.0, n, min_truncation(n))?;
        let rep = bergman_norm(&g, 2.0, 0.0, &RadialGrid::for_degree(g.degree(), 0.0)?)?;
        c.add(
            format!("N={n} norm not flagged"),
            !rep.flagged(),
            json!(rep.refinement_delta),
        );
        norms.push(rep.value);
    }
    c.add("|g_N| max/min < 3", band(&norms) < 3.0, json!(norms));
    Ok(())
}

fn khinchine(c: &mut Checks) -> Result<()> {
    let random_coeffs = |m: usize, stream: u64| {
        let mut rng = trial_rng(10 + stream, m);
        (0..=m)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect::<Vec<_>>()
    };
    let mut worst2 = 0.0f64;
    for m in 0..=12 {
        let r = khinchine_report(&random_coeffs(m, 0), 2.0, 1, SUITE_SEED)?;
        worst2 = worst2
            .max((r.lower_const - 1.0).abs())
            .max((r.upper_const - 1.0).abs())
            .max((r.identity_const - 1.0).abs());
    }
    c.add(
        "p=2 constants equal 1 for m <= 12",
        worst2 <= 1e-12,
        json!(worst2),
    );
    let mut worst4 = 0.0f64;
    for m in 0..=6 {
        let cf = random_coeffs(m, 1);
        let r = khinchine_report(&cf, 4.0, 1, SUITE_SEED)?;
        let l2: f64 = cf.iter().map(|x| x.norm_sqr()).sum();
        let id = oracle::sign_moment_even(&cf, 4) / (l2 * l2);
        let (lo, hi) = oracle::rotated_fourth_moment_range(&cf, crate::norms::default_grid_points(m));
        worst4 = worst4
            .max((r.identity_const - id).abs() / id)
            .max((r.lower_const - lo / (l2 * l2)).abs() / r.lower_const)
            .max((r.upper_const - hi / (l2 * l2)).abs() / r.upper_const);
    }
    c.add(
        "p=4 matches the moment expansion for m <= 6",
        worst4 <= 1e-12,
        json!(worst4),
    );
    Ok(())
}

fn convergence(c: &mut Checks) -> Result<()> {
    let sweep = |f: &CoeffSeq| -> Result<Vec<f64>> {
        let radii = dyadic_radii(default_ladder(f.degree()));
        par::map_slice(&[8usize, 32, 128, 512], |&n| {
            beta_sup(&f.sub(&f.partial_sum(n)), 2.0, 0.5, &radii)
        })
        .into_iter()
        .collect()
    };
    let fast = sweep(&generating_function(&power(1.5)))?;
    c.add(
        "decreasing over N",
        fast.windows(2).all(|w| w[1] < w[0]),
        json!(fast),
    );
    c.add(
        "final < 0.05 initial",
        fast[3] < 0.05 * fast[0],
        json!(fast[3] / fast[0]),
    );
    let log = sweep(&CoeffSeq::log_kernel(DEEP))?;
    c.add(
        "log kernel stays above 0.5 initial",
        log[3] >= 0.5 * log[0],
        json!(log),
    );
    Ok(())
}

/// Re-runs two cheap criteria on a single-thread and an eight-thread pool and
/// compares the serialized outcomes. The full-report comparison lives with the
/// command-line tests.
fn determinism(c: &mut Checks) -> Result<()> {
    let ctx = Context::new();
    let run = || {
        [5, 10]
            .iter()
            .map(|&id| serde_json::to_string(&run_criterion(id, &ctx)).expect("outcome serializes"))
            .collect::<Vec<_>>()
    };
    #[cfg(feature = "parallel")]
    let (a, b) = {
        let pool = |n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool")
        };
        (pool(1).install(run), pool(8).install(run))
    };
    #[cfg(not(feature = "parallel"))]
    let (a, b) = (run(), run());
    c.add(
        "criteria 5 and 10 byte-identical on 1 and 8 threads",
        a == b,
        json!(a.len()),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_lines() {
        assert_eq!(criterion_name(13), "unknown");
        let o = run_criterion(13, &Context::new());
        assert!(!o.passed);
        assert_eq!(o.checks[0].value["code"], "constructions.parameter");
        assert!(o.line().contains("FAIL"));
    }

    #[test]
    fn kernel_criterion_passes() {
        let o = run_criterion(5, &Context::new());
        assert!(o.passed, "{}", o.failures());
        assert_eq!(o.checks.len(), 6);
    }
}
