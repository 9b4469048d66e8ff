//! Random signs: Rademacher functions, empirical Khinchine constants, and the
//! signed logarithm whose Rhaly operator fails to be bounded below `p = 2`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::coeff::{inverse_fft, CoeffSeq};
use crate::error::{check_p, Error, Result};
use crate::norms::default_grid_points;
use crate::par;
use crate::rhaly::{generating_function, SequenceSpec};

/// `r_k(t)`: `+1` on `[2j/2^{k+1}, (2j+1)/2^{k+1})`, `-1` on the other halves.
pub fn rademacher_value(k: u32, t: f64) -> Result<i8> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Parameter(format!("t = {t} outside [0, 1)")));
    }
    let cell = (t * 2f64.powi(k as i32 + 1)).floor() as u64;
    Ok(if cell.is_multiple_of(2) { 1 } else { -1 })
}

/// Largest sign-vector length that is enumerated exhaustively.
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy)]
enum Signs {
    /// All patterns with the first sign fixed to `+1`; `|S|` is even in `s`.
    Exhaustive,
    Random {
        seed: u64,
        stream: u64,
        count: usize,
    },
}

impl Signs {
    fn count(&self, len: usize) -> usize {
        match *self {
            Signs::Exhaustive => 1usize << (len - 1),
            Signs::Random { count, .. } => count,
        }
    }

    fn pattern(&self, len: usize, i: usize) -> Vec<i8> {
        match *self {
            Signs::Exhaustive => (0..len)
                .map(|j| if j > 0 && (i >> (j - 1)) & 1 == 1 { -1 } else { 1 })
                .collect(),
            Signs::Random { seed, stream, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((stream << 40) | i as u64);
                (0..len)
                    .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
                    .collect()
            }
        }
    }
}

/// `|sum_j s_j c_j e^{i j theta}|^p` over a sign family, on `grid` angles.
struct Sweep {
    /// Sum over sign vectors, per angle.
    per_angle: Vec<f64>,
    /// Sum over sign vectors at `theta = 0`, by direct summation.
    at_identity: f64,
    /// Angular mean for each sign vector.
    per_pattern: Vec<f64>,
    count: usize,
}

const CHUNK: usize = 64;

fn sweep(c: &[Complex64], p: f64, signs: Signs, grid: usize) -> Sweep {
    let len = c.len();
    let count = signs.count(len);
    let chunks = count.div_ceil(CHUNK);
    let parts = par::map_range(chunks, |ci| {
        let mut acc = vec![0.0; grid];
        let mut ident = 0.0;
        let mut pows = Vec::with_capacity(CHUNK);
        let mut buf = vec![Complex64::new(0.0, 0.0); grid];
        for i in ci * CHUNK..((ci + 1) * CHUNK).min(count) {
            let s = signs.pattern(len, i);
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            let mut direct = Complex64::new(0.0, 0.0);
            for j in 0..len {
                buf[j] = c[j] * s[j] as f64;
                direct += buf[j];
            }
            ident += direct.norm().powf(p);
            inverse_fft(&mut buf);
            let vals: Vec<f64> = buf.iter().map(|v| v.norm().powf(p)).collect();
            for (a, v) in acc.iter_mut().zip(&vals) {
                *a += v;
            }
            pows.push(par::pairwise_sum(&vals) / grid as f64);
        }
        (acc, ident, pows)
    });
    let mut per_angle = vec![0.0; grid];
    let mut at_identity = 0.0;
    let mut per_pattern = Vec::with_capacity(count);
    for (acc, ident, pows) in parts {
        for (a, v) in per_angle.iter_mut().zip(acc) {
            *a += v;
        }
        at_identity += ident;
        per_pattern.extend(pows);
    }
    Sweep {
        per_angle,
        at_identity,
        per_pattern,
        count,
    }
}

/// Empirical Khinchine constants for `c`. The sign average of `|sum s_j c_j|^p`
/// is divided by `(sum |c_j|^2)^{p/2}`; `lower_const` and `upper_const` are the
/// extremes of that ratio over the rotations `c_j e^{i j theta}`, which is the
/// family entering `H^p` norms of randomly signed polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RademacherReport {
    /// Index of the last coefficient, so `m + 1` signs.
    pub m: usize,
    pub p: f64,
    pub lower_const: f64,
    pub upper_const: f64,
    /// The ratio for `c` itself.
    pub identity_const: f64,
    pub exact: bool,
    pub samples: usize,
}

fn summarize(c: &[Complex64], p: f64, sw: &Sweep, exact: bool) -> RademacherReport {
    let l2: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    let scale = l2.powf(p / 2.0) * sw.count as f64;
    let (lo, hi) = sw
        .per_angle
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    RademacherReport {
        m: c.len() - 1,
        p,
        lower_const: lo / scale,
        upper_const: hi / scale,
        identity_const: sw.at_identity / scale,
        exact,
        samples: sw.count,
    }
}

/// Exact for `m + 1 <= 20` signs, seeded Monte Carlo with `samples` draws beyond.
pub fn khinchine_report(c: &[Complex64], p: f64, samples: usize, seed: u64) -> Result<RademacherReport> {
    check_p(p)?;
    if c.is_empty() || c.iter().all(|x| x.norm() == 0.0) {
        return Err(Error::Parameter("coefficient vector must be nonzero".into()));
    }
    let exact = c.len() <= EXACT_LIMIT;
    let signs = if exact {
        Signs::Exhaustive
    } else {
        Signs::Random {
            seed,
            stream: 0,
            count: samples.max(1),
        }
    };
    let sw = sweep(c, p, signs, default_grid_points(c.len() - 1));
    Ok(summarize(c, p, &sw, exact))
}

/// Block lengths up to this are searched exhaustively.
pub const EXHAUSTIVE_BLOCK: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpsilonBlock {
    pub k: u32,
    /// First index of the block, `2^k`.
    pub start: usize,
    pub len: usize,
    /// `||sum_j s_j z^j||_{H^p}` for the chosen signs.
    pub norm: f64,
    /// `A^{1/p} sqrt(len)`, reached by some sign vector whenever `A` is the
    /// Khinchine lower constant of the searched family.
    pub threshold: f64,
    pub khinchine_lower: f64,
    pub exhaustive: bool,
    pub candidates: usize,
}

/// `sum_k` of the dyadic blocks of `log 1/(1-z)` with signs chosen block by
/// block to make the derivative block large in `H^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Upsilon {
    pub p: f64,
    pub levels: u32,
    pub seed: u64,
    pub budget_per_block: usize,
    pub blocks: Vec<UpsilonBlock>,
    /// `eta_n = signs[n] / n`; this is a `signed` spec over a `log` base.
    pub spec: SequenceSpec,
}

impl Upsilon {
    pub fn signs(&self) -> &[i8] {
        match &self.spec {
            SequenceSpec::Signed { signs, .. } => signs,
            _ => unreachable!("upsilon spec is always signed"),
        }
    }

    pub fn series(&self) -> CoeffSeq {
        generating_function(&self.spec)
    }

    pub fn blocks_csv(&self) -> String {
        let mut out = String::from("k,N,norm,threshold,khinchine_lower\n");
        for b in &self.blocks {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e}",
                b.k, b.start, b.norm, b.threshold, b.khinchine_lower
            );
        }
        out
    }
}

pub const MAX_UPSILON_LEVELS: u32 = 14;

/// Builds blocks `k = 0..levels`, so the result has degree `2^levels - 1`.
pub fn construct_upsilon(p: f64, levels: u32, budget_per_block: usize, seed: u64) -> Result<Upsilon> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::Parameter(format!("p = {p} outside [1, 2)")));
    }
    if levels == 0 || levels > MAX_UPSILON_LEVELS {
        return Err(Error::Parameter(format!("levels = {levels} outside 1..=14")));
    }
    let degree = (1usize << levels) - 1;
    let mut signs = vec![1i8; degree + 1];
    let mut blocks = Vec::with_capacity(levels as usize);
    for k in 0..levels {
        let start = 1usize << k;
        let len = start;
        let exhaustive = len <= EXHAUSTIVE_BLOCK;
        let family = if exhaustive {
            Signs::Exhaustive
        } else {
            Signs::Random {
                seed,
                stream: k as u64 + 1,
                count: budget_per_block.max(1),
            }
        };
        let ones = vec![Complex64::new(1.0, 0.0); len];
        let sw = sweep(&ones, p, family, default_grid_points(len - 1));
        let report = summarize(&ones, p, &sw, exhaustive);
        let best = par::argmax_first(&sw.per_pattern).expect("at least one candidate");
        let norm = sw.per_pattern[best].powf(1.0 / p);
        let threshold = report.lower_const.powf(1.0 / p) * (len as f64).sqrt();
        if norm < threshold * (1.0 - 1e-12) {
            return Err(Error::BlockBudgetExhausted { k, threshold });
        }
        signs[start..start + len].copy_from_slice(&family.pattern(len, best));
        blocks.push(UpsilonBlock {
            k,
            start,
            len,
            norm,
            threshold,
            khinchine_lower: report.lower_const,
            exhaustive,
            candidates: sw.count,
        });
    }
    let spec = SequenceSpec::Signed {
        base: Box::new(SequenceSpec::Log { truncation: degree }),
        signs,
    };
    spec.validate()?;
    Ok(Upsilon {
        p,
        levels,
        seed,
        budget_per_block,
        blocks,
        spec,
    })
}
