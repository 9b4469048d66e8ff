//! `rhaly`: norms, block profiles, verdicts and operator-norm estimates for
//! Rhaly-type operators on spaces of analytic functions.

mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rhaly_core::classifier::{
    classify_bergman, classify_hardy, decreasing_rule, h1_necessary, profile_levels,
};
use rhaly_core::constructions::{construct_upsilon, w_kernel, PolygonalProfile, W_KERNEL_BOUND};
use rhaly_core::lipschitz::{block_profile, classify_membership, derivative_profile, Thresholds};
use rhaly_core::norms::{
    bergman_norm_with, default_grid_points, dirichlet_norm, hp_norm_with, xqp_exponent, xqp_norm,
};
use rhaly_core::quadrature::{RadialGrid, DEFAULT_PER_LEVEL};
use rhaly_core::rhaly::{opnorm_h2, opnorm_lower_hp, CandidateFamily};
use rhaly_core::suite;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_SUITE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "rhaly",
    version,
    about = "Rhaly operators on Hardy and Bergman spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for JSON and CSV outputs, in addition to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Norm of a series in H^p, A^p_alpha, D^p_alpha or X_{q,p}.
    Norm(NormArgs),
    /// Dyadic block profile and its Lipschitz class.
    Profile(ProfileArgs),
    /// Boundedness or compactness verdict for a sequence.
    Classify(ClassifyArgs),
    /// Operator norm estimate for a finite section.
    Opnorm(OpnormArgs),
    /// Random-sign counterexample with |eta_n| = 1/n.
    Counterexample(CounterexampleArgs),
    /// Kernel bound for a piecewise-linear profile.
    BasisCheck(BasisArgs),
    /// Full acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Args, Debug, Serialize)]
struct Source {
    /// Sequence spec, as a JSON file path or inline JSON. Its generating function is used.
    #[arg(long, conflicts_with = "coeffs")]
    spec: Option<String>,
    /// Taylor coefficients, as a JSON file path or inline JSON.
    #[arg(long)]
    coeffs: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct Thresh {
    #[arg(long, default_value_t = 0.05)]
    eps_slope: f64,
    #[arg(long, default_value_t = 0.5)]
    eps_tail: f64,
}

impl Thresh {
    fn get(&self) -> Thresholds {
        Thresholds {
            eps_slope: self.eps_slope,
            eps_tail: self.eps_tail,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum NormSpace {
    Hardy,
    Bergman,
    Dirichlet,
    Xqp,
}

#[derive(Args, Debug, Serialize)]
struct NormArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value_t = NormSpace::Hardy)]
    space: NormSpace,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    q: Option<f64>,
    /// Points on each circle.
    #[arg(long = "grid-M")]
    grid_m: Option<usize>,
    /// Dyadic levels of the radial grid.
    #[arg(long = "grid-J")]
    grid_j: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
struct ProfileArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: Source,
    #[arg(long)]
    p: f64,
    /// Smoothness; defaults to 1/p.
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of dyadic blocks.
    #[arg(long)]
    levels: Option<u32>,
    /// Use derivative blocks instead of plain ones.
    #[arg(long)]
    derivative: bool,
    #[command(flatten)]
    #[serde(flatten)]
    thresholds: Thresh,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ClassSpace {
    Hardy,
    Bergman,
    /// Necessary conditions on H^1.
    H1,
    /// Rule for monotone sequences.
    Decreasing,
}

#[derive(Args, Debug, Serialize)]
struct ClassifyArgs {
    #[arg(long)]
    spec: String,
    #[arg(long, value_enum, default_value_t = ClassSpace::Hardy)]
    space: ClassSpace,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Overrides the truncation of the spec.
    #[arg(long)]
    trunc: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    thresholds: Thresh,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Family {
    CoordinateDisks,
    ExtremalFn,
    RandomPoly,
    PowerProfiles,
}

impl From<Family> for CandidateFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::CoordinateDisks => CandidateFamily::CoordinateDisks,
            Family::ExtremalFn => CandidateFamily::ExtremalFn,
            Family::RandomPoly => CandidateFamily::RandomPoly,
            Family::PowerProfiles => CandidateFamily::PowerProfiles,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct OpnormArgs {
    #[arg(long)]
    spec: String,
    /// Section size.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-15)]
    tol: f64,
    /// Candidate family for p != 2.
    #[arg(long, value_enum, default_value_t = Family::PowerProfiles)]
    family: Family,
    #[arg(long, default_value_t = 64)]
    budget: usize,
}

#[derive(Args, Debug, Serialize)]
struct CounterexampleArgs {
    #[arg(long, default_value_t = 1.5)]
    p: f64,
    /// Number of dyadic blocks; the result has degree 2^K - 1.
    #[arg(long = "levels", short = 'K', default_value_t = 10)]
    levels: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Random sign vectors tried per block beyond the exhaustive range.
    #[arg(long, default_value_t = 4096)]
    budget: usize,
}

#[derive(Args, Debug, Serialize)]
struct BasisArgs {
    /// Knots `[[x, y], ...]` as a JSON file path or inline JSON.
    #[arg(long, conflicts_with = "tent")]
    profile: Option<String>,
    /// Use the tent min(x, 4 - x).
    #[arg(long)]
    tent: bool,
    #[arg(long)]
    n: usize,
    /// Angles on the circle; defaults to 32 n.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct SuiteArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a Command,
    result: Value,
}

/// A command's result plus side files and the exit code it asks for.
struct Output {
    result: Value,
    files: Vec<(String, String)>,
    exit: u8,
}

impl Output {
    fn json<T: Serialize>(v: &T) -> Result<Self> {
        Ok(Self {
            result: serde_json::to_value(v)?,
            files: Vec::new(),
            exit: 0,
        })
    }

    fn with_file(mut self, name: &str, body: String) -> Self {
        self.files.push((name.to_string(), body));
        self
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Norm(_) => "norm",
        Command::Profile(_) => "profile",
        Command::Classify(_) => "classify",
        Command::Opnorm(_) => "opnorm",
        Command::Counterexample(_) => "counterexample",
        Command::BasisCheck(_) => "basis-check",
        Command::Suite(_) => "suite",
    }
}

fn radial_grid(degree: usize, exponent: f64, levels: Option<u32>) -> Result<RadialGrid> {
    Ok(match levels {
        Some(j) => RadialGrid::dyadic(j, DEFAULT_PER_LEVEL, exponent)?,
        None => RadialGrid::for_degree(degree, exponent)?,
    })
}

fn cmd_norm(a: &NormArgs) -> Result<Output> {
    let f = input::series(&a.source)?;
    let m = a.grid_m.unwrap_or_else(|| default_grid_points(f.degree()));
    let report = match a.space {
        NormSpace::Hardy => hp_norm_with(&f, a.p, m)?,
        NormSpace::Bergman => {
            let grid = radial_grid(f.degree(), a.alpha, a.grid_j)?;
            bergman_norm_with(&f, a.p, a.alpha, &grid, m)?
        }
        NormSpace::Dirichlet => {
            let grid = radial_grid(f.degree(), a.alpha, a.grid_j)?;
            dirichlet_norm(&f, a.p, a.alpha, &grid)?
        }
        NormSpace::Xqp => {
            let q = a.q.context("--q is required for the mixed-norm space")?;
            let grid = radial_grid(f.degree(), xqp_exponent(q, a.p), a.grid_j)?;
            xqp_norm(&f, q, a.p, &grid)?
        }
    };
    Output::json(&report)
}

fn cmd_profile(a: &ProfileArgs) -> Result<Output> {
    let f = input::series(&a.source)?;
    let alpha = a.alpha.unwrap_or(1.0 / a.p);
    let levels = a.levels.unwrap_or_else(|| profile_levels(f.degree()));
    let profile = if a.derivative {
        derivative_profile(&f, a.p, alpha, levels)?
    } else {
        block_profile(&f, a.p, alpha, levels)?
    };
    let verdict = classify_membership(&profile, a.thresholds.get());
    let csv = profile.to_csv();
    Ok(Output::json(&verdict)?.with_file("profile.csv", csv))
}

fn cmd_classify(a: &ClassifyArgs) -> Result<Output> {
    let mut eta = input::spec(&a.spec)?;
    if let Some(t) = a.trunc {
        eta = eta.with_truncation(t)?;
    }
    let t = a.thresholds.get();
    match a.space {
        ClassSpace::Hardy => Output::json(&classify_hardy(&eta, a.p, t)?),
        ClassSpace::Bergman => Output::json(&classify_bergman(&eta, a.p, a.alpha, t)?),
        ClassSpace::Decreasing => Output::json(&decreasing_rule(&eta, a.p)?),
        ClassSpace::H1 => {
            let top = eta.truncation().div_ceil(2).max(1);
            let ns: Vec<usize> = (2..usize::BITS)
                .map(|j| 1usize << j)
                .take_while(|&n| n <= top && 2 * n - 1 <= eta.truncation())
                .collect();
            Output::json(&h1_necessary(&eta, &ns)?)
        }
    }
}

fn cmd_opnorm(a: &OpnormArgs) -> Result<Output> {
    let eta = input::spec(&a.spec)?;
    if a.p == 2.0 {
        return Output::json(&opnorm_h2(&eta, a.n, a.max_iter, a.tol, a.seed)?);
    }
    let eta = eta.with_truncation(a.n.saturating_sub(1).max(1))?;
    Output::json(&opnorm_lower_hp(&eta, a.p, a.family.into(), a.budget, a.seed)?)
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Result<Output> {
    let u = construct_upsilon(a.p, a.levels, a.budget, a.seed)?;
    let csv = u.blocks_csv();
    let spec = serde_json::to_string_pretty(&u.spec)?;
    Ok(Output::json(&u)?
        .with_file("upsilon_spec.json", spec + "\n")
        .with_file("blocks.csv", csv))
}

fn cmd_basis_check(a: &BasisArgs) -> Result<Output> {
    let psi = match (&a.profile, a.tent) {
        (_, true) => PolygonalProfile::tent(),
        (Some(src), false) => input::profile(src)?,
        (None, false) => bail!("give --profile or --tent"),
    };
    let grid = a.grid.unwrap_or(32 * a.n);
    let ratio = w_kernel(&psi, a.n, grid)?;
    Output::json(&json!({
        "n": a.n,
        "grid": grid.max(16 * a.n),
        "lipschitz_constant": psi.lipschitz_constant(),
        "sup_ratio": ratio,
        "bound": W_KERNEL_BOUND,
        "within_bound": ratio <= W_KERNEL_BOUND,
    }))
}

fn cmd_suite(a: &SuiteArgs) -> Result<Output> {
    let report = if a.only.is_empty() {
        suite::run_suite()
    } else {
        let ctx = suite::Context::new();
        let criteria: Vec<suite::Outcome> = a.only.iter().map(|&id| suite::run_criterion(id, &ctx)).collect();
        suite::SuiteReport {
            version: rhaly_core::VERSION.to_string(),
            seed: suite::SUITE_SEED,
            passed: criteria.iter().all(|o| o.passed),
            criteria,
        }
    };
    for o in &report.criteria {
        eprintln!("{}", o.line());
    }
    let mut out = Output::json(&report)?;
    if !report.passed {
        out.exit = EXIT_SUITE;
    }
    Ok(out)
}

fn write_files(dir: &Path, name: &str, body: &str, files: &[(String, String)]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join(format!("{name}.json")), body)?;
    for (file, content) in files {
        std::fs::write(dir.join(file), content)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    let out = match &cli.command {
        Command::Norm(a) => cmd_norm(a),
        Command::Profile(a) => cmd_profile(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Opnorm(a) => cmd_opnorm(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::BasisCheck(a) => cmd_basis_check(a),
        Command::Suite(a) => cmd_suite(a),
    }?;
    let name = command_name(&cli.command);
    let envelope = Envelope {
        version: rhaly_core::VERSION,
        command: name,
        config: &cli.command,
        result: out.result,
    };
    let body = serde_json::to_string_pretty(&envelope)? + "\n";
    if let Some(dir) = &cli.out {
        write_files(dir, name, &body, &out.files)?;
    }
    print!("{body}");
    Ok(out.exit)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("RHALY_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("RHALY_THREADS={v} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<rhaly_core::Error>() {
        Some(err) if err.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = match e.downcast_ref::<rhaly_core::Error>() {
                Some(err) => err.code(),
                None => "input",
            };
            eprintln!("error [{code}]: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
