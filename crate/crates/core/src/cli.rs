//! The `orient-boost` command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bounds::{self, BoundsError};
use crate::counting::{self, CopyEvaluator, CountingError};
use crate::designs::{self, Decomposition, DesignError};
use crate::orientation::{self, Orientation, OrientationError, PatternKind};
use crate::report::{self, Budgets, CsvRecord, DesignSpec, ExperimentConfig, PatternSpec, ReportError, Sidecar};
use crate::sampler::{BaseTournaments, BlockSampler, SampleSeed, SamplerError};
use crate::tournament::{Tournament, TournamentError, TournamentJson};

pub const THREADS_ENV: &str = "ORIENT_BOOST_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Orientation(#[from] OrientationError),
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Counting(#[from] CountingError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Orientation(_) => "orientation",
            CliError::Tournament(_) => "tournament",
            CliError::Design(DesignError::InfeasibleAtDeskScale(_)) => "infeasible_at_desk_scale",
            CliError::Design(_) => "design",
            CliError::Sampler(_) => "sampler",
            CliError::Counting(_) => "counting",
            CliError::Bounds(_) => "bounds",
            CliError::Report(_) => "io",
            CliError::Usage(_) => "usage",
            CliError::Verify(_) => "verify",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string() })
    }
}

#[derive(Parser, Debug)]
#[command(name = "orient-boost", version, about = "Expected copies of sparse orientations in block-randomised regular tournaments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Orientation statistics and classification.
    Stats(StatsArgs),
    /// Build an adjusted t-decomposition of K_n and validate it.
    Decompose(DecomposeArgs),
    /// Validate a decomposition file.
    Validate(ValidateArgs),
    /// Draw block-randomised tournaments.
    Sample(SampleArgs),
    /// Count labelled copies of a pattern in a tournament.
    Count(CountArgs),
    /// Monte Carlo estimate of the expected number of labelled copies.
    Estimate(EstimateArgs),
    /// Exact expected number of labelled copies (n <= 9).
    ExactExpect(ExactArgs),
    /// Least odd t for given eps and k, with rho and delta.
    Solve(SolveArgs),
    /// The k-regular boost product at a given t.
    BoostFormula(BoostArgs),
    /// Run the built-in verification suites.
    Verify(VerifyArgs),
    /// Build, estimate (or compute exactly), compare to the baseline, write CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PatternArgs {
    /// Orientation file (JSON `{"n", "edges"}` or `n` then `u v` lines).
    #[arg(long, conflicts_with = "pattern")]
    pub input: Option<PathBuf>,
    /// Generated pattern: cycle, path, matching or k_regular_random.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Vertex count of the generated pattern (defaults to the design's n).
    #[arg(long)]
    pub n: Option<usize>,
    /// Degree for k_regular_random.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct DesignArgs {
    /// Decomposition JSON file; built from --n/--t otherwise.
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Block size (odd).
    #[arg(long)]
    pub t: Option<usize>,
    /// Regular tournament on t vertices used as R (JSON or hex rows); circulant by default.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Node budget for the backtracking searches.
    #[arg(long, default_value_t = designs::DEFAULT_NODE_BUDGET)]
    pub search_budget: u64,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    /// Seed for k_regular_random.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also check (eps, k)-consistency; eps as decimal or fraction.
    #[arg(long, requires = "kmax")]
    pub eps: Option<String>,
    /// Degree bound for the consistency check.
    #[arg(long)]
    pub kmax: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    /// Write the decomposition JSON here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = designs::DEFAULT_NODE_BUDGET)]
    pub search_budget: u64,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TournamentFormat {
    Json,
    Hex,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// First sample index.
    #[arg(long, default_value_t = 0)]
    pub index: u64,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: TournamentFormat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CountMethod {
    Brute,
    Dp,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    /// Tournament file (JSON edge list or hex rows).
    #[arg(long)]
    pub tournament: PathBuf,
    /// `dp` needs a cycle or path pattern.
    #[arg(long, value_enum, default_value = "brute")]
    pub method: CountMethod,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// eps in (0, 1], decimal or fraction.
    #[arg(long)]
    pub eps: String,
    #[arg(long)]
    pub k: u64,
}

#[derive(Args, Debug)]
pub struct BoostArgs {
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub t: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Relabel,
    Identities,
    Oracle,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Load everything from a config or sidecar JSON; only `--output` still applies.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "cycle")]
    pub pattern: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub design: DesignArgs,
    /// Sum over all n! placements instead of sampling.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV path; the sidecar goes next to it with a .json extension. Stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    Ok(report::read_to_string(path)?)
}

pub fn parse_tournament(text: &str) -> Result<Tournament, TournamentError> {
    if text.trim_start().starts_with('{') {
        let doc: TournamentJson = serde_json::from_str(text).map_err(|e| TournamentError::Parse(e.to_string()))?;
        Tournament::from_json(&doc)
    } else {
        Tournament::from_hex_rows(text)
    }
}

/// Uses `seed` or draws one, reporting a drawn seed on stderr.
fn resolve_seed(seed: Option<u64>) -> (u64, bool) {
    match seed {
        Some(s) => (s, false),
        None => {
            let s = rand::random::<u64>();
            eprintln!("{}", json!({ "generated_seed": s }));
            (s, true)
        }
    }
}

fn load_pattern(p: &PatternArgs, default_n: Option<usize>, seed: u64) -> Result<(Orientation, String), CliError> {
    if let Some(path) = &p.input {
        let h = Orientation::parse(&read(path)?)?;
        return Ok((h, path.display().to_string()));
    }
    let name = p.pattern.as_deref().ok_or_else(|| CliError::Usage("give --input or --pattern".into()))?;
    let kind: PatternKind = name.parse()?;
    let n = p.n.or(default_n).ok_or_else(|| CliError::Usage("--pattern needs --n".into()))?;
    let h = orientation::make_pattern(kind, n, p.k, Some(seed))?;
    Ok((h, kind.to_string()))
}

/// An adjusted decomposition of `K_n` for odd `n`; for even `n` the extension of one on `n - 1`.
pub fn build_design(n: usize, t: usize, budget: u64) -> Result<Decomposition, DesignError> {
    if n.is_multiple_of(2) {
        let odd = designs::adjusted_decomposition_traced(n - 1, t, budget)?.decomposition;
        designs::extend_to_even(&odd)
    } else {
        Ok(designs::adjusted_decomposition_traced(n, t, budget)?.decomposition)
    }
}

fn load_design(d: &DesignArgs, n: Option<usize>) -> Result<Decomposition, CliError> {
    if let Some(path) = &d.design {
        let text = read(path)?;
        return Decomposition::from_json(&text)
            .map_err(|source| CliError::Report(ReportError::Json { path: path.clone(), source }));
    }
    let n = n.ok_or_else(|| CliError::Usage("give --design or --n".into()))?;
    let t = d.t.ok_or_else(|| CliError::Usage("give --design or --t".into()))?;
    Ok(build_design(n, t, d.search_budget)?)
}

fn load_bases(base: Option<&Path>, t: usize) -> Result<BaseTournaments, CliError> {
    match base {
        Some(path) => Ok(BaseTournaments::with_r(parse_tournament(&read(path)?)?)?),
        None => Ok(BaseTournaments::circulant(t)?),
    }
}

fn delta_of(t: usize) -> BigRational {
    BigRational::new(1.into(), (4 * t as i64 - 8).into())
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn out(text: &str) {
    use std::io::Write;
    let mut w = std::io::stdout().lock();
    if let Err(e) = w.write_all(text.as_bytes()).and_then(|_| w.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("{}", json!({ "error": "io", "message": e.to_string() }));
        std::process::exit(1);
    }
}

fn print(v: &Value) {
    out(&format!("{}\n", serde_json::to_string_pretty(v).expect("json value serialises")));
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stats(a) => {
            let seed = a.seed.unwrap_or(0);
            let (h, name) = load_pattern(&a.pattern, None, seed)?;
            let s = orientation::stats(&h);
            let mut out = json!({ "source": name, "n": h.n(), "stats": s, "margin": s.margin(), "classification": orientation::classify(&h) });
            if let (Some(eps), Some(k)) = (&a.eps, a.kmax) {
                let e = bounds::parse_rational(eps)?;
                out["consistent"] = json!(orientation::consistency_check(&h, &e, k));
            }
            print(&out);
        }
        Command::Decompose(a) => {
            let d = build_design(a.n, a.t, a.search_budget)?;
            let r = designs::validate(&d);
            if let Some(path) = &a.output {
                report::write_atomic(path, d.to_json().as_bytes())?;
            }
            print(&json!({ "design": d.describe(), "blocks": d.blocks.len(), "validation": r, "passed": r.passed() }));
            if !r.passed() {
                return Err(CliError::Verify(r.first_violation().map(|v| v.to_string()).unwrap_or_default()));
            }
        }
        Command::Validate(a) => {
            let text = read(&a.input)?;
            let d = Decomposition::from_json(&text)
                .map_err(|source| CliError::Report(ReportError::Json { path: a.input.clone(), source }))?;
            let r = designs::validate(&d);
            print(&json!({ "design": d.describe(), "validation": r, "passed": r.passed() }));
            if !r.passed() {
                return Err(CliError::Verify(r.first_violation().map(|v| v.to_string()).unwrap_or_default()));
            }
        }
        Command::Sample(a) => {
            let d = load_design(&a.design, a.n)?;
            let bases = load_bases(a.design.base.as_deref(), d.t)?;
            let sampler = BlockSampler::new(&d, &bases)?;
            let (seed, _) = resolve_seed(a.seed);
            for i in a.index..a.index + a.count {
                let t = sampler.sample(SampleSeed::new(seed, i));
                match a.format {
                    TournamentFormat::Json => out(&format!("{}\n", serde_json::to_string(&t.to_json()).expect("serialises"))),
                    TournamentFormat::Hex => out(&t.to_hex_rows()),
                }
            }
        }
        Command::Count(a) => {
            let t = parse_tournament(&read(&a.tournament)?)?;
            let (h, name) = load_pattern(&a.pattern, Some(t.n()), a.seed.unwrap_or(0))?;
            let labeled = match a.method {
                CountMethod::Brute => counting::count_labeled_copies(&h, &t)?,
                CountMethod::Dp => match a.pattern.pattern.as_deref() {
                    Some("cycle") => counting::count_hamilton_cycles(&t)? * h.n(),
                    Some("path") => counting::count_hamilton_paths(&t)?,
                    _ => return Err(CliError::Usage("--method dp needs --pattern cycle or path".into())),
                },
            };
            let kind = a.pattern.pattern.as_deref().and_then(|k| k.parse().ok());
            let unlabeled = kind
                .and_then(|k| orientation::known_automorphisms(k, h.n()))
                .map(|aut| (&labeled / aut).to_string());
            print(&json!({ "pattern": name, "n": h.n(), "labeled": labeled.to_string(), "unlabeled": unlabeled }));
        }
        Command::Estimate(a) => {
            let d = load_design(&a.design, a.pattern.n)?;
            let (seed, generated) = resolve_seed(a.seed);
            let (h, _) = load_pattern(&a.pattern, Some(d.n), seed)?;
            let bases = load_bases(a.design.base.as_deref(), d.t)?;
            let ev = CopyEvaluator::new(&h, &d, &bases)?;
            let r = counting::estimate_expected_copies(&ev, a.samples, seed)?;
            print(&json!({
                "design": d.describe(), "t": d.t, "delta": delta_of(d.t).to_string(),
                "base_r": bases.r().to_hex_rows(), "seed_generated": generated, "report": r,
            }));
        }
        Command::ExactExpect(a) => {
            let d = load_design(&a.design, a.pattern.n)?;
            let (h, _) = load_pattern(&a.pattern, Some(d.n), a.seed.unwrap_or(0))?;
            let bases = load_bases(a.design.base.as_deref(), d.t)?;
            let s = counting::exact_summary(&CopyEvaluator::new(&h, &d, &bases)?)?;
            let ratio = s.ratio();
            print(&json!({
                "design": d.describe(), "t": d.t, "delta": delta_of(d.t).to_string(),
                "base_r": bases.r().to_hex_rows(),
                "expected": s.expected.to_string(), "baseline": s.baseline.to_string(),
                "ratio": ratio.to_string(), "ratio_f64": ratio.to_f64(),
                "c_avg": s.c.to_string(), "i_avg": s.i.to_string(), "f_avg": s.f.to_string(), "g_avg": s.g.to_string(),
                "typical_fraction": s.typical_fraction(), "closed_form_mismatches": s.closed_form_mismatches,
            }));
        }
        Command::Solve(a) => {
            let eps = bounds::parse_rational(&a.eps)?;
            let s = bounds::solve_parameters(&eps, a.k)?;
            out(&format!("{}\n", serde_json::to_string(&s).expect("serialises")));
        }
        Command::BoostFormula(a) => {
            let v = bounds::kreg_boost_formula(a.k, a.t)?;
            print(&json!({ "k": a.k, "t": a.t, "value": v, "limit": (a.k as f64).exp() }));
        }
        Command::Verify(a) => verify(a.suite)?,
        Command::Experiment(a) => experiment(a)?,
    }
    Ok(())
}

fn verify(suite: Suite) -> Result<(), CliError> {
    let want = |s: Suite| suite == Suite::All || suite == s;
    let mut results = Vec::new();
    if want(Suite::Relabel) {
        let mut bases = vec![];
        for t in [3, 5, 7, 9] {
            bases.push((format!("circulant({t})"), Tournament::circulant(t)?));
        }
        bases.push(("quadratic_residue(7)".into(), Tournament::quadratic_residue(7)?));
        for (name, r) in bases {
            let rep = bounds::verify_relabel_probabilities(&r)?;
            results.push(json!({ "suite": "relabel", "case": name, "passed": rep.passed(), "report": rep }));
        }
    }
    if want(Suite::Identities) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut bad = 0;
        for _ in 0..1000 {
            let n = rng.random_range(2..=50);
            let p = rng.random_range(0.02..0.4);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random_bool(p) {
                        edges.push(if rng.random::<bool>() { (u, v) } else { (v, u) });
                    }
                }
            }
            let s = orientation::stats(&Orientation::new(n, edges)?);
            if s.plus != 3 * s.f + s.c + s.g || s.minus != 2 * s.g + s.i {
                bad += 1;
            }
        }
        results.push(json!({ "suite": "identities", "case": "1000 random orientations", "passed": bad == 0 }));
    }
    if want(Suite::Oracle) {
        let d = designs::steiner_triple_system(7)?;
        let bases = BaseTournaments::circulant(3)?;
        let support = crate::sampler::collapse_support(BlockSampler::new(&d, &bases)?.enumerate_support(1 << 20)?);
        for kind in [PatternKind::Cycle, PatternKind::Path] {
            let h = orientation::make_pattern(kind, 7, None, None)?;
            let exact = counting::exact_expected_copies(&CopyEvaluator::new(&h, &d, &bases)?)?;
            let mut oracle = BigRational::from_integer(0.into());
            for (t, w) in &support {
                oracle += w * BigRational::from_integer(counting::count_labeled_copies(&h, t)?.into());
            }
            results.push(json!({
                "suite": "oracle", "case": format!("{kind} on STS(7)"), "passed": exact == oracle,
                "exact": exact.to_string(), "oracle": oracle.to_string(),
            }));
        }
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|r| r["passed"] != json!(true))
        .map(|r| format!("{}: {}", r["suite"], r["case"]))
        .collect();
    print(&json!({ "results": results, "passed": failed.is_empty() }));
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed.join(", ")))
    }
}

fn experiment(a: ExperimentArgs) -> Result<(), CliError> {
    let (config, generated) = match &a.config {
        Some(path) => {
            let text = read(path)?;
            let mut c = ExperimentConfig::from_json(&text)
                .map_err(|source| CliError::Report(ReportError::Json { path: path.clone(), source }))?;
            if a.output.is_some() {
                c.output = a.output.clone();
            }
            (c, false)
        }
        None => {
            let t = a.design.t.ok_or_else(|| CliError::Usage("experiment needs --t or --config".into()))?;
            let n = a.n.ok_or_else(|| CliError::Usage("experiment needs --n or --config".into()))?;
            let (seed, generated) = resolve_seed(a.seed);
            let c = ExperimentConfig {
                pattern: PatternSpec { kind: a.pattern.clone(), n, k: a.k },
                design: DesignSpec { n, t, file: a.design.design.clone() },
                base: a.design.base.clone(),
                samples: a.samples,
                seed,
                exact: a.exact,
                output: a.output.clone(),
                budgets: Budgets { search_nodes: a.design.search_budget, ..Budgets::default() },
            };
            (c, generated)
        }
    };
    config.check()?;

    let d = match &config.design.file {
        Some(path) => Decomposition::from_json(&read(path)?)
            .map_err(|source| CliError::Report(ReportError::Json { path: path.clone(), source }))?,
        None => build_design(config.design.n, config.design.t, config.budgets.search_nodes)?,
    };
    let kind = config.pattern.kind()?;
    let h = orientation::make_pattern(kind, config.pattern.n, config.pattern.k, Some(config.seed))?;
    let bases = load_bases(config.base.as_deref(), d.t)?;
    let ev = CopyEvaluator::new(&h, &d, &bases)?.with_injection_budget(config.budgets.injections);
    let baseline = counting::baseline(h.n(), h.edge_count());
    let baseline_log2 = counting::log2_rational(&baseline);

    let (record, extra) = if config.exact {
        if h.n() > config.budgets.brute_force_n {
            return Err(CountingError::ExactBudget { n: h.n(), max: config.budgets.brute_force_n }.into());
        }
        let s = counting::exact_summary(&ev)?;
        let ratio = s.ratio();
        let record = CsvRecord {
            n: h.n(),
            t: d.t,
            pattern: kind.to_string(),
            design: d.describe(),
            samples: format!("exact:{}", s.placements),
            baseline_log2,
            estimate_log2: counting::log2_rational(&s.expected),
            ratio: ratio.to_f64().unwrap_or(f64::NAN),
            stderr_ratio: 0.0,
            typical_frac: s.typical_fraction(),
            seed: config.seed,
        };
        let extra = json!({
            "expected": s.expected.to_string(), "ratio_exact": ratio.to_string(),
            "c_avg": s.c.to_string(), "i_avg": s.i.to_string(), "f_avg": s.f.to_string(), "g_avg": s.g.to_string(),
            "closed_form_mismatches": s.closed_form_mismatches,
        });
        (record, extra)
    } else {
        let r = counting::estimate_expected_copies(&ev, config.samples, config.seed)?;
        let record = CsvRecord {
            n: h.n(),
            t: d.t,
            pattern: kind.to_string(),
            design: d.describe(),
            samples: config.samples.to_string(),
            baseline_log2,
            estimate_log2: r.estimate_log2,
            ratio: r.ratio,
            stderr_ratio: r.stderr_ratio,
            typical_frac: r.typical_fraction,
            seed: config.seed,
        };
        let extra = serde_json::to_value(&r).expect("report serialises");
        (record, extra)
    };

    let records = vec![record];
    match &config.output {
        Some(path) => {
            let sidecar = Sidecar {
                config: config.clone(),
                seed: config.seed,
                seed_generated: generated,
                t: d.t,
                delta: Some(delta_of(d.t).to_string()),
                base_r: bases.r().to_hex_rows(),
                baseline: baseline.to_string(),
                design: d.describe(),
                records: records.clone(),
                extra,
            };
            report::write_report(path, &records, &sidecar)?;
        }
        None => out(&report::csv_string(&records)?),
    }
    Ok(())
}

/// Parses arguments, applies the thread override, runs, and maps errors to JSON on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{}", json!({ "error": "usage", "message": e.to_string().trim() }));
            return 2;
        }
    };
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("{}", json!({ "error": "usage", "message": format!("{THREADS_ENV} must be a positive integer, got {v:?}") }));
                return 2;
            }
        }
    }
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            if matches!(e, CliError::Usage(_)) {
                2
            } else {
                1
            }
        }
    }
}
