//! Batch front-end: subcommands, `--config` ingestion and report emission.
//!
//! Machine-readable output goes to `--out` (or to standard output when
//! `--out` is absent, in which case the human summary is suppressed).
//! Exit codes: 0 success, 2 validation or usage error, 3 failed audit or
//! failed property check.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::audit::{self, AuditError, AuditMode, OrbitSystem, OrbitSystemSpec, SearchRange};
use crate::ellipsoid::{self, EllipsoidSpec};
use crate::fixed_point::{self, LefschetzEntry, PlanarMapSample};
use crate::floer::barcode::{self, FilteredComplex};
use crate::floer::{self, GraphCheckOptions, ReducedFloerGraph};
use crate::hamiltonian::{self, ProfileSpec};
use crate::index::{self, IterationProfile, SymplecticPath};
use crate::rational::Ratio;
use crate::recurrence::{self, RecurrenceQuery};
use crate::symplectic::{self, SymplecticMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "REEB_LAB_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input data.
    Invalid(String),
    /// A check ran to completion and failed; the report has been written.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Failed(_) => EXIT_FAILED,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "reeb-lab", version, about = "Index, action and barcode computations for Reeb dynamics")]
pub struct Cli {
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Destination of the machine-readable output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Conley–Zehnder index of a sampled symplectic path.
    CzIndex(CzArgs),
    /// Table of μ-, μ+ and μ̂ over iterates of a block profile (CSV).
    IterateIndices(IterateArgs),
    /// Williamson normal-form counts of a unipotent symplectic matrix.
    Williamson(WilliamsonArgs),
    /// Action tables, the A_h(r)/r monotonicity check and the transfer map for a radial profile.
    Hamiltonian(HamiltonianArgs),
    /// Index-recurrence solutions as JSON lines.
    RecurrenceSearch(RecurrenceArgs),
    /// Periods, profiles, spectrum and convexity of an ellipsoid.
    Ellipsoid(EllipsoidArgs),
    /// Persistence barcode of a filtered complex, or reduced-graph validation.
    Barcode(BarcodeArgs),
    /// Arrow-exclusion audit of an orbit system.
    AuditLemma(AuditArgs),
    /// Planar fixed-point index, Lefschetz residuals and the trace lemma.
    FixedPointIndex(FixedPointArgs),
    /// Seeded randomized property checks.
    Fuzz(FuzzArgs),
}

#[derive(Args, Debug)]
pub struct CzArgs {
    /// JSON `{"samples": [matrix, ...]}` of row-major matrices at uniform times.
    #[arg(long, value_name = "FILE")]
    pub path: Option<PathBuf>,
    /// JSON symmetric matrix `S`; the path is `exp(J S t)`.
    #[arg(long, value_name = "FILE", conflicts_with = "path")]
    pub quadratic: Option<PathBuf>,
    /// Rotation number `ρ` of `t ↦ R(2πρt)` in `R^2`.
    #[arg(long, conflicts_with_all = ["path", "quadratic"])]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 256)]
    pub intervals: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct IterateArgs {
    /// JSON iteration profile.
    #[arg(long, value_name = "FILE")]
    pub profile: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub k_max: u64,
    /// Convexity threshold `n` (checks μ- >= n + 1).
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct WilliamsonArgs {
    /// JSON row-major matrix.
    #[arg(long, value_name = "FILE")]
    pub matrix: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Quadratic,
    Cubic,
    Exponential,
}

#[derive(Args, Debug)]
pub struct HamiltonianArgs {
    /// JSON profile spec; alternative to the family flags.
    #[arg(long, value_name = "FILE")]
    pub profile: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "profile")]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub slope: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Negative value on the domain (admissible profile).
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<f64>,
    #[arg(long, default_value_t = hamiltonian::DEFAULT_GRID)]
    pub grid: usize,
    /// Checks that `A_h(r)/r` is nondecreasing on `[1, r0]`.
    #[arg(long, value_name = "R0")]
    pub claim1: Option<f64>,
    /// `k` of the transfer map `𝔞_{(k+λ)H} ∘ 𝔞_{kH}⁻¹`.
    #[arg(long, requires = "lambda")]
    pub transfer_k: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Number of uniformly spaced actions for the transfer map.
    #[arg(long, default_value_t = 9)]
    pub taus: usize,
    /// `csv` writes the level table only.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct RecurrenceArgs {
    /// JSON array of iteration profiles; the first is the reference profile.
    #[arg(long, value_name = "FILE")]
    pub profiles: Option<PathBuf>,
    /// Use the profiles of the ellipsoid with these weights.
    #[arg(long, value_delimiter = ',', conflicts_with = "profiles")]
    pub ellipsoid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 3)]
    pub ell0: u64,
    /// Required divisor `N` of `d` and `k_0`.
    #[arg(long, default_value_t = 1)]
    pub divisor: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub k_bound: u64,
    #[arg(long, default_value_t = 3)]
    pub count: usize,
}

#[derive(Args, Debug)]
pub struct EllipsoidArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub weights: Vec<f64>,
    /// Reports dynamical convexity over iterates up to `--k-max`.
    #[arg(long)]
    pub convexity: bool,
    #[arg(long, default_value_t = 100)]
    pub k_max: u64,
    /// Lists the action spectrum up to this value.
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Emits the pseudo-rotation seed (irrational weights only).
    #[arg(long)]
    pub seed_instance: bool,
    /// `csv` writes the spectrum only and needs `--cutoff`.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct BarcodeArgs {
    /// JSON filtered complex.
    #[arg(long, value_name = "FILE", required_unless_present = "graph")]
    pub complex: Option<PathBuf>,
    /// Bar-length constant for the vanishing check.
    #[arg(long, requires = "level")]
    pub c_bar: Option<f64>,
    /// Bars ending at or below this level are checked.
    #[arg(long)]
    pub level: Option<f64>,
    /// JSON reduced Floer graph to validate instead.
    #[arg(long, value_name = "FILE", conflicts_with = "complex", requires = "n")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Protected orbits as `orbit=sigma`.
    #[arg(long, value_delimiter = ',')]
    pub protect: Vec<String>,
    #[arg(long)]
    pub check_degrees: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// JSON orbit system.
    #[arg(long, value_name = "FILE")]
    pub system: PathBuf,
    /// theoremA, theoremAAlt or theoremB.
    #[arg(long, default_value = "theoremA")]
    pub mode: AuditMode,
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub k_bound: u64,
    #[arg(long, default_value_t = 1)]
    pub divisor: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Model {
    Rotation,
    MonkeySaddle,
    Translation,
}

#[derive(Args, Debug)]
pub struct FixedPointArgs {
    /// CSV samples with header `x,y,fx,fy`.
    #[arg(long, value_name = "FILE")]
    pub samples: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "samples")]
    pub model: Option<Model>,
    /// Rotation angle in turns.
    #[arg(long, default_value_t = 0.41421356237309503)]
    pub turns: f64,
    /// Iterate `φ^m` of the model map.
    #[arg(long, default_value_t = 1)]
    pub power: u32,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 16)]
    pub n_samples: usize,
    /// JSON list of `{m, traces, indices}`.
    #[arg(long, value_name = "FILE")]
    pub lefschetz: Option<PathBuf>,
    /// JSON square matrix of numbers or `"p/q"` strings.
    #[arg(long, value_name = "FILE")]
    pub trace_matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub m_max: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    CzMean,
    Symplectic,
    Transfer,
    TraceLemma,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    match run_inner(argv) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                CliError::Invalid(m) => eprintln!("error: {m}"),
                CliError::Failed(m) => eprintln!("failed: {m}"),
            }
            e.exit_code()
        }
    }
}

fn run_inner(argv: Vec<String>) -> Result<(), CliError> {
    let argv = merge_config(argv)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            let text = e.to_string();
            return Err(CliError::Invalid(text.trim_start_matches("error: ").trim_end().to_string()));
        }
    };
    configure_threads()?;
    let out = Output { path: cli.out.clone() };
    match cli.command {
        Command::CzIndex(a) => cz_index(a, &out),
        Command::IterateIndices(a) => iterate_indices(a, &out),
        Command::Williamson(a) => williamson(a, &out),
        Command::Hamiltonian(a) => hamiltonian(a, &out),
        Command::RecurrenceSearch(a) => recurrence_search(a, &out),
        Command::Ellipsoid(a) => ellipsoid(a, &out),
        Command::Barcode(a) => barcode(a, &out),
        Command::AuditLemma(a) => audit_lemma(a, &out),
        Command::FixedPointIndex(a) => fixed_point_index(a, &out),
        Command::Fuzz(a) => fuzz(a, &out),
    }
}

/// Appends `--key value` for each config key whose flag is absent from `argv`.
pub fn merge_config(mut argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => argv.get(pos + 1).cloned().ok_or_else(|| invalid("--config needs a file"))?,
    };
    let text = fs::read_to_string(&path).map_err(|e| invalid(format!("{path}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| invalid(format!("{path}: {e}")))?;
    let Value::Object(map) = value else {
        return Err(invalid(format!("{path}: config must be a JSON object")));
    };
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            return Err(invalid("config files cannot nest --config"));
        }
        let present = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        let scalar = |v: &Value| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(invalid(format!("config key {key:?}: unsupported value {other}"))),
        };
        match &v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(scalar).collect::<Result<_, _>>()?;
                argv.push(format!("{flag}={}", parts.join(",")));
            }
            other => argv.push(format!("{flag}={}", scalar(other)?)),
        }
    }
    Ok(argv)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| invalid(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
    if n == 0 {
        return Err(invalid(format!("{THREADS_ENV} must be positive")));
    }
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        match &self.path {
            Some(p) => Ok(Box::new(io::BufWriter::new(
                fs::File::create(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?,
            ))),
            None => Ok(Box::new(io::stdout().lock())),
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, value).map_err(invalid)?;
        writeln!(w).and_then(|_| w.flush()).map_err(invalid)
    }

    fn summary(&self, text: &str) {
        if self.path.is_some() {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, CliError> {
    symplectic::matrix_from_rows(rows).map_err(invalid)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PathFile {
    samples: Vec<Vec<Vec<f64>>>,
}

fn cz_index(a: CzArgs, out: &Output) -> Result<(), CliError> {
    let path = if let Some(p) = &a.path {
        let file: PathFile = read_json(p)?;
        let samples = file.samples.iter().map(|m| matrix(m)).collect::<Result<_, _>>()?;
        SymplecticPath::new(samples, a.tol)
    } else if let Some(q) = &a.quadratic {
        let rows: Vec<Vec<f64>> = read_json(q)?;
        SymplecticPath::quadratic_flow(&matrix(&rows)?, a.intervals)
    } else if let Some(rho) = a.rho {
        SymplecticPath::rotation(rho, a.intervals)
    } else {
        return Err(invalid("cz-index needs --path, --quadratic or --rho"));
    }
    .map_err(invalid)?;
    let index = index::cz_index_sampled(&path, a.tol).map_err(invalid)?;
    out.json(&json!({ "index": index, "m": path.dim_half(), "samples": path.samples().len() }))?;
    out.summary(&format!("CZ index {index} (m = {}, {} samples)", path.dim_half(), path.samples().len()));
    Ok(())
}

fn iterate_indices(a: IterateArgs, out: &Output) -> Result<(), CliError> {
    let profile = IterationProfile::from_json(&read(&a.profile)?).map_err(invalid)?;
    let mut w = out.writer()?;
    index::write_index_table(&profile, a.k_max, &mut w).map_err(invalid)?;
    w.flush().map_err(invalid)?;
    let mut text = format!(
        "mean index {}, nondegenerate through k = {}: {}\n",
        profile.mean_index(),
        a.k_max,
        profile.is_nondegenerate_at(a.k_max)
    );
    if let Some(n) = a.n {
        let r = index::check_dynamical_convexity(&[(profile, a.k_max)], n);
        text += &format!("dynamically convex (μ- >= {}): {}, min μ- = {:?}\n", n + 1, r.ok, r.min_mu_minus);
    }
    out.summary(&text);
    Ok(())
}

fn williamson(a: WilliamsonArgs, out: &Output) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = read_json(&a.matrix)?;
    let m = SymplecticMatrix::from_rows(&rows, a.tol).map_err(invalid)?;
    let report = symplectic::williamson_invariants(&m, a.tol).map_err(invalid)?;
    out.json(&report)?;
    let w = report.invariants;
    out.summary(&format!(
        "nu0 = {}, b0 = {}, b+ = {}, b- = {}, nu_g = {}, nu_a = {}",
        w.nu0, w.b0, w.b_plus, w.b_minus, w.nu_g, w.nu_a
    ));
    Ok(())
}

fn profile_spec(a: &HamiltonianArgs) -> Result<ProfileSpec, CliError> {
    if let Some(p) = &a.profile {
        return read_json(p);
    }
    let family = a.family.ok_or_else(|| invalid("hamiltonian needs --profile or --family"))?;
    let (slope, r_max) = match (a.slope, a.r_max) {
        (Some(s), Some(r)) => (s, r),
        _ => return Err(invalid("--family needs --slope and --r-max")),
    };
    let mut spec = match family {
        FamilyArg::Quadratic => ProfileSpec::quadratic(slope, r_max),
        FamilyArg::Cubic => ProfileSpec::cubic(slope, r_max, a.theta.ok_or_else(|| invalid("cubic needs --theta"))?),
        FamilyArg::Exponential => {
            ProfileSpec::exponential(slope, r_max, a.gamma.ok_or_else(|| invalid("exponential needs --gamma"))?)
        }
    };
    if let Some(b) = a.base {
        spec = spec.admissible(b);
    }
    Ok(spec)
}

fn hamiltonian(a: HamiltonianArgs, out: &Output) -> Result<(), CliError> {
    let spec = profile_spec(&a)?;
    let profile = spec.build().map_err(invalid)?;
    let tables = profile.action_tables(a.grid).map_err(invalid)?;
    let claim1 = a.claim1.map(|r0| hamiltonian::bounds::claim1_check(&profile, r0)).transpose().map_err(invalid)?;
    let transfer = match (a.transfer_k, a.lambda) {
        (Some(k), Some(lambda)) => {
            let lo = k * profile.action_a(1.0);
            let hi = k * profile.intercept();
            let n = a.taus.max(2);
            let taus: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
            Some(hamiltonian::continuation::transfer_map(&profile, k, lambda, &taus).map_err(invalid)?)
        }
        _ => None,
    };
    if a.format == Format::Csv {
        tables.write_levels_csv(out.writer()?).map_err(invalid)?;
    } else {
        out.json(&json!({
            "spec": spec,
            "intercept": profile.intercept(),
            "h_triple_nonneg_up_to": profile.h_triple_nonneg_up_to(),
            "claim1": claim1,
            "transfer": transfer,
            "tables": tables,
        }))?;
    }
    let mut text = format!("slope {}, r_max {}, max A_h = c = {}\n", profile.slope(), profile.r_max(), profile.intercept());
    if let Some(c) = claim1 {
        text += &format!("A_h(r)/r nondecreasing on [1, {}]: {}\n", c.r0, c.holds);
    }
    if let Some(t) = &transfer {
        text += &format!("transfer k = {}, λ = {}: min slack {:.3e}, monotone {}\n", t.k, t.lambda, t.min_slack, t.monotone);
    }
    out.summary(&text);
    Ok(())
}

fn recurrence_search(a: RecurrenceArgs, out: &Output) -> Result<(), CliError> {
    let profiles: Vec<IterationProfile> = match (&a.profiles, &a.ellipsoid) {
        (Some(p), _) => read_json(p)?,
        (None, Some(w)) => {
            let e = EllipsoidSpec::new(w.clone()).map_err(invalid)?;
            (0..e.n()).map(|j| e.profile(j)).collect::<Result<_, _>>().map_err(invalid)?
        }
        (None, None) => return Err(invalid("recurrence-search needs --profiles or --ellipsoid")),
    };
    let q = RecurrenceQuery {
        profiles,
        eta: a.eta,
        ell0: a.ell0,
        divisor: a.divisor,
        k_bound: a.k_bound,
        count: a.count,
    };
    let mut w = out.writer()?;
    let mut io_err = None;
    let outcome = recurrence::recurrence_search_with(&q, |s| {
        let line = serde_json::to_string(s).expect("solutions serialize");
        if let Err(e) = writeln!(w, "{line}").and_then(|_| w.flush()) {
            io_err.get_or_insert(e);
        }
    })
    .map_err(invalid)?;
    if let Some(e) = io_err {
        return Err(invalid(e));
    }
    let mut text = format!("{} solution(s), scanned k0 up to {}", outcome.solutions.len(), outcome.scanned_up_to);
    if outcome.horizon_exhausted {
        text += &format!(" (horizon exhausted before {} solutions)", a.count);
    }
    for s in &outcome.solutions {
        text += &format!("\n  d = {}, k = {:?}", s.d, s.k);
    }
    out.summary(&text);
    Ok(())
}

fn ellipsoid(a: EllipsoidArgs, out: &Output) -> Result<(), CliError> {
    let spec = EllipsoidSpec::new(a.weights.clone()).map_err(invalid)?;
    let periods = ellipsoid::ellipsoid_periods(&spec);
    let n = spec.n();
    let profiles: Vec<IterationProfile> = (0..n).map(|j| spec.profile_unchecked(j)).collect();
    let mean: Vec<f64> = (0..n).map(|j| spec.mean_index(j)).collect();
    let convexity = a.convexity.then(|| ellipsoid::convexity_report(&spec, a.k_max));
    let spectrum = a.cutoff.map(|c| ellipsoid::spectrum(&spec, c));
    let seed = a.seed_instance.then(|| ellipsoid::pseudo_rotation_instance(&spec)).transpose().map_err(invalid)?;
    if a.format == Format::Csv {
        let s = spectrum.as_ref().ok_or_else(|| invalid("--format csv needs --cutoff"))?;
        s.write_csv(out.writer()?).map_err(invalid)?;
    }
    let report = json!({
        "convention": ellipsoid::CONVENTION,
        "weights": spec.weights(),
        "irrational": spec.is_irrational(),
        "ratios": spec.ratios(),
        "periods": periods,
        "mean_indices": mean,
        "profiles": profiles,
        "convexity": convexity,
        "spectrum": spectrum,
        "seed": seed,
    });
    if a.format == Format::Json {
        out.json(&report)?;
    }
    let mut text = format!("periods {periods:?}\nmean indices {mean:?}\n");
    if let Some(c) = &convexity {
        let min = c.min_mu_minus.map_or("-".to_string(), |m| m.to_string());
        text += &format!("convexity {} (k <= {}), min μ- = {min}\n", if c.ok { "ok" } else { "FAILS" }, a.k_max);
    }
    if let Some(s) = &spectrum {
        text += &format!("{} spectrum values up to {}\n", s.entries.len(), s.cutoff);
    }
    out.summary(&text);
    Ok(())
}

fn barcode(a: BarcodeArgs, out: &Output) -> Result<(), CliError> {
    if let Some(g) = &a.graph {
        let graph = ReducedFloerGraph::from_json(&read(g)?).map_err(invalid)?;
        let mut protected = BTreeMap::new();
        for p in &a.protect {
            let (o, s) = p.split_once('=').ok_or_else(|| invalid(format!("--protect {p:?}: expected orbit=sigma")))?;
            let o: usize = o.trim().parse().map_err(|_| invalid(format!("bad orbit id {o:?}")))?;
            let s: f64 = s.trim().parse().map_err(|_| invalid(format!("bad sigma {s:?}")))?;
            protected.insert(o, s);
        }
        let n = a.n.expect("clap requires --n with --graph");
        let options = GraphCheckOptions { check_degrees: a.check_degrees };
        let violations = floer::validate_graph(&graph, n, &protected, options).map_err(invalid)?;
        out.json(&json!({ "ok": violations.is_empty(), "violations": violations }))?;
        out.summary(&format!("{} arrow(s), {} violation(s)", graph.arrows.len(), violations.len()));
        return if violations.is_empty() {
            Ok(())
        } else {
            Err(CliError::Failed(format!("{} graph violation(s)", violations.len())))
        };
    }
    let path = a.complex.as_ref().expect("clap requires --complex without --graph");
    let complex = FilteredComplex::from_json(&read(path)?).map_err(invalid)?;
    let bars = barcode::barcode(&complex).map_err(invalid)?;
    let vanishing = match (a.c_bar, a.level) {
        (Some(c), Some(l)) => Some(barcode::vanishing_check(&bars, c, l)),
        _ => None,
    };
    match a.format {
        Format::Csv => barcode::write_bars_csv(&bars, out.writer()?).map_err(invalid)?,
        Format::Json => out.json(&json!({ "bars": bars, "vanishing": vanishing }))?,
    }
    let essential = bars.iter().filter(|b| b.is_essential()).count();
    let mut text = format!("{} bar(s), {essential} essential", bars.len());
    if let Some(v) = &vanishing {
        text += &format!("; bars below {} shorter than {}: {}", v.level, v.c_bar, v.ok);
    }
    out.summary(&text);
    Ok(())
}

fn audit_lemma(a: AuditArgs, out: &Output) -> Result<(), CliError> {
    let spec = OrbitSystemSpec::from_json(&read(&a.system)?).map_err(invalid)?;
    let system = OrbitSystem::new(spec).map_err(invalid)?;
    let range = SearchRange { count: a.count, k_bound: a.k_bound, divisor: a.divisor };
    match audit::audit(&system, a.mode, range) {
        Ok(report) => {
            out.json(&report)?;
            out.summary(&report.summary());
            Ok(())
        }
        Err(AuditError::AuditFailed(report)) => {
            out.json(&report)?;
            out.summary(&report.summary());
            let reason = report.failure.as_ref().map_or(String::new(), |f| f.to_string());
            Err(CliError::Failed(format!("audit failed: {reason}")))
        }
        Err(AuditError::NotExcluded(e)) => Err(CliError::Failed(format!("not excluded: {e}"))),
        Err(e) => Err(invalid(e)),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Num(f64),
    Text(String),
}

fn rational_rows(rows: &[Vec<Entry>]) -> Option<Vec<Vec<Ratio>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|e| match e {
                    Entry::Text(s) => s.parse::<Ratio>().ok(),
                    Entry::Num(x) if x.fract() == 0.0 && x.abs() < 1e15 => Some(Ratio::integer(*x as i64)),
                    Entry::Num(_) => None,
                })
                .collect()
        })
        .collect()
}

fn fixed_point_index(a: FixedPointArgs, out: &Output) -> Result<(), CliError> {
    let mut report = serde_json::Map::new();
    let mut text = String::new();
    if let Some(p) = &a.samples {
        let f = fs::File::open(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
        let sample = PlanarMapSample::from_csv(f).map_err(invalid)?;
        let index = fixed_point::brouwer_index_samples(&sample).map_err(invalid)?;
        report.insert("index".into(), json!({ "index": index, "samples": sample.points.len() }));
        text += &format!("index {index} from {} samples\n", sample.points.len());
    }
    if let Some(model) = a.model {
        let m = a.power.max(1);
        let theta = std::f64::consts::TAU * a.turns;
        let step = move |[x, y]: [f64; 2]| -> [f64; 2] {
            match model {
                Model::Rotation => [theta.cos() * x - theta.sin() * y, theta.sin() * x + theta.cos() * y],
                Model::MonkeySaddle => [x + 2.0 * x * y, y + x * x - y * y],
                Model::Translation => [x + 1.0, y],
            }
        };
        let map = move |p: [f64; 2]| (0..m).fold(p, |q, _| step(q));
        let r = fixed_point::brouwer_index(map, [0.0, 0.0], a.epsilon, a.n_samples).map_err(invalid)?;
        text += &format!("{model:?}^{m}: index {} ({} evaluations)\n", r.index, r.evaluations);
        report.insert("index".into(), json!({ "model": format!("{model:?}"), "power": m, "report": r }));
    }
    if let Some(p) = &a.lefschetz {
        let entries: Vec<LefschetzEntry> = read_json(p)?;
        let r = fixed_point::lefschetz_check(&entries);
        text += &format!("Lefschetz residuals zero: {}\n", r.ok);
        report.insert("lefschetz".into(), serde_json::to_value(r).map_err(invalid)?);
    }
    if let Some(p) = &a.trace_matrix {
        let rows: Vec<Vec<Entry>> = read_json(p)?;
        let r = match rational_rows(&rows) {
            Some(q) => fixed_point::trace_lemma_check_exact(&q, a.m_max),
            None => {
                let floats: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|e| match e {
                                Entry::Num(x) => Ok(*x),
                                Entry::Text(s) => Err(invalid(format!("bad matrix entry {s:?}"))),
                            })
                            .collect()
                    })
                    .collect::<Result<_, _>>()?;
                fixed_point::trace_lemma_check(&matrix(&floats)?, a.m_max)
            }
        }
        .map_err(invalid)?;
        text += &format!("tr(L^m) >= 0 for {} of m <= {} (first {:?})\n", r.count, r.m_max, r.first.first());
        report.insert("trace_lemma".into(), serde_json::to_value(r).map_err(invalid)?);
    }
    if report.is_empty() {
        return Err(invalid("fixed-point-index needs --samples, --model, --lefschetz or --trace-matrix"));
    }
    out.json(&Value::Object(report))?;
    out.summary(&text);
    Ok(())
}

#[derive(Serialize)]
struct SuiteResult {
    suite: Suite,
    cases: usize,
    violations: usize,
    examples: Vec<Value>,
}

const MAX_EXAMPLES: usize = 5;

fn fuzz(a: FuzzArgs, out: &Output) -> Result<(), CliError> {
    let suites: Vec<Suite> = match a.suite {
        Suite::All => vec![Suite::CzMean, Suite::Symplectic, Suite::Transfer, Suite::TraceLemma],
        s => vec![s],
    };
    let mut results = Vec::new();
    for (i, s) in suites.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(i as u64));
        results.push(match s {
            Suite::CzMean => fuzz_cz_mean(&mut rng, a.cases),
            Suite::Symplectic => fuzz_symplectic(&mut rng, a.cases),
            Suite::Transfer => fuzz_transfer(&mut rng, a.cases),
            Suite::TraceLemma => fuzz_trace_lemma(&mut rng, a.cases),
            Suite::All => unreachable!(),
        });
    }
    let total: usize = results.iter().map(|r| r.violations).sum();
    out.json(&json!({ "seed": a.seed, "results": results }))?;
    let text: String =
        results.iter().map(|r| format!("{:?}: {} case(s), {} violation(s)\n", r.suite, r.cases, r.violations)).collect();
    out.summary(&text);
    if total > 0 {
        return Err(CliError::Failed(format!("{total} property violation(s)")));
    }
    Ok(())
}

fn record(r: &mut SuiteResult, example: Value) {
    r.violations += 1;
    if r.examples.len() < MAX_EXAMPLES {
        r.examples.push(example);
    }
}

fn fuzz_cz_mean(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult { suite: Suite::CzMean, cases, violations: 0, examples: vec![] };
    for _ in 0..cases {
        let m = rng.random_range(1..=3);
        let p = index::random_profile(m, rng);
        for k in 1..=50 {
            let t = p.iterate(k).triple;
            let (lo, hi) = (t.mu_hat - m as f64, t.mu_hat + m as f64);
            let (a, b) = (t.mu_minus as f64, t.mu_plus as f64);
            let mut ok = lo - 1e-9 <= a && a <= b && b <= hi + 1e-9;
            if p.is_nondegenerate_at(k) && t.mu() == Some(t.mu_minus) {
                ok &= lo + 1e-9 < a && b < hi - 1e-9;
            }
            if !ok {
                record(&mut r, json!({ "profile": p, "k": k, "triple": t }));
                break;
            }
        }
    }
    r
}

fn fuzz_symplectic(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult { suite: Suite::Symplectic, cases, violations: 0, examples: vec![] };
    for _ in 0..cases {
        let m = rng.random_range(1..=3);
        let a = symplectic::random::random_symplectic(m, rng);
        let residual = symplectic::symplectic_residual(a.matrix());
        let inv = symplectic::symplectic_residual(a.inverse().matrix());
        let classified = symplectic::spectral_classification(&a, 1e-7);
        if !(residual < 1e-8 && inv < 1e-7 && classified.is_ok()) {
            record(&mut r, json!({ "matrix": a.to_rows(), "residual": residual, "error": classified.err().map(|e| e.to_string()) }));
        }
    }
    r
}

fn fuzz_transfer(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult { suite: Suite::Transfer, cases, violations: 0, examples: vec![] };
    for _ in 0..cases {
        let slope = rng.random_range(2.0..10.0);
        let r_max = rng.random_range(1.5..4.0);
        let spec = match rng.random_range(0..3) {
            0 => ProfileSpec::quadratic(slope, r_max),
            1 => ProfileSpec::cubic(slope, r_max, rng.random_range(-0.9..1.0)),
            _ => ProfileSpec::exponential(slope, r_max, rng.random_range(0.2..2.0)),
        };
        let Ok(profile) = spec.build() else {
            record(&mut r, json!({ "spec": spec, "error": "build failed" }));
            continue;
        };
        let k = rng.random_range(1.0..20.0);
        let lambda = rng.random_range(0.01..3.0);
        let tau = rng.random_range(k * profile.action_a(1.0)..=k * profile.intercept());
        match hamiltonian::continuation::transfer_map(&profile, k, lambda, &[tau]) {
            Ok(t) if t.min_slack >= -1e-9 => {}
            Ok(t) => record(&mut r, json!({ "spec": spec, "k": k, "lambda": lambda, "tau": tau, "slack": t.min_slack })),
            Err(e) => record(&mut r, json!({ "spec": spec, "k": k, "lambda": lambda, "tau": tau, "error": e.to_string() })),
        }
    }
    r
}

fn fuzz_trace_lemma(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult { suite: Suite::TraceLemma, cases, violations: 0, examples: vec![] };
    for _ in 0..cases {
        let rows: Vec<Vec<Ratio>> = (0..3)
            .map(|_| {
                (0..3)
                    .map(|_| Ratio::new(rng.random_range(-9..=9), rng.random_range(1..=9)).expect("positive denominator"))
                    .collect()
            })
            .collect();
        match fixed_point::trace_lemma_check_exact(&rows, 60) {
            Ok(t) if t.count >= 1 => {}
            Ok(_) => record(&mut r, json!({ "matrix": rows, "m_max": 60 })),
            Err(e) => record(&mut r, json!({ "matrix": rows, "error": e.to_string() })),
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn config_merges_under_flags() {
        let dir = std::env::temp_dir().join(format!("reeb-lab-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("c.json");
        fs::write(&cfg, r#"{"weights": [1, 2.5], "convexity": true, "k_max": 7, "cutoff": null}"#).unwrap();
        let merged = merge_config(argv(&format!("reeb-lab ellipsoid --config {} --k-max 9", cfg.display()))).unwrap();
        assert!(merged.contains(&"--weights=1,2.5".to_string()));
        assert!(merged.contains(&"--convexity".to_string()));
        assert!(!merged.iter().any(|a| a == "--k-max=7"));
        let cli = Cli::try_parse_from(&merged).unwrap();
        match cli.command {
            Command::Ellipsoid(e) => assert_eq!((e.k_max, e.weights), (9, vec![1.0, 2.5])),
            c => panic!("{c:?}"),
        }
        fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
        assert_eq!(run(argv(&format!("reeb-lab ellipsoid --weights 1,2 --config {}", cfg.display()))), EXIT_INVALID);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(argv("reeb-lab nope")), EXIT_INVALID);
        assert_eq!(run(argv("reeb-lab ellipsoid --weights 1,-2")), EXIT_INVALID);
        assert_eq!(run(argv("reeb-lab audit-lemma --system /nonexistent.json")), EXIT_INVALID);
    }

    #[test]
    fn fuzz_suites_are_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(fuzz_cz_mean(&mut rng, 100).violations, 0);
        assert_eq!(fuzz_transfer(&mut rng, 50).violations, 0);
        assert_eq!(fuzz_symplectic(&mut rng, 20).violations, 0);
        assert_eq!(fuzz_trace_lemma(&mut rng, 10).violations, 0);
    }
}
