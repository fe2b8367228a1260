//! Command-line front end: argument/config parsing, subcommand dispatch,
//! and atomic CSV emission.
//!
//! Flags override config-file values; the config file is flat `key = value`
//! text under `[section]` headers matching the subcommand names. Exit codes:
//! 0 success, 1 verification band failure, 2 configuration error, 3 runtime
//! error.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::calculus::{
    apply, fractional_power_oracle, gamma_quadrature_oracle, subordinated_poisson_oracle,
    OracleQuad, StepProfile, SubordinationQuad, SymbolKind, SymbolSpec, ZeroModePolicy,
};
use crate::grid::{l2_norm, sup_norm, GridFunction, GridSpec};
use crate::kernel::{check_decay, decay_exponent, KernelProfile, QuadSpec};
use crate::lipschitz::{
    corpus, seminorm_heat, seminorm_poisson, seminorm_second_diff, SeminormEstimate, TGrid,
    DEFAULT_SIDE_LENGTH,
};
use crate::verify::{run_suite, write_report_csv, SuiteConfig, SuiteKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config keys, or parameter ranges; exit 2.
    Config(String),
    /// Any failure after validation; exit 3.
    Runtime(String),
    /// Suite ran but some check failed its band; exit 1.
    CheckFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
            CliError::CheckFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

fn cfg_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn run_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "biharm",
    version,
    about = "Spectral functional calculus for the biharmonic operator on periodic grids"
)]
pub struct Cli {
    /// Flat key=value config file with [subcommand] section headers;
    /// command-line flags override file values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores; BIHARM_JOBS is the env fallback).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit the radial heat-kernel profile g with its decay-bound ratio.
    Kernel(KernelArgs),
    /// Apply a multiplier operator to a sampled function.
    Apply(ApplyArgs),
    /// Estimate a Lipschitz seminorm of a sampled function.
    Seminorm(SeminormArgs),
    /// Run the theorem-verification suite and emit a CSV report.
    Verify(VerifyArgs),
    /// Solve the biharmonic Cauchy problem and report convergence.
    Solve(SolveArgs),
}

#[derive(Args, Debug, Clone)]
pub struct KernelArgs {
    /// Space dimension (1 or 2) [default: 1].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Largest radius of the profile table [default: 10.5].
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Number of radial samples [default: 300].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Decay exponent c' of the bound-ratio column [default: c/2 with
    /// c = 3*2^(1/3)/16].
    #[arg(long)]
    pub cprime: Option<f64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ApplyArgs {
    /// Operator: heat, poisson, bessel, fracint, fracpow, riesz-pre,
    /// riesz-post, laplace-mult, dt.
    #[arg(long)]
    pub op: Option<String>,
    /// Time parameter for heat/poisson/dt [default: 1].
    #[arg(long)]
    pub t: Option<f64>,
    /// Order parameter beta for bessel/fracint/fracpow.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Derivative order for dt [default: 1].
    #[arg(long)]
    pub k: Option<u32>,
    /// Axis (1-based) for the Riesz transforms [default: 1].
    #[arg(long)]
    pub i: Option<usize>,
    /// Zero-mode policy: keep, project, forbid [default: per operator].
    #[arg(long)]
    pub zero_mode: Option<String>,
    /// Run the quadrature oracle instead of the symbol path (bessel,
    /// fracint, fracpow, poisson only).
    #[arg(long)]
    pub oracle: bool,
    /// Laplace-mult profile: breakpoints b0:b1:...:bm paired with
    /// levels a0:...:a{m-1}, as "b0:b1,a0" etc. [default: 0:1:2,1:-1].
    #[arg(long)]
    pub profile: Option<String>,
    /// Input GridFunction CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output GridFunction CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SeminormArgs {
    /// Estimator: heat, poisson, diff2.
    #[arg(long)]
    pub estimator: Option<String>,
    /// Regularity exponent alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Smallest scan time [default: 1e-6].
    #[arg(long)]
    pub tmin: Option<f64>,
    /// Largest scan time [default: 1e2].
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of log-spaced scan times [default: 200].
    #[arg(long)]
    pub tnum: Option<usize>,
    /// Largest shift length for diff2 [default: L/4].
    #[arg(long)]
    pub ymax: Option<f64>,
    /// Input GridFunction CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Suite: default or full [default: default].
    #[arg(long)]
    pub suite: Option<String>,
    /// Comma-separated grid levels, at least two [default: 256,512].
    #[arg(long)]
    pub levels: Option<String>,
    /// Comma-separated alpha values [default: 0.3,0.7,1.0,1.5].
    #[arg(long)]
    pub alphas: Option<String>,
    /// Comma-separated beta values [default: 1.0,2.0].
    #[arg(long)]
    pub betas: Option<String>,
    /// Corpus selection: a member name, ALL, or none [default: ALL].
    #[arg(long)]
    pub corpus: Option<String>,
    /// RandomTrig seed [default: 7].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Box side length [default: 4*pi].
    #[arg(long)]
    pub side_length: Option<f64>,
    /// Report CSV path [default: report.csv].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Initial datum: a corpus member name [default: single_mode].
    #[arg(long)]
    pub corpus: Option<String>,
    /// Initial datum from a GridFunction CSV (overrides --corpus).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Space dimension for corpus data [default: 1].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Points per axis for corpus data [default: 512].
    #[arg(long)]
    pub n: Option<usize>,
    /// Box side length for corpus data [default: 4*pi].
    #[arg(long)]
    pub side_length: Option<f64>,
    /// Comma-separated solution times [default: 1e-2,1e-4,1e-6].
    #[arg(long)]
    pub times: Option<String>,
    /// RandomTrig seed [default: 7].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write u(., t) at the last listed time to this CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

/// Flat `key = value` settings grouped by `[section]`.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = HashMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_lowercase();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected 'key = value' or '[section]', got '{line}'",
                    lineno + 1
                )));
            };
            let full = if section.is_empty() {
                key.trim().to_lowercase()
            } else {
                format!("{section}.{}", key.trim().to_lowercase())
            };
            entries.insert(full, value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        ConfigFile::parse(&text)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&format!("{section}.{key}"))
            .map(String::as_str)
    }

    fn get_parsed<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(None),
            Some(s) => s.parse::<T>().map(Some).map_err(|e| {
                CliError::Config(format!("[{section}] {key} = '{s}': {e}"))
            }),
        }
    }
}

/// Flag value, else config value, else default.
fn resolve<T: std::str::FromStr + Clone>(
    flag: &Option<T>,
    cfg: &ConfigFile,
    section: &str,
    key: &str,
    default: T,
) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v.clone());
    }
    Ok(cfg.get_parsed::<T>(section, key)?.unwrap_or(default))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|e| CliError::Config(format!("{what} entry '{t}': {e}")))
        })
        .collect()
}

/// Write a file atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes).map_err(run_err),
        None => std::io::stdout().write_all(bytes).map_err(run_err),
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_kernel(args: &KernelArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let dim = resolve(&args.dim, cfg, "kernel", "dim", 1)?;
    let rmax = resolve(&args.rmax, cfg, "kernel", "rmax", 10.5)?;
    let samples = resolve(&args.samples, cfg, "kernel", "samples", 300)?;
    let cprime = resolve(&args.cprime, cfg, "kernel", "cprime", decay_exponent() / 2.0)?;
    if dim != 1 && dim != 2 {
        return Err(CliError::Config("dim must be 1 or 2".into()));
    }
    if !(rmax > 0.0) || samples < 2 {
        return Err(CliError::Config("rmax must be positive, samples >= 2".into()));
    }
    let quad = QuadSpec::default();
    let profile = KernelProfile::build(dim, &quad, rmax, samples, (0, 0)).map_err(run_err)?;
    let mut buf = Vec::new();
    writeln!(buf, "r,g,bound_ratio").map_err(run_err)?;
    for &(r, v) in &profile.samples {
        let ratio = v.abs() * (cprime * r.powf(4.0 / 3.0)).exp();
        writeln!(buf, "{r:.15e},{v:.15e},{ratio:.15e}").map_err(run_err)?;
    }
    emit(&args.out, &buf)?;
    if rmax >= 10.0 {
        let check = check_decay(&profile, (0, 0), cprime).map_err(run_err)?;
        eprintln!(
            "decay check: c'={:.6} observed_c={:.6e} argmax_r={:.3} pass={}",
            check.c_exponent, check.observed_c, check.argmax_r, check.pass
        );
    }
    Ok(())
}

fn parse_profile(s: &str) -> Result<StepProfile, CliError> {
    let (bp, lv) = s
        .split_once(',')
        .ok_or_else(|| CliError::Config("profile must be 'b0:b1:...,a0:a1:...'".into()))?;
    let breakpoints: Vec<f64> = bp
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(cfg_err))
        .collect::<Result<_, _>>()?;
    let levels: Vec<f64> = lv
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(cfg_err))
        .collect::<Result<_, _>>()?;
    StepProfile::new(breakpoints, levels).map_err(cfg_err)
}

fn run_apply(args: &ApplyArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let op = resolve(&args.op, cfg, "apply", "op", String::new())?;
    if op.is_empty() {
        return Err(CliError::Config("--op is required".into()));
    }
    let t = resolve(&args.t, cfg, "apply", "t", 1.0)?;
    let k = resolve(&args.k, cfg, "apply", "k", 1)?;
    let axis = resolve(&args.i, cfg, "apply", "i", 1)?;
    let beta = match (args.beta, cfg.get_parsed::<f64>("apply", "beta")?) {
        (Some(b), _) | (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    let need_beta = || {
        beta.ok_or_else(|| CliError::Config(format!("--beta is required for op '{op}'")))
    };
    let kind = match op.as_str() {
        "heat" => SymbolKind::Heat { t },
        "poisson" => SymbolKind::Poisson { t },
        "dt" => SymbolKind::HeatTimeDeriv { t, k },
        "bessel" => SymbolKind::BesselPotential { beta: need_beta()? },
        "fracint" => SymbolKind::FractionalIntegral { beta: need_beta()? },
        "fracpow" => SymbolKind::FractionalPower { beta: need_beta()? },
        "riesz-pre" => SymbolKind::RieszPre { axis },
        "riesz-post" => SymbolKind::RieszPost { axis },
        "laplace-mult" => {
            let ps = resolve(&args.profile, cfg, "apply", "profile", "0:1:2,1:-1".to_string())?;
            SymbolKind::LaplaceMultiplier {
                profile: parse_profile(&ps)?,
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown op '{other}' (expected heat, poisson, bessel, fracint, fracpow, \
                 riesz-pre, riesz-post, laplace-mult, dt)"
            )))
        }
    };
    let default_policy = match &kind {
        SymbolKind::FractionalIntegral { .. }
        | SymbolKind::RieszPre { .. }
        | SymbolKind::RieszPost { .. } => ZeroModePolicy::Project,
        _ => ZeroModePolicy::Keep,
    };
    let policy_name = match &args.zero_mode {
        Some(p) => Some(p.clone()),
        None => cfg.get("apply", "zero_mode").map(str::to_string),
    };
    let policy = match policy_name.as_deref() {
        None => default_policy,
        Some("keep") => ZeroModePolicy::Keep,
        Some("project") => ZeroModePolicy::Project,
        Some("forbid") => ZeroModePolicy::Forbid,
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown zero-mode policy '{other}'"
            )))
        }
    };
    let spec = SymbolSpec::new(kind, policy).map_err(cfg_err)?;
    let input = args
        .input
        .clone()
        .or_else(|| cfg.get("apply", "input").map(PathBuf::from))
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let f = read_grid_csv(&input)?;
    let result = if args.oracle {
        match op.as_str() {
            "bessel" => gamma_quadrature_oracle(&f, beta.unwrap(), true, &OracleQuad::default()),
            "fracint" => gamma_quadrature_oracle(&f, beta.unwrap(), false, &OracleQuad::default()),
            "fracpow" => fractional_power_oracle(&f, beta.unwrap(), &OracleQuad::default()),
            "poisson" => subordinated_poisson_oracle(&f, t, &SubordinationQuad::default()),
            other => {
                return Err(CliError::Config(format!(
                    "no quadrature oracle for op '{other}'"
                )))
            }
        }
        .map_err(run_err)?
    } else {
        apply(&spec, &f).map_err(run_err)?
    };
    let mut buf = Vec::new();
    result.write_csv(&mut buf).map_err(run_err)?;
    let output = args
        .output
        .clone()
        .or_else(|| cfg.get("apply", "output").map(PathBuf::from));
    emit(&output, &buf)
}

fn read_grid_csv(path: &Path) -> Result<GridFunction, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
    GridFunction::read_csv(&mut std::io::BufReader::new(file)).map_err(run_err)
}

fn seminorm_csv(est: &SeminormEstimate) -> String {
    format!(
        "estimator,alpha,k,value,argmax,boundary_flag\n{},{},{},{:.15e},{:.15e},{}\n",
        est.estimator.label(),
        est.alpha,
        est.k,
        est.value,
        est.argmax,
        est.boundary
    )
}

fn run_seminorm(args: &SeminormArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let estimator = resolve(&args.estimator, cfg, "seminorm", "estimator", String::new())?;
    let alpha = match (args.alpha, cfg.get_parsed::<f64>("seminorm", "alpha")?) {
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(CliError::Config("--alpha is required".into())),
    };
    let input = args
        .input
        .clone()
        .or_else(|| cfg.get("seminorm", "input").map(PathBuf::from))
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let f = read_grid_csv(&input)?;
    let t_grid = TGrid {
        t_min: resolve(&args.tmin, cfg, "seminorm", "tmin", 1e-6)?,
        t_max: resolve(&args.tmax, cfg, "seminorm", "tmax", 1e2)?,
        num: resolve(&args.tnum, cfg, "seminorm", "tnum", 200)?,
    };
    if !(t_grid.t_min > 0.0 && t_grid.t_max > t_grid.t_min && t_grid.num >= 2) {
        return Err(CliError::Config(
            "need 0 < tmin < tmax and tnum >= 2".into(),
        ));
    }
    let est = match estimator.as_str() {
        "heat" => seminorm_heat(&f, alpha, &t_grid).map_err(run_err)?,
        "poisson" => seminorm_poisson(&f, alpha, &t_grid).map_err(run_err)?,
        "diff2" => {
            let default_ymax = f.spec().side_length() / 4.0;
            let ymax = resolve(&args.ymax, cfg, "seminorm", "ymax", default_ymax)?;
            seminorm_second_diff(&f, alpha, ymax).map_err(run_err)?
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown estimator '{other}' (expected heat, poisson, diff2)"
            )))
        }
    };
    emit(&args.out, seminorm_csv(&est).as_bytes())
}

fn run_verify(args: &VerifyArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let suite_name = resolve(&args.suite, cfg, "verify", "suite", "default".to_string())?;
    let suite = match suite_name.as_str() {
        "default" => SuiteKind::Default,
        "full" => SuiteKind::Full,
        other => {
            return Err(CliError::Config(format!(
                "unknown suite '{other}' (expected default or full)"
            )))
        }
    };
    let levels_s = resolve(&args.levels, cfg, "verify", "levels", "256,512".to_string())?;
    let levels: Vec<usize> = parse_list(&levels_s, "levels")?;
    if levels.len() < 2 {
        return Err(CliError::Config(
            "at least two --levels are required (drift is undefined otherwise)".into(),
        ));
    }
    let alphas_s = resolve(&args.alphas, cfg, "verify", "alphas", "0.3,0.7,1.0,1.5".to_string())?;
    let betas_s = resolve(&args.betas, cfg, "verify", "betas", "1.0,2.0".to_string())?;
    let suite_cfg = SuiteConfig {
        suite,
        levels,
        alphas: parse_list(&alphas_s, "alphas")?,
        betas: parse_list(&betas_s, "betas")?,
        selection: resolve(&args.corpus, cfg, "verify", "corpus", "ALL".to_string())?,
        seed: resolve(&args.seed, cfg, "verify", "seed", 7)?,
        side_length: resolve(&args.side_length, cfg, "verify", "side_length", DEFAULT_SIDE_LENGTH)?,
    };
    let reports = run_suite(&suite_cfg).map_err(|e| match e {
        crate::verify::VerifyError::Config(m) => CliError::Config(m),
        other => run_err(other),
    })?;
    let mut buf = Vec::new();
    write_report_csv(&reports, &mut buf).map_err(run_err)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.get("verify", "out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("report.csv"));
    write_atomic(&out, &buf).map_err(run_err)?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!(
        "{} checks, {} passed, {} failed -> {}",
        reports.len(),
        reports.len() - failed,
        failed,
        out.display()
    );
    for r in reports.iter().filter(|r| !r.pass) {
        println!(
            "FAIL {} {} alpha={:?} beta={:?} constant={:.6e} drift={:.3e}: {}",
            r.theorem_id, r.function_name, r.alpha, r.beta, r.observed_constant,
            r.refinement_drift, r.notes
        );
    }
    if failed > 0 {
        return Err(CliError::CheckFailed(failed));
    }
    Ok(())
}

/// One row of the Cauchy-problem convergence table.
#[derive(Debug, Clone)]
pub struct SolveRow {
    pub t: f64,
    /// ||u(., t)||_inf / ||f||_inf.
    pub sup_ratio: f64,
    /// ||u(., t) - f||_L2.
    pub l2_error: f64,
}

/// Evolve u(., t) = W_t f for each listed t.
pub fn solve_cauchy(
    f: &GridFunction,
    times: &[f64],
) -> Result<(Vec<SolveRow>, Vec<GridFunction>), CliError> {
    if times.is_empty() {
        return Err(CliError::Config("at least one time is required".into()));
    }
    if times.iter().any(|&t| !(t > 0.0)) {
        return Err(CliError::Config("all times must be positive".into()));
    }
    let supf = sup_norm(f);
    if supf == 0.0 {
        return Err(CliError::Config("initial datum is identically zero".into()));
    }
    let mut rows = Vec::with_capacity(times.len());
    let mut fields = Vec::with_capacity(times.len());
    for &t in times {
        let u = apply(&SymbolSpec::heat(t), f).map_err(run_err)?;
        rows.push(SolveRow {
            t,
            sup_ratio: sup_norm(&u) / supf,
            l2_error: l2_norm(&u.sub(f)),
        });
        fields.push(u);
    }
    Ok((rows, fields))
}

fn run_solve(args: &SolveArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let input = args
        .input
        .clone()
        .or_else(|| cfg.get("solve", "input").map(PathBuf::from));
    let f = match input {
        Some(path) => read_grid_csv(&path)?,
        None => {
            let dim = resolve(&args.dim, cfg, "solve", "dim", 1)?;
            let n = resolve(&args.n, cfg, "solve", "n", 512)?;
            let l = resolve(&args.side_length, cfg, "solve", "side_length", DEFAULT_SIDE_LENGTH)?;
            let name = resolve(&args.corpus, cfg, "solve", "corpus", "single_mode".to_string())?;
            let seed = resolve(&args.seed, cfg, "solve", "seed", 7)?;
            let spec = GridSpec::new(dim, n, l).map_err(cfg_err)?;
            let members = corpus(&name, seed).map_err(cfg_err)?;
            members[0].sample(spec).map_err(run_err)?
        }
    };
    let times_s = resolve(&args.times, cfg, "solve", "times", "1e-2,1e-4,1e-6".to_string())?;
    let times: Vec<f64> = parse_list(&times_s, "times")?;
    let (rows, fields) = solve_cauchy(&f, &times)?;
    println!("t,sup_ratio,l2_error");
    for r in &rows {
        println!("{:.15e},{:.15e},{:.15e}", r.t, r.sup_ratio, r.l2_error);
    }
    if let Some(out) = args
        .out
        .clone()
        .or_else(|| cfg.get("solve", "out").map(PathBuf::from))
    {
        let mut buf = Vec::new();
        fields
            .last()
            .expect("nonempty")
            .write_csv(&mut buf)
            .map_err(run_err)?;
        write_atomic(&out, &buf).map_err(run_err)?;
    }
    Ok(())
}

fn configure_jobs(jobs: Option<usize>) {
    let jobs = jobs.or_else(|| {
        std::env::var("BIHARM_JOBS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    });
    if let Some(j) = jobs.filter(|&j| j > 0) {
        // Ignore the error if a global pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
}

/// Dispatch a parsed command line; the returned error carries the exit code.
pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    configure_jobs(cli.jobs);
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Kernel(a) => run_kernel(a, &cfg),
        Command::Apply(a) => run_apply(a, &cfg),
        Command::Seminorm(a) => run_seminorm(a, &cfg),
        Command::Verify(a) => run_verify(a, &cfg),
        Command::Solve(a) => run_solve(a, &cfg),
    }
}

/// Parse argv and run; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 0 for --help/--version and 2 for usage
            // errors, matching the contract here.
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
