//! Command-line front end: build profiles, verify them against every
//! identity, dump reduction constants, and sweep parameter grids.
//!
//! Exit codes: 0 success (verify: all residuals within tolerance),
//! 1 residual failure, 2 usage/configuration error, 3 domain error.

mod config;
mod output;
mod sweep;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qem::report::verify_on_grid;
use qem::{tensor, ErrorKind};

use config::{parse_kv, Family, JobConfig, OutputCfg, XiGrid};
use output::{f15, report_json, solve_csv, solve_json, SolveRow};

#[derive(Parser)]
#[command(name = "qem", version, about = "Quasi-Einstein metrics conformal to Euclidean space: solve, verify, sweep")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a profile and write one table row per grid point
    Solve(JobArgs),
    /// Run every residual check on a grid and emit a JSON report
    Verify(JobArgs),
    /// Dump the reduction constants P, Q, R, a, b, a1, a2 for (n, m)
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: f64,
    },
    /// Verify a whole parameter grid with seeded random constant draws
    Sweep(SweepArgs),
}

#[derive(Args)]
struct JobArgs {
    /// JSON file with the full job configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// thm11 | homothetic | example14 | quad_m1 | quad_mgt1
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    /// Named constant, repeatable (e.g. --const C1=0.5 --const branch=-1)
    #[arg(long = "const", value_name = "KEY=VAL")]
    consts: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    xi_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    xi_max: Option<f64>,
    #[arg(long)]
    xi_count: Option<usize>,
    /// Exclusion margin around singular loci
    #[arg(long)]
    margin: Option<f64>,
    /// Unit direction, comma separated (normalized automatically)
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Verification tolerance, repeatable (e.g. --tol fundamental=1e-8)
    #[arg(long = "tol", value_name = "KEY=VAL")]
    tols: Vec<String>,
    /// csv | json (solve output; verify always emits JSON)
    #[arg(long)]
    format: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    job: JobArgs,
    /// Dimensions to sweep, comma separated (default: the single --n)
    #[arg(long)]
    n_list: Option<String>,
    /// Parameters to sweep, comma separated
    #[arg(long, allow_hyphen_values = true)]
    m_list: Option<String>,
    /// Random constant draws per (n, m) point
    #[arg(long, default_value_t = 10)]
    draws: usize,
}

enum CliError {
    Usage(String),
    Lib(qem::Error),
    Io(String),
}

impl From<qem::Error> for CliError {
    fn from(e: qem::Error) -> Self {
        CliError::Lib(e)
    }
}

fn exit_of(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) => 2,
        CliError::Lib(err) => match err.kind() {
            ErrorKind::Parameter => 2,
            ErrorKind::Domain => 3,
        },
        CliError::Io(_) => 3,
    }
}

fn message_of(e: &CliError) -> String {
    match e {
        CliError::Usage(m) => format!("usage error: {m}"),
        CliError::Lib(err) => format!("error: {err}"),
        CliError::Io(m) => format!("io error: {m}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", message_of(&e));
            ExitCode::from(exit_of(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.cmd {
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Constants { n, m } => cmd_constants(n, m),
        Cmd::Sweep(args) => cmd_sweep(args),
    }
}

fn resolve_config(args: &JobArgs) -> Result<JobConfig, CliError> {
    let mut cfg: JobConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?
        }
        None => {
            let family = args
                .family
                .as_deref()
                .ok_or_else(|| CliError::Usage("--family (or --config) is required".into()))?;
            JobConfig {
                family: Family::parse(family)?,
                n: 3,
                m: None,
                constants: BTreeMap::new(),
                xi_grid: None,
                alpha: None,
                tolerances: BTreeMap::new(),
                output: None,
                seed: None,
            }
        }
    };
    if let Some(f) = &args.family {
        cfg.family = Family::parse(f)?;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(m) = args.m {
        cfg.m = Some(m);
    }
    for (k, v) in parse_kv(&args.consts)? {
        cfg.constants.insert(k, v);
    }
    if args.xi_min.is_some() || args.xi_max.is_some() || args.xi_count.is_some() || args.margin.is_some() {
        let base = cfg.xi_grid.clone();
        let get = |flag: Option<f64>, old: Option<f64>, name: &str| -> Result<f64, CliError> {
            flag.or(old)
                .ok_or_else(|| CliError::Usage(format!("--{name} is required when overriding the grid")))
        };
        cfg.xi_grid = Some(XiGrid {
            min: get(args.xi_min, base.as_ref().map(|g| g.min), "xi-min")?,
            max: get(args.xi_max, base.as_ref().map(|g| g.max), "xi-max")?,
            count: args
                .xi_count
                .or(base.as_ref().map(|g| g.count))
                .ok_or_else(|| CliError::Usage("--xi-count is required when overriding the grid".into()))?,
            margin: args.margin.or(base.as_ref().map(|g| g.margin)).unwrap_or(qem::DEFAULT_MARGIN),
        });
    }
    if let Some(alpha) = &args.alpha {
        let comps: Result<Vec<f64>, _> = alpha.split(',').map(|s| s.trim().parse::<f64>()).collect();
        cfg.alpha = Some(comps.map_err(|_| CliError::Usage(format!("bad --alpha '{alpha}'")))?);
    }
    for (k, v) in parse_kv(&args.tols)? {
        cfg.tolerances.insert(k, v);
    }
    if args.format.is_some() || args.out.is_some() {
        let old = cfg.output.take();
        cfg.output = Some(OutputCfg {
            format: args.format.clone().or(old.as_ref().and_then(|o| o.format.clone())),
            path: args
                .out
                .as_ref()
                .map(|p| p.display().to_string())
                .or(old.and_then(|o| o.path)),
        });
    }
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    Ok(cfg)
}

fn emit(cfg: &JobConfig, payload: &str) -> Result<(), CliError> {
    match cfg.output.as_ref().and_then(|o| o.path.clone()) {
        Some(path) => fs::write(&path, payload).map_err(|e| CliError::Io(format!("{path}: {e}"))),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn cmd_solve(args: JobArgs) -> Result<u8, CliError> {
    let cfg = resolve_config(&args)?;
    let job = cfg.build()?;
    let mut rows = Vec::with_capacity(job.grid.len());
    for &xi in &job.grid {
        let s = job.profile.sample(xi)?;
        let mu = tensor::mu_at(&job.params, &job.profile, xi)?;
        rows.push(SolveRow {
            xi,
            phi: s.phi,
            dphi: s.dphi,
            d2phi: s.d2phi,
            u: s.u,
            du: s.du,
            d2u: s.d2u,
            f: -job.params.m() * s.u.ln(),
            mu,
        });
    }
    let format = cfg
        .output
        .as_ref()
        .and_then(|o| o.format.as_deref())
        .unwrap_or("csv");
    let payload = match format {
        "csv" => solve_csv(&rows),
        "json" => solve_json(&rows),
        other => return Err(CliError::Usage(format!("unknown format '{other}' (csv|json)"))),
    };
    emit(&cfg, &payload)?;
    Ok(0)
}

fn gate(report: &qem::ResidualReport, tol: &config::Tolerances) -> bool {
    report.fundamental_max <= tol.fundamental
        && report.ode_max.0 <= tol.ode
        && report.ode_max.1 <= tol.ode
        && report.pde_max.0 <= tol.pde
        && report.pde_max.1 <= tol.pde
        && report.hessian_identity_max <= tol.hessian_identity
        && report.mu_rel_var() <= tol.mu_rel_var
        && report.scalar_identity_max <= tol.scalar
}

fn cmd_verify(args: JobArgs) -> Result<u8, CliError> {
    let cfg = resolve_config(&args)?;
    let job = cfg.build()?;
    let report = verify_on_grid(&job.params, &job.profile, &job.grid)?;
    emit(&cfg, &report_json(&report))?;
    Ok(if gate(&report, &job.tolerances) { 0 } else { 1 })
}

fn cmd_constants(n: usize, m: f64) -> Result<u8, CliError> {
    let k = qem::quadrature::constants(n, m)?;
    let opt = |v: Option<f64>| v.map(f15).unwrap_or_else(|| "null".into());
    println!(
        "{{\"P\":{},\"Q\":{},\"R\":{},\"a\":{},\"b\":{},\"a1\":{},\"a2\":{}}}",
        f15(k.p),
        f15(k.q),
        f15(k.r),
        opt(k.a()),
        f15(k.b),
        opt(k.a1),
        opt(k.a2),
    );
    Ok(0)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<T>())
        .collect::<Result<Vec<T>, _>>()
        .map_err(|_| CliError::Usage(format!("bad {what} list '{s}'")))
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, CliError> {
    let cfg = resolve_config(&args.job)?;
    let n_list = match &args.n_list {
        Some(s) => parse_list::<usize>(s, "--n-list")?,
        None => vec![cfg.n],
    };
    // families with a forced m ignore the m grid; the rest need --m/--m-list
    let m_list = if JobConfig::forced_m(cfg.family, n_list[0]).is_some() {
        vec![0.0]
    } else {
        match (&args.m_list, cfg.m) {
            (Some(s), _) => parse_list::<f64>(s, "--m-list")?,
            (None, Some(m)) => vec![m],
            (None, None) => {
                return Err(CliError::Usage(format!(
                    "family {} requires --m or --m-list",
                    cfg.family.name()
                )))
            }
        }
    };
    let spec = sweep::SweepSpec {
        family: cfg.family,
        n_list,
        m_list,
        draws: args.draws,
        seed: cfg.seed.unwrap_or(0),
        base: cfg.clone(),
    };
    let outcome = sweep::run_sweep(&spec);
    emit(&cfg, &outcome.json)?;
    Ok(if outcome.any_fail { 1 } else { 0 })
}
