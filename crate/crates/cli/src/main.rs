use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use semirad::campaign::{self, CampaignConfig, RankPolicy};
use semirad::error::{CliError, CliResult};
use semirad::io::{read_matrix, write_json, write_matrix};
use semirad_core::ensembles::{random_pair, ARank, EnsembleSpec, OperandKind};
use semirad_core::inequalities::{list_checks, CheckId, Evaluator, Params};
use semirad_core::oracle::{direct_a_sphere_tuple, OracleConfig};
use semirad_core::radii;
use semirad_core::{AContext, Complex64, ContextOptions};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "semirad", version, about = "Radii of operators on semi-Hilbertian spaces and checks of their inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    W,
    C,
    Norm,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a positive operator A and print its diagnostics.
    Context {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        rank_tol: Option<f64>,
        #[arg(long)]
        residual_tol: Option<f64>,
    },
    /// Generate a random instance (A, B, C) into a directory.
    Gen {
        #[arg(long)]
        dim: usize,
        /// Rank of A; full rank when omitted.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value = "generic")]
        kind: OperandKind,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, env = "SEMIRAD_SEED", default_value_t = 0)]
        seed: u64,
        /// Directory receiving a.json, b.json, c.json and spec.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// A-numerical radius, A-Crawford number or A-seminorm of T.
    Radius {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        t: PathBuf,
        #[arg(long, value_enum, default_value = "w")]
        quantity: Quantity,
    },
    /// A-Euclidean radius of the pair (B, C).
    Euclid {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: PathBuf,
    },
    /// Direct ascent over the A-unit sphere for T, or for the pair (T, C).
    Oracle {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        c: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, env = "SEMIRAD_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate one registered check.
    Check {
        /// Print the catalogue of checks instead.
        #[arg(long)]
        list: bool,
        #[arg(long, required_unless_present = "list")]
        id: Option<CheckId>,
        #[arg(long, required_unless_present = "list")]
        a: Option<PathBuf>,
        #[arg(long, required_unless_present = "list")]
        b: Option<PathBuf>,
        #[arg(long)]
        c: Option<PathBuf>,
        /// Complex parameter as `re,im` or `re`.
        #[arg(long, value_parser = parse_complex)]
        alpha: Option<Complex64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        bohr_exponent: Option<f64>,
        #[arg(long, env = "SEMIRAD_SEED")]
        seed: Option<u64>,
    },
    /// Run a randomized campaign over dimensions, ranks and checks.
    Campaign {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,6")]
        dims: Vec<usize>,
        #[arg(long, default_value = "both")]
        ranks: RankPolicy,
        #[arg(long, default_value_t = 250)]
        trials: usize,
        /// Comma-separated check ids; all checks when omitted.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<CheckId>,
        #[arg(long, env = "SEMIRAD_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Recompute a logged failure record.
    Replay { record: PathBuf },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected 're,im', got '{s}'")),
    }
}

fn load_context(path: &Path, rank_tol: Option<f64>, residual_tol: Option<f64>) -> CliResult<AContext> {
    let a = read_matrix(path)?;
    let mut opts = ContextOptions::default();
    if let Some(t) = rank_tol {
        opts.rank_tol = t;
    }
    if let Some(t) = residual_tol {
        opts.residual_tol = t;
    }
    Ok(AContext::new(&a, opts)?)
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json { path: "<stdout>".into(), source })?;
    stdout_result(writeln!(std::io::stdout().lock(), "{text}"))
}

/// A closed pipe (`semirad ... | head`) is not an error.
fn stdout_result(r: std::io::Result<()>) -> CliResult<()> {
    match r {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Context { a, rank_tol, residual_tol } => {
            let ctx = load_context(&a, rank_tol, residual_tol)?;
            print_json(&ctx.diagnostics())?;
        }
        Command::Gen { dim, rank, kind, scale, seed, out } => {
            let spec = EnsembleSpec { dim, a_rank: rank.map_or(ARank::Full, ARank::Rank), operand_kind: kind, scale, seed };
            let inst = random_pair(&spec)?;
            std::fs::create_dir_all(&out).map_err(|source| CliError::Io { path: out.clone(), source })?;
            write_matrix(&out.join("a.json"), inst.ctx.a())?;
            write_matrix(&out.join("b.json"), &inst.b)?;
            write_matrix(&out.join("c.json"), &inst.c)?;
            write_json(&out.join("spec.json"), &spec)?;
        }
        Command::Radius { a, t, quantity } => {
            let ctx = load_context(&a, None, None)?;
            let t = read_matrix(&t)?;
            let r = match quantity {
                Quantity::W => radii::a_numerical_radius(&ctx, &t)?,
                Quantity::C => radii::a_crawford(&ctx, &t)?,
                Quantity::Norm => radii::a_op_norm(&ctx, &t)?,
            };
            print_json(&r)?;
        }
        Command::Euclid { a, b, c } => {
            let ctx = load_context(&a, None, None)?;
            let r = radii::a_euclidean_radius(&ctx, &read_matrix(&b)?, &read_matrix(&c)?)?;
            print_json(&r)?;
        }
        Command::Oracle { a, t, c, restarts, samples, seed } => {
            let ctx = load_context(&a, None, None)?;
            let mut ops = vec![read_matrix(&t)?];
            if let Some(c) = c {
                ops.push(read_matrix(&c)?);
            }
            let cfg = OracleConfig { n_restarts: restarts, n_samples: samples, ..OracleConfig::with_seed(seed) };
            print_json(&direct_a_sphere_tuple(&ctx, &ops, &cfg)?)?;
        }
        Command::Check { list: true, .. } => {
            let mut out = std::io::stdout().lock();
            for info in list_checks() {
                stdout_result(writeln!(out, "{:<20} {:<12} {}", info.id.name(), info.signature.describe(), info.description))?;
            }
        }
        Command::Check { id, a, b, c, alpha, t, samples, bohr_exponent, seed, .. } => {
            let (Some(id), Some(a), Some(b)) = (id, a, b) else {
                return Err(CliError::ConfigInvalid("--id, --a and --b are required".into()));
            };
            let ctx = load_context(&a, None, None)?;
            let b = read_matrix(&b)?;
            let c = c.map(|p| read_matrix(&p)).transpose()?;
            let params = Params { alpha, t, samples, bohr_exponent, seed, ..Params::default() };
            let report = Evaluator::new(&ctx).evaluate(id, &b, c.as_ref(), &params)?;
            print_json(&report)?;
            if !report.pass {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Campaign { dims, ranks, trials, checks, seed, rel_tol, out, csv, threads } => {
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
            }
            let cfg = CampaignConfig { dims, ranks, trials_per_cell: trials, checks, seed, rel_tol };
            let report = campaign::run_campaign(&cfg)?;
            if let Some(path) = &csv {
                campaign::write_csv(path, &report.rows)?;
            }
            match &out {
                Some(path) => write_json(path, &report)?,
                None => print_json(&report)?,
            }
            for (id, agg) in &report.checks {
                eprintln!(
                    "{:<20} {:>6}/{:<6} min slack {:>12.4e}  min margin {:>12.4e}",
                    id.name(),
                    agg.pass_count,
                    agg.count,
                    agg.min_slack,
                    agg.min_margin
                );
            }
            if !report.all_pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Replay { record } => {
            let text = std::fs::read_to_string(&record).map_err(|source| CliError::Io { path: record.clone(), source })?;
            let rec = campaign::parse_failure(&text)?;
            let report = campaign::replay(&rec)?;
            print_json(&report)?;
            if !report.pass {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
