use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cheblanczos::filter::{DEFAULT_EPSILON, DEFAULT_MAX_DEGREE};
use cheblanczos::lanczos::DEFAULT_BOUNDS_STEPS;
use cheblanczos::sparse::write_dense_array;
use cheblanczos::{estimate_spectral_bounds, load_matrix_market, DegreeRule, Error};
use cheblanczos_cli::{
    dump_filter, exit_code, format_table, matrix_name, parse_degrees, run_bench, run_solve, to_csv,
    SolveOptions, SolveReport, EXIT_NOT_CONVERGED,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cheblanczos",
    version,
    about = "Interval eigensolver for sparse symmetric matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all eigenpairs in [lo, hi].
    Solve(SolveArgs),
    /// Print the coefficients and samples of a filter polynomial.
    FilterInfo(FilterArgs),
    /// Size, sparsity and estimated spectral interval of a matrix.
    Info(InfoArgs),
    /// Solve the same interval once per filter degree.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Matrix Market file.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 3)]
    block: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
    max_degree: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 3000)]
    max_dim: usize,
    /// Block steps between convergence checks.
    #[arg(long, default_value_t = 10)]
    check_every: usize,
    #[arg(long, default_value_t = 5)]
    extra_ritz: usize,
    #[arg(long, default_value_t = DEFAULT_BOUNDS_STEPS)]
    bounds_steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverFlags {
    fn options(&self, degree: Option<usize>, plain: bool) -> SolveOptions {
        SolveOptions {
            block_size: self.block,
            degree,
            epsilon: self.epsilon,
            max_degree: self.max_degree,
            tol: self.tol,
            max_dim: self.max_dim,
            check_every: self.check_every,
            extra_ritz: self.extra_ritz,
            bounds_steps: self.bounds_steps,
            seed: self.seed,
            plain,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    flags: SolverFlags,
    /// Fixed filter degree (automatic otherwise).
    #[arg(long)]
    degree: Option<usize>,
    /// Run Lanczos on A itself, without a filter.
    #[arg(long)]
    plain: bool,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the eigenvectors as a Matrix Market array.
    #[arg(long)]
    vectors: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, conflicts_with = "epsilon")]
    degree: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
    max_degree: usize,
    /// Spectral bounds as `lo,hi`.
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    bounds: String,
    #[arg(long, default_value_t = 2001)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BOUNDS_STEPS)]
    bounds_steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    flags: SolverFlags,
    /// Comma-separated degrees; `auto` uses the automatic rule.
    #[arg(long, default_value = "auto")]
    degrees: String,
    /// Solves per row; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Error carrying the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e) as u8,
            msg: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        msg: format!("{}: {e}", path.display()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::FilterInfo(args) => cmd_filter_info(args),
        Command::Info(args) => cmd_info(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Failure> {
    let flags = &args.flags;
    let opts = flags.options(args.degree, args.plain);
    let interval = (flags.lo, flags.hi);
    if !(flags.lo < flags.hi) {
        return Err(Error::InvalidInterval {
            alpha: flags.lo,
            beta: flags.hi,
            reason: "need lo < hi".into(),
        }
        .into());
    }
    let a = load_matrix_market(&flags.matrix)?;
    let name = matrix_name(&flags.matrix);
    let (report, res) = match run_solve(&a, &name, interval, &opts) {
        Ok(ok) => ok,
        Err(e) => {
            if let Some(out) = &args.out {
                write_text(
                    out,
                    &SolveReport::from_error(&name, interval, &opts, &e).to_json(),
                )?;
            }
            return Err(e.into());
        }
    };
    if let Some(out) = &args.out {
        write_text(out, &report.to_json())?;
    }
    if let Some(path) = &args.vectors {
        let file = File::create(path).map_err(|e| io_failure(path, e))?;
        write_dense_array(&res.eigenvectors, BufWriter::new(file))?;
    }
    for v in &report.eigenvalues {
        println!("{v:.15e}");
    }
    eprintln!(
        "{} eigenvalues in [{}, {}], m = {}, iters = {}, MV = {}, residual = {:.2e}, {:.3} s",
        report.eigs,
        flags.lo,
        flags.hi,
        report.m.map_or_else(|| "-".into(), |m| m.to_string()),
        report.iters,
        report.mv,
        report.max_residual,
        report.time_s
    );
    if report.converged {
        Ok(0)
    } else {
        eprintln!("warning: not converged within max_dim = {}", flags.max_dim);
        Ok(EXIT_NOT_CONVERGED as u8)
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure {
        code: 2,
        msg: format!("bad bounds `{s}`: expected lo,hi"),
    };
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn cmd_filter_info(args: FilterArgs) -> Result<u8, Failure> {
    let bounds = parse_pair(&args.bounds)?;
    let rule = match args.degree {
        Some(m) => DegreeRule::Fixed(m),
        None => DegreeRule::Auto {
            epsilon: args.epsilon.unwrap_or(DEFAULT_EPSILON),
            max_degree: args.max_degree,
        },
    };
    let dump = dump_filter(args.lo, args.hi, bounds, rule, args.samples)?;
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&dump).expect("dump serializes")
        ),
        Format::Csv => print!(
            "{}",
            dump.to_csv().map_err(|e| Failure {
                code: 1,
                msg: e.to_string()
            })?
        ),
    }
    if dump.degree_clamped {
        eprintln!("warning: degree capped at {}", dump.degree);
    }
    Ok(0)
}

fn cmd_info(args: InfoArgs) -> Result<u8, Failure> {
    let a = load_matrix_market(&args.matrix)?;
    let (bounds, _) = estimate_spectral_bounds(&a, args.bounds_steps, args.seed)?;
    let (n, nnz) = (a.n(), a.nnz());
    let ratio = nnz as f64 / n as f64;
    if args.json {
        let v = serde_json::json!({
            "matrix": matrix_name(&args.matrix),
            "n": n,
            "nnz": nnz,
            "nnz_per_row": ratio,
            "interval": [bounds.lambda_min(), bounds.lambda_max()],
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("matrix    {}", matrix_name(&args.matrix));
        println!("n         {n}");
        println!("nnz       {nnz}");
        println!("nnz/n     {ratio:.2}");
        println!(
            "interval  [{:.6}, {:.6}]",
            bounds.lambda_min(),
            bounds.lambda_max()
        );
    }
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Failure> {
    let flags = &args.flags;
    let degrees = parse_degrees(&args.degrees).map_err(|msg| Failure { code: 2, msg })?;
    if !(flags.lo < flags.hi) {
        return Err(Error::InvalidInterval {
            alpha: flags.lo,
            beta: flags.hi,
            reason: "need lo < hi".into(),
        }
        .into());
    }
    let a = load_matrix_market(&flags.matrix)?;
    let name = matrix_name(&flags.matrix);
    let rows = run_bench(
        &a,
        &name,
        (flags.lo, flags.hi),
        &degrees,
        &flags.options(None, false),
        args.repeat,
    );
    print!("{}", format_table(&rows));
    if let Some(out) = &args.out {
        write_text(
            out,
            &serde_json::to_string_pretty(&rows).expect("rows serialize"),
        )?;
    }
    if let Some(path) = &args.csv {
        let text = to_csv(&rows).map_err(|e| io_failure(path, e))?;
        write_text(path, &text)?;
    }
    Ok(0)
}
