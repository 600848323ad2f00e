mod commands;
mod export;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use report::{Failure, Inputs};

#[derive(Parser, Debug)]
#[command(
    name = "tclab",
    version,
    about = "Exact curvature checks for toric and cohomogeneity-one metrics"
)]
struct Cli {
    /// Print the JSON report to stdout (the default).
    #[arg(long, global = true)]
    json: bool,

    /// Write sample rows to this CSV file (extremal, hermitian).
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<String>,

    /// Number of evenly spaced sample rows for --csv.
    #[arg(long, global = true, default_value_t = 101)]
    samples: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scalar curvature, adjugate identity and Einstein residuals of a toric potential.
    Curvature(CurvatureArgs),
    /// Extremal or Einstein profile on a fiberwise toric bundle.
    Extremal(ExtremalArgs),
    /// Hermitian profiles and the Hirzebruch family.
    Hermitian(HermitianArgs),
    /// Futaki invariant of a polytope or fiber data.
    Futaki(FutakiArgs),
    /// Diagonalizability of invariant metrics on a homogeneous space.
    Diag(DiagArgs),
    /// Checks for T²-symmetric four-dimensional metrics.
    T2(T2Args),
}

#[derive(Args, Debug)]
pub struct PotentialSource {
    /// Potential JSON file (catalog reference or explicit polytope).
    #[arg(long, value_name = "FILE", conflicts_with = "catalog")]
    pub potential: Option<String>,
    /// Catalog potential name.
    #[arg(long)]
    pub catalog: Option<String>,
    /// Comma-separated rational parameters of the catalog entry.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub params: String,
}

#[derive(Args, Debug)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub source: PotentialSource,
    /// Points per axis of the interior lattice.
    #[arg(long, default_value_t = 3)]
    pub grid: usize,
    /// Check the Einstein equation with this constant.
    #[arg(long, allow_hyphen_values = true)]
    pub einstein: Option<String>,
}

#[derive(Args, Debug)]
pub struct ExtremalArgs {
    /// Fiber data, e.g. "d=2,b=1/2,a=1;d=2,b=-1/2,a=1".
    #[arg(long, allow_hyphen_values = true)]
    pub fiber: String,
    /// Interval endpoints "x0,x1".
    #[arg(long, allow_hyphen_values = true, default_value = "-1,1")]
    pub interval: String,
    /// Require constant scalar curvature.
    #[arg(long, conflicts_with = "einstein")]
    pub csc: bool,
    /// Solve the Einstein equation with this constant instead.
    #[arg(long, allow_hyphen_values = true)]
    pub einstein: Option<String>,
}

#[derive(Args, Debug)]
pub struct HermitianArgs {
    /// Profile, e.g. "d=2,quad(-1/8,0,1/2),b=1/2;d=2,lin(1,1)".
    #[arg(long, allow_hyphen_values = true, required_unless_present = "family")]
    pub profile: Option<String>,
    /// Interval endpoints "x0,x1".
    #[arg(long, allow_hyphen_values = true, default_value = "-1,1")]
    pub interval: String,
    /// Hirzebruch family member "q,l".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "profile")]
    pub family: Option<String>,
}

#[derive(Args, Debug)]
pub struct FutakiArgs {
    /// Catalog polytope name.
    #[arg(long, conflicts_with_all = ["polytope_file", "fiber"])]
    pub polytope: Option<String>,
    /// Comma-separated rational parameters of the catalog polytope.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub params: String,
    /// Polytope JSON file.
    #[arg(long, value_name = "FILE", conflicts_with = "fiber")]
    pub polytope_file: Option<String>,
    /// Fiber data for the fiberwise invariant.
    #[arg(long, allow_hyphen_values = true)]
    pub fiber: Option<String>,
    /// Interval endpoints "x0,x1" for --fiber.
    #[arg(long, allow_hyphen_values = true, default_value = "-1,1")]
    pub interval: String,
}

#[derive(Args, Debug)]
pub struct DiagArgs {
    /// Orbit, e.g. stiefel:4, flag:2,2, su3u1, su2, t3.
    #[arg(long)]
    pub orbit: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum T2Check {
    Einstein,
    Rhoq,
    Bolts,
    Gravity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SchemeArg {
    Exact,
    Fd,
}

#[derive(Args, Debug)]
pub struct T2Args {
    /// Catalog metric: s4, cp2, s2xs2, page.
    #[arg(long, required_unless_present = "orbit")]
    pub example: Option<String>,
    /// Grid points per side (samples per bolt for gravity, intervals for bolts).
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "einstein")]
    pub check: T2Check,
    /// Derivative scheme for the Einstein residual.
    #[arg(long, value_enum, default_value = "exact")]
    pub scheme: SchemeArg,
    /// Pass threshold; defaults to 1e-8 (1e-6 for page and for the rhoq and geometric checks).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Orbit data "(m1,n1);(m2,n2);…".
    #[arg(long, conflicts_with = "example", allow_hyphen_values = true)]
    pub orbit: Option<String>,
    /// Report χ, τ, spin and the Hitchin–Thorpe gate for --orbit.
    #[arg(long, requires = "orbit")]
    pub invariants: bool,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("TCLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Input(format!(
            "TCLAB_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut inputs = Inputs::new(&argv);
    let outcome = configure_threads().and_then(|_| commands::dispatch(&cli, &mut inputs));
    let code = match outcome {
        Ok(out) => {
            let passed = out.passed;
            let report = out.into_report(&cli_name(&cli), &argv, &inputs);
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if passed {
                0
            } else {
                1
            }
        }
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    };
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}

fn cli_name(cli: &Cli) -> String {
    match cli.command {
        Command::Curvature(_) => "curvature",
        Command::Extremal(_) => "extremal",
        Command::Hermitian(_) => "hermitian",
        Command::Futaki(_) => "futaki",
        Command::Diag(_) => "diag",
        Command::T2(_) => "t2",
    }
    .to_string()
}
