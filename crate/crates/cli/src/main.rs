use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod parse;

#[derive(Parser, Debug)]
#[command(
    name = "nekolab",
    version,
    about = "Resonance lattices, stability envelopes and trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact lattice operations.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Stability exponents and envelopes.
    Envelope(EnvelopeArgs),
    /// Integrate one trajectory.
    Simulate(SimulateArgs),
    /// Stability times over an epsilon grid and a set of seeds.
    Sweep(SweepArgs),
    /// Fit the exponent a of T ~ exp(eps^-a).
    Fit(FitArgs),
    /// Run the exhaustive property suites.
    Selftest(SelftestArgs),
}

#[derive(Subcommand, Debug)]
enum LatticeCmd {
    /// Complete a primitive vector to a unimodular matrix.
    Complete {
        /// Comma separated components, e.g. 2,3.
        #[arg(long, allow_hyphen_values = true)]
        k: String,
    },
    /// Smith normal form of a full-rank basis.
    Smith {
        /// One or more rows; entries separated by spaces or commas, rows by ';'.
        #[arg(long, required = true, allow_hyphen_values = true)]
        rows: Vec<String>,
    },
    /// Rational of small height in [center - length/2, center + length/2].
    Dirichlet {
        #[arg(long, allow_hyphen_values = true)]
        center: f64,
        #[arg(long)]
        length: f64,
    },
    /// Covolume of a sub-module.
    Volume {
        #[arg(long, required = true, allow_hyphen_values = true)]
        rows: Vec<String>,
    },
    /// Upper bounds n!·|k|^(n-1) and |k| on the Lochak constants.
    Bounds {
        #[arg(long, allow_hyphen_values = true)]
        k: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    Analytic,
    Gevrey,
}

#[derive(Args, Debug)]
struct EnvelopeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "analytic")]
    regime: RegimeArg,
    /// Gevrey index (implies the Gevrey regime when > 1).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, conflicts_with = "gamma", required_unless_present = "gamma")]
    delta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Evaluate the envelope at this epsilon; without it only exponents are printed.
    #[arg(long)]
    eps: Option<f64>,
    /// JSON file with envelope constants (missing keys default to 1).
    #[arg(long)]
    constants: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    ImplicitMidpoint,
    Composed4,
}

#[derive(Args, Debug, Clone)]
struct IntegratorArgs {
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    #[arg(long, value_enum, default_value = "implicit-midpoint")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 1e-12)]
    fp_tol: f64,
    #[arg(long, default_value_t = 50)]
    fp_max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    energy_slack: f64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Horizon.
    #[arg(long = "t")]
    t: f64,
    #[command(flatten)]
    integrator: IntegratorArgs,
    /// Resonance order cutoff.
    #[arg(long = "k", default_value_t = 10.0)]
    order: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Report the first time the drift reaches rho.
    #[arg(long)]
    rho: Option<f64>,
    /// Seed for the initial angles when the spec gives none.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    sample_stride: usize,
    #[arg(long)]
    out: PathBuf,
    /// Continue when the spec fails its quasi-convexity or derivative checks.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Strictly decreasing comma separated list.
    #[arg(long)]
    eps: String,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 1e6)]
    t_max: f64,
    /// Seed range `a..b` or comma separated list.
    #[arg(long, default_value = "0..10")]
    seeds: String,
    /// Worker threads (0: one per core).
    #[arg(long, env = "NEKOLAB_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    integrator: IntegratorArgs,
    /// Count resonance crossings with this order cutoff.
    #[arg(long = "k")]
    order: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// A sweep JSON written by `nekolab sweep`.
    #[arg(
        long,
        conflicts_with = "synthetic",
        required_unless_present = "synthetic"
    )]
    sweep: Option<PathBuf>,
    /// Analytic table T = c2·exp(c3·eps^-a), e.g. "a=0.25" or "a=0.25,c2=1,c3=1".
    #[arg(long)]
    synthetic: Option<String>,
    /// Epsilon grid for the synthetic table.
    #[arg(long, default_value = "1e-1,3e-2,1e-2,3e-3,1e-3,3e-4,1e-4,3e-5,1e-5")]
    eps: String,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Test fixture: run with a known fault in the named routine.
    #[arg(long, hide = true, value_parser = ["completion-sign"])]
    inject_fault: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Lattice(cmd) => commands::lattice(cmd),
        Command::Envelope(args) => commands::envelope(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Fit(args) => commands::fit(args),
        Command::Selftest(args) => commands::selftest(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.kind(), "reason": e.to_string() })
            );
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
