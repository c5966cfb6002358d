mod commands;
mod config;
mod tables;

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use solvfrag::Method;

use config::{FileConfig, Format};

#[derive(Parser)]
#[command(
    name = "solvfrag",
    version,
    about = "Partition Hamiltonians into exactly solvable fragments and verify the solutions"
)]
struct Cli {
    /// TOML file with default settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Qubit cap for dense checks.
    #[arg(long, global = true)]
    max_qubits: Option<usize>,
    /// Spin-orbital cap for dense checks.
    #[arg(long, global = true)]
    max_spin_orbitals: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Greedy partition of a qubit Hamiltonian.
    Partition(PartitionArgs),
    /// Decompose a fermionic two-body tensor.
    Fpartition(FpartitionArgs),
    /// Analytic sector solutions of non-contextual fragments.
    SolveFragment(SolveArgs),
    /// Dense-oracle and identity checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Partition the extended Heisenberg chain.
    Heisenberg(HeisenbergArgs),
    /// Print counts and digests of a data file.
    Inspect(InspectArgs),
    /// Fragment-count tables over the fixture set.
    BenchTable(BenchArgs),
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: solvfrag::Error| e.to_string())
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Greedy passes; later passes reorder terms by the previous fragments.
    #[arg(long)]
    sweeps: Option<usize>,
    /// Write the fragment set here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FermionMethod {
    Lr,
    Gfro,
    Gmf,
}

#[derive(Args)]
struct FpartitionArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: FermionMethod,
    /// Size of S_2 for gmf (default n/2).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Fragment set or qubit Hamiltonian file.
    #[arg(long)]
    input: PathBuf,
    /// Only this fragment of a fragment set.
    #[arg(long)]
    fragment: Option<usize>,
    /// Enumerate sectors even above the generator limit.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Reassembly and criterion certificates; dense spectra with --dense.
    Partition {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_method)]
        method: Method,
        #[arg(long)]
        sweeps: Option<usize>,
        #[arg(long)]
        dense: bool,
    },
    /// Factorization round trip; dense spectrum and diagonalizer with --dense.
    Fragment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        fragment: Option<usize>,
        #[arg(long)]
        dense: bool,
    },
    /// Random block-exponential and product-form identity checks.
    #[command(name = "appendix-a")]
    AppendixA {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Simulated conditioned measurement of every fragment.
    Measure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_method, default_value = "nc")]
        method: Method,
        #[arg(long, default_value_t = 100_000)]
        shots: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "ground")]
        state: StateChoice,
    },
    /// Reassembly of a fermionic fragment file against its tensor.
    Fpartition {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tensor: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StateChoice {
    Ground,
    Random,
}

#[derive(Args)]
struct HeisenbergArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_method, default_value = "nc")]
    method: Method,
    #[arg(long, default_value_t = 256)]
    sweeps: usize,
    /// Write the fragment set here.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the generated Hamiltonian here.
    #[arg(long)]
    write_model: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    table: u8,
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Include NH3.
    #[arg(long)]
    slow: bool,
    #[arg(long)]
    sweeps: Option<usize>,
}

/// Output of a command: a JSON report, its text rendering and an optional verdict.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub passed: Option<bool>,
}

pub fn verdict(pass: bool) -> String {
    let color = std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal();
    match (pass, color) {
        (true, true) => "\x1b[32mPASS\x1b[0m".into(),
        (false, true) => "\x1b[31mFAIL\x1b[0m".into(),
        (true, false) => "PASS".into(),
        (false, false) => "FAIL".into(),
    }
}

fn run(cli: Cli) -> anyhow::Result<(Report, Format)> {
    let cfg = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let format = cli.format.or(cfg.format).unwrap_or_default();
    let mut limits = cfg.dense.unwrap_or_default();
    if let Some(q) = cli.max_qubits {
        limits.max_qubits = q;
    }
    if let Some(s) = cli.max_spin_orbitals {
        limits.max_spin_orbitals = s;
    }
    let ctx = commands::Context { cfg, limits };
    let report = match cli.command {
        Command::Partition(a) => ctx.partition(&a.input, a.method, a.sweeps, a.output.as_deref())?,
        Command::Fpartition(a) => ctx.fpartition(&a)?,
        Command::SolveFragment(a) => ctx.solve_fragment(&a.input, a.fragment, a.force)?,
        Command::Verify(v) => match v {
            VerifyCommand::Partition {
                input,
                method,
                sweeps,
                dense,
            } => ctx.verify_partition(&input, method, sweeps, dense)?,
            VerifyCommand::Fragment {
                input,
                fragment,
                dense,
            } => ctx.verify_fragment(&input, fragment, dense)?,
            VerifyCommand::AppendixA { trials, dim, seed } => ctx.verify_block_exp(trials, dim, seed)?,
            VerifyCommand::Measure {
                input,
                method,
                shots,
                seed,
                state,
            } => ctx.verify_measure(&input, method, shots, seed, state)?,
            VerifyCommand::Fpartition { input, tensor } => ctx.verify_fpartition(&input, &tensor)?,
        },
        Command::Heisenberg(a) => ctx.heisenberg(&a)?,
        Command::Inspect(a) => ctx.inspect(&a.input)?,
        Command::BenchTable(a) => tables::bench_table(&ctx, &a)?,
    };
    Ok((report, format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, format)) => {
            let body = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report.json).expect("report serialization");
                    s.push('\n');
                    s
                }
                Format::Text => report.text,
            };
            // a closed pipe is not an error
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            if report.passed == Some(false) {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
