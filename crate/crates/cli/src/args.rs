use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eta_core::config::DEFAULT_NULLSPACE_TOL;
use eta_core::montecarlo::RotationPolicy;

#[derive(Debug, Parser)]
#[command(name = "eta", version, about = "Alignment-free Hardy-type Bell test on eight qubits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Record wall-clock start and finish times in the run manifest. Off by
    /// default so repeated runs produce byte-identical reports.
    #[arg(long, global = true)]
    pub timestamps: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct |eta> from the three zero-probability constraints.
    DeriveEta(DeriveEtaArgs),
    /// Check all four probability statements under random apparatus rotations.
    Verify(VerifyArgs),
    /// Enumerate every local deterministic strategy.
    LhvCheck(LhvCheckArgs),
    /// Simulate a finite-shot experiment.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, Args)]
pub struct DeriveEtaArgs {
    /// Nullspace threshold relative to the largest constraint eigenvalue.
    #[arg(long, default_value_t = DEFAULT_NULLSPACE_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// State file written by `derive-eta`.
    #[arg(long)]
    pub eta: PathBuf,
    /// Number of Haar-random rotation quadruples besides the aligned one.
    #[arg(long, default_value_t = 100)]
    pub rotations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LhvCheckArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Negate one classification entry, e.g. `G:0011`. Mutation test hook.
    #[arg(long, hide = true)]
    pub flip_entry: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Policy {
    Identity,
    FixedRandom,
    FreshPerBlock,
}

impl From<Policy> for RotationPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Identity => RotationPolicy::Identity,
            Policy::FixedRandom => RotationPolicy::FixedRandom,
            Policy::FreshPerBlock => RotationPolicy::FreshPerBlock,
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub eta: PathBuf,
    /// Shots per setting pair.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, value_enum, default_value = "fresh-per-block")]
    pub policy: Policy,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub block: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional CSV event log: block, setting pair, outcome bits.
    #[arg(long)]
    pub events: Option<PathBuf>,
}
