use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Reproduce single-particle MAC results as CSV/JSON artifacts.
#[derive(Parser, Debug)]
#[command(name = "spmac", version, about)]
pub struct RunConfig {
    /// Write the artifact here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Artifact format; each command has a natural default
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for randomized restarts and Monte Carlo runs
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Stopping tolerance for iterative solvers
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Recompute every acceptance number
    Reproduce {
        #[command(subcommand)]
        what: ReproduceCmd,
    },
    /// One-sender coherence-assisted protocol
    #[command(name = "one-sender")]
    OneSender {
        #[command(subcommand)]
        what: OneSenderCmd,
    },
    /// Binary plus ternary two-sender protocol
    #[command(name = "two-sender")]
    TwoSender {
        #[command(subcommand)]
        what: TwoSenderCmd,
    },
    /// Holevo information of the phase-encoded ensembles
    Holevo {
        #[command(subcommand)]
        what: HolevoCmd,
    },
    /// Best rate sum over product priors via alternating Blahut-Arimoto
    Ratesum(RatesumArgs),
    /// Classical single-particle MACs
    Classical {
        #[command(subcommand)]
        what: ClassicalCmd,
    },
    /// Pentagon of a two-sender channel at a fixed prior
    Region(RegionArgs),
    /// Model of the optical experiment
    Experiment {
        #[command(subcommand)]
        what: ExperimentCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReproduceCmd {
    /// Manifest of every criterion with computed value, reference and verdict
    All {
        /// Only these criteria (comma list)
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum OneSenderCmd {
    /// Optimal (q, theta) and value with alpha = pi
    Optimize,
    /// Accessible information at one point
    AccInfo {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        theta: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum TwoSenderCmd {
    /// Optimal (q, q', theta) in the symmetric basis
    Ternary,
}

#[derive(Subcommand, Debug)]
pub enum HolevoCmd {
    /// Closed-form one-sender optimum
    OneSender,
    /// Equal-superposition phase ensembles
    Logn {
        #[arg(long)]
        n: usize,
        /// Include the untouched reference path
        #[arg(long)]
        assisted: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolKind {
    /// N phase senders plus a reference path
    Assisted,
    /// Canonical classical MAC with equal path weights
    Classical,
}

#[derive(Args, Debug)]
pub struct RatesumArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "assisted")]
    pub protocol: ProtocolKind,
    /// Number of random restarts
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
}

#[derive(Subcommand, Debug)]
pub enum ClassicalCmd {
    /// Corner points over a lambda grid on [0, 1]
    Region {
        #[arg(long, default_value_t = 201)]
        grid: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegionProtocol {
    /// Two-sender assisted channel
    Assisted2,
    /// The same channel in display labeling
    Balanced,
    /// Canonical classical MAC, path-1 weight from --lambda
    Classical,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    #[arg(long, value_enum, default_value = "assisted2")]
    pub protocol: RegionProtocol,
    /// Probability of input 0 for each sender (comma list); defaults to the reference prior
    #[arg(long, value_delimiter = ',')]
    pub prior: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Fixed,
    Optimized,
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCmd {
    /// Detector efficiency below which the rate drops to one bit
    EtaThreshold {
        #[arg(long, value_enum, default_value = "fixed")]
        policy: Policy,
    },
    /// Rate versus detector efficiency
    EtaCurve {
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, value_enum, default_value = "fixed")]
        policy: Policy,
    },
    /// Rate sum under reduced interference visibility
    Visibility {
        #[arg(long)]
        vs: Option<f64>,
        #[arg(long)]
        vz: Option<f64>,
        /// Emit a grid x grid surface instead of one point
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Simulated photon counts and error bars
    Montecarlo(MonteCarloArgs),
}

#[derive(Args, Debug)]
pub struct MonteCarloArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub vs: f64,
    #[arg(long, default_value_t = 1.0)]
    pub vz: f64,
    /// Random input tuples
    #[arg(long, default_value_t = 680)]
    pub n: usize,
    /// Photons per tuple
    #[arg(long, default_value_t = 600)]
    pub m: u64,
    /// Probability of input 0 per sender (comma list)
    #[arg(long, value_delimiter = ',')]
    pub prior: Vec<f64>,
    /// Seeded repetitions; more than one reports batch statistics
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
}
