use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "subpack",
    version,
    about = "Sub-packetized embedded index coding"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format. Defaults depend on the subcommand.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for random messages.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the main output here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate parameters and write an instance file.
    Instance(InstanceArgs),
    /// Encode, broadcast, and decode one exchange; writes the transcript.
    Run(RunArgs),
    /// Certify decodability with the GF(2) rank oracle.
    Verify(VerifyArgs),
    /// Compare achievable and baseline rates over a range of N.
    Rates(RatesArgs),
    /// Print the transmission and decode tables of a worked example.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Number of users and messages.
    #[arg(long = "N")]
    pub n: usize,
    /// Side-information window size.
    #[arg(long)]
    pub s: usize,
    /// Window offset.
    #[arg(long, default_value_t = 0)]
    pub a: usize,
    /// Message length in bits.
    #[arg(long = "d-bits")]
    pub d_bits: usize,
    /// Demand map as JSON (`{"0": [3]}`) or `@path` to a JSON file. Users not
    /// listed demand every message outside their window.
    #[arg(long)]
    pub demands: Option<String>,
    /// Round `d-bits` up to the next length that splits into whole-byte blocks.
    #[arg(long)]
    pub align: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["messages", "random"])))]
pub struct RunArgs {
    /// Instance file.
    pub instance: PathBuf,
    /// Raw message file: the N messages concatenated, `N * d / 8` bytes.
    #[arg(long)]
    pub messages: Option<PathBuf>,
    /// Draw messages from the seeded generator instead.
    #[arg(long)]
    pub random: bool,
    /// Zero-pad messages when `d` does not split into whole-byte blocks.
    #[arg(long)]
    pub pad: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["instance", "all"])))]
pub struct VerifyArgs {
    /// Instance file.
    pub instance: Option<PathBuf>,
    /// Sweep every CDE instance with `N-min <= N <= N-max`.
    #[arg(long, requires = "n_max")]
    pub all: bool,
    #[arg(long = "N-min", default_value_t = 3)]
    pub n_min: usize,
    #[arg(long = "N-max")]
    pub n_max: Option<usize>,
    /// Ignore each user's own transmissions.
    #[arg(long)]
    pub strict: bool,
    /// Certify this schedule file instead of the constructed one.
    #[arg(long, conflicts_with = "all")]
    pub schedule: Option<PathBuf>,
    /// Write the schedule being certified, e.g. to hand-edit for `--schedule`.
    #[arg(long = "emit-schedule", conflicts_with = "all")]
    pub emit_schedule: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long = "N-min")]
    pub n_min: usize,
    #[arg(long = "N-max")]
    pub n_max: usize,
    /// Fail unless every row covered by a sufficient condition is strictly better.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Worked example: 1, 2, or 3.
    pub example: usize,
    /// Also write the transcript of the demo run.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
}
