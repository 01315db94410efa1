use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perron_core::{SamplingMode, Side};

#[derive(Parser, Debug)]
#[command(name = "perron", version, args_override_self = true)]
#[command(about = "Exact Perron-series digits, cylinder geometry and measure experiments")]
#[command(after_help = "\
EXAMPLES:
    perron expand --family luroth --side alt --x 2/5 --depth 4
    perron cylinder --family pierce --side alt --base 2,3
    perron measure-cover --family luroth --v 2,3 --depth 10
    perron digit-law --family luroth --samples 100000 --seed 7 --format csv
    perron stats renyi --family pierce --side alt --n 40 --samples 200 --bits 4096

Flags may also come from a JSON object passed with --config; command-line
flags win. PERRON_MAX_DEPTH caps every depth, position and n.")]
pub struct Cli {
    /// JSON file whose keys supply flag values, e.g. {\"family\": \"luroth\", \"depth\": 10}
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Digits of a rational x, with boundary detection on the alternating side
    Expand {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value = "alternating")]
        side: SideArg,
        /// Point as "num/den"
        #[arg(long)]
        x: String,
        #[arg(long)]
        depth: usize,
        /// Largest digit size, in bits, before extraction gives up
        #[arg(long, default_value_t = 64)]
        max_digit_bits: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Partial sum and exact enclosure of a digit prefix
    Reconstruct {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value = "alternating")]
        side: SideArg,
        /// Comma-separated digits
        #[arg(long)]
        base: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Endpoints and length of a cylinder
    Cylinder {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value = "alternating")]
        side: SideArg,
        #[arg(long)]
        base: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Order two digit sequences by value
    Compare {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value = "alternating")]
        side: SideArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Image of a point (--x, --depth) or a cylinder (--base) under the
    /// digit-preserving map to the alternating side
    Transport {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, conflicts_with = "base", requires = "depth")]
        x: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, required_unless_present = "x")]
        base: Option<String>,
        #[arg(long, default_value_t = 64)]
        max_digit_bits: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Total length of the depth-d cylinders whose digits all lie in V
    MeasureCover {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value = "alternating")]
        side: SideArg,
        /// Allowed digits, comma-separated
        #[arg(long)]
        v: String,
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte-Carlo law of the digit at one position against the exact law
    DigitLaw {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value = "alternating")]
        side: SideArg,
        #[arg(long, default_value_t = 1)]
        position: usize,
        /// Digits tracked individually; larger ones are pooled into the tail
        #[arg(long, default_value_t = 10)]
        max_digit: u64,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Digit statistics experiments
    Stats {
        #[command(subcommand)]
        kind: StatsCommand,
    },
    /// List the built-in families
    Families {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Parse and normalize a φ rule, optionally evaluating it on digits
    ParsePhi {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "1")]
        phi0: String,
        /// Digits to validate and evaluate the r-chain on
        #[arg(long)]
        digits: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum StatsCommand {
    /// Spread of (log p_n - n)/sqrt(n) and (1/n) log p_n over samples
    Renyi {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value = "alternating")]
        side: SideArg,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Digit frequencies at several positions
    Frequency {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value = "alternating")]
        side: SideArg,
        /// Positions as a list ("1,2,5") or a range ("1-8"), at most 64
        #[arg(long, default_value = "1-8")]
        positions: String,
        #[arg(long, default_value_t = 10)]
        max_digit: u64,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// (1/n) log p_n along one digit sequence
    Growth {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value = "alternating")]
        side: SideArg,
        #[arg(long)]
        digits: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Exactly one of --family or --phi.
#[derive(Args, Debug, Clone)]
pub struct ProgramArgs {
    /// Built-in family (see `perron families`)
    #[arg(long)]
    pub family: Option<String>,
    /// Custom rule for φ_n, e.g. "x(n) - 1"
    #[arg(long)]
    pub phi: Option<String>,
    /// φ_0 for a custom rule (default 1)
    #[arg(long)]
    pub phi0: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Random bits per sample (at least 32)
    #[arg(long, default_value_t = 64)]
    pub bits: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "transported")]
    pub mode: ModeArg,
    /// Refinement cap in bits
    #[arg(long, default_value_t = 65_536)]
    pub max_bits: u64,
    /// Worker threads; results do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideArg {
    #[value(alias = "pos")]
    Positive,
    #[value(alias = "alt")]
    Alternating,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Positive => Side::Positive,
            SideArg::Alternating => Side::Alternating,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Transported,
    Direct,
}

impl From<ModeArg> for SamplingMode {
    fn from(m: ModeArg) -> SamplingMode {
        match m {
            ModeArg::Transported => SamplingMode::Transported,
            ModeArg::Direct => SamplingMode::Direct,
        }
    }
}
