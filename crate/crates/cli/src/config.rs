use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use krgraph::census::AlphaVariant;
use krgraph::enumeration::{DEFAULT_AUT_LIMIT, DEFAULT_ENUM_LIMIT};
use krgraph::graph::RNG_ID;
use krgraph::report::Real;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "krgraph",
    version,
    about = "Incompressible random graphs: sampling, statistics and exact counts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit a seeded uniform random graph.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nodes: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Report deficiency, degrees, common neighbours, diameter,
    /// connectivity, clique number and automorphisms of a graph file.
    Analyze {
        /// Graph file (native `n:hex` or graph6); `-` reads stdin.
        input: PathBuf,
        /// Uniform strings used to measure compressor overhead; 0 disables.
        #[arg(long, default_value_t = 0)]
        calibration_samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Count every k-node pattern and test counts against the frequency bound.
    Census {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), required_unless_present = "input")]
        nodes: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        /// Random graphs with seeds `seed, seed+1, …`.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Census a graph file instead of sampling.
        #[arg(long, conflicts_with_all = ["nodes", "samples"])]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Alpha::Unit)]
        alpha: Alpha,
        /// Skip the cover decomposition (allows k not dividing n).
        #[arg(long)]
        no_covers: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Partition all k-subsets of {1..n} into covers of disjoint k-sets.
    Covers {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nodes: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact unlabeled graph counts for 1..=n nodes, checked two ways.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nodes: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the deviation, frequency and automorphism bounds.
    Bounds {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nodes: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: Option<u64>,
        /// Block length in bits.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        l: u64,
        /// Complexity of the block; defaults to the length-based surrogate.
        #[arg(long)]
        k_y: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Alpha::Unit)]
        alpha: Alpha,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Additive constant `c` in the bounds.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c_const: f64,
    /// Additive constant in the complexity surrogates.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub ck_const: f64,
    #[arg(long, default_value = "deflate", value_parser = ["deflate", "zlib"])]
    pub compressor: String,
    /// Defaults per command: `native` for gen, `json` otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, env = "KRGRAPH_LIMIT_ENUM", default_value_t = DEFAULT_ENUM_LIMIT)]
    pub limit_enum: usize,
    #[arg(long, env = "KRGRAPH_LIMIT_AUT", default_value_t = DEFAULT_AUT_LIMIT)]
    pub limit_aut: usize,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Graph6,
    Native,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alpha {
    Unit,
    BlockScaled,
}

impl From<Alpha> for AlphaVariant {
    fn from(a: Alpha) -> Self {
        match a {
            Alpha::Unit => AlphaVariant::Unit,
            Alpha::BlockScaled => AlphaVariant::BlockScaled,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Limits {
    pub enumeration: usize,
    pub automorphisms: usize,
}

/// Everything that determines a command's output, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub seed: u64,
    pub samples: u64,
    pub c_const: Real,
    pub c_k: Real,
    pub delta: Option<Real>,
    pub k_y: Option<Real>,
    pub alpha: Option<AlphaVariant>,
    pub covers: Option<bool>,
    pub calibration_samples: Option<usize>,
    pub compressor_id: String,
    pub format: Format,
    pub limits: Limits,
    pub input: Option<String>,
    pub output: Option<String>,
    pub rng: &'static str,
}

impl RunConfig {
    pub fn new(command: &'static str, common: &Common, default_format: Format) -> Self {
        Self {
            command,
            n: None,
            k: None,
            l: None,
            seed: common.seed,
            samples: 1,
            c_const: Real(common.c_const),
            c_k: Real(common.ck_const),
            delta: None,
            k_y: None,
            alpha: None,
            covers: None,
            calibration_samples: None,
            compressor_id: common.compressor.clone(),
            format: common.format.unwrap_or(default_format),
            limits: Limits {
                enumeration: common.limit_enum,
                automorphisms: common.limit_aut,
            },
            input: None,
            output: common.out.as_ref().map(|p| p.display().to_string()),
            rng: RNG_ID,
        }
    }
}
