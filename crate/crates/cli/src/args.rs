use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relim_core::sim::InstanceKind;
use relim_core::Side;

#[derive(Parser, Debug)]
#[command(name = "relim", version, about = "Round elimination on bipartite edge-labeling problems")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    pub format: Format,

    /// Largest alphabet the engine accepts.
    #[arg(long, global = true, default_value_t = relim_core::DEFAULT_ALPHABET_CAP)]
    pub alphabet_cap: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Active,
    Passive,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Active => Side::Active,
            SideArg::Passive => Side::Passive,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a problem and print its canonical form.
    Parse {
        /// Problem file, or `-` for stdin.
        input: PathBuf,
        /// Also print the strength order of one side.
        #[arg(long, value_enum)]
        poset: Option<SideArg>,
    },
    /// Apply speedup steps.
    Speedup {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Label merging after each step: `none` or `greedy`.
        #[arg(long, default_value = "none")]
        merge: String,
    },
    /// Rename labels by a total mapping, e.g. `--map O=P --map M=M --map P=P`.
    Merge {
        input: PathBuf,
        #[arg(long = "map", value_parser = parse_pair, required = true)]
        map: Vec<(String, String)>,
    },
    /// Decide zero-round solvability of one side.
    ZeroRound {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Active)]
        side: SideArg,
    },
    /// Print a member of the matching family.
    Family {
        #[arg(long)]
        delta: u32,
        #[arg(long, default_value_t = 0)]
        x: u32,
        #[arg(long, default_value_t = 0)]
        y: u32,
        /// Also run one speedup and search for the relaxation to the next member.
        #[arg(long)]
        certify: bool,
    },
    /// Build a lower-bound certificate.
    Certify {
        #[arg(long)]
        delta: u32,
        #[arg(long)]
        max_t: u32,
        /// Write the certificate here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a certificate independently of the engine.
    VerifyCert { file: PathBuf },
    /// Graph simulations.
    #[command(subcommand)]
    Sim(SimCommand),
    /// Error bounds for randomized algorithms.
    Bounds {
        #[arg(long)]
        delta: u32,
        #[arg(long, default_value_t = 0)]
        t: u32,
        /// Error probability, as a number or as `2^-k`.
        #[arg(long, value_parser = parse_probability)]
        p: Option<f64>,
        /// Graph size for the failure comparison.
        #[arg(long)]
        n: Option<u64>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Instance {
    #[arg(long, default_value = "regular")]
    pub kind: InstanceKind,
    #[arg(long)]
    pub delta: usize,
    /// Nodes per side (regular), or depth (tree).
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum SimCommand {
    /// Generate an instance and print it as JSON.
    Gen(Instance),
    /// Run the proposal algorithm and check the matching encoding.
    RunProposal {
        #[command(flatten)]
        instance: Instance,
        /// Write the edge labels as a JSON array.
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
    /// Split nodes into parts, match, and check the pulled-back k-matching.
    SplitMatch {
        #[command(flatten)]
        instance: Instance,
        /// Parts per node; defaults to the ceiling of the square root of delta.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Check an edge labeling against a problem.
    Check {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    let (a, b) = s.split_once('=').ok_or_else(|| format!("expected FROM=TO, got {s:?}"))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let v = match s.strip_prefix("2^") {
        Some(exp) => exp.parse::<f64>().map(f64::exp2).map_err(|e| e.to_string())?,
        None => s.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{s} is not a probability"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities() {
        assert_eq!(parse_probability("2^-10").unwrap(), 1.0 / 1024.0);
        assert_eq!(parse_probability("0.25").unwrap(), 0.25);
        assert!(parse_probability("2").is_err());
        assert!(parse_probability("often").is_err());
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("OX = P").unwrap(), ("OX".into(), "P".into()));
        assert!(parse_pair("OX").is_err());
    }
}
