//! Command-line grammar.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wigstat::wfl::DEFAULT_OVERSAMPLE;

#[derive(Debug, Parser)]
#[command(
    name = "wigstat",
    version,
    about = "Wigner function statistics of chaotic quantum maps and random states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Wigner function grid after every step.
    Evolve(RunArgs),
    /// Value histogram and moments after every step.
    ValueStats(RunArgs),
    /// Excess and negative fraction per step with the measured relaxation times.
    Relaxation(RunArgs),
    /// Phase-space autocorrelation grid and radial profile.
    Autocorr(RunArgs),
    /// Excess of every eigenstate of the one-step propagator.
    EigenExcess(RunArgs),
    /// Excess distribution of GOE eigenvectors.
    GoeExcess(RunArgs),
    /// Spacing and amplitude statistics of Wigner function lines.
    WflStats(RunArgs),
    /// Sign-cluster length distribution on the discrete torus.
    Clusters(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Evolve,
    ValueStats,
    Relaxation,
    Autocorr,
    EigenExcess,
    GoeExcess,
    WflStats,
    Clusters,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Evolve => "evolve",
            CommandKind::ValueStats => "value-stats",
            CommandKind::Relaxation => "relaxation",
            CommandKind::Autocorr => "autocorr",
            CommandKind::EigenExcess => "eigen-excess",
            CommandKind::GoeExcess => "goe-excess",
            CommandKind::WflStats => "wfl-stats",
            CommandKind::Clusters => "clusters",
        }
    }
}

impl Command {
    pub fn split(self) -> (CommandKind, RunArgs) {
        match self {
            Command::Evolve(a) => (CommandKind::Evolve, a),
            Command::ValueStats(a) => (CommandKind::ValueStats, a),
            Command::Relaxation(a) => (CommandKind::Relaxation, a),
            Command::Autocorr(a) => (CommandKind::Autocorr, a),
            Command::EigenExcess(a) => (CommandKind::EigenExcess, a),
            Command::GoeExcess(a) => (CommandKind::GoeExcess, a),
            Command::WflStats(a) => (CommandKind::WflStats, a),
            Command::Clusters(a) => (CommandKind::Clusters, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Sawtooth,
    KickedTop,
    RandomModel,
}

/// Origin of the lines analysed by `wfl-stats` under the random model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineSource {
    /// Lines with independent Gaussian Fourier coefficients.
    Model,
    /// Lines cut from the Wigner functions of random states.
    States,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    Torus,
    Sphere,
}

/// Flags shared by every subcommand. Angles are in radians.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Dynamical system, or the random model.
    #[arg(long, value_enum)]
    pub system: Option<SystemKind>,
    /// Phase space of the random model (implied by the other systems).
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryKind>,
    /// Torus dimension (odd) [default: 101].
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    /// Spin, a positive multiple of 1/2 [default: 50].
    #[arg(long = "J", value_name = "J")]
    pub j: Option<f64>,
    /// Sawtooth kick strength [default: 0.5].
    #[arg(long = "K0", value_name = "K0", allow_negative_numbers = true)]
    pub k0: Option<f64>,
    /// Sawtooth winding number [default: 1].
    #[arg(long = "L", value_name = "L")]
    pub l: Option<u32>,
    /// Kicked-top torsion strength [default: 10].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Kicked-top rotation angle [default: 1.5707963267948966].
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Initial state: `coherent`, `coherent:q=..,p=..`,
    /// `coherent:theta=..,phi=..`, `random` or `basis:<index>`.
    #[arg(long)]
    pub init: Option<InitSpec>,
    /// First step written or averaged [default: 0; autocorr: t-max;
    /// wfl-stats and clusters: min(10, t-max)].
    #[arg(long)]
    pub t_start: Option<usize>,
    /// Number of steps.
    #[arg(long, default_value_t = 30)]
    pub t_max: usize,
    /// Seed of every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving the CSV tables.
    #[arg(long, env = "WIGSTAT_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Histogram bin count.
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    /// Number of random states or lines drawn by the random model.
    #[arg(long, default_value_t = 100)]
    pub ensemble: usize,
    /// Line origin for `wfl-stats` under the random model [default: model].
    #[arg(long, value_enum)]
    pub source: Option<LineSource>,
    /// Number of GOE matrices.
    #[arg(long, default_value_t = 10)]
    pub realizations: usize,
    /// Zero-search grid points per Fourier mode.
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLE)]
    pub oversample: usize,
    /// Omit the generation time from output headers.
    #[arg(long)]
    pub no_timestamp: bool,
}

/// Initial state as written on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// Coherent state with optional named coordinates.
    Coherent(Vec<(String, f64)>),
    Random,
    Basis(usize),
}

impl FromStr for InitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = match s.split_once(':') {
            Some((kind, rest)) => (kind, Some(rest)),
            None => (s, None),
        };
        match (kind, rest) {
            ("coherent", None) => Ok(InitSpec::Coherent(Vec::new())),
            ("coherent", Some(rest)) => rest
                .split(',')
                .map(|pair| {
                    let (key, value) = pair
                        .split_once('=')
                        .ok_or_else(|| format!("expected key=value, got {pair:?}"))?;
                    let value = value
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| format!("bad value for {key}: {e}"))?;
                    Ok((key.trim().to_string(), value))
                })
                .collect::<Result<Vec<_>, String>>()
                .map(InitSpec::Coherent),
            ("random", None) => Ok(InitSpec::Random),
            ("basis", Some(index)) => index
                .trim()
                .parse()
                .map(InitSpec::Basis)
                .map_err(|e| format!("bad basis index {index:?}: {e}")),
            _ => Err(format!(
                "unknown initial state {s:?}; expected coherent[:k=v,..], random or basis:<index>"
            )),
        }
    }
}
