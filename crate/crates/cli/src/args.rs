use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "conespec",
    version,
    about = "Dirichlet eigenvalues on spherical cones with a cut vertex"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,

    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        env = "CONESPEC_FORMAT",
        default_value = "json"
    )]
    pub format: Format,

    /// Write the payload to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Geometry {
    /// Space dimension N >= 2.
    #[arg(long)]
    pub dim: usize,
    /// Half opening angle: radians, or "0.75pi", "3pi/4", "pi/2".
    #[arg(long, value_parser = parse_beta, allow_hyphen_values = true)]
    pub beta: f64,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Characteristic value and the head of the angular sequence.
    Charval {
        #[command(flatten)]
        geom: Geometry,
        /// Number of angular parameters to list.
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Lowest eigenvalues of the cut cone.
    Eigen {
        #[command(flatten)]
        geom: Geometry,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// List k = 1..count for one prescribed mode instead of merging.
        #[arg(long)]
        raw_mode: bool,
        /// Bessel order of the raw mode.
        #[arg(long, conflicts_with = "l", requires = "raw_mode")]
        nu: Option<f64>,
        /// Angular parameter of the raw mode.
        #[arg(long, requires = "raw_mode")]
        l: Option<f64>,
    },
    /// Fit the eigenvalue gap against the removed volume.
    Rate {
        #[command(flatten)]
        geom: Geometry,
        /// Angular parameter (default: the characteristic value).
        #[arg(long)]
        l: Option<f64>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Comma-separated decreasing eps values.
        #[arg(long, value_delimiter = ',', conflicts_with = "points")]
        eps_grid: Option<Vec<f64>>,
        /// Number of points of the default grid.
        #[arg(long)]
        points: Option<usize>,
        /// Replace the tracked branch by gap = a V^POWER exactly.
        #[arg(long, value_name = "POWER")]
        synthetic: Option<f64>,
        /// Slope tolerance for the match flag.
        #[arg(long)]
        slope_tolerance: Option<f64>,
    },
    /// Analytic exponent against the fitted rate for the first eigenvalue.
    Sharpness {
        #[command(flatten)]
        geom: Geometry,
    },
    /// Compare spectral eigenvalues with the finite-difference solvers.
    Oracle {
        #[command(flatten)]
        geom: Geometry,
        /// Angular parameter (default: the characteristic value).
        #[arg(long)]
        l: Option<f64>,
        /// Radial index of the branch.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Cut radius.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Radial nodes of the one-dimensional solver.
        #[arg(long, default_value_t = 4096)]
        nodes: usize,
        /// Radial nodes of the planar polar solver (N = 2).
        #[arg(long, default_value_t = 128)]
        polar_nodes: usize,
        /// Angular nodes of the planar polar solver (N = 2).
        #[arg(long, default_value_t = 64)]
        angular_nodes: usize,
        /// Extrapolate the radial value from `nodes` and `nodes`/2.
        #[arg(long)]
        richardson: bool,
        /// Spectral shift for inverse iteration.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        shift: f64,
    },
    /// Monte Carlo volume of the region removed by a cut.
    Volume {
        #[command(flatten)]
        geom: Geometry,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, value_enum, default_value = "lipschitz")]
        variant: Variant,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Exact,
    Lipschitz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Charval,
    Eigen,
    Rate,
    Sharpness,
    Oracle,
    Volume,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Charval => "charval",
            Command::Eigen => "eigen",
            Command::Rate => "rate",
            Command::Sharpness => "sharpness",
            Command::Oracle => "oracle",
            Command::Volume => "volume",
        }
    }
}

/// Every input of one run, echoed in the payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub dim: usize,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default)]
    pub raw_mode: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polar_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_nodes: Option<usize>,
    #[serde(default)]
    pub richardson: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_tolerance: Option<f64>,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    fn base(command: Command, geom: &Geometry, cli: &Cli) -> Self {
        Self {
            command,
            dim: geom.dim,
            beta: geom.beta,
            eps: None,
            eps_grid: None,
            points: None,
            l: None,
            nu: None,
            k: None,
            count: None,
            raw_mode: false,
            synthetic: None,
            nodes: None,
            polar_nodes: None,
            angular_nodes: None,
            richardson: false,
            shift: None,
            samples: None,
            variant: None,
            slope_tolerance: None,
            format: cli.format,
            seed: cli.seed,
        }
    }

    pub fn from_cli(cli: &Cli) -> Self {
        match &cli.command {
            CommandArgs::Charval { geom, count } => Self {
                count: Some(*count),
                ..Self::base(Command::Charval, geom, cli)
            },
            CommandArgs::Eigen {
                geom,
                eps,
                count,
                raw_mode,
                nu,
                l,
            } => Self {
                eps: Some(*eps),
                count: Some(*count),
                raw_mode: *raw_mode,
                nu: *nu,
                l: *l,
                ..Self::base(Command::Eigen, geom, cli)
            },
            CommandArgs::Rate {
                geom,
                l,
                k,
                eps_grid,
                points,
                synthetic,
                slope_tolerance,
            } => Self {
                l: *l,
                k: Some(*k),
                eps_grid: eps_grid.clone(),
                points: *points,
                synthetic: *synthetic,
                slope_tolerance: *slope_tolerance,
                ..Self::base(Command::Rate, geom, cli)
            },
            CommandArgs::Sharpness { geom } => Self::base(Command::Sharpness, geom, cli),
            CommandArgs::Oracle {
                geom,
                l,
                k,
                eps,
                nodes,
                polar_nodes,
                angular_nodes,
                richardson,
                shift,
            } => Self {
                l: *l,
                k: Some(*k),
                eps: Some(*eps),
                nodes: Some(*nodes),
                polar_nodes: Some(*polar_nodes),
                angular_nodes: Some(*angular_nodes),
                richardson: *richardson,
                shift: Some(*shift),
                ..Self::base(Command::Oracle, geom, cli)
            },
            CommandArgs::Volume {
                geom,
                eps,
                samples,
                variant,
            } => Self {
                eps: Some(*eps),
                samples: Some(*samples),
                variant: Some(*variant),
                ..Self::base(Command::Volume, geom, cli)
            },
        }
    }
}

/// Parses an angle given in radians or as a multiple of π: "2.1", "0.75pi",
/// "3pi/4", "pi/2", "pi".
pub fn parse_beta(s: &str) -> Result<f64, String> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let bad = || format!("cannot read angle {s:?}; use radians or forms like 0.75pi, 3pi/4, pi/2");
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad()).and_then(finite(s));
    };
    let head = t[..at].trim_end_matches('*');
    let tail = &t[at + 2..];
    let coef = if head.is_empty() {
        1.0
    } else {
        head.parse::<f64>().map_err(|_| bad())?
    };
    let den = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    finite(s)(coef * PI / den)
}

fn finite(s: &str) -> impl Fn(f64) -> Result<f64, String> + '_ {
    move |v| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("angle {s:?} is not finite"))
        }
    }
}
