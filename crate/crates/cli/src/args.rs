use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use statein_core::sampling::{Box2, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(
    name = "statein",
    version,
    about = "Verify Einstein conditions on exponential-family statistical manifolds",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an expression and echo it in normalized form
    Parse(ParseArgs),
    /// Curvature tensors at points, on a grid, or at random samples
    Curvature(CurvatureArgs),
    /// Einstein / PDE residual suite for a potential or catalog entry
    Check(CheckArgs),
    /// Scan a box for points where the Fisher metric is positive definite
    Convexity(ConvexityArgs),
    /// Lie point symmetry checks
    #[command(subcommand)]
    Symmetry(SymmetryCommand),
    /// Invariance of functions under a generator
    #[command(subcommand)]
    Invariant(InvariantCommand),
    /// Built-in potentials and metrics
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Debug, Subcommand)]
pub enum SymmetryCommand {
    /// Check that generators are symmetries of a PDE on its solution set
    Verify(SymmetryArgs),
}

#[derive(Debug, Subcommand)]
pub enum InvariantCommand {
    /// Check that X(f) = 0 for a function f(t, x, u)
    Check(InvariantArgs),
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    /// List entry names, kinds and Einstein constants
    List(Output),
    /// Run the verification suite on one entry or all of them
    Verify(CatalogArgs),
    /// Export entries as JSON
    Export(CatalogArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PdeKind {
    /// u_t - u_xx = 0
    Heat,
    /// the third-order equation satisfied by Einstein potentials in 2-D
    Txpeq,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct Output {
    /// Random seed for every sampled quantity
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Exactly one of an inline potential or a catalog entry.
#[derive(Clone, Debug, Args, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["expr", "catalog"])))]
pub struct Source {
    /// Potential ψ in t, x (2-D) or theta1..thetaN
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    /// Name of a catalog entry
    #[arg(long, value_name = "NAME")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    /// Dimension of an inline potential [default: inferred from its variables]
    #[arg(long, requires = "expr")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Domain constraint `EXPR > 0` for an inline potential (repeatable)
    #[arg(
        long,
        value_name = "EXPR",
        requires = "expr",
        allow_hyphen_values = true
    )]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub domain: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ParseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct CurvatureArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    /// α of the connection (potentials only)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Evaluation point `v1,v2,...` (repeatable)
    #[arg(
        long,
        value_name = "V1,V2,...",
        conflicts_with = "grid",
        allow_hyphen_values = true
    )]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub point: Vec<Point>,
    /// Sampling box [default: the catalog entry's box]
    #[arg(long = "box", value_name = "T0,T1,X0,X1", allow_hyphen_values = true)]
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Box2>,
    /// Evaluate at cell centers of an R x C grid over the box
    #[arg(long, value_name = "R,C")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    /// Number of random points when neither --point nor --grid is given
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    /// Einstein constant in Ric = -λ g [required with --expr; default: the entry's]
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Check at these points instead of sampling (repeatable; any dimension)
    #[arg(long, value_name = "V1,V2,...", allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub point: Vec<Point>,
    /// Sampling box [required with --expr unless --point; default: the entry's box]
    #[arg(long = "box", value_name = "T0,T1,X0,X1", allow_hyphen_values = true)]
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Box2>,
    /// Number of sample points [default: 100, or the entry's count]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvexityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    /// Scan box [required with --expr; default: the entry's box]
    #[arg(long = "box", value_name = "T0,T1,X0,X1", allow_hyphen_values = true)]
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Box2>,
    /// Grid rows (along t) and columns (along x)
    #[arg(long, value_name = "R,C", default_value = "50,50")]
    pub grid: Grid,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct SymmetryArgs {
    /// Equation to test against
    #[arg(long, value_enum)]
    pub pde: PdeKind,
    /// λ in the Einstein equation (txpeq only)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Generator: a built-in name (X1..X9, H1..H6), a combination such as
    /// `X4 + 0.1*X6`, or components `xi_t=...; xi_x=...; eta=...` (repeatable)
    /// [default: all built-ins for the equation]
    #[arg(long = "gen", value_name = "GEN", allow_hyphen_values = true)]
    #[serde(rename = "gen", skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
    /// Number of on-shell jet samples
    #[arg(long, default_value_t = statein_core::symmetry::DEFAULT_JET_SAMPLES)]
    pub samples: usize,
    /// Pass threshold on the relative residual [default: 1e-7 for txpeq, 1e-9 for heat]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct InvariantArgs {
    /// Generator, in any form accepted by `symmetry verify --gen`
    #[arg(long = "gen", value_name = "GEN", allow_hyphen_values = true)]
    #[serde(rename = "gen")]
    pub generator: String,
    /// Candidate invariant f(t, x, u) (repeatable)
    #[arg(long, value_name = "EXPR", required = true, allow_hyphen_values = true)]
    pub expr: Vec<String>,
    /// Number of sample points
    #[arg(long, default_value_t = statein_core::symmetry::DEFAULT_JET_SAMPLES)]
    pub samples: usize,
    /// Pass threshold on the relative residual
    #[arg(long, default_value_t = statein_core::symmetry::INVARIANCE_TOLERANCE)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct CatalogArgs {
    /// Entry name [default: every entry]
    #[arg(long, value_name = "NAME")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

/// Comma-separated coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coords = s
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("`{v}` is not a number"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if coords.iter().any(|v| !v.is_finite()) {
            return Err("coordinates must be finite".into());
        }
        Ok(Point(coords))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (r, c) = s.split_once(',').ok_or("expected R,C")?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{v}` is not a positive integer"))
        };
        let grid = Grid {
            rows: parse(r)?,
            cols: parse(c)?,
        };
        if grid.rows < 2 || grid.cols < 2 {
            return Err("grid needs at least 2 rows and 2 columns".into());
        }
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn value_parsers() {
        assert_eq!("1, -2.5".parse::<Point>().unwrap(), Point(vec![1.0, -2.5]));
        assert!("1,a".parse::<Point>().is_err());
        assert_eq!("3,4".parse::<Grid>().unwrap(), Grid { rows: 3, cols: 4 });
        assert!("1,4".parse::<Grid>().is_err());
        assert!("3".parse::<Grid>().is_err());
    }
}
