//! Command-line arguments. Every subcommand's arguments are serialisable so
//! that a manifest can replay the run.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "chiral",
    version,
    about = "Soliton fields of the symmetric chiral field equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Generate a field and write it as CSV.
    Gen(GenArgs),
    /// Field-equation residuals, determinant checks and closed-form agreement.
    Verify(VerifyArgs),
    /// Conservation hierarchy in barred coordinates.
    Conserve(ConserveArgs),
    /// Eigenvalue/angle form and the scalar equation.
    Reduce(ReduceArgs),
    /// Crest velocities, amplitudes and phase shifts.
    Track(TrackArgs),
    /// Render one component of a field file as a 16-bit PGM.
    Heatmap(HeatmapArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackgroundArg {
    Timelike,
    Spacelike,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    /// Determinant (dressing) formula, any N.
    Determinant,
    /// Hyperbolic closed forms, N = 1 or 2 with real poles and C > 0.
    Closed,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FieldArgs {
    /// Soliton list `mu=<num>,C=<num>[;...]`; complex values as `a+bi`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub solitons: String,
    #[arg(long, value_enum, default_value = "timelike")]
    pub background: BackgroundArg,
    /// `t=<min>:<max>:<n>,z=<min>:<max>:<n>` or `zeta=...,eta=...`; odd counts.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, value_enum, default_value = "determinant")]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Append `lambda,phi` columns.
    #[arg(long)]
    pub lambda_phi: bool,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub solitons: String,
    #[arg(long, value_enum, default_value = "timelike")]
    pub background: BackgroundArg,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "file")]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value = "determinant")]
    pub method: MethodArg,
    /// Check a field file instead of a configuration.
    #[arg(long, conflicts_with = "grid")]
    pub file: Option<PathBuf>,
    /// Grid levels for the convergence study; the given grid is the finest.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConserveArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Highest order checked for conservation and flux balance.
    #[arg(long, default_value_t = 3)]
    pub orders: usize,
    /// Highest truncation order in the Riccati study (0 skips it).
    #[arg(long, default_value_t = 6)]
    pub riccati_orders: usize,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrackArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Crests closer than this count as interacting.
    #[arg(long, default_value_t = 4.0)]
    pub separation: f64,
    /// Relative velocity tolerance when grouping fragments.
    #[arg(long, default_value_t = 0.05)]
    pub velocity_tol: f64,
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HeatmapArgs {
    /// Field CSV written by `gen`.
    #[arg(long)]
    pub file: PathBuf,
    /// g11, g12, g22, lambda or phi.
    #[arg(long, default_value = "g12")]
    pub component: String,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write the primary output here instead of the recorded path.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

impl VerifyArgs {
    pub fn field_args(&self) -> Option<FieldArgs> {
        self.grid.as_ref().map(|grid| FieldArgs {
            solitons: self.solitons.clone(),
            background: self.background,
            grid: grid.clone(),
            method: self.method,
        })
    }
}
