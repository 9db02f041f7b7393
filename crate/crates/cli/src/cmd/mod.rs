//! Subcommand implementations.

mod conserve;
mod gen;
mod heatmap;
mod reduce;
mod track;
mod verify;

use chiral_core::background::Background;
use chiral_core::fields::{FieldGrid, Grid, SymUnitMatrix};
use chiral_core::solitons::{n_soliton, one_soliton, two_soliton, SolitonConfig};
use chiral_core::Error;

pub use conserve::run_conserve;
pub use gen::run_gen;
pub use heatmap::run_heatmap;
pub use reduce::run_reduce;
pub use track::run_track;
pub use verify::run_verify;

use crate::args::{BackgroundArg, FieldArgs, MethodArg};
use crate::error::{CliError, CliResult};
use crate::parse::{parse_grid, parse_solitons};

/// Thresholds shared by the checks; all of them are written to manifests.
pub mod tol {
    pub const ORDER_TARGET: f64 = 2.0;
    pub const RESIDUAL_ORDER: f64 = 0.2;
    pub const HIERARCHY_ORDER: f64 = 0.3;
    pub const DET_CLOSED: f64 = 1e-12;
    pub const DET_DETERMINANT: f64 = 1e-9;
    pub const ORACLE: f64 = 1e-9;
    pub const BARRED_DET: f64 = 1e-6;
    pub const VELOCITY: f64 = 0.02;
    pub const PHASE_STABILITY: f64 = 0.05;
    pub const ROUND_TRIP: f64 = 1e-12;
    /// Norms below this are at rounding level and count as exact.
    pub const EXACT: f64 = 1e-11;
    pub const FILE_MATCH: f64 = 1e-12;
    pub const FLUX_INSET: f64 = 0.125;
}

/// Parsed form of [`FieldArgs`].
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: SolitonConfig,
    pub background: Background,
    pub grid: Grid,
    pub method: MethodArg,
}

impl Setup {
    pub fn new(args: &FieldArgs) -> CliResult<Self> {
        let config = parse_solitons(&args.solitons)?;
        let background = match args.background {
            BackgroundArg::Timelike => Background::TimeLike,
            BackgroundArg::Spacelike => Background::SpaceLike,
            BackgroundArg::Flat => Background::flat(),
        };
        let grid = parse_grid(&args.grid)?;
        if args.method == MethodArg::Closed && config.len() > 2 {
            return Err(CliError::Config(format!(
                "closed forms exist for 1 or 2 solitons, got {}",
                config.len()
            )));
        }
        Ok(Self {
            config,
            background,
            grid,
            method: args.method,
        })
    }

    pub fn matrix(
        &self,
        method: MethodArg,
        p: chiral_core::fields::LightconePoint,
    ) -> chiral_core::Result<SymUnitMatrix> {
        match (method, self.config.len()) {
            (MethodArg::Determinant, _) | (MethodArg::Closed, 0) => {
                n_soliton(&self.config, &self.background, p)
            }
            (MethodArg::Closed, 1) => one_soliton(&self.config, &self.background, p),
            (MethodArg::Closed, 2) => two_soliton(&self.config, &self.background, p),
            (MethodArg::Closed, n) => Err(Error::Unsupported(format!(
                "no closed form for {n} solitons"
            ))),
        }
    }

    pub fn field_with(&self, grid: Grid, method: MethodArg) -> CliResult<FieldGrid> {
        Ok(FieldGrid::generate(grid, |p| self.matrix(method, p))?)
    }

    pub fn field(&self, grid: Grid) -> CliResult<FieldGrid> {
        self.field_with(grid, self.method)
    }

    /// Closed forms are usable for one or two real solitons with `C > 0`.
    pub fn has_closed_form(&self) -> bool {
        matches!(self.config.len(), 1 | 2)
            && self
                .config
                .real_pairs()
                .is_some_and(|p| p.iter().all(|&(_, c)| c > 0.0))
    }

    pub fn det_tolerance(&self) -> f64 {
        match self.method {
            MethodArg::Closed => tol::DET_CLOSED,
            MethodArg::Determinant => tol::DET_DETERMINANT,
        }
    }
}

/// `levels` grids ending with `finest`, each coarser one with half the intervals.
pub fn grid_levels(finest: Grid, levels: usize) -> CliResult<Vec<Grid>> {
    if levels == 0 {
        return Err(CliError::Config("need at least one grid level".into()));
    }
    let mut out = vec![finest];
    for _ in 1..levels {
        let last = out[out.len() - 1];
        let mut counts = [0usize; 2];
        for (k, a) in last.axes.iter().enumerate() {
            let intervals = a.count - 1;
            if intervals % 4 != 0 || intervals / 2 < 2 {
                return Err(CliError::Config(format!(
                    "axis with {} points cannot be coarsened {} times keeping odd counts (need count = 1 mod 2^levels)",
                    finest.axes[k].count,
                    levels - 1
                )));
            }
            counts[k] = intervals / 2 + 1;
        }
        out.push(last.with_counts(counts)?);
    }
    out.reverse();
    Ok(out)
}

pub fn exact_or_order(norms: &[f64], order: f64, tolerance: f64) -> (bool, String) {
    if norms.last().is_some_and(|&n| n < tol::EXACT) {
        return (true, "at rounding level".to_string());
    }
    let ok = (order - tol::ORDER_TARGET).abs() <= tolerance;
    (
        ok,
        format!(
            "order {order:.2} (target {} +- {tolerance})",
            tol::ORDER_TARGET
        ),
    )
}
