//! Coordinates, grids, symmetric unit-determinant matrices and the field equation residual.

mod grid;
mod matrix;
mod residual;

pub use grid::{Axis, FieldGrid, Frame, Grid, LightconePoint, Stencil};
pub use matrix::{to_hyperboloid, HyperboloidPoint, Mat2, SymUnitMatrix, DET_TOL};
pub use residual::{pde_residual, residual_norm};
