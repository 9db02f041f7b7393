//! Stencils, quadrature, interpolation, small dense solves and convergence fits.

mod convergence;
mod grid_fn;
mod interp;
mod linalg;
mod quad;
mod stencil;

pub use convergence::{convergence_study, fit_order, ConvergenceReport};
pub use grid_fn::{Axis2, GridFn, Linear};
pub use interp::MonotoneCubic;
pub use linalg::ComplexLu;
pub use quad::{cumulative_simpson, simpson};
pub use stencil::{central_diff, max_abs_finite};
