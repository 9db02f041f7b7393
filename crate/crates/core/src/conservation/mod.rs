//! Local conservation laws from the expansion of the Lax eigenfunction about
//! the spectral pole `lambda = 1`.

mod ab;
mod barred;
mod hierarchy;
mod integrals;

pub use ab::{compute_ab, trivial_law_residuals, AbField, AbPair};
pub use barred::{barred_map, BarredField, BarredMap, A12_THRESHOLD, DET_FLOOR};
pub use hierarchy::{
    conservation_residual, p0_expanded, p_series, pq_eval, q_series, riccati_residual,
    ConservedHierarchy, PQPoint, PSeries, QSeries,
};
pub use integrals::{integrals, FluxReport, FluxWindow, OrderFlux};
