//! Eigenvalue and rotation-angle form of the field, and the single scalar
//! equation it reduces to.

mod decompose;
mod scalar;

pub use decompose::{
    alt_equations_residual, compose, decompose, det_identities, LambdaPhi, LambdaPhiField,
};
pub use scalar::{
    phi_elimination, scalar_flux_balance, Branch, Density, ReducedField, ScalarFlux, LAMBDA_FLOOR,
    SLOPE_SLACK,
};
