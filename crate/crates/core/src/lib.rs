//! Exact soliton solutions of the symmetric 2x2 chiral field equation on
//! diagonal backgrounds, their hierarchy of local conservation laws, the
//! scalar `(Lambda, phi)` reduction, and finite-difference verification of all
//! of these.

// NaN must fail these comparisons, so the negated forms are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod background;
pub mod conservation;
pub mod error;
pub mod fields;
pub mod numerics;
pub mod reduction;
pub mod solitons;

pub use error::{Error, Result};
