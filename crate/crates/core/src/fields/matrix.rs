use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Tolerance on `|det g - 1|` for matrices built from analytic formulas.
pub const DET_TOL: f64 = 1e-12;

/// Plain real 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, 0.0, b)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn adjugate(&self) -> Self {
        Self::new(self.m22, -self.m12, -self.m21, self.m11)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m11
            .abs()
            .max(self.m12.abs())
            .max(self.m21.abs())
            .max(self.m22.abs())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 + o.m11,
            self.m12 + o.m12,
            self.m21 + o.m21,
            self.m22 + o.m22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 - o.m11,
            self.m12 - o.m12,
            self.m21 - o.m21,
            self.m22 - o.m22,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self * -1.0
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        Mat2::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

/// Real symmetric 2x2 matrix on the positive unit-determinant branch.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SymUnitMatrix {
    g11: f64,
    g12: f64,
    g22: f64,
}

impl SymUnitMatrix {
    pub const IDENTITY: SymUnitMatrix = SymUnitMatrix {
        g11: 1.0,
        g12: 0.0,
        g22: 1.0,
    };

    /// Checked constructor: positive diagonal and `|det - 1| <= tol * max(1, g11 g22)`.
    pub fn new(g11: f64, g12: f64, g22: f64, tol: f64) -> Result<Self> {
        let m = Self { g11, g12, g22 };
        if !(g11 > 0.0 && g22 > 0.0) || !g12.is_finite() || !g11.is_finite() || !g22.is_finite() {
            return Err(Error::InvalidMatrix(format!(
                "diagonal must be positive and finite (g11 = {g11}, g12 = {g12}, g22 = {g22})"
            )));
        }
        let dev = (m.det() - 1.0).abs();
        if dev > tol * (g11 * g22).max(1.0) {
            return Err(Error::InvalidMatrix(format!(
                "|det - 1| = {dev:e} exceeds {tol:e}"
            )));
        }
        Ok(m)
    }

    /// Stores the entries as given. Used for data read back from files.
    pub const fn from_entries(g11: f64, g12: f64, g22: f64) -> Self {
        Self { g11, g12, g22 }
    }

    pub fn diagonal(lambda: f64) -> Self {
        Self::from_entries(lambda.exp(), 0.0, (-lambda).exp())
    }

    pub fn g11(&self) -> f64 {
        self.g11
    }

    pub fn g12(&self) -> f64 {
        self.g12
    }

    pub fn g22(&self) -> f64 {
        self.g22
    }

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn to_mat2(&self) -> Mat2 {
        Mat2::new(self.g11, self.g12, self.g12, self.g22)
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self) -> Mat2 {
        self.to_mat2().adjugate() * (1.0 / self.det())
    }

    /// Largest entry deviation from `other`.
    pub fn max_abs_diff(&self, other: &SymUnitMatrix) -> f64 {
        (self.g11 - other.g11)
            .abs()
            .max((self.g12 - other.g12).abs())
            .max((self.g22 - other.g22).abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.g11.abs().max(self.g12.abs()).max(self.g22.abs())
    }
}

/// Point `(T, X, Y)` on the hyperboloid `T^2 - X^2 - Y^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperboloidPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl HyperboloidPoint {
    pub fn constraint_residual(&self) -> f64 {
        self.t * self.t - self.x * self.x - self.y * self.y - 1.0
    }

    /// Inverse of [`to_hyperboloid`]: `g11 = T + X`, `g22 = T - X`, `g12 = Y`.
    pub fn to_matrix(&self) -> SymUnitMatrix {
        SymUnitMatrix::from_entries(self.t + self.x, self.y, self.t - self.x)
    }
}

pub fn to_hyperboloid(g: &SymUnitMatrix) -> HyperboloidPoint {
    HyperboloidPoint {
        t: 0.5 * (g.g11 + g.g22),
        x: 0.5 * (g.g11 - g.g22),
        y: g.g12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_maps_to_apex() {
        let p = to_hyperboloid(&SymUnitMatrix::IDENTITY);
        assert_eq!(
            p,
            HyperboloidPoint {
                t: 1.0,
                x: 0.0,
                y: 0.0
            }
        );
    }

    #[test]
    fn diagonal_case() {
        let p = to_hyperboloid(&SymUnitMatrix::diagonal(1.0));
        assert!((p.t - 1f64.cosh()).abs() < 1e-15);
        assert!((p.x - 1f64.sinh()).abs() < 1e-15);
        assert_eq!(p.y, 0.0);
    }

    #[test]
    fn checked_constructor() {
        assert!(SymUnitMatrix::new(2.0, 1.0, 1.0, DET_TOL).is_ok());
        assert!(SymUnitMatrix::new(2.0, 1.0, 1.1, DET_TOL).is_err());
        assert!(SymUnitMatrix::new(-1.0, 0.0, -1.0, DET_TOL).is_err());
    }

    #[test]
    fn inverse_is_exact_for_unit_det() {
        let g = SymUnitMatrix::new(2.0, 1.0, 1.0, DET_TOL).unwrap();
        let p = g.to_mat2() * g.inverse();
        assert!((p - Mat2::diag(1.0, 1.0)).max_abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn hyperboloid_round_trip(lam in 0.0f64..4.0, ang in -3.2f64..3.2) {
            let g = SymUnitMatrix::from_entries(
                lam.cosh() + ang.cos() * lam.sinh(),
                ang.sin() * lam.sinh(),
                lam.cosh() - ang.cos() * lam.sinh(),
            );
            let p = to_hyperboloid(&g);
            prop_assert!(p.t >= 1.0);
            prop_assert!(p.constraint_residual().abs() < 1e-12 * p.t * p.t);
            prop_assert!(p.to_matrix().max_abs_diff(&g) < 1e-12 * g.max_abs());
        }
    }
}
