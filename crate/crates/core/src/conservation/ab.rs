use crate::error::Result;
use crate::fields::{FieldGrid, Mat2};
use crate::numerics::GridFn;

/// `A = -g_zeta g^-1` and `B = g_eta g^-1` at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbPair {
    pub a: Mat2,
    pub b: Mat2,
}

/// `A` and `B` over the grid by central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct AbField {
    pub a: GridFn<Mat2>,
    pub b: GridFn<Mat2>,
}

impl AbField {
    pub fn at(&self, i: usize, j: usize) -> AbPair {
        AbPair {
            a: self.a.get(i, j),
            b: self.b.get(i, j),
        }
    }

    pub fn det_a(&self) -> GridFn<f64> {
        self.a.map(|m| m.det())
    }

    pub fn det_b(&self) -> GridFn<f64> {
        self.b.map(|m| m.det())
    }

    /// Largest `|tr A|`, `|tr B|` over the valid nodes.
    pub fn max_trace(&self) -> f64 {
        self.a
            .map(|m| m.trace())
            .max_abs()
            .max(self.b.map(|m| m.trace()).max_abs())
    }
}

pub fn compute_ab(field: &FieldGrid) -> Result<AbField> {
    let g = field.to_grid_fn();
    let ginv = field.inverse()?;
    let s = field.grid().stencil();
    let a = s.d_zeta(&g).zip(&ginv, |d, gi| -(d * gi));
    let b = s.d_eta(&g).zip(&ginv, |d, gi| d * gi);
    Ok(AbField { a, b })
}

/// `d/deta sqrt(-det A)` and `d/dzeta sqrt(-det B)`: the lowest law in
/// unbarred coordinates.
pub fn trivial_law_residuals(field: &FieldGrid, ab: &AbField) -> (GridFn<f64>, GridFn<f64>) {
    let s = field.grid().stencil();
    let sa = ab.a.map(|m| (-m.det()).max(0.0).sqrt());
    let sb = ab.b.map(|m| (-m.det()).max(0.0).sqrt());
    (s.d_eta(&sa), s.d_zeta(&sb))
}
