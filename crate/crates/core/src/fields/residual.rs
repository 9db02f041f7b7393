use super::grid::FieldGrid;
use super::matrix::Mat2;
use crate::error::Result;
use crate::numerics::GridFn;

/// Left-hand side `(g_zeta g^-1)_eta + (g_eta g^-1)_zeta` of the field equation
/// on the interior (two-node margin) by nested central differences.
pub fn pde_residual(field: &FieldGrid) -> Result<GridFn<Mat2>> {
    let g = field.to_grid_fn();
    let ginv = field.inverse()?;
    let s = field.grid().stencil();
    let x = s.d_zeta(&g).zip(&ginv, |a, b| a * b);
    let y = s.d_eta(&g).zip(&ginv, |a, b| a * b);
    Ok(s.d_eta(&x).zip(&s.d_zeta(&y), |a, b| a + b))
}

/// Max-norm of a matrix-valued residual over its valid region.
pub fn residual_norm(r: &GridFn<Mat2>) -> f64 {
    r.iter_valid().fold(0.0, |m, (_, _, v)| m.max(v.max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Grid, SymUnitMatrix};

    #[test]
    fn constant_identity_is_exact() {
        let grid = Grid::lab_square(-1.0, 1.0, 9).unwrap();
        let f = FieldGrid::generate(grid, |_| Ok(SymUnitMatrix::IDENTITY)).unwrap();
        let r = pde_residual(&f).unwrap();
        assert_eq!(r.valid(), [2..7, 2..7]);
        assert_eq!(residual_norm(&r), 0.0);
    }

    #[test]
    fn rejects_singular_samples() {
        let grid = Grid::lab_square(-1.0, 1.0, 5).unwrap();
        let f =
            FieldGrid::generate(grid, |_| Ok(SymUnitMatrix::from_entries(1.0, 1.0, 1.0))).unwrap();
        assert!(matches!(
            pde_residual(&f),
            Err(crate::Error::SingularMatrix { .. })
        ));
    }
}
