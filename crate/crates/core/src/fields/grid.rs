use rayon::prelude::*;

use super::matrix::{Mat2, SymUnitMatrix};
use crate::error::{Error, Result};
use crate::numerics::{Axis2, GridFn, Linear};

/// Light-cone coordinates with `t = zeta - eta`, `z = zeta + eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightconePoint {
    pub zeta: f64,
    pub eta: f64,
}

impl LightconePoint {
    pub const fn new(zeta: f64, eta: f64) -> Self {
        Self { zeta, eta }
    }

    pub fn from_lab(t: f64, z: f64) -> Self {
        Self {
            zeta: 0.5 * (z + t),
            eta: 0.5 * (z - t),
        }
    }

    pub fn t(&self) -> f64 {
        self.zeta - self.eta
    }

    pub fn z(&self) -> f64 {
        self.zeta + self.eta
    }
}

/// Uniform sampling of a closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 3 {
            return Err(Error::InvalidGrid(format!(
                "axis needs >= 3 points, got {count}"
            )));
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::InvalidGrid(format!(
                "axis bounds [{min}, {max}] are not increasing"
            )));
        }
        Ok(Self { min, max, count })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    /// Same interval with `count` points.
    pub fn with_count(&self, count: usize) -> Result<Self> {
        Self::new(self.min, self.max, count)
    }
}

/// Coordinates carried by the two grid axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// First axis `t`, second axis `z`.
    Lab,
    /// First axis `zeta`, second axis `eta`.
    LightCone,
}

impl Frame {
    pub fn name(&self) -> &'static str {
        match self {
            Frame::Lab => "lab (t, z)",
            Frame::LightCone => "light-cone (zeta, eta)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub frame: Frame,
    pub axes: [Axis; 2],
}

impl Grid {
    pub fn lab(t: Axis, z: Axis) -> Self {
        Self {
            frame: Frame::Lab,
            axes: [t, z],
        }
    }

    pub fn light_cone(zeta: Axis, eta: Axis) -> Self {
        Self {
            frame: Frame::LightCone,
            axes: [zeta, eta],
        }
    }

    /// Square lab grid `[lo, hi]^2` with `n` points per side.
    pub fn lab_square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let a = Axis::new(lo, hi, n)?;
        Ok(Self::lab(a, a))
    }

    pub fn shape(&self) -> [usize; 2] {
        [self.axes[0].count, self.axes[1].count]
    }

    pub fn len(&self) -> usize {
        self.axes[0].count * self.axes[1].count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> [f64; 2] {
        [self.axes[0].spacing(), self.axes[1].spacing()]
    }

    pub fn point(&self, i: usize, j: usize) -> LightconePoint {
        let (a, b) = (self.axes[0].value(i), self.axes[1].value(j));
        match self.frame {
            Frame::Lab => LightconePoint::from_lab(a, b),
            Frame::LightCone => LightconePoint::new(a, b),
        }
    }

    pub fn stencil(&self) -> Stencil {
        Stencil {
            frame: self.frame,
            h: self.spacing(),
        }
    }

    /// Same window with every axis resampled to `counts`.
    pub fn with_counts(&self, counts: [usize; 2]) -> Result<Self> {
        Ok(Self {
            frame: self.frame,
            axes: [
                self.axes[0].with_count(counts[0])?,
                self.axes[1].with_count(counts[1])?,
            ],
        })
    }
}

/// Central-difference light-cone derivatives on a grid of either frame.
///
/// On lab grids `d/dzeta = d/dt + d/dz` and `d/deta = -d/dt + d/dz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub frame: Frame,
    pub h: [f64; 2],
}

impl Stencil {
    pub fn d_zeta<T: Linear>(&self, f: &GridFn<T>) -> GridFn<T> {
        match self.frame {
            Frame::LightCone => f.diff(Axis2::First, self.h[0]),
            Frame::Lab => {
                let dt = f.diff(Axis2::First, self.h[0]);
                let dz = f.diff(Axis2::Second, self.h[1]);
                dt.zip(&dz, |a, b| a + b)
            }
        }
    }

    pub fn d_eta<T: Linear>(&self, f: &GridFn<T>) -> GridFn<T> {
        match self.frame {
            Frame::LightCone => f.diff(Axis2::Second, self.h[1]),
            Frame::Lab => {
                let dt = f.diff(Axis2::First, self.h[0]);
                let dz = f.diff(Axis2::Second, self.h[1]);
                dz.zip(&dt, |a, b| a - b)
            }
        }
    }
}

/// Samples of a symmetric unit-determinant field, row-major over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    grid: Grid,
    values: Vec<SymUnitMatrix>,
}

impl FieldGrid {
    pub fn new(grid: Grid, values: Vec<SymUnitMatrix>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a {}x{} grid",
                values.len(),
                grid.axes[0].count,
                grid.axes[1].count
            )));
        }
        Ok(Self { grid, values })
    }

    /// Evaluates `f` at every node in parallel; the first failing node in
    /// row-major order determines the error.
    pub fn generate<F>(grid: Grid, f: F) -> Result<Self>
    where
        F: Fn(LightconePoint) -> Result<SymUnitMatrix> + Sync,
    {
        let cols = grid.axes[1].count;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| f(grid.point(k / cols, k % cols)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[SymUnitMatrix] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> SymUnitMatrix {
        self.values[i * self.grid.axes[1].count + j]
    }

    pub fn to_grid_fn(&self) -> GridFn<Mat2> {
        GridFn::from_vec(
            self.grid.shape(),
            self.values.iter().map(|g| g.to_mat2()).collect(),
        )
    }

    pub fn component(&self, f: impl Fn(&SymUnitMatrix) -> f64) -> GridFn<f64> {
        GridFn::from_vec(self.grid.shape(), self.values.iter().map(f).collect())
    }

    /// Inverse field via adjugates; fails on `det <= 1e-14`.
    pub fn inverse(&self) -> Result<GridFn<Mat2>> {
        let cols = self.grid.axes[1].count;
        let mut out = Vec::with_capacity(self.values.len());
        for (k, g) in self.values.iter().enumerate() {
            let det = g.det();
            if !(det > 1e-14) {
                return Err(Error::SingularMatrix {
                    i: k / cols,
                    j: k % cols,
                    det,
                });
            }
            out.push(g.inverse());
        }
        Ok(GridFn::from_vec(self.grid.shape(), out))
    }
}
