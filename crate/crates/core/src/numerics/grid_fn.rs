use std::ops::{Add, Mul, Range, Sub};

use rayon::prelude::*;

/// Values that central differences can act on.
pub trait Linear:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl<T> Linear for T where
    T: Copy + Default + Send + Sync + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>
{
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis2 {
    First,
    Second,
}

fn intersect(a: &Range<usize>, b: &Range<usize>) -> Range<usize> {
    let lo = a.start.max(b.start);
    let hi = a.end.min(b.end).max(lo);
    lo..hi
}

/// Row-major 2D samples with a rectangular region of valid entries.
///
/// Every stencil application shrinks the valid region by one node per side
/// along its axis; values outside carry `T::default()` and are never read by
/// norms or reductions.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn<T> {
    shape: [usize; 2],
    valid: [Range<usize>; 2],
    data: Vec<T>,
}

impl<T: Copy + Default + Send + Sync> GridFn<T> {
    pub fn from_fn<F>(shape: [usize; 2], f: F) -> Self
    where
        F: Fn(usize, usize) -> T + Sync,
    {
        let mut data = vec![T::default(); shape[0] * shape[1]];
        if shape[1] > 0 {
            data.par_chunks_mut(shape[1])
                .enumerate()
                .for_each(|(i, row)| {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = f(i, j);
                    }
                });
        }
        Self {
            shape,
            valid: [0..shape[0], 0..shape[1]],
            data,
        }
    }

    pub fn from_vec(shape: [usize; 2], data: Vec<T>) -> Self {
        assert_eq!(
            data.len(),
            shape[0] * shape[1],
            "data length does not match shape"
        );
        Self {
            shape,
            valid: [0..shape[0], 0..shape[1]],
            data,
        }
    }

    pub fn constant(shape: [usize; 2], value: T) -> Self {
        Self::from_vec(shape, vec![value; shape[0] * shape[1]])
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn valid(&self) -> [Range<usize>; 2] {
        self.valid.clone()
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid[0].contains(&i) && self.valid[1].contains(&j)
    }

    pub fn is_empty(&self) -> bool {
        self.valid[0].is_empty() || self.valid[1].is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.shape[1] + j]
    }

    pub fn raw(&self) -> &[T] {
        &self.data
    }

    /// Shrinks the valid region to its intersection with `valid`.
    pub fn restrict(mut self, valid: [Range<usize>; 2]) -> Self {
        self.valid = [
            intersect(&self.valid[0], &valid[0]),
            intersect(&self.valid[1], &valid[1]),
        ];
        self
    }

    pub fn map_indexed<U, F>(&self, f: F) -> GridFn<U>
    where
        U: Copy + Default + Send + Sync,
        F: Fn(usize, usize, T) -> U + Sync,
    {
        let valid = self.valid.clone();
        let cols = self.shape[1];
        let mut data = vec![U::default(); self.data.len()];
        if cols > 0 {
            data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
                if valid[0].contains(&i) {
                    for j in valid[1].clone() {
                        row[j] = f(i, j, self.data[i * cols + j]);
                    }
                }
            });
        }
        GridFn {
            shape: self.shape,
            valid: self.valid.clone(),
            data,
        }
    }

    pub fn map<U, F>(&self, f: F) -> GridFn<U>
    where
        U: Copy + Default + Send + Sync,
        F: Fn(T) -> U + Sync,
    {
        self.map_indexed(|_, _, v| f(v))
    }

    pub fn zip<U, V, F>(&self, other: &GridFn<U>, f: F) -> GridFn<V>
    where
        U: Copy + Default + Send + Sync,
        V: Copy + Default + Send + Sync,
        F: Fn(T, U) -> V + Sync,
    {
        assert_eq!(
            self.shape, other.shape,
            "zip of grid functions with different shapes"
        );
        let valid = [
            intersect(&self.valid[0], &other.valid[0]),
            intersect(&self.valid[1], &other.valid[1]),
        ];
        let out = self.map_indexed(|i, j, a| {
            if other.is_valid(i, j) {
                f(a, other.get(i, j))
            } else {
                V::default()
            }
        });
        out.restrict(valid)
    }

    /// Valid entries in row-major order.
    pub fn iter_valid(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let cols = self.valid[1].clone();
        self.valid[0]
            .clone()
            .flat_map(move |i| cols.clone().map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.get(i, j)))
    }
}

impl<T: Linear> GridFn<T> {
    /// Second-order central difference along `axis` with spacing `h`.
    pub fn diff(&self, axis: Axis2, h: f64) -> Self {
        let inv = 0.5 / h;
        let cols = self.shape[1];
        let mut valid = self.valid.clone();
        let k = match axis {
            Axis2::First => 0,
            Axis2::Second => 1,
        };
        valid[k] = if valid[k].len() >= 3 {
            valid[k].start + 1..valid[k].end - 1
        } else {
            valid[k].start..valid[k].start
        };
        let stride = match axis {
            Axis2::First => cols,
            Axis2::Second => 1,
        };
        let src = &self.data;
        let mut data = vec![T::default(); src.len()];
        if cols > 0 {
            data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
                if valid[0].contains(&i) {
                    for j in valid[1].clone() {
                        let c = i * cols + j;
                        row[j] = (src[c + stride] - src[c - stride]) * inv;
                    }
                }
            });
        }
        Self {
            shape: self.shape,
            valid,
            data,
        }
    }
}

impl GridFn<f64> {
    /// Max-norm over the valid region.
    pub fn max_abs(&self) -> f64 {
        self.argmax_abs().map_or(0.0, |(_, _, v)| v)
    }

    /// Location and magnitude of the largest valid entry; NaN wins.
    pub fn argmax_abs(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, j, v) in self.iter_valid() {
            let a = if v.is_nan() { f64::INFINITY } else { v.abs() };
            if best.is_none_or(|(_, _, b)| a > b) {
                best = Some((i, j, a));
            }
        }
        best
    }

    pub fn min_valid(&self) -> f64 {
        self.iter_valid()
            .fold(f64::INFINITY, |m, (_, _, v)| m.min(v))
    }

    pub fn max_valid(&self) -> f64 {
        self.iter_valid()
            .fold(f64::NEG_INFINITY, |m, (_, _, v)| m.max(v))
    }

    pub fn all_finite(&self) -> bool {
        self.iter_valid().all(|(_, _, v)| v.is_finite())
    }
}
