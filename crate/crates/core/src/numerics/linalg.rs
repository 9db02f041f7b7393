use num_complex::Complex64;

use crate::error::{Error, Result};

/// LU factorisation with partial pivoting of a small dense complex matrix.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    odd: bool,
    zero_pivot: Option<usize>,
}

impl ComplexLu {
    /// Factorises the row-major `n x n` matrix `a`.
    pub fn new(mut a: Vec<Complex64>, n: usize) -> Self {
        assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        let mut zero_pivot = None;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap();
            if a[p * n + k].norm() == 0.0 {
                zero_pivot.get_or_insert(k);
                continue;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let pivot = a[k * n + k];
            for r in k + 1..n {
                let f = a[r * n + k] / pivot;
                a[r * n + k] = f;
                for c in k + 1..n {
                    let u = a[k * n + c];
                    a[r * n + c] -= f * u;
                }
            }
        }
        Self {
            n,
            lu: a,
            perm,
            odd,
            zero_pivot,
        }
    }

    pub fn det(&self) -> Complex64 {
        if self.zero_pivot.is_some() {
            return Complex64::new(0.0, 0.0);
        }
        let d = (0..self.n).fold(Complex64::new(1.0, 0.0), |acc, k| {
            acc * self.lu[k * self.n + k]
        });
        if self.odd {
            -d
        } else {
            d
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if let Some(k) = self.zero_pivot {
            return Err(Error::SingularSystem(k));
        }
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                let l = self.lu[r * n + c];
                x[r] = x[r] - l * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                let u = self.lu[r * n + c];
                x[r] = x[r] - u * x[c];
            }
            x[r] /= self.lu[r * n + r];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_determinant() {
        let lu = ComplexLu::new(vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, 3.0), c(4.0, -1.0)], 2);
        let expected = c(1.0, 1.0) * c(4.0, -1.0) - c(2.0, 0.0) * c(0.0, 3.0);
        assert!((lu.det() - expected).norm() < 1e-14);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let lu = ComplexLu::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], 2);
        assert!((lu.det() - c(-1.0, 0.0)).norm() < 1e-15);
        let x = lu.solve(&[c(2.0, 0.0), c(3.0, 1.0)]).unwrap();
        assert!((x[0] - c(3.0, 1.0)).norm() < 1e-15);
        assert!((x[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn solve_round_trip() {
        let a = vec![
            c(4.0, 0.5),
            c(1.0, 0.0),
            c(0.0, 2.0),
            c(-1.0, 1.0),
            c(3.0, 0.0),
            c(1.0, -1.0),
            c(2.0, 0.0),
            c(0.5, 0.5),
            c(5.0, 0.0),
        ];
        let x_true = [c(1.0, -2.0), c(0.5, 0.0), c(-3.0, 1.0)];
        let b: Vec<Complex64> = (0..3)
            .map(|r| (0..3).map(|k| a[r * 3 + k] * x_true[k]).sum())
            .collect();
        let x = ComplexLu::new(a, 3).solve(&b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn singular_matrix() {
        let lu = ComplexLu::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], 2);
        assert_eq!(lu.det(), c(0.0, 0.0));
        assert!(lu.solve(&[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
    }
}
