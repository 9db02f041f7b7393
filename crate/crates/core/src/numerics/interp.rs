use crate::error::{Error, Result};

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson limiting)
/// with a numerical inverse.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() {
            return Err(Error::ShapeMismatch(format!(
                "{n} abscissae for {} ordinates",
                ys.len()
            )));
        }
        if n < 2 {
            return Err(Error::TooFewPoints { needed: 2, got: n });
        }
        if let Some(k) = xs.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneData(format!("abscissae at index {k}")));
        }
        if let Some(k) = ys.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneData(format!("ordinates at index {k}")));
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = ys
            .windows(2)
            .zip(&h)
            .map(|(w, hk)| (w[1] - w[0]) / hk)
            .collect();
        let mut m = vec![0.0; n];
        if n == 2 {
            m[0] = d[0];
            m[1] = d[0];
        } else {
            for k in 1..n - 1 {
                m[k] = (h[k] * d[k - 1] + h[k - 1] * d[k]) / (h[k - 1] + h[k]);
            }
            m[0] = endpoint_slope(h[0], h[1], d[0], d[1]);
            m[n - 1] = endpoint_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
        }
        for k in 0..n - 1 {
            let a = m[k] / d[k];
            let b = m[k + 1] / d[k];
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                m[k] = tau * a * d[k];
                m[k + 1] = tau * b * d[k];
            }
        }
        Ok(Self { xs, ys, slopes: m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.ys[0], *self.ys.last().unwrap())
    }

    fn interval(knots: &[f64], x: f64) -> usize {
        let n = knots.len();
        match knots.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    /// Value and derivative. Outside the knot range the end cubic is extended.
    pub fn eval_with_slope(&self, x: f64) -> (f64, f64) {
        let k = Self::interval(&self.xs, x);
        let h = self.xs[k + 1] - self.xs[k];
        let s = (x - self.xs[k]) / h;
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1;
        let dv = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        (v, dv)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_slope(x).0
    }

    /// Solves `eval(x) = y` on the knot range; bisection safeguarded Newton.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let (lo_y, hi_y) = self.range();
        if !(y >= lo_y && y <= hi_y) {
            return Err(Error::InvalidGrid(format!(
                "value {y} outside interpolated range [{lo_y}, {hi_y}]"
            )));
        }
        let k = Self::interval(&self.ys, y);
        let (mut lo, mut hi) = (self.xs[k], self.xs[k + 1]);
        let mut x = lo + (hi - lo) * (y - self.ys[k]) / (self.ys[k + 1] - self.ys[k]);
        for _ in 0..200 {
            let (v, dv) = self.eval_with_slope(x);
            let r = v - y;
            if r.abs() <= 4.0 * f64::EPSILON * (1.0 + y.abs()) {
                return Ok(x);
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let newton = x - r / dv;
            x = if dv > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-15 * (1.0 + x.abs()) {
                return Ok(x);
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn knots(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn identity_data() {
        let xs = knots(9, -1.0, 3.0);
        let f = MonotoneCubic::new(xs.clone(), xs).unwrap();
        for x in [-0.7, 0.0, 1.3, 2.99] {
            assert!((f.eval(x) - x).abs() < 1e-14);
            assert!((f.inverse(x).unwrap() - x).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_and_log() {
        let xs = knots(33, 0.0, 1.0);
        let ys: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let f = MonotoneCubic::new(xs, ys).unwrap();
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert!((f.eval(x) - x.exp()).abs() < 1e-5);
            let y = 1.0 + (std::f64::consts::E - 1.0) * x;
            assert!((f.inverse(y).unwrap() - y.ln()).abs() < 1e-5);
        }
    }

    #[test]
    fn rejects_non_monotone() {
        let r = MonotoneCubic::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 1.0]);
        assert!(matches!(r, Err(Error::NonMonotoneData(_))));
    }

    proptest! {
        #[test]
        fn round_trip(steps in proptest::collection::vec(0.01f64..2.0, 3..40), s in 0.0f64..1.0) {
            let xs: Vec<f64> = (0..steps.len()).map(|i| i as f64 * 0.5).collect();
            let mut ys = Vec::with_capacity(steps.len());
            let mut acc = 0.0;
            for d in &steps { acc += d; ys.push(acc); }
            let f = MonotoneCubic::new(xs.clone(), ys).unwrap();
            let x = xs[0] + s * (xs[xs.len() - 1] - xs[0]);
            let (y, dy) = f.eval_with_slope(x);
            let back = f.inverse(y).unwrap();
            prop_assert!((f.eval(back) - y).abs() <= 1e-14 * (1.0 + y.abs()));
            // where the end slope is clamped to 0 the inverse is only sqrt(eps) accurate
            if dy > 1e-3 {
                prop_assert!((back - x).abs() < 1e-9);
            }
        }

        #[test]
        fn stays_monotone(steps in proptest::collection::vec(0.001f64..5.0, 3..30)) {
            let xs: Vec<f64> = (0..steps.len()).map(|i| i as f64).collect();
            let mut ys = Vec::with_capacity(steps.len());
            let mut acc = 0.0;
            for d in &steps { acc += d; ys.push(acc); }
            let f = MonotoneCubic::new(xs, ys).unwrap();
            let n = (steps.len() - 1) * 20;
            let mut prev = f.eval(0.0);
            for i in 1..=n {
                let v = f.eval(i as f64 / 20.0);
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}
