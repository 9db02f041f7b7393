use crate::error::{Error, Result};

/// Second-order central difference of uniformly spaced samples.
///
/// The two boundary samples have no centred stencil and are returned as NaN.
pub fn central_diff(values: &[f64], spacing: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let inv = 0.5 / spacing;
    let mut out = vec![f64::NAN; n];
    for (o, w) in out[1..n - 1].iter_mut().zip(values.windows(3)) {
        *o = (w[2] - w[0]) * inv;
    }
    Ok(out)
}

/// Max-norm over the finite entries; NaN samples count as invalid.
pub fn max_abs_finite(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ramp_is_exact() {
        let xs: Vec<f64> = (0..11).map(|i| 3.0 * i as f64 * 0.1 - 1.0).collect();
        let d = central_diff(&xs, 0.1).unwrap();
        assert!(d[0].is_nan() && d[10].is_nan());
        for v in &d[1..10] {
            assert!((v - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_gives_zero() {
        let d = central_diff(&[2.5; 7], 0.3).unwrap();
        assert!(d[1..6].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_matches_cosine() {
        let n = 101;
        let h = 2.0 * PI / (n - 1) as f64;
        let ys: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let d = central_diff(&ys, h).unwrap();
        let err: Vec<f64> = d
            .iter()
            .enumerate()
            .map(|(i, v)| v - (i as f64 * h).cos())
            .collect();
        assert!(max_abs_finite(&err) < 1e-3);
    }

    #[test]
    fn too_few_points() {
        assert_eq!(
            central_diff(&[1.0, 2.0], 1.0),
            Err(Error::TooFewPoints { needed: 3, got: 2 })
        );
    }
}
