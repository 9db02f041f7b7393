use crate::error::{Error, Result};

/// Composite Simpson rule on uniformly spaced samples.
pub fn simpson(values: &[f64], spacing: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::EvenPointCount(n));
    }
    let mut acc = values[0] + values[n - 1];
    for (k, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(acc * spacing / 3.0)
}

/// Running integral from the first sample to every sample.
///
/// Even nodes carry the composite Simpson value. Odd nodes add the integral of
/// the local quadratic over the last half panel.
pub fn cumulative_simpson(values: &[f64], spacing: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::EvenPointCount(n));
    }
    let mut out = vec![0.0; n];
    let mut k = 0;
    while k + 2 < n {
        let (f0, f1, f2) = (values[k], values[k + 1], values[k + 2]);
        out[k + 1] = out[k] + spacing * (5.0 * f0 + 8.0 * f1 - f2) / 12.0;
        out[k + 2] = out[k] + spacing * (f0 + 4.0 * f1 + f2) / 3.0;
        k += 2;
    }
    Ok(out)
}
