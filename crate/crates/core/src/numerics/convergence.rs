use crate::error::{Error, Result};

/// Outcome of a grid-refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub hs: Vec<f64>,
    pub norms: Vec<f64>,
    /// Least-squares slope of ln(norm) against ln(h). NaN when a norm is zero.
    pub order: f64,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ConvergenceReport {
    pub fn from_norms(hs: Vec<f64>, norms: Vec<f64>, target: f64, tolerance: f64) -> Result<Self> {
        if hs.len() < 3 || hs.len() != norms.len() {
            return Err(Error::InvalidGrid(format!(
                "convergence study needs >= 3 levels with one norm each (got {} h, {} norms)",
                hs.len(),
                norms.len()
            )));
        }
        if hs.windows(2).any(|w| !(w[1] < w[0])) || hs.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::InvalidGrid(
                "h values must be positive and strictly decreasing".into(),
            ));
        }
        let order = fit_order(&hs, &norms);
        let passed = (order - target).abs() <= tolerance;
        Ok(Self {
            hs,
            norms,
            order,
            target,
            tolerance,
            passed,
        })
    }

    /// Successive ratios norm(h_k) / norm(h_{k+1}).
    pub fn ratios(&self) -> Vec<f64> {
        self.norms.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

/// Least-squares slope of ln(norm) over ln(h).
pub fn fit_order(hs: &[f64], norms: &[f64]) -> f64 {
    if norms.iter().any(|n| !(*n > 0.0) || !n.is_finite()) {
        return f64::NAN;
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Runs `evaluator` on every spacing and fits the observed order.
pub fn convergence_study<F>(
    mut evaluator: F,
    hs: &[f64],
    target: f64,
    tolerance: f64,
) -> Result<ConvergenceReport>
where
    F: FnMut(f64) -> Result<f64>,
{
    let norms = hs
        .iter()
        .map(|&h| evaluator(h))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceReport::from_norms(hs.to_vec(), norms, target, tolerance)
}
