use super::barred::BarredField;
use crate::error::{Error, Result};
use crate::numerics::GridFn;

fn mul(a: &GridFn<f64>, b: &GridFn<f64>) -> GridFn<f64> {
    a.zip(b, |x, y| x * y)
}

fn ensure_finite(f: &GridFn<f64>, what: &str) -> Result<()> {
    match f.iter_valid().find(|(_, _, v)| !v.is_finite()) {
        Some((i, j, v)) => Err(Error::DegenerateField(format!(
            "{what} = {v} at node ({i}, {j})"
        ))),
        None => Ok(()),
    }
}

/// Coefficients `P_-1 .. P_nmax` of the expansion of `psi_zeta_bar / psi`
/// about the pole.
#[derive(Debug, Clone)]
pub struct PSeries {
    /// `p[0]` is `P_-1`.
    p: Vec<GridFn<f64>>,
    /// `A12_bar' / A12_bar`.
    pub log_slope: GridFn<f64>,
    /// `A12_bar (A11_bar / A12_bar)'`.
    pub ratio_slope: GridFn<f64>,
}

impl PSeries {
    pub fn n_max(&self) -> i32 {
        self.p.len() as i32 - 2
    }

    /// `P_n` for `-1 <= n <= n_max`.
    pub fn get(&self, n: i32) -> &GridFn<f64> {
        &self.p[(n + 1) as usize]
    }

    pub fn orders(&self) -> impl Iterator<Item = (i32, &GridFn<f64>)> {
        self.p.iter().enumerate().map(|(k, f)| (k as i32 - 1, f))
    }
}

/// Coefficients `Q_0 .. Q_nmax` of `psi_eta_bar / psi`.
#[derive(Debug, Clone)]
pub struct QSeries {
    q: Vec<GridFn<f64>>,
    /// `B12_bar / A12_bar`.
    pub rho: GridFn<f64>,
    /// `B11_bar - (A11_bar - 1) B12_bar / A12_bar`.
    pub base: GridFn<f64>,
}

impl QSeries {
    pub fn get(&self, n: i32) -> &GridFn<f64> {
        &self.q[n as usize]
    }
}

pub fn p_series(bf: &BarredField, n_max: usize) -> Result<PSeries> {
    let a11 = bf.a_bar.map(|m| m.m11);
    let a12 = bf.a_bar.map(|m| m.m12);
    let log_slope = bf.d_zeta_bar(&a12).zip(&a12, |d, v| d / v);
    let ratio = a11.zip(&a12, |x, y| x / y);
    let ratio_slope = mul(&a12, &bf.d_zeta_bar(&ratio));
    let ones = GridFn::constant(bf.shape(), 1.0);
    let p0 = log_slope.zip(&ratio_slope, |c, a| 0.5 * (a + c));
    let mut p = vec![ones, p0];
    for n in 0..n_max {
        // p[k + 1] is P_k
        let pn = &p[n + 1];
        let mut acc = mul(&log_slope, pn).zip(&bf.d_zeta_bar(pn), |x, d| x - d);
        for k in 0..=n {
            let prod = mul(&p[k + 1], &p[n - k + 1]);
            acc = acc.zip(&prod, |x, y| x - y);
        }
        let next = acc.map(|v| 0.5 * v);
        ensure_finite(&next, &format!("P_{}", n + 1))?;
        p.push(next);
    }
    ensure_finite(&p[1], "P_0")?;
    Ok(PSeries {
        p,
        log_slope,
        ratio_slope,
    })
}

/// `P_0` written out without the quotient rule:
/// `((1 - A11_bar) A12_bar' / A12_bar + A11_bar') / 2`.
pub fn p0_expanded(bf: &BarredField) -> GridFn<f64> {
    let a11 = bf.a_bar.map(|m| m.m11);
    let a12 = bf.a_bar.map(|m| m.m12);
    let d11 = bf.d_zeta_bar(&a11);
    let d12 = bf.d_zeta_bar(&a12);
    let lhs = a11
        .map(|x| 1.0 - x)
        .zip(&a12, |f, y| f / y)
        .zip(&d12, |f, d| f * d);
    lhs.zip(&d11, |x, d| 0.5 * (x + d))
}

pub fn q_series(bf: &BarredField, p: &PSeries) -> Result<QSeries> {
    let rho = bf.b_bar.zip(&bf.a_bar, |b, a| b.m12 / a.m12);
    let base = bf
        .b_bar
        .zip(&bf.a_bar, |b, a| (b.m11, a.m11))
        .zip(&rho, |(b11, a11), r| b11 - (a11 - 1.0) * r);
    ensure_finite(&rho, "B12_bar / A12_bar")?;
    let mut q = Vec::new();
    for n in 0..=p.n_max() {
        let w = (-0.5f64).powi(n);
        let mut sum = GridFn::constant(bf.shape(), 0.0);
        for k in 0..n {
            let c = (-0.5f64).powi(k);
            sum = sum.zip(p.get(n - 1 - k), |s, v| s + c * v);
        }
        let qn = base
            .zip(&rho, |b, r| (b, r))
            .zip(&sum, |(b, r), s| 0.5 * (w * b + r * s));
        q.push(qn);
    }
    Ok(QSeries { q, rho, base })
}

/// `P` and `Q` series from one barred field.
#[derive(Debug, Clone)]
pub struct ConservedHierarchy {
    pub p: PSeries,
    pub q: QSeries,
}

impl ConservedHierarchy {
    pub fn new(bf: &BarredField, n_max: usize) -> Result<Self> {
        let p = p_series(bf, n_max)?;
        let q = q_series(bf, &p)?;
        Ok(Self { p, q })
    }

    pub fn n_max(&self) -> i32 {
        self.p.n_max()
    }
}

/// `d_eta_bar P_n - d_zeta_bar Q_n` for `0 <= n <= n_max`.
pub fn conservation_residual(bf: &BarredField, h: &ConservedHierarchy, n: i32) -> GridFn<f64> {
    bf.d_eta_bar(h.p.get(n))
        .zip(&bf.d_zeta_bar(h.q.get(n)), |x, y| x - y)
}

/// Truncated series at one node, with `Q` obtained two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PQPoint {
    pub lambda: f64,
    pub p: f64,
    /// Sum of the `Q_n` series.
    pub q: f64,
    /// `Q` from the linear relation to `P`.
    pub q_from_p: f64,
}

fn check_lambda(lambda: f64) -> Result<f64> {
    let eps = lambda - 1.0;
    if eps.abs() < 1e-12 {
        return Err(Error::SpectralPole(lambda));
    }
    if !(eps.abs() < 1.0) {
        return Err(Error::Unsupported(format!(
            "series about the pole needs |lambda - 1| < 1, got lambda = {lambda}"
        )));
    }
    Ok(eps)
}

fn truncated(terms: impl Iterator<Item = (i32, f64)>, eps: f64) -> f64 {
    terms.map(|(n, v)| v * eps.powi(n)).sum()
}

pub fn pq_eval(
    bf: &BarredField,
    h: &ConservedHierarchy,
    node: (usize, usize),
    lambda: f64,
) -> Result<PQPoint> {
    let eps = check_lambda(lambda)?;
    let (i, j) = node;
    let n_max = h.n_max();
    let all_valid = (-1..=n_max).all(|n| h.p.get(n).is_valid(i, j))
        && (0..=n_max).all(|n| h.q.get(n).is_valid(i, j));
    if !all_valid {
        return Err(Error::InvalidGrid(format!(
            "node ({i}, {j}) lies outside the hierarchy's valid region"
        )));
    }
    let p = truncated(h.p.orders().map(|(n, f)| (n, f.get(i, j))), eps);
    let q = truncated((0..=n_max).map(|n| (n, h.q.get(n).get(i, j))), eps);
    let a = bf.a_bar.get(i, j);
    let b = bf.b_bar.get(i, j);
    let rho = b.m12 / a.m12;
    let q_from_p = (b.m11 - a.m11 * rho) / (lambda + 1.0) + eps / (lambda + 1.0) * rho * p;
    Ok(PQPoint {
        lambda,
        p,
        q,
        q_from_p,
    })
}

/// Riccati defect `P' - (A12 (A11/A12)' / eps + 1/eps^2) - (A12'/A12) P + P^2`
/// of the truncated series.
pub fn riccati_residual(
    bf: &BarredField,
    h: &ConservedHierarchy,
    lambda: f64,
) -> Result<GridFn<f64>> {
    let eps = check_lambda(lambda)?;
    let mut total = GridFn::constant(bf.shape(), 0.0);
    for (n, f) in h.p.orders() {
        let w = eps.powi(n);
        total = total.zip(f, |s, v| s + w * v);
    }
    let d = bf.d_zeta_bar(&total);
    let forcing = h.p.ratio_slope.map(|a| a / eps + 1.0 / (eps * eps));
    let r = d
        .zip(&forcing, |x, y| x - y)
        .zip(&h.p.log_slope, |x, c| (x, c))
        .zip(&total, |(x, c), p| x - c * p + p * p);
    Ok(r)
}
