use super::barred::BarredField;
use super::hierarchy::ConservedHierarchy;
use crate::error::{Error, Result};
use crate::numerics::{simpson, GridFn};

/// Node range `[start, end]` along `zeta` over which densities are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FluxWindow {
    pub start: usize,
    pub end: usize,
}

impl FluxWindow {
    /// Insets both ends by `inset` of the axis length and trims to an odd
    /// node count.
    pub fn inset(count: usize, inset: f64) -> Result<Self> {
        let k = ((count - 1) as f64 * inset).round() as usize;
        let start = k;
        let mut end = (count - 1).saturating_sub(k);
        if end > start && (end - start) % 2 == 1 {
            end -= 1;
        }
        Self::new(start, end)
    }

    pub fn new(start: usize, end: usize) -> Result<Self> {
        if end < start + 2 || (end - start) % 2 == 1 {
            return Err(Error::EvenPointCount(end + 1 - start.min(end + 1)));
        }
        Ok(Self { start, end })
    }

    pub fn nodes(&self) -> usize {
        self.end - self.start + 1
    }
}

/// Flux balance of one order over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFlux {
    pub order: i32,
    /// `I_n` per `eta` node; NaN where not computable.
    pub integral: Vec<f64>,
    /// `dI_n / d eta_bar` per `eta` node.
    pub rate: Vec<f64>,
    /// `Q_n(b) - Q_n(a)`; absent for the trivial order.
    pub flux: Option<Vec<f64>>,
    /// `max |rate - flux|`, or the spread of `I_-1` for the trivial order.
    pub max_defect: f64,
}

/// A closed-form integral compared with the recursion path.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitCheck {
    pub label: String,
    pub order: i32,
    /// Largest `|explicit - recursion|` over `eta` slices.
    pub max_deviation: f64,
    /// Largest `|recursion|`, for scale.
    pub max_recursion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxReport {
    pub window: FluxWindow,
    pub zeta_bar_span: f64,
    pub orders: Vec<OrderFlux>,
    pub explicit: Vec<ExplicitCheck>,
}

impl FluxReport {
    pub fn order(&self, n: i32) -> Option<&OrderFlux> {
        self.orders.iter().find(|o| o.order == n)
    }
}

struct Integrator<'a> {
    bf: &'a BarredField,
    window: FluxWindow,
    h_zeta: f64,
    h_eta: f64,
}

impl Integrator<'_> {
    fn covers(&self, f: &GridFn<f64>, j: usize) -> bool {
        let v = f.valid();
        v[0].start <= self.window.start && self.window.end < v[0].end && v[1].contains(&j)
    }

    /// `int f d zeta_bar` along the `eta` slice `j`.
    fn line(&self, f: &GridFn<f64>, j: usize) -> f64 {
        if !self.covers(f, j) {
            return f64::NAN;
        }
        let s = &self.bf.map.zeta_scale;
        let vals: Vec<f64> = (self.window.start..=self.window.end)
            .map(|i| f.get(i, j) * s[i])
            .collect();
        simpson(&vals, self.h_zeta).unwrap_or(f64::NAN)
    }

    fn integral(&self, f: &GridFn<f64>) -> Vec<f64> {
        (0..f.shape()[1]).map(|j| self.line(f, j)).collect()
    }

    fn rate(&self, integral: &[f64]) -> Vec<f64> {
        let sb = &self.bf.map.eta_scale;
        let n = integral.len();
        (0..n)
            .map(|j| {
                if j == 0 || j + 1 == n {
                    return f64::NAN;
                }
                (integral[j + 1] - integral[j - 1]) / (2.0 * self.h_eta) / sb[j]
            })
            .collect()
    }
}

fn max_finite(vals: impl Iterator<Item = f64>) -> f64 {
    vals.filter(|v| v.is_finite())
        .fold(0.0, |m, v| m.max(v.abs()))
}

fn mul(a: &GridFn<f64>, b: &GridFn<f64>) -> GridFn<f64> {
    a.zip(b, |x, y| x * y)
}

/// Windowed integrals of motion and their flux balance, plus the explicit
/// low-order integrands as a cross-check.
pub fn integrals(
    bf: &BarredField,
    h: &ConservedHierarchy,
    window: FluxWindow,
) -> Result<FluxReport> {
    let [nz, _] = bf.shape();
    if window.end >= nz {
        return Err(Error::InvalidGrid(format!(
            "window end {} beyond {nz} nodes",
            window.end
        )));
    }
    let [h_zeta, h_eta] = bf.spacing();
    let it = Integrator {
        bf,
        window,
        h_zeta,
        h_eta,
    };
    let knots = bf.map.zeta.knots();
    let zeta_at = |i: usize| knots[0] + (i - bf.map.zeta_nodes.start) as f64 * h_zeta;
    let span = bf.map.zeta.eval(zeta_at(window.end)) - bf.map.zeta.eval(zeta_at(window.start));

    let mut orders = Vec::new();
    let ints: Vec<Vec<f64>> = (-1..=h.n_max()).map(|n| it.integral(h.p.get(n))).collect();
    {
        let i_trivial = &ints[0];
        let fin: Vec<f64> = i_trivial
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .collect();
        let spread = fin.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
            - fin.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        orders.push(OrderFlux {
            order: -1,
            integral: i_trivial.clone(),
            rate: it.rate(i_trivial),
            flux: None,
            max_defect: if fin.is_empty() { f64::NAN } else { spread },
        });
    }
    for n in 0..=h.n_max() {
        let integral = ints[(n + 1) as usize].clone();
        let rate = it.rate(&integral);
        let q = h.q.get(n);
        let flux: Vec<f64> = (0..q.shape()[1])
            .map(|j| {
                if it.covers(q, j) {
                    q.get(window.end, j) - q.get(window.start, j)
                } else {
                    f64::NAN
                }
            })
            .collect();
        let max_defect = max_finite(rate.iter().zip(&flux).map(|(r, f)| r - f));
        orders.push(OrderFlux {
            order: n,
            integral,
            rate,
            flux: Some(flux),
            max_defect,
        });
    }

    let explicit = explicit_checks(bf, h, &it, &ints);
    Ok(FluxReport {
        window,
        zeta_bar_span: span,
        orders,
        explicit,
    })
}

fn check(label: &str, order: i32, explicit: &[f64], recursion: &[f64]) -> ExplicitCheck {
    ExplicitCheck {
        label: label.to_string(),
        order,
        max_deviation: max_finite(explicit.iter().zip(recursion).map(|(a, b)| a - b)),
        max_recursion: max_finite(recursion.iter().copied()),
    }
}

fn explicit_checks(
    bf: &BarredField,
    h: &ConservedHierarchy,
    it: &Integrator,
    ints: &[Vec<f64>],
) -> Vec<ExplicitCheck> {
    let a = &h.p.ratio_slope;
    let c = &h.p.log_slope;
    let rec = |n: i32| &ints[(n + 1) as usize];
    let mut out = Vec::new();

    let i0 = it.integral(&a.map(|v| 0.5 * v));
    out.push(check("I0 = 1/2 int a", 0, &i0, rec(0)));

    if h.n_max() >= 1 {
        let i1 = it.integral(&c.zip(a, |c, a| (c * c - a * a) / 8.0));
        out.push(check("I1 = 1/8 int (c^2 - a^2)", 1, &i1, rec(1)));
    }

    if h.n_max() >= 2 {
        let a11 = bf.a_bar.map(|m| m.m11);
        let a12 = bf.a_bar.map(|m| m.m12);
        let d12 = bf.d_zeta_bar(&a12);
        let dd12 = bf.d_zeta_bar(&d12);
        let r = bf.d_zeta_bar(&a11.zip(&a12, |x, y| x / y));
        let inner = bf.d_zeta_bar(&mul(&a12, &r));
        let t1 = d12.zip(&a12, |d, y| -1.5 * d * d / y);
        let t2 = a12.zip(&r, |y, r| 0.5 * y * y * y * r * r);
        let t4 = mul(&a12, &inner);
        let sum = t1
            .zip(&t2, |x, y| x + y)
            .zip(&dd12, |x, y| x + y)
            .zip(&t4, |x, y| x + y);
        let i2 = it.integral(&mul(&sum, &r).map(|v| v / 8.0));
        out.push(check("I2 explicit integrand", 2, &i2, rec(2)));
    }

    // I_{n+1} = 1/2 int (-a P_n - sum_{k=1}^{n-1} P_k P_{n-k})
    for n in 0..h.n_max() {
        let mut dens = mul(a, h.p.get(n)).map(|v| -v);
        for k in 1..n {
            dens = dens.zip(&mul(h.p.get(k), h.p.get(n - k)), |x, y| x - y);
        }
        let i = it.integral(&dens.map(|v| 0.5 * v));
        out.push(check(
            &format!("I{} from integrated recursion", n + 1),
            n + 1,
            &i,
            rec(n + 1),
        ));
    }
    out
}
