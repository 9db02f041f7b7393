use super::decompose::LambdaPhiField;
use crate::conservation::{compute_ab, FluxWindow};
use crate::error::{Error, Result};
use crate::fields::{FieldGrid, Frame};
use crate::numerics::{simpson, GridFn};

/// Smallest admissible `Lambda` on a window (the scalar equation carries `coth Lambda`).
pub const LAMBDA_FLOOR: f64 = 1e-6;
/// How far `|Lambda_zeta_bar|` may exceed 1 before it counts as a violation.
pub const SLOPE_SLACK: f64 = 1e-10;

/// Sign in front of the square root in the scalar equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

/// Weight `w(Lambda)` in the density pair `sqrt(1 - Lambda_zeta_bar^2) w`,
/// `sqrt(1 - Lambda_eta_bar^2) w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    /// `sinh Lambda` for the `+` branch, `1 / sinh Lambda` for `-`.
    SinhPower(Branch),
    /// `coth Lambda`.
    Coth,
}

impl Density {
    fn weight(self, l: f64) -> f64 {
        match self {
            Density::SinhPower(Branch::Plus) => l.sinh(),
            Density::SinhPower(Branch::Minus) => 1.0 / l.sinh(),
            Density::Coth => 1.0 / l.tanh(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Density::SinhPower(Branch::Plus) => "sinh",
            Density::SinhPower(Branch::Minus) => "1/sinh",
            Density::Coth => "coth",
        }
    }
}

/// `(Lambda, phi)` together with the local rescaling to barred coordinates.
#[derive(Debug, Clone)]
pub struct ReducedField {
    pub lp: LambdaPhiField,
    scale_a: GridFn<f64>,
    scale_b: GridFn<f64>,
    pub lambda_zeta: GridFn<f64>,
    pub lambda_eta: GridFn<f64>,
    pub phi_zeta: GridFn<f64>,
    pub phi_eta: GridFn<f64>,
}

fn check_scale(s: &GridFn<f64>, name: &str) -> Result<()> {
    match s.iter_valid().find(|(_, _, v)| !(*v > 0.0)) {
        Some((i, j, _)) => Err(Error::DegenerateField(format!(
            "det {name} vanishes at node ({i}, {j})"
        ))),
        None => Ok(()),
    }
}

impl ReducedField {
    /// Fails with [`Error::SingularLambda`] if `Lambda <= LAMBDA_FLOOR` anywhere.
    pub fn new(field: &FieldGrid) -> Result<Self> {
        let lp = LambdaPhiField::new(field);
        if let Some((i, j, value)) = lp
            .lambda
            .iter_valid()
            .find(|(_, _, v)| !(*v > LAMBDA_FLOOR))
        {
            return Err(Error::SingularLambda {
                i,
                j,
                value,
                delta: LAMBDA_FLOOR,
            });
        }
        let ab = compute_ab(field)?;
        let scale_a = ab.a.map(|m| (-m.det()).sqrt());
        let scale_b = ab.b.map(|m| (-m.det()).sqrt());
        check_scale(&scale_a, "A")?;
        check_scale(&scale_b, "B")?;
        let (pz, pe) = lp.phi_gradient();
        let over = |f: GridFn<f64>, s: &GridFn<f64>| f.zip(s, |x, s| x / s);
        Ok(Self {
            lambda_zeta: over(lp.d_zeta(&lp.lambda), &scale_a),
            lambda_eta: over(lp.d_eta(&lp.lambda), &scale_b),
            phi_zeta: over(pz, &scale_a),
            phi_eta: over(pe, &scale_b),
            lp,
            scale_a,
            scale_b,
        })
    }

    pub fn frame(&self) -> Frame {
        self.lp.stencil.frame
    }

    pub fn d_zeta_bar(&self, f: &GridFn<f64>) -> GridFn<f64> {
        self.lp.d_zeta(f).zip(&self.scale_a, |d, s| d / s)
    }

    pub fn d_eta_bar(&self, f: &GridFn<f64>) -> GridFn<f64> {
        self.lp.d_eta(f).zip(&self.scale_b, |d, s| d / s)
    }

    /// `Lambda_zeta_bar^2 + 4 phi_zeta_bar^2 sinh^2 Lambda - 1` and the `eta` analogue.
    pub fn unit_constraints(&self) -> (GridFn<f64>, GridFn<f64>) {
        let l = &self.lp.lambda;
        let form = |dl: &GridFn<f64>, dp: &GridFn<f64>| {
            dl.zip(dp, |a, b| (a, b))
                .zip(l, |(a, b), l| a * a + 4.0 * b * b * l.sinh().powi(2) - 1.0)
        };
        (
            form(&self.lambda_zeta, &self.phi_zeta),
            form(&self.lambda_eta, &self.phi_eta),
        )
    }

    /// Fails with [`Error::SingularLambda`] if `Lambda <= delta` anywhere.
    pub fn check_lambda(&self, delta: f64) -> Result<()> {
        match self.lp.lambda.iter_valid().find(|(_, _, v)| !(*v > delta)) {
            Some((i, j, value)) => Err(Error::SingularLambda { i, j, value, delta }),
            None => Ok(()),
        }
    }

    /// `sqrt(1 - Lambda_zeta_bar^2)`, `sqrt(1 - Lambda_eta_bar^2)`.
    pub fn slope_roots(&self) -> Result<(GridFn<f64>, GridFn<f64>)> {
        let root = |d: &GridFn<f64>| -> Result<GridFn<f64>> {
            if let Some((i, j, v)) = d
                .iter_valid()
                .find(|(_, _, v)| !(v.abs() <= 1.0 + SLOPE_SLACK))
            {
                return Err(Error::ConstraintViolation {
                    i,
                    j,
                    value: v.abs(),
                });
            }
            Ok(d.map(|v| (1.0 - v * v).max(0.0).sqrt()))
        };
        Ok((root(&self.lambda_zeta)?, root(&self.lambda_eta)?))
    }

    /// `Lambda_zeta_bar_eta_bar - s sqrt((1 - Lambda_zeta_bar^2)(1 - Lambda_eta_bar^2)) coth Lambda`.
    pub fn scalar_residual(&self, branch: Branch) -> Result<GridFn<f64>> {
        self.check_lambda(LAMBDA_FLOOR)?;
        let (u, v) = self.slope_roots()?;
        let s = branch.sign();
        let mixed = self.d_eta_bar(&self.lambda_zeta);
        let rhs = u
            .zip(&v, |a, b| a * b)
            .zip(&self.lp.lambda, |r, l| s * r / l.tanh());
        Ok(mixed.zip(&rhs, |a, b| a - b))
    }

    /// Max-norm of the scalar residual for each branch, `[+, -]`.
    pub fn branch_norms(&self) -> Result<[f64; 2]> {
        Ok([
            self.scalar_residual(Branch::Plus)?.max_abs(),
            self.scalar_residual(Branch::Minus)?.max_abs(),
        ])
    }

    /// The branch with the smaller residual.
    pub fn winning_branch(&self) -> Result<Branch> {
        let [p, m] = self.branch_norms()?;
        Ok(if p <= m { Branch::Plus } else { Branch::Minus })
    }

    /// Densities `(X, Y)` of the scalar conservation law.
    pub fn densities(&self, density: Density) -> Result<(GridFn<f64>, GridFn<f64>)> {
        self.check_lambda(LAMBDA_FLOOR)?;
        let (u, v) = self.slope_roots()?;
        let l = &self.lp.lambda;
        Ok((
            u.zip(l, |a, l| a * density.weight(l)),
            v.zip(l, |b, l| b * density.weight(l)),
        ))
    }

    /// `X_eta_bar + Y_zeta_bar`.
    pub fn conservation_residual(&self, density: Density) -> Result<GridFn<f64>> {
        let (x, y) = self.densities(density)?;
        Ok(self.d_eta_bar(&x).zip(&self.d_zeta_bar(&y), |a, b| a + b))
    }
}

/// `|phi_zeta_bar| = sqrt(1 - Lambda_zeta_bar^2) / (2 sinh Lambda)` and the
/// `eta` analogue; signs are left to the caller.
pub fn phi_elimination(r: &ReducedField) -> Result<(GridFn<f64>, GridFn<f64>)> {
    r.check_lambda(LAMBDA_FLOOR)?;
    let (u, v) = r.slope_roots()?;
    let l = &r.lp.lambda;
    Ok((
        u.zip(l, |a, l| a / (2.0 * l.sinh())),
        v.zip(l, |b, l| b / (2.0 * l.sinh())),
    ))
}

/// Windowed first integral of the scalar law.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFlux {
    pub density: Density,
    pub integral: Vec<f64>,
    pub rate: Vec<f64>,
    pub flux: Vec<f64>,
    pub max_defect: f64,
}

fn line_mean(s: &GridFn<f64>, along_first: bool) -> Vec<f64> {
    let [n0, n1] = s.shape();
    let v = s.valid();
    let n = if along_first { n0 } else { n1 };
    (0..n)
        .map(|k| {
            let vals: Vec<f64> = if along_first {
                if !v[0].contains(&k) {
                    return f64::NAN;
                }
                v[1].clone().map(|j| s.get(k, j)).collect()
            } else {
                if !v[1].contains(&k) {
                    return f64::NAN;
                }
                v[0].clone().map(|i| s.get(i, k)).collect()
            };
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect()
}

/// `d/d eta_bar int X d zeta_bar = -(Y(b) - Y(a))` on a light-cone grid.
pub fn scalar_flux_balance(
    r: &ReducedField,
    density: Density,
    window: FluxWindow,
) -> Result<ScalarFlux> {
    if r.frame() != Frame::LightCone {
        return Err(Error::FrameMismatch {
            expected: Frame::LightCone.name(),
            got: r.frame().name(),
        });
    }
    let (x, y) = r.densities(density)?;
    let [h0, h1] = r.lp.stencil.h;
    let sa = line_mean(&r.scale_a, true);
    let sb = line_mean(&r.scale_b, false);
    let vx = x.valid();
    let n_eta = x.shape()[1];
    let inside = vx[0].start <= window.start && window.end < vx[0].end;
    if !inside {
        return Err(Error::InvalidGrid(format!(
            "window [{}, {}] leaves the valid zeta range {:?}",
            window.start, window.end, vx[0]
        )));
    }
    let integral: Vec<f64> = (0..n_eta)
        .map(|j| {
            if !vx[1].contains(&j) {
                return f64::NAN;
            }
            let vals: Vec<f64> = (window.start..=window.end)
                .map(|i| x.get(i, j) * sa[i])
                .collect();
            simpson(&vals, h0).unwrap_or(f64::NAN)
        })
        .collect();
    let rate: Vec<f64> = (0..n_eta)
        .map(|j| {
            if j == 0 || j + 1 == n_eta {
                f64::NAN
            } else {
                (integral[j + 1] - integral[j - 1]) / (2.0 * h1) / sb[j]
            }
        })
        .collect();
    let vy = y.valid();
    let flux: Vec<f64> = (0..n_eta)
        .map(|j| {
            if vy[1].contains(&j) && vy[0].start <= window.start && window.end < vy[0].end {
                -(y.get(window.end, j) - y.get(window.start, j))
            } else {
                f64::NAN
            }
        })
        .collect();
    let max_defect = rate
        .iter()
        .zip(&flux)
        .map(|(a, b)| a - b)
        .filter(|d| d.is_finite())
        .fold(0.0f64, |m, d| m.max(d.abs()));
    Ok(ScalarFlux {
        density,
        integral,
        rate,
        flux,
        max_defect,
    })
}
