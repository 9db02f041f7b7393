use std::f64::consts::{FRAC_PI_2, PI};

use crate::fields::{FieldGrid, Frame, Stencil, SymUnitMatrix};
use crate::numerics::{Axis2, GridFn};

/// `g = R(phi) diag(e^Lambda, e^-Lambda) R(phi)^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPhi {
    /// Log-eigenvalue, `>= 0`.
    pub lambda: f64,
    /// Rotation angle in `(-pi/2, pi/2]`.
    pub phi: f64,
}

/// Inverse of [`compose`]. The angle is set to 0 at the identity, where it is
/// not observable.
pub fn decompose(g: &SymUnitMatrix) -> LambdaPhi {
    let half_diff = 0.5 * (g.g11() - g.g22());
    // asinh of the hyperbolic radius keeps accuracy close to the identity
    let lambda = half_diff.hypot(g.g12()).asinh();
    let two_phi = g.g12().atan2(half_diff);
    let phi = if two_phi <= -PI {
        FRAC_PI_2
    } else {
        0.5 * two_phi
    };
    LambdaPhi { lambda, phi }
}

pub fn compose(lp: LambdaPhi) -> SymUnitMatrix {
    let (ch, sh) = (lp.lambda.cosh(), lp.lambda.sinh());
    let (s2, c2) = (2.0 * lp.phi).sin_cos();
    SymUnitMatrix::from_entries(ch + c2 * sh, s2 * sh, ch - c2 * sh)
}

/// Decomposed field on the grid of the source field.
#[derive(Debug, Clone)]
pub struct LambdaPhiField {
    pub lambda: GridFn<f64>,
    pub phi: GridFn<f64>,
    pub stencil: Stencil,
}

/// Central difference of an angle defined modulo `pi`.
fn angle_diff(f: &GridFn<f64>, axis: Axis2, h: f64) -> GridFn<f64> {
    let shape = f.shape();
    let step = |i: usize, j: usize| match axis {
        Axis2::First => ((i + 1, j), (i - 1, j)),
        Axis2::Second => ((i, j + 1), (i, j - 1)),
    };
    let valid = f.diff(axis, h).valid();
    GridFn::from_fn(shape, |i, j| {
        if !(valid[0].contains(&i) && valid[1].contains(&j)) {
            return 0.0;
        }
        let ((a, b), (c, d)) = step(i, j);
        let mut delta = f.get(a, b) - f.get(c, d);
        delta -= PI * (delta / PI).round();
        delta / (2.0 * h)
    })
    .restrict(valid)
}

impl LambdaPhiField {
    pub fn new(field: &FieldGrid) -> Self {
        let lp: Vec<LambdaPhi> = field.values().iter().map(decompose).collect();
        let shape = field.grid().shape();
        Self {
            lambda: GridFn::from_vec(shape, lp.iter().map(|v| v.lambda).collect()),
            phi: GridFn::from_vec(shape, lp.iter().map(|v| v.phi).collect()),
            stencil: field.grid().stencil(),
        }
    }

    pub fn d_zeta(&self, f: &GridFn<f64>) -> GridFn<f64> {
        self.stencil.d_zeta(f)
    }

    pub fn d_eta(&self, f: &GridFn<f64>) -> GridFn<f64> {
        self.stencil.d_eta(f)
    }

    /// `(phi_zeta, phi_eta)` with phase-wrapped differences.
    pub fn phi_gradient(&self) -> (GridFn<f64>, GridFn<f64>) {
        let [h0, h1] = self.stencil.h;
        let d0 = angle_diff(&self.phi, Axis2::First, h0);
        match self.stencil.frame {
            Frame::LightCone => (d0, angle_diff(&self.phi, Axis2::Second, h1)),
            Frame::Lab => {
                let d1 = angle_diff(&self.phi, Axis2::Second, h1);
                (d0.zip(&d1, |t, z| t + z), d1.zip(&d0, |z, t| z - t))
            }
        }
    }

    /// Reassembles `g` node by node.
    pub fn compose_max_error(&self, field: &FieldGrid) -> f64 {
        let [n0, n1] = self.lambda.shape();
        (0..n0)
            .flat_map(|i| (0..n1).map(move |j| (i, j)))
            .map(|(i, j)| {
                let g = compose(LambdaPhi {
                    lambda: self.lambda.get(i, j),
                    phi: self.phi.get(i, j),
                });
                g.max_abs_diff(&field.get(i, j))
            })
            .fold(0.0, f64::max)
    }
}

/// `Lambda_zeta_eta - 2 phi_zeta phi_eta sinh 2 Lambda` and
/// `(phi_zeta sinh^2 Lambda)_eta + (phi_eta sinh^2 Lambda)_zeta`.
pub fn alt_equations_residual(lp: &LambdaPhiField) -> (GridFn<f64>, GridFn<f64>) {
    let (fz, fe) = lp.phi_gradient();
    let l = &lp.lambda;
    let lze = lp.d_eta(&lp.d_zeta(l));
    let first = lze
        .zip(&fz.zip(&fe, |a, b| a * b), |x, p| (x, p))
        .zip(l, |(x, p), l| x - 2.0 * p * (2.0 * l).sinh());
    let sh2 = l.map(|v| v.sinh().powi(2));
    let xz = fz.zip(&sh2, |a, s| a * s);
    let xe = fe.zip(&sh2, |a, s| a * s);
    let second = lp.d_eta(&xz).zip(&lp.d_zeta(&xe), |a, b| a + b);
    (first, second)
}

/// `-Lambda_zeta^2 - 4 phi_zeta^2 sinh^2 Lambda` and the `eta` analogue,
/// which equal `det A` and `det B`.
pub fn det_identities(lp: &LambdaPhiField) -> (GridFn<f64>, GridFn<f64>) {
    let (fz, fe) = lp.phi_gradient();
    let l = &lp.lambda;
    let form = |dl: GridFn<f64>, dphi: &GridFn<f64>| {
        dl.zip(dphi, |a, b| (a, b))
            .zip(l, |(a, b), l| -a * a - 4.0 * b * b * l.sinh().powi(2))
    };
    (form(lp.d_zeta(l), &fz), form(lp.d_eta(l), &fe))
}
