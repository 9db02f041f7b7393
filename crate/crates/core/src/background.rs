//! Diagonal seed solutions `diag(e^L, e^-L)` with `L = F(zeta) + G(eta)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{LightconePoint, SymUnitMatrix};

/// Largest exponent we allow before `exp` leaves the f64 range.
pub const EXP_LIMIT: f64 = 700.0;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A one-variable profile together with its analytic derivative.
#[derive(Clone)]
pub struct Profile {
    value: RealFn,
    slope: RealFn,
}

impl Profile {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        slope: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            slope: Arc::new(slope),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_| 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn slope(&self, x: f64) -> f64 {
        (self.slope)(x)
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Profile(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackgroundKind {
    TimeLike,
    SpaceLike,
    Custom,
}

/// Causal character of the gradient of `L` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Causality {
    TimeLike,
    SpaceLike,
    Null,
}

#[derive(Debug, Clone)]
pub enum Background {
    /// `L = t`.
    TimeLike,
    /// `L = z`.
    SpaceLike,
    /// `L = F(zeta) + G(eta)` with user profiles.
    Custom { zeta: Profile, eta: Profile },
}

/// `L` and its conjugate `L~ = -F + G` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatePair {
    pub lambda0: f64,
    pub lambda0_tilde: f64,
}

impl Background {
    /// The flat background `L = 0`, i.e. `g = 1`.
    pub fn flat() -> Self {
        Background::Custom {
            zeta: Profile::zero(),
            eta: Profile::zero(),
        }
    }

    pub fn kind(&self) -> BackgroundKind {
        match self {
            Background::TimeLike => BackgroundKind::TimeLike,
            Background::SpaceLike => BackgroundKind::SpaceLike,
            Background::Custom { .. } => BackgroundKind::Custom,
        }
    }

    /// `(F(zeta), G(eta))`.
    fn profiles(&self, p: LightconePoint) -> (f64, f64) {
        match self {
            Background::TimeLike => (p.zeta, -p.eta),
            Background::SpaceLike => (p.zeta, p.eta),
            Background::Custom { zeta, eta } => (zeta.value(p.zeta), eta.value(p.eta)),
        }
    }

    /// `(dL/dzeta, dL/deta)`.
    pub fn gradient(&self, p: LightconePoint) -> (f64, f64) {
        match self {
            Background::TimeLike => (1.0, -1.0),
            Background::SpaceLike => (1.0, 1.0),
            Background::Custom { zeta, eta } => (zeta.slope(p.zeta), eta.slope(p.eta)),
        }
    }

    pub fn eval(&self, p: LightconePoint) -> ConjugatePair {
        let (f, g) = self.profiles(p);
        ConjugatePair {
            lambda0: f + g,
            lambda0_tilde: -f + g,
        }
    }

    /// The Minkowski norm `-L_t^2 + L_z^2` equals `L_zeta L_eta`.
    pub fn classify(&self, p: LightconePoint) -> Causality {
        let (a, b) = self.gradient(p);
        let n = a * b;
        if n < 0.0 {
            Causality::TimeLike
        } else if n > 0.0 {
            Causality::SpaceLike
        } else {
            Causality::Null
        }
    }

    pub fn matrix(&self, p: LightconePoint) -> Result<SymUnitMatrix> {
        let l = self.eval(p).lambda0;
        if !(l.abs() <= EXP_LIMIT) {
            return Err(Error::Overflow(l));
        }
        Ok(SymUnitMatrix::diagonal(l))
    }

    /// Diagonal solution of the linear system for spectral parameter `lambda`,
    /// `diag(e^-w, e^w)` with `w = (L - lambda L~) / (lambda^2 - 1)`, so that
    /// `psi(0)` is the background matrix.
    pub fn diagonal_psi(&self, p: LightconePoint, lambda: f64) -> Result<[f64; 2]> {
        let den = lambda * lambda - 1.0;
        if den.abs() < 1e-12 {
            return Err(Error::SpectralPole(lambda));
        }
        let c = self.eval(p);
        let w = (c.lambda0 - lambda * c.lambda0_tilde) / den;
        if !(w.abs() <= EXP_LIMIT) {
            return Err(Error::Overflow(w));
        }
        Ok([(-w).exp(), w.exp()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Grid, Mat2};
    use crate::numerics::GridFn;

    fn lab(t: f64, z: f64) -> LightconePoint {
        LightconePoint::from_lab(t, z)
    }

    #[test]
    fn canonical_values() {
        let c = Background::TimeLike.eval(lab(2.0, 5.0));
        assert!((c.lambda0 - 2.0).abs() < 1e-15);
        assert!((c.lambda0_tilde + 5.0).abs() < 1e-15);
        let c = Background::SpaceLike.eval(lab(2.0, 5.0));
        assert!((c.lambda0 - 5.0).abs() < 1e-15);
        assert!((c.lambda0_tilde + 2.0).abs() < 1e-15);
        let c = Background::flat().eval(lab(0.3, -7.0));
        assert_eq!((c.lambda0, c.lambda0_tilde), (0.0, 0.0));
    }

    #[test]
    fn classification() {
        let p = lab(0.1, 0.2);
        assert_eq!(Background::TimeLike.classify(p), Causality::TimeLike);
        assert_eq!(Background::SpaceLike.classify(p), Causality::SpaceLike);
        assert_eq!(Background::flat().classify(p), Causality::Null);
    }

    #[test]
    fn matrices() {
        assert_eq!(
            Background::TimeLike.matrix(lab(0.0, 3.0)).unwrap(),
            SymUnitMatrix::IDENTITY
        );
        let g = Background::TimeLike.matrix(lab(1.0, -2.0)).unwrap();
        assert!((g.g11() - 1f64.exp()).abs() < 1e-15 && (g.g22() - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(
            Background::TimeLike.matrix(lab(800.0, 0.0)),
            Err(Error::Overflow(800.0))
        );
    }

    #[test]
    fn psi_normalisation_and_poles() {
        let p = lab(1.0, 0.4);
        let psi = Background::TimeLike.diagonal_psi(p, 0.0).unwrap();
        assert!((psi[0] - 1f64.exp()).abs() < 1e-14 && (psi[1] - (-1f64).exp()).abs() < 1e-14);
        assert_eq!(Background::flat().diagonal_psi(p, 2.0).unwrap(), [1.0, 1.0]);
        assert_eq!(
            Background::TimeLike.diagonal_psi(p, 1.0),
            Err(Error::SpectralPole(1.0))
        );
    }

    /// Max deviation of the two diagonal Lax equations on a light-cone patch
    /// around `centre`.
    fn lax_defect(bg: &Background, centre: LightconePoint, lambda: f64, h: f64) -> f64 {
        let n = 9;
        let off = (n / 2) as f64 * h;
        let grid = Grid::light_cone(
            crate::fields::Axis::new(centre.zeta - off, centre.zeta + off, n).unwrap(),
            crate::fields::Axis::new(centre.eta - off, centre.eta + off, n).unwrap(),
        );
        let psi = GridFn::from_fn(grid.shape(), |i, j| {
            let d = bg.diagonal_psi(grid.point(i, j), lambda).unwrap();
            Mat2::diag(d[0], d[1])
        });
        let ab = GridFn::from_fn(grid.shape(), |i, j| {
            let (lz, le) = bg.gradient(grid.point(i, j));
            (Mat2::diag(-lz, lz), Mat2::diag(le, -le))
        });
        let s = grid.stencil();
        let (pz, pe) = (s.d_zeta(&psi), s.d_eta(&psi));
        let c = n / 2;
        let (a, b) = ab.get(c, c);
        let lhs_z = pz.get(c, c) - a * psi.get(c, c) * (1.0 / (lambda - 1.0));
        let lhs_e = pe.get(c, c) - b * psi.get(c, c) * (1.0 / (lambda + 1.0));
        lhs_z.max_abs().max(lhs_e.max_abs())
    }

    #[test]
    fn psi_solves_lax_pair_at_second_order() {
        for bg in [Background::TimeLike, Background::SpaceLike] {
            for lambda in [-3.0, -0.5, 0.5, 3.0] {
                let p = lab(0.5, 0.5);
                let e1 = lax_defect(&bg, p, lambda, 0.02);
                let e2 = lax_defect(&bg, p, lambda, 0.01);
                let order = (e1 / e2).log2();
                assert!((order - 2.0).abs() < 0.1, "lambda {lambda}: order {order}");
            }
        }
    }

    #[test]
    fn conjugacy_and_wave_equation() {
        let bg = Background::Custom {
            zeta: Profile::new(|x| x.sin(), |x| x.cos()),
            eta: Profile::new(|x| 0.5 * x * x, |x| x),
        };
        let grid = Grid::lab_square(-1.0, 1.0, 41).unwrap();
        let l = GridFn::from_fn(grid.shape(), |i, j| bg.eval(grid.point(i, j)).lambda0);
        let lt = GridFn::from_fn(grid.shape(), |i, j| bg.eval(grid.point(i, j)).lambda0_tilde);
        let s = grid.stencil();
        let sum_z = s.d_zeta(&l).zip(&s.d_zeta(&lt), |a, b| a + b);
        let diff_e = s.d_eta(&l).zip(&s.d_eta(&lt), |a, b| a - b);
        assert!(sum_z.max_abs() < 1e-12 && diff_e.max_abs() < 1e-12);
        // the mixed derivative of F(zeta) + G(eta) vanishes up to rounding on any stencil
        assert!(s.d_eta(&s.d_zeta(&l)).max_abs() < 1e-9);
    }
}
