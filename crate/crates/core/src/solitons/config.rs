use num_complex::Complex64;

use crate::background::Background;
use crate::error::{Error, Result};
use crate::fields::LightconePoint;

const POLE_TOL: f64 = 1e-12;

/// One pole `mu` of the dressing matrix and its constant `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Soliton {
    pub mu: Complex64,
    pub c: Complex64,
}

impl Soliton {
    pub fn new(mu: Complex64, c: Complex64) -> Self {
        Self { mu, c }
    }

    pub fn real(mu: f64, c: f64) -> Self {
        Self::new(Complex64::new(mu, 0.0), Complex64::new(c, 0.0))
    }

    pub fn is_real(&self) -> bool {
        self.mu.im == 0.0 && self.c.im == 0.0
    }
}

/// Validated list of solitons.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolitonConfig {
    solitons: Vec<Soliton>,
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= POLE_TOL * (1.0 + a.norm().max(b.norm()))
}

impl SolitonConfig {
    pub fn new(solitons: Vec<Soliton>) -> Result<Self> {
        for (s, sol) in solitons.iter().enumerate() {
            let bad = |reason: String| Error::InvalidPole { index: s, reason };
            if !(sol.mu.re.is_finite()
                && sol.mu.im.is_finite()
                && sol.c.re.is_finite()
                && sol.c.im.is_finite())
            {
                return Err(bad("non-finite value".into()));
            }
            let m = sol.mu.norm();
            if m < POLE_TOL {
                return Err(bad("|mu| = 0".into()));
            }
            if (m - 1.0).abs() < POLE_TOL {
                return Err(bad(format!("|mu| = 1 (mu = {})", sol.mu)));
            }
            if sol.c.norm() == 0.0 {
                return Err(bad("C = 0".into()));
            }
            for (r, other) in solitons.iter().enumerate().skip(s + 1) {
                if (sol.mu * other.mu - 1.0).norm() < POLE_TOL {
                    return Err(bad(format!("mu_{s} * mu_{r} = 1")));
                }
            }
        }
        let mut paired = vec![false; solitons.len()];
        for s in 0..solitons.len() {
            if solitons[s].is_real() || paired[s] {
                continue;
            }
            let partner = (0..solitons.len()).find(|&r| {
                r != s
                    && !paired[r]
                    && close(solitons[r].mu, solitons[s].mu.conj())
                    && close(solitons[r].c, solitons[s].c.conj())
            });
            match partner {
                Some(r) => {
                    paired[s] = true;
                    paired[r] = true;
                }
                None => {
                    return Err(Error::InvalidPole {
                        index: s,
                        reason: format!(
                            "complex entry (mu = {}, C = {}) needs its conjugate partner listed",
                            solitons[s].mu, solitons[s].c
                        ),
                    })
                }
            }
        }
        Ok(Self { solitons })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Convenience constructor for real `(mu, C)` pairs.
    pub fn real(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(m, c)| Soliton::real(m, c)).collect())
    }

    pub fn len(&self) -> usize {
        self.solitons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solitons.is_empty()
    }

    pub fn solitons(&self) -> &[Soliton] {
        &self.solitons
    }

    pub fn is_real(&self) -> bool {
        self.solitons.iter().all(Soliton::is_real)
    }

    /// `(mu, C)` pairs when all values are real.
    pub fn real_pairs(&self) -> Option<Vec<(f64, f64)>> {
        self.is_real()
            .then(|| self.solitons.iter().map(|s| (s.mu.re, s.c.re)).collect())
    }

    /// Product of `|mu_s|`.
    pub fn pi(&self) -> f64 {
        self.solitons.iter().map(|s| s.mu.norm()).product()
    }
}

/// Per-point soliton phases for real poles.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonFrame {
    pub lambda0: f64,
    pub lambda0_tilde: f64,
    pub b: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_tilde: Vec<f64>,
    /// Row-major `N x N` matrix `L + B_s + B_r`.
    pub d: Vec<f64>,
    pub pi: f64,
}

impl SolitonFrame {
    pub fn new(cfg: &SolitonConfig, bg: &Background, p: LightconePoint) -> Result<Self> {
        let pairs = cfg.real_pairs().ok_or_else(|| Error::InvalidPole {
            index: cfg
                .solitons()
                .iter()
                .position(|s| !s.is_real())
                .unwrap_or(0),
            reason: "the phase frame needs real poles and constants".into(),
        })?;
        let c = bg.eval(p);
        let (l, lt) = (c.lambda0, c.lambda0_tilde);
        let b: Vec<f64> = pairs
            .iter()
            .map(|&(mu, _)| (l + mu * lt) / (mu * mu - 1.0))
            .collect();
        let gamma = pairs
            .iter()
            .zip(&b)
            .map(|(&(_, cs), bs)| cs.abs().ln() + l + 2.0 * bs)
            .collect();
        let gamma_tilde = pairs.iter().map(|&(mu, _)| -mu.abs().ln()).collect();
        let n = b.len();
        let d = (0..n * n).map(|k| l + (b[k / n] + b[k % n])).collect();
        Ok(Self {
            lambda0: l,
            lambda0_tilde: lt,
            b,
            gamma,
            gamma_tilde,
            d,
            pi: cfg.pi(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation() {
        assert!(SolitonConfig::real(&[(-2.0, 1.0), (3.0, 2.0)]).is_ok());
        assert!(SolitonConfig::real(&[(1.0, 1.0)]).is_err());
        assert!(SolitonConfig::real(&[(-1.0, 1.0)]).is_err());
        assert!(SolitonConfig::real(&[(0.0, 1.0)]).is_err());
        assert!(SolitonConfig::real(&[(2.0, 0.0)]).is_err());
        assert!(SolitonConfig::real(&[(2.0, 1.0), (0.5, 1.0)]).is_err());
        let lone = vec![Soliton::new(c(2.0, 1.0), c(1.0, 0.0))];
        assert!(SolitonConfig::new(lone).is_err());
        let pair = vec![
            Soliton::new(c(2.0, 1.0), c(1.0, 0.5)),
            Soliton::new(c(2.0, -1.0), c(1.0, -0.5)),
        ];
        assert!(SolitonConfig::new(pair).is_ok());
        let mismatched = vec![
            Soliton::new(c(2.0, 1.0), c(1.0, 0.5)),
            Soliton::new(c(2.0, -1.0), c(1.0, 0.5)),
        ];
        assert!(SolitonConfig::new(mismatched).is_err());
    }

    #[test]
    fn frame_at_origin_and_unit_time() {
        let cfg = SolitonConfig::real(&[(-2.0, 1.0)]).unwrap();
        let f = SolitonFrame::new(
            &cfg,
            &Background::TimeLike,
            LightconePoint::from_lab(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(f.b[0], 0.0);
        assert_eq!(f.gamma[0], 0.0);
        assert!((f.gamma_tilde[0] + 2f64.ln()).abs() < 1e-15);
        let f = SolitonFrame::new(
            &cfg,
            &Background::TimeLike,
            LightconePoint::from_lab(1.0, 0.0),
        )
        .unwrap();
        assert!((f.lambda0 - 1.0).abs() < 1e-15 && f.lambda0_tilde.abs() < 1e-15);
        assert!((f.b[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((f.gamma[0] - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn frame_invariants() {
        let cfg = SolitonConfig::real(&[(-2.0, 1.0), (3.0, 2.0), (0.4, 0.7)]).unwrap();
        let f = SolitonFrame::new(
            &cfg,
            &Background::SpaceLike,
            LightconePoint::from_lab(0.3, -1.1),
        )
        .unwrap();
        for s in 0..3 {
            for r in 0..3 {
                assert_eq!(f.d[s * 3 + r], f.d[r * 3 + s]);
            }
        }
        let k = [0.0, 2f64.ln(), 0.7f64.ln()];
        for (s, ks) in k.iter().enumerate() {
            assert!((f.gamma[s] - ks - f.lambda0 - 2.0 * f.b[s]).abs() < 1e-14);
        }
        assert!((f.pi - 2.4).abs() < 1e-15);
    }

    #[test]
    fn flat_background_freezes_phases() {
        let cfg = SolitonConfig::real(&[(3.0, 2.0)]).unwrap();
        for (t, z) in [(0.0, 0.0), (4.0, -3.0)] {
            let f = SolitonFrame::new(&cfg, &Background::flat(), LightconePoint::from_lab(t, z))
                .unwrap();
            assert_eq!(f.gamma[0], 2f64.ln());
        }
    }
}
