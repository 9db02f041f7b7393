use num_complex::Complex64;

use super::config::SolitonConfig;
use crate::background::{Background, EXP_LIMIT};
use crate::error::{Error, Result};
use crate::fields::{LightconePoint, SymUnitMatrix};
use crate::numerics::ComplexLu;

const IMAG_TOL: f64 = 1e-9;

/// Determinant ratios entering the dressed matrix at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressingTerms {
    /// `Delta00 / Delta`.
    pub ratio00: Complex64,
    /// `Delta33 / Delta`.
    pub ratio33: Complex64,
    /// `Delta03 / Delta - 1`.
    pub excess03: Complex64,
    /// `Delta30 / Delta - 1`, with the rank-one term transposed.
    pub excess30: Complex64,
    /// `prod |mu_s|`.
    pub pi: f64,
    /// `prod mu_s`.
    pub prod_mu: Complex64,
    pub lambda0: f64,
}

/// Evaluates the determinant ratios.
///
/// Every entry of the N x N matrices factors as `x_s x_r`, `y_s y_r` or
/// `x_s y_r` with `x_s = C_s e^(B_s + L/2)` and `y_s = e^-(B_s + L/2)`; each
/// index is rescaled by `max(|x_s|, |y_s|)`, which cancels from all ratios.
/// `Delta03` differs from the symmetric matrix `mu_s mu_r M_sr` by the rank-one
/// term `x_s y_r`, so its ratio follows from one linear solve with `M`.
pub fn dressing_terms(
    cfg: &SolitonConfig,
    bg: &Background,
    p: LightconePoint,
) -> Result<DressingTerms> {
    let c = bg.eval(p);
    let (l, lt) = (c.lambda0, c.lambda0_tilde);
    let sols = cfg.solitons();
    let n = sols.len();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for s in sols {
        let b = (l + s.mu * lt) / (s.mu * s.mu - 1.0);
        let lx = s.c.ln() + b + 0.5 * l;
        let ly = -b - 0.5 * l;
        let scale = lx.re.max(ly.re);
        x.push((lx - scale).exp());
        y.push((ly - scale).exp());
    }
    let mu: Vec<Complex64> = sols.iter().map(|s| s.mu).collect();
    let build = |f: &dyn Fn(usize, usize, Complex64) -> Complex64| -> Vec<Complex64> {
        (0..n * n)
            .map(|k| {
                let (s, r) = (k / n, k % n);
                let mm = mu[s] * mu[r];
                f(s, r, mm) / (mm - 1.0)
            })
            .collect()
    };
    let m = build(&|s, r, _| x[s] * x[r] + y[s] * y[r]);
    let m00 = build(&|s, r, mm| x[s] * x[r] + mm * y[s] * y[r]);
    let m33 = build(&|s, r, mm| mm * x[s] * x[r] + y[s] * y[r]);
    let lu = ComplexLu::new(m, n);
    let det_m = lu.det();
    let pi = cfg.pi();
    let prod_mu: Complex64 = mu.iter().product();
    let delta = pi * pi * det_m;
    if delta.norm() == 0.0 || !delta.norm().is_finite() {
        return Err(Error::SingularSystem(0));
    }
    let ratio00 = ComplexLu::new(m00, n).det() / delta;
    let ratio33 = ComplexLu::new(m33, n).det() / delta;
    // det(diag(mu) M diag(mu) - a b^T) / Delta - 1 = (r - 1) - r * b^T (diag(mu) M diag(mu))^-1 a,
    // with r = prod(mu)^2 / Pi^2 (one for conjugation-closed sets).
    let r = prod_mu * prod_mu / (pi * pi);
    let quad = |a: &[Complex64], b: &[Complex64]| -> Result<Complex64> {
        let rhs: Vec<Complex64> = a.iter().zip(&mu).map(|(v, m)| v / m).collect();
        let sol = lu.solve(&rhs)?;
        Ok(sol
            .iter()
            .zip(b)
            .zip(&mu)
            .map(|((s, v), m)| s * v / m)
            .sum())
    };
    let excess03 = (r - 1.0) - r * quad(&x, &y)?;
    let excess30 = (r - 1.0) - r * quad(&y, &x)?;
    Ok(DressingTerms {
        ratio00,
        ratio33,
        excess03,
        excess30,
        pi,
        prod_mu,
        lambda0: l,
    })
}

fn real_part(v: Complex64) -> Result<f64> {
    if v.im.abs() > IMAG_TOL * v.re.abs().max(1.0) {
        return Err(Error::NonRealOutput { imag: v.im });
    }
    Ok(v.re)
}

/// Dressed field by the determinant formula.
///
/// The diagonal carries the prefactor `Pi e^(+-L)`; the off-diagonal uses the
/// signed product of the poles, which keeps `det g = 1` for negative poles.
pub fn n_soliton(cfg: &SolitonConfig, bg: &Background, p: LightconePoint) -> Result<SymUnitMatrix> {
    if cfg.is_empty() {
        return bg.matrix(p);
    }
    let t = dressing_terms(cfg, bg, p)?;
    if !(t.lambda0.abs() <= EXP_LIMIT) {
        return Err(Error::Overflow(t.lambda0));
    }
    let g11 = real_part(t.pi * t.lambda0.exp() * t.ratio00)?;
    let g22 = real_part(t.pi * (-t.lambda0).exp() * t.ratio33)?;
    let g12 = real_part(t.prod_mu * t.excess03)?;
    if !(g11.is_finite() && g22.is_finite() && g12.is_finite()) {
        return Err(Error::Overflow(t.lambda0));
    }
    Ok(SymUnitMatrix::from_entries(g11, g12, g22))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solitons::{one_soliton, two_soliton, Soliton};
    use proptest::prelude::*;

    fn lab(t: f64, z: f64) -> LightconePoint {
        LightconePoint::from_lab(t, z)
    }

    #[test]
    fn empty_config_is_background() {
        let p = lab(0.7, -0.2);
        let g = n_soliton(&SolitonConfig::empty(), &Background::TimeLike, p).unwrap();
        assert_eq!(g, Background::TimeLike.matrix(p).unwrap());
    }

    #[test]
    fn transposed_term_agrees() {
        let cfg = SolitonConfig::real(&[(-2.0, 1.0), (3.0, 2.0), (0.4, 0.7)]).unwrap();
        for (t, z) in [(0.1, 0.2), (-1.5, 2.5), (3.0, -4.0)] {
            let d = dressing_terms(&cfg, &Background::TimeLike, lab(t, z)).unwrap();
            assert!((d.excess03 - d.excess30).norm() < 1e-12 * (1.0 + d.excess03.norm()));
        }
    }

    #[test]
    fn matches_closed_forms() {
        let one = SolitonConfig::real(&[(-2.0, 1.0)]).unwrap();
        let two = SolitonConfig::real(&[(-2.0, 1.0), (3.0, 2.0)]).unwrap();
        for bg in [Background::TimeLike, Background::SpaceLike] {
            for (t, z) in [(0.0, 0.0), (0.3, 0.7), (-1.2, 2.0), (4.0, -4.5)] {
                let p = lab(t, z);
                let a = n_soliton(&one, &bg, p).unwrap();
                let b = one_soliton(&one, &bg, p).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-12 * b.max_abs());
                let a = n_soliton(&two, &bg, p).unwrap();
                let b = two_soliton(&two, &bg, p).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-11 * b.max_abs());
            }
        }
    }

    #[test]
    fn complex_pair_is_real_with_unit_det() {
        let cfg = SolitonConfig::new(vec![
            Soliton::new(Complex64::new(2.0, 1.0), Complex64::new(1.0, 0.5)),
            Soliton::new(Complex64::new(2.0, -1.0), Complex64::new(1.0, -0.5)),
        ])
        .unwrap();
        for (t, z) in [(0.3, 0.7), (-1.2, 2.0)] {
            let g = n_soliton(&cfg, &Background::TimeLike, lab(t, z)).unwrap();
            assert!((g.det() - 1.0).abs() < 1e-9);
            assert!(g.g11() > 0.0 && g.g22() > 0.0);
        }
    }

    #[test]
    fn far_field_does_not_overflow() {
        let cfg = SolitonConfig::real(&[(-2.0, 1.0), (3.0, 2.0)]).unwrap();
        let g = n_soliton(&cfg, &Background::SpaceLike, lab(300.0, 200.0)).unwrap();
        assert!(g.g11().is_finite() && g.g22().is_finite());
        assert!((g.det() - 1.0).abs() < 1e-9 * g.g11() * g.g22());
    }

    proptest! {
        #[test]
        fn unit_det_random_configs(
            n in 1usize..5,
            seeds in proptest::collection::vec((1.1f64..4.0, 0.3f64..3.0, any::<bool>(), any::<bool>()), 4),
            t in -3.0f64..3.0, z in -3.0f64..3.0,
        ) {
            let mut pairs = Vec::new();
            for &(m, c, neg, inv) in seeds.iter().take(n) {
                let mut mu = if inv { 1.0 / m } else { m };
                if neg { mu = -mu; }
                pairs.push((mu, c));
            }
            // nearly coincident poles make the system ill-conditioned; keep them apart
            let apart = pairs.iter().enumerate().all(|(s, a)| {
                pairs[s + 1..].iter().all(|b| (a.0 - b.0).abs() > 0.3 && (a.0 * b.0 - 1.0).abs() > 0.3)
            });
            if !apart {
                return Ok(());
            }
            let Ok(cfg) = SolitonConfig::real(&pairs) else { return Ok(()); };
            let g = match n_soliton(&cfg, &Background::TimeLike, lab(t, z)) {
                Ok(g) => g,
                Err(_) => return Ok(()),
            };
            prop_assert!((g.det() - 1.0).abs() < 1e-9 * g.g11().max(1.0) * g.g22().max(1.0));
        }

        #[test]
        fn permutation_invariance(t in -3.0f64..3.0, z in -3.0f64..3.0) {
            let a = SolitonConfig::real(&[(-2.0, 1.0), (3.0, 2.0), (0.4, 0.7)]).unwrap();
            let b = SolitonConfig::real(&[(0.4, 0.7), (-2.0, 1.0), (3.0, 2.0)]).unwrap();
            let ga = n_soliton(&a, &Background::TimeLike, lab(t, z)).unwrap();
            let gb = n_soliton(&b, &Background::TimeLike, lab(t, z)).unwrap();
            prop_assert!(ga.max_abs_diff(&gb) < 1e-10 * ga.max_abs());
        }
    }
}
