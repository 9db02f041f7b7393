use crate::background::BackgroundKind;
use crate::error::{Error, Result};

/// Travelling-wave data of a single soliton on a canonical background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub k: f64,
    pub omega: f64,
    /// Crest velocity `omega / k`.
    pub v: f64,
    /// Crest value of the off-diagonal entry, `(1 - mu^2) / (2 mu)`.
    pub amplitude: f64,
    /// Crest position at `t = 0`.
    pub crest_offset: f64,
}

/// Wave number, frequency, velocity and amplitude for pole `mu` and `K = ln|C|`.
///
/// The phase is `K + omega t - k z` on the time-like background and
/// `K + k z - omega t` on the space-like one.
pub fn kinematics(mu: f64, kind: BackgroundKind, big_k: f64) -> Result<Kinematics> {
    if !mu.is_finite() || mu == 0.0 || (mu.abs() - 1.0).abs() < 1e-12 {
        return Err(Error::InvalidPole {
            index: 0,
            reason: format!("kinematics need |mu| not in {{0, 1}}, got {mu}"),
        });
    }
    let m2 = mu * mu;
    let (k, omega, crest_offset) = match kind {
        BackgroundKind::TimeLike => {
            let k = 2.0 * mu / (m2 - 1.0);
            (k, (m2 + 1.0) / (m2 - 1.0), big_k / k)
        }
        BackgroundKind::SpaceLike => {
            let k = (m2 + 1.0) / (m2 - 1.0);
            (k, 2.0 * mu / (m2 - 1.0), -big_k / k)
        }
        BackgroundKind::Custom => {
            return Err(Error::Unsupported(
                "kinematics are defined for the canonical backgrounds only".into(),
            ))
        }
    };
    let v = match kind {
        BackgroundKind::TimeLike => (m2 + 1.0) / (2.0 * mu),
        _ => 2.0 * mu / (m2 + 1.0),
    };
    Ok(Kinematics {
        k,
        omega,
        v,
        amplitude: (1.0 - m2) / (2.0 * mu),
        crest_offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::Background;
    use crate::fields::LightconePoint;
    use crate::solitons::{SolitonConfig, SolitonFrame};
    use proptest::prelude::*;

    #[test]
    fn figure_pole() {
        let t = kinematics(-2.0, BackgroundKind::TimeLike, 0.0).unwrap();
        assert_eq!(t.v, -1.25);
        assert_eq!(t.amplitude, 0.75);
        assert!(t.v.abs() > 1.0);
        let s = kinematics(-2.0, BackgroundKind::SpaceLike, 0.0).unwrap();
        assert_eq!(s.v, -0.8);
        assert!(s.v.abs() < 1.0);
        assert!(kinematics(1.0, BackgroundKind::TimeLike, 0.0).is_err());
    }

    #[test]
    fn phase_vanishes_on_crest_line() {
        for (kind, bg) in [
            (BackgroundKind::TimeLike, Background::TimeLike),
            (BackgroundKind::SpaceLike, Background::SpaceLike),
        ] {
            let (mu, c) = (3.0f64, 2.0f64);
            let kin = kinematics(mu, kind, c.ln()).unwrap();
            let cfg = SolitonConfig::real(&[(mu, c)]).unwrap();
            for t in [-2.0, 0.0, 1.5] {
                let z = kin.crest_offset + kin.v * t;
                let f = SolitonFrame::new(&cfg, &bg, LightconePoint::from_lab(t, z)).unwrap();
                assert!(f.gamma[0].abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn reciprocal_velocities(m in 1.001f64..50.0, neg in any::<bool>(), inv in any::<bool>()) {
            let mut mu = if inv { 1.0 / m } else { m };
            if neg { mu = -mu; }
            let t = kinematics(mu, BackgroundKind::TimeLike, 0.0).unwrap();
            let s = kinematics(mu, BackgroundKind::SpaceLike, 0.0).unwrap();
            prop_assert!((t.v * s.v - 1.0).abs() < 1e-15);
            prop_assert!((t.v - t.omega / t.k).abs() < 1e-12 * t.v.abs());
            prop_assert!((s.v - s.omega / s.k).abs() < 1e-12 * s.v.abs().max(1e-3));
            prop_assert!(t.v.abs() > 1.0 && s.v.abs() < 1.0);
        }
    }
}
