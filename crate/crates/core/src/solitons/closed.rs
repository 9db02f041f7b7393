use super::config::{SolitonConfig, SolitonFrame};
use crate::background::{Background, EXP_LIMIT};
use crate::error::{Error, Result};
use crate::fields::{LightconePoint, SymUnitMatrix};

/// `cosh(x) / cosh(y)` without overflow.
fn cosh_ratio(x: f64, y: f64) -> f64 {
    let (ax, ay) = (x.abs(), y.abs());
    (ax - ay).exp() * (1.0 + (-2.0 * ax).exp()) / (1.0 + (-2.0 * ay).exp())
}

/// `1 / cosh(x)` without overflow.
fn sech(x: f64) -> f64 {
    let a = x.abs();
    2.0 * (-a).exp() / (1.0 + (-2.0 * a).exp())
}

/// `cosh(x) e^-m` and `sinh(x) e^-m`, squared, for a reference `m >= |x|`.
fn scaled_cosh2(x: f64, m: f64) -> f64 {
    let v = 0.5 * ((x - m).exp() + (-x - m).exp());
    v * v
}

fn scaled_sinh2(x: f64, m: f64) -> f64 {
    let v = 0.5 * ((x - m).exp() - (-x - m).exp());
    v * v
}

fn real_config(cfg: &SolitonConfig, n: usize) -> Result<Vec<(f64, f64)>> {
    if cfg.len() != n {
        return Err(Error::Unsupported(format!(
            "closed form for {n} soliton(s) called with {}",
            cfg.len()
        )));
    }
    let pairs = cfg.real_pairs().ok_or_else(|| {
        Error::Unsupported("closed forms are restricted to real poles and constants".into())
    })?;
    if let Some((s, _)) = pairs.iter().enumerate().find(|(_, &(_, c))| c <= 0.0) {
        return Err(Error::InvalidPole {
            index: s,
            reason: "closed forms assume C > 0 (a negative C flips the off-diagonal sign)".into(),
        });
    }
    Ok(pairs)
}

fn check_exponent(l: f64) -> Result<()> {
    if l.abs() <= EXP_LIMIT {
        Ok(())
    } else {
        Err(Error::Overflow(l))
    }
}

/// Single soliton:
/// `g11 = e^L cosh(g + g~) / cosh g`, `g12 = (1 - mu^2) / (2 mu cosh g)`,
/// `g22 = e^-L cosh(g - g~) / cosh g`.
pub fn one_soliton(
    cfg: &SolitonConfig,
    bg: &Background,
    p: LightconePoint,
) -> Result<SymUnitMatrix> {
    let pairs = real_config(cfg, 1)?;
    let mu = pairs[0].0;
    let f = SolitonFrame::new(cfg, bg, p)?;
    check_exponent(f.lambda0)?;
    let (g, gt) = (f.gamma[0], f.gamma_tilde[0]);
    Ok(SymUnitMatrix::from_entries(
        f.lambda0.exp() * cosh_ratio(g + gt, g),
        (1.0 - mu * mu) / (2.0 * mu) * sech(g),
        (-f.lambda0).exp() * cosh_ratio(g - gt, g),
    ))
}

/// Two solitons with distinct real poles.
///
/// With `a = (mu1 - mu2)^2`, `b = (mu1 mu2 - 1)^2` the common denominator is
/// `a cosh^2((g1+g2)/2) + b sinh^2((g1-g2)/2)`. The diagonal numerators shift
/// both arguments by the `g~` terms; when `mu1 mu2 < 0` the roles of cosh and
/// sinh swap in them.
pub fn two_soliton(
    cfg: &SolitonConfig,
    bg: &Background,
    p: LightconePoint,
) -> Result<SymUnitMatrix> {
    let pairs = real_config(cfg, 2)?;
    let (m1, m2) = (pairs[0].0, pairs[1].0);
    if (m1 - m2).abs() <= 1e-14 * m1.abs().max(m2.abs()) {
        return Err(Error::DegeneratePair(m1));
    }
    let f = SolitonFrame::new(cfg, bg, p)?;
    check_exponent(f.lambda0)?;
    let (g1, g2) = (f.gamma[0], f.gamma[1]);
    let (t1, t2) = (f.gamma_tilde[0], f.gamma_tilde[1]);
    let a = (m1 - m2).powi(2);
    let b = (m1 * m2 - 1.0).powi(2);
    let args = [
        0.5 * (g1 + g2),
        0.5 * (g1 - g2),
        0.5 * (g1 + g2 + t1 + t2),
        0.5 * (g1 - g2 + t1 - t2),
        0.5 * (g1 + g2 - t1 - t2),
        0.5 * (g1 - g2 - t1 + t2),
    ];
    let m = args.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let den = a * scaled_cosh2(args[0], m) + b * scaled_sinh2(args[1], m);
    let num = |u: f64, w: f64| {
        if m1 * m2 > 0.0 {
            a * scaled_cosh2(u, m) + b * scaled_sinh2(w, m)
        } else {
            a * scaled_sinh2(u, m) + b * scaled_cosh2(w, m)
        }
    };
    let scaled_cosh = |x: f64| 0.5 * ((x - 2.0 * m).exp() + (-x - 2.0 * m).exp());
    let g11 = f.lambda0.exp() * num(args[2], args[3]) / den;
    let g22 = (-f.lambda0).exp() * num(args[4], args[5]) / den;
    let g12 = (m1 - m2) * (m1 * m2 - 1.0) / (2.0 * m1 * m2)
        * (m1 * (m2 * m2 - 1.0) * scaled_cosh(g1) - m2 * (m1 * m1 - 1.0) * scaled_cosh(g2))
        / den;
    Ok(SymUnitMatrix::from_entries(g11, g12, g22))
}
