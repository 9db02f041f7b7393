//! Text syntax for soliton lists and grids.

use chiral_core::fields::{Axis, Grid};
use chiral_core::solitons::{Soliton, SolitonConfig};
use num_complex::Complex64;

use crate::error::{CliError, CliResult};

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// `3`, `-2.5`, `1e-3`, `2+1i`, `2-0.5i`, `1.5i`.
pub fn parse_complex(s: &str) -> CliResult<Complex64> {
    let s = s.trim();
    let bad = || config_err(format!("cannot parse number '{s}'"));
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(num(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => num(t),
    };
    match split {
        Some(k) => Ok(Complex64::new(num(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// `mu=<num>,C=<num>[;...]`; an empty string is the background alone.
pub fn parse_solitons(s: &str) -> CliResult<SolitonConfig> {
    let mut out = Vec::new();
    for (k, item) in s
        .split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .enumerate()
    {
        let (mut mu, mut c) = (None, None);
        for field in item.split(',') {
            let (key, val) = field.split_once('=').ok_or_else(|| {
                config_err(format!("soliton {k}: expected key=value, got '{field}'"))
            })?;
            match key.trim() {
                "mu" => mu = Some(parse_complex(val)?),
                "C" | "c" => c = Some(parse_complex(val)?),
                other => return Err(config_err(format!("soliton {k}: unknown key '{other}'"))),
            }
        }
        let mu = mu.ok_or_else(|| config_err(format!("soliton {k}: missing mu")))?;
        let c = c.ok_or_else(|| config_err(format!("soliton {k}: missing C")))?;
        out.push(Soliton::new(mu, c));
    }
    Ok(SolitonConfig::new(out)?)
}

fn parse_axis(name: &str, s: &str) -> CliResult<Axis> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(config_err(format!(
            "axis {name}: expected min:max:count, got '{s}'"
        )));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| config_err(format!("axis {name}: cannot parse '{t}'")))
    };
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| config_err(format!("axis {name}: cannot parse count '{}'", parts[2])))?;
    if count < 3 || count.is_multiple_of(2) {
        return Err(config_err(format!(
            "axis {name}: count must be odd and >= 3, got {count}"
        )));
    }
    Ok(Axis::new(num(parts[0])?, num(parts[1])?, count)?)
}

/// `t=<min>:<max>:<n>,z=...` (lab) or `zeta=...,eta=...` (light-cone).
pub fn parse_grid(s: &str) -> CliResult<Grid> {
    let mut axes: Vec<(String, Axis)> = Vec::new();
    for item in s.split(',') {
        let (name, range) = item.split_once('=').ok_or_else(|| {
            config_err(format!("grid: expected name=min:max:count, got '{item}'"))
        })?;
        let name = name.trim().to_string();
        let axis = parse_axis(&name, range)?;
        axes.push((name, axis));
    }
    let names: Vec<&str> = axes.iter().map(|(n, _)| n.as_str()).collect();
    match names.as_slice() {
        ["t", "z"] => Ok(Grid::lab(axes[0].1, axes[1].1)),
        ["zeta", "eta"] => Ok(Grid::light_cone(axes[0].1, axes[1].1)),
        _ => Err(config_err(format!(
            "grid: expected axes t,z or zeta,eta in that order, got {names:?}"
        ))),
    }
}

/// Inverse of [`parse_grid`], used in reports and manifests.
pub fn format_grid(g: &Grid) -> String {
    let names = match g.frame {
        chiral_core::fields::Frame::Lab => ["t", "z"],
        chiral_core::fields::Frame::LightCone => ["zeta", "eta"],
    };
    names
        .iter()
        .zip(&g.axes)
        .map(|(n, a)| format!("{n}={}:{}:{}", a.min, a.max, a.count))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use chiral_core::fields::Frame;
    use chiral_core::Error;

    #[test]
    fn complex_numbers() {
        assert_eq!(parse_complex("-2").unwrap(), Complex64::new(-2.0, 0.0));
        assert_eq!(parse_complex("2+1i").unwrap(), Complex64::new(2.0, 1.0));
        assert_eq!(parse_complex("2-0.5i").unwrap(), Complex64::new(2.0, -0.5));
        assert_eq!(
            parse_complex("1e-3-2e-1i").unwrap(),
            Complex64::new(1e-3, -0.2)
        );
        assert_eq!(parse_complex("1.5i").unwrap(), Complex64::new(0.0, 1.5));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn soliton_lists() {
        let c = parse_solitons("mu=-2,C=1;mu=3,C=2").unwrap();
        assert_eq!(c.real_pairs().unwrap(), vec![(-2.0, 1.0), (3.0, 2.0)]);
        assert!(parse_solitons("").unwrap().is_empty());
        assert!(parse_solitons("mu=2+1i,C=1;mu=2-1i,C=1").is_ok());
        assert!(matches!(
            parse_solitons("mu=2+1i,C=1"),
            Err(CliError::Core(Error::InvalidPole { .. }))
        ));
        assert!(matches!(parse_solitons("mu=1,C=1"), Err(CliError::Core(_))));
        assert!(matches!(parse_solitons("mu=2"), Err(CliError::Config(_))));
        assert!(matches!(
            parse_solitons("nu=2,C=1"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn grids() {
        let g = parse_grid("t=-5:5:513,z=-5:5:257").unwrap();
        assert_eq!(g.frame, Frame::Lab);
        assert_eq!(g.shape(), [513, 257]);
        assert_eq!(format_grid(&g), "t=-5:5:513,z=-5:5:257");
        let g = parse_grid("zeta=-4:4:129,eta=-2:2:65").unwrap();
        assert_eq!(g.frame, Frame::LightCone);
        assert!(parse_grid("t=-5:5:512,z=-5:5:513").is_err());
        assert!(parse_grid("z=-5:5:5,t=-5:5:5").is_err());
        assert!(parse_grid("t=-5:5,z=-5:5:5").is_err());
    }
}
