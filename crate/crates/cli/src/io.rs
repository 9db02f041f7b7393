//! Field CSV files, PGM rasters and atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chiral_core::fields::{Axis, FieldGrid, Frame, Grid, SymUnitMatrix};
use chiral_core::reduction::decompose;

use crate::error::{CliError, CliResult};

/// Writes via a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let name = path.file_name().ok_or_else(|| {
        CliError::Config(format!("output path {} has no file name", path.display()))
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    }
    fs::write(&tmp, bytes).map_err(|e| CliError::io(format!("writing {}", tmp.display()), e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(format!("renaming to {}", path.display()), e))
}

/// `out.csv` -> `out.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}

fn coordinate_names(frame: Frame) -> [&'static str; 2] {
    match frame {
        Frame::Lab => ["t", "z"],
        Frame::LightCone => ["zeta", "eta"],
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header `t,z,g11,g12,g22[,lambda,phi]` (or `zeta,eta,...` on light-cone
/// grids); rows in grid order, 17 significant digits.
pub fn field_to_csv(field: &FieldGrid, with_lambda_phi: bool) -> String {
    let grid = field.grid();
    let [a, b] = coordinate_names(grid.frame);
    let mut out = format!("{a},{b},g11,g12,g22");
    if with_lambda_phi {
        out.push_str(",lambda,phi");
    }
    out.push('\n');
    let [n0, n1] = grid.shape();
    for i in 0..n0 {
        for j in 0..n1 {
            let g = field.get(i, j);
            let _ = write!(
                out,
                "{},{},{},{},{}",
                num(grid.axes[0].value(i)),
                num(grid.axes[1].value(j)),
                num(g.g11()),
                num(g.g12()),
                num(g.g22())
            );
            if with_lambda_phi {
                let lp = decompose(&g);
                let _ = write!(out, ",{},{}", num(lp.lambda), num(lp.phi));
            }
            out.push('\n');
        }
    }
    out
}

/// Reads a file written by [`field_to_csv`]; the grid is recovered from the
/// coordinate columns and must be uniform.
pub fn read_field_csv(path: &Path) -> CliResult<FieldGrid> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_field_csv(&text).map_err(|reason| CliError::FieldFile {
        path: path.display().to_string(),
        reason,
    })
}

fn parse_field_csv(text: &str) -> Result<FieldGrid, String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty file")?.split(',').collect();
    let frame = match header.get(..2) {
        Some(["t", "z"]) => Frame::Lab,
        Some(["zeta", "eta"]) => Frame::LightCone,
        _ => {
            return Err(format!(
                "unexpected coordinate columns {:?}",
                header.get(..2)
            ))
        }
    };
    if header.get(2..5) != Some(&["g11", "g12", "g22"][..]) {
        return Err("expected g11,g12,g22 after the coordinates".into());
    }
    let mut rows: Vec<[f64; 5]> = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let vals: Vec<f64> = line
            .split(',')
            .take(5)
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| format!("line {}: cannot parse '{t}'", k + 2))
            })
            .collect::<Result<_, _>>()?;
        if vals.len() < 5 {
            return Err(format!("line {}: expected at least 5 columns", k + 2));
        }
        rows.push([vals[0], vals[1], vals[2], vals[3], vals[4]]);
    }
    let first = rows.first().ok_or("no data rows")?[0];
    let n1 = rows.iter().take_while(|r| r[0] == first).count();
    if n1 < 3 || !rows.len().is_multiple_of(n1) {
        return Err(format!(
            "{} rows do not form a grid with {n1} columns",
            rows.len()
        ));
    }
    let n0 = rows.len() / n1;
    let axis = |min: f64, max: f64, n: usize| Axis::new(min, max, n).map_err(|e| e.to_string());
    let a0 = axis(rows[0][0], rows[rows.len() - 1][0], n0)?;
    let a1 = axis(rows[0][1], rows[n1 - 1][1], n1)?;
    for (k, r) in rows.iter().enumerate() {
        let (i, j) = (k / n1, k % n1);
        let tol = 1e-12
            * (1.0
                + a0.min
                    .abs()
                    .max(a0.max.abs())
                    .max(a1.min.abs())
                    .max(a1.max.abs()));
        if (r[0] - a0.value(i)).abs() > tol || (r[1] - a1.value(j)).abs() > tol {
            return Err(format!("row {} is not on a uniform grid", k + 2));
        }
    }
    let grid = match frame {
        Frame::Lab => Grid::lab(a0, a1),
        Frame::LightCone => Grid::light_cone(a0, a1),
    };
    let values = rows
        .iter()
        .map(|r| SymUnitMatrix::from_entries(r[2], r[3], r[4]))
        .collect();
    FieldGrid::new(grid, values).map_err(|e| e.to_string())
}

/// Scalar component extracted for images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    G11,
    G12,
    G22,
    Lambda,
    Phi,
}

impl std::str::FromStr for Component {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "g11" => Component::G11,
            "g12" => Component::G12,
            "g22" => Component::G22,
            "lambda" => Component::Lambda,
            "phi" => Component::Phi,
            other => return Err(CliError::UnknownComponent(other.to_string())),
        })
    }
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::G11 => "g11",
            Component::G12 => "g12",
            Component::G22 => "g22",
            Component::Lambda => "lambda",
            Component::Phi => "phi",
        }
    }

    pub fn eval(self, g: &SymUnitMatrix) -> f64 {
        match self {
            Component::G11 => g.g11(),
            Component::G12 => g.g12(),
            Component::G22 => g.g22(),
            Component::Lambda => decompose(g).lambda,
            Component::Phi => decompose(g).phi,
        }
    }
}

/// 16-bit binary PGM; row `i` of the grid is image row `i`, top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub min: f64,
    pub max: f64,
    pub bytes: Vec<u8>,
}

impl Raster {
    pub fn is_uniform(&self) -> bool {
        self.min == self.max
    }
}

pub fn render_pgm(field: &FieldGrid, component: Component) -> Raster {
    let [height, width] = field.grid().shape();
    let vals: Vec<f64> = field.values().iter().map(|g| component.eval(g)).collect();
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut bytes = format!("P5\n{width} {height}\n65535\n").into_bytes();
    bytes.reserve(vals.len() * 2);
    for v in vals {
        let level = if max > min {
            ((v - min) / (max - min) * 65535.0)
                .round()
                .clamp(0.0, 65535.0) as u16
        } else {
            0
        };
        bytes.extend_from_slice(&level.to_be_bytes());
    }
    Raster {
        width,
        height,
        min,
        max,
        bytes,
    }
}
