use serde::Serialize;

use crate::args::{Command, HeatmapArgs};
use crate::error::{CliResult, ExitCode};
use crate::io::{read_field_csv, render_pgm, write_atomic, Component};
use crate::manifest::Manifest;

#[derive(Serialize)]
struct Sidecar<'a> {
    source: String,
    component: &'a str,
    width: usize,
    height: usize,
    /// Level 0 maps to `min`, level 65535 to `max`, linearly.
    min: f64,
    max: f64,
    /// Set when `min == max`; every pixel is then 0.
    uniform: bool,
    rows: &'a str,
}

pub fn run_heatmap(args: &HeatmapArgs) -> CliResult<ExitCode> {
    let component: Component = args.component.parse()?;
    let field = read_field_csv(&args.file)?;
    let raster = render_pgm(&field, component);
    write_atomic(&args.out, &raster.bytes)?;
    let sidecar = Sidecar {
        source: args.file.display().to_string(),
        component: component.name(),
        width: raster.width,
        height: raster.height,
        min: raster.min,
        max: raster.max,
        uniform: raster.is_uniform(),
        rows: "first grid axis, top to bottom",
    };
    let side_path = args.out.with_extension("json");
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serialises");
    text.push('\n');
    write_atomic(&side_path, text.as_bytes())?;
    Manifest::new(
        Command::Heatmap(args.clone()),
        Default::default(),
        vec![
            args.out.display().to_string(),
            side_path.display().to_string(),
        ],
    )
    .write_beside(&args.out)?;
    println!(
        "wrote {} ({}x{}, {} in [{:.6e}, {:.6e}]{})",
        args.out.display(),
        raster.width,
        raster.height,
        component.name(),
        raster.min,
        raster.max,
        if raster.is_uniform() { ", uniform" } else { "" }
    );
    Ok(ExitCode::Pass)
}
