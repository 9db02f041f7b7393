use crate::args::{Command, GenArgs};
use crate::error::{CliResult, ExitCode};
use crate::io::{field_to_csv, write_atomic};
use crate::manifest::{tolerances, Manifest};
use crate::parse::format_grid;

use super::Setup;

pub fn run_gen(args: &GenArgs) -> CliResult<ExitCode> {
    let setup = Setup::new(&args.field)?;
    let field = setup.field(setup.grid)?;
    let csv = field_to_csv(&field, args.lambda_phi);
    write_atomic(&args.out, csv.as_bytes())?;
    let worst_det = field
        .values()
        .iter()
        .map(|g| (g.det() - 1.0).abs())
        .fold(0.0, f64::max);
    let manifest = Manifest::new(
        Command::Gen(args.clone()),
        tolerances(&[("det", setup.det_tolerance())]),
        vec![args.out.display().to_string()],
    );
    manifest.write_beside(&args.out)?;
    println!(
        "wrote {} ({} rows, grid {}, {} soliton(s)); max |det g - 1| = {worst_det:.3e}",
        args.out.display(),
        field.values().len(),
        format_grid(field.grid()),
        setup.config.len()
    );
    if worst_det > setup.det_tolerance() {
        println!("FAIL det g = 1 within {:e}", setup.det_tolerance());
        return Ok(ExitCode::Failed);
    }
    Ok(ExitCode::Pass)
}
