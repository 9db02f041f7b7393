use chiral_core::fields::{pde_residual, residual_norm, to_hyperboloid, FieldGrid};
use chiral_core::numerics::fit_order;

use crate::args::{Command, MethodArg, VerifyArgs};
use crate::error::{CliError, CliResult, ExitCode};
use crate::io::{manifest_path, read_field_csv};
use crate::manifest::{tolerances, Manifest};
use crate::parse::format_grid;
use crate::report::{fmt_list, Report};

use super::{exact_or_order, grid_levels, tol, Setup};

fn node_label(field: &FieldGrid, k: usize) -> String {
    let grid = field.grid();
    let n1 = grid.axes[1].count;
    let (i, j) = (k / n1, k % n1);
    let p = grid.point(i, j);
    format!("node ({i}, {j}) at t = {:.6}, z = {:.6}", p.t(), p.z())
}

/// Largest `|f(g)|` over the field with its position.
fn worst(
    field: &FieldGrid,
    f: impl Fn(&chiral_core::fields::SymUnitMatrix) -> f64,
) -> (f64, usize) {
    field
        .values()
        .iter()
        .map(f)
        .enumerate()
        .fold((0.0, 0), |(m, km), (k, v)| {
            if v.abs() > m || v.is_nan() {
                (v.abs(), k)
            } else {
                (m, km)
            }
        })
}

fn unit_checks(report: &mut Report, field: &FieldGrid, det_tol: f64) {
    let (d, k) = worst(field, |g| g.det() - 1.0);
    report.check(
        "det g = 1",
        d <= det_tol,
        format!(
            "max |det g - 1| = {d:.3e} (tol {det_tol:e}) at {}",
            node_label(field, k)
        ),
    );
    let (h, k) = worst(field, |g| to_hyperboloid(g).constraint_residual());
    report.check(
        "hyperboloid",
        h <= det_tol,
        format!(
            "max |T^2 - X^2 - Y^2 - 1| = {h:.3e} at {}",
            node_label(field, k)
        ),
    );
    report.put("max_det_defect", d);
}

fn verify_config(args: &VerifyArgs, report: &mut Report) -> CliResult<()> {
    let fa = args.field_args().expect("grid given");
    let setup = Setup::new(&fa)?;
    let grids = grid_levels(setup.grid, args.levels)?;
    let mut hs = Vec::new();
    let mut norms = Vec::new();
    let mut finest = None;
    for g in &grids {
        let field = setup.field(*g)?;
        hs.push(g.spacing()[0]);
        norms.push(residual_norm(&pde_residual(&field)?));
        finest = Some(field);
    }
    let field = finest.expect("at least one level");
    report.put("grids", grids.iter().map(format_grid).collect::<Vec<_>>());
    report.put("residual_norms", &norms);
    if grids.len() >= 3 {
        let order = fit_order(&hs, &norms);
        let (ok, what) = exact_or_order(&norms, order, tol::RESIDUAL_ORDER);
        report.put("residual_order", order);
        report.check(
            "pde residual",
            ok,
            format!("max norms {} -> {what}", fmt_list(&norms)),
        );
    } else {
        report.note(format!(
            "single level: residual max norm {:.3e}, no order fitted",
            norms[0]
        ));
    }
    unit_checks(report, &field, setup.det_tolerance());
    if setup.has_closed_form() {
        let other = match setup.method {
            MethodArg::Closed => MethodArg::Determinant,
            MethodArg::Determinant => MethodArg::Closed,
        };
        let alt = setup.field_with(setup.grid, other)?;
        let (rel, k) = field
            .values()
            .iter()
            .zip(alt.values())
            .map(|(a, b)| a.max_abs_diff(b) / b.max_abs().max(1.0))
            .enumerate()
            .fold(
                (0.0, 0),
                |(m, km), (k, v)| if v > m || v.is_nan() { (v, k) } else { (m, km) },
            );
        report.put("oracle_relative_error", rel);
        report.check(
            "determinant vs closed form",
            rel < tol::ORACLE,
            format!(
                "max relative difference {rel:.3e} (tol {:e}) at {}",
                tol::ORACLE,
                node_label(&field, k)
            ),
        );
    } else {
        report.note("no closed form for this configuration; oracle comparison skipped");
    }
    Ok(())
}

fn verify_file(path: &std::path::Path, report: &mut Report) -> CliResult<()> {
    let field = read_field_csv(path)?;
    report.put("grid", format_grid(field.grid()));
    let r = pde_residual(&field)?;
    let norm = residual_norm(&r);
    let at = r
        .map(|m| m.max_abs())
        .argmax_abs()
        .map(|(i, j, _)| node_label(&field, i * field.grid().axes[1].count + j))
        .unwrap_or_default();
    report.put("residual_norm", norm);
    report.note(format!("field residual max norm {norm:.3e} at {at}"));
    let mpath = manifest_path(path);
    let mut det_tol = tol::DET_DETERMINANT;
    if mpath.exists() {
        let m = Manifest::read(&mpath)?;
        let Command::Gen(gen) = m.invocation else {
            return Err(CliError::Manifest(format!(
                "{} does not describe a gen run",
                mpath.display()
            )));
        };
        let setup = Setup::new(&gen.field)?;
        det_tol = setup.det_tolerance();
        let fresh = setup.field(*field.grid())?;
        let (dev, k) = field
            .values()
            .iter()
            .zip(fresh.values())
            .map(|(a, b)| a.max_abs_diff(b) / b.max_abs().max(1.0))
            .enumerate()
            .fold(
                (0.0, 0),
                |(m, km), (k, v)| if v > m || v.is_nan() { (v, k) } else { (m, km) },
            );
        report.put("regenerated_deviation", dev);
        report.check(
            "matches regenerated field",
            dev <= tol::FILE_MATCH,
            format!(
                "max relative deviation {dev:.3e} at {}",
                node_label(&field, k)
            ),
        );
    } else {
        report.note("no manifest beside the file; regeneration check skipped");
    }
    unit_checks(report, &field, det_tol);
    Ok(())
}

pub fn run_verify(args: &VerifyArgs) -> CliResult<ExitCode> {
    let mut report = Report::new("verify");
    match &args.file {
        Some(path) => verify_file(path, &mut report)?,
        None => verify_config(args, &mut report)?,
    }
    print!("{}", report.render());
    if let Some(path) = &args.json {
        report.write_json(path)?;
        Manifest::new(
            Command::Verify(args.clone()),
            tolerances(&[
                ("residual_order", tol::RESIDUAL_ORDER),
                ("det_closed", tol::DET_CLOSED),
                ("det_determinant", tol::DET_DETERMINANT),
                ("oracle", tol::ORACLE),
                ("file_match", tol::FILE_MATCH),
            ]),
            vec![path.display().to_string()],
        )
        .write_beside(path)?;
    }
    Ok(report.exit_code())
}
