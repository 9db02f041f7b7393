use chiral_core::conservation::{compute_ab, FluxWindow};
use chiral_core::fields::{Axis, FieldGrid, Frame, Grid, SymUnitMatrix};
use chiral_core::numerics::fit_order;
use chiral_core::reduction::{
    alt_equations_residual, det_identities, phi_elimination, scalar_flux_balance, Branch, Density,
    LambdaPhiField, ReducedField,
};

use crate::args::{Command, ReduceArgs};
use crate::error::CliResult;
use crate::error::ExitCode;
use crate::manifest::{tolerances, Manifest};
use crate::parse::format_grid;
use crate::report::{fmt_list, Report};

use super::{exact_or_order, grid_levels, tol, Setup};

/// A branch loses when its residual does not shrink at least at this order.
const LOSING_ORDER: f64 = 1.0;

#[derive(Default)]
struct Series {
    hs: Vec<f64>,
    alt: [Vec<f64>; 2],
    det_cross: Vec<f64>,
    round_trip: Vec<f64>,
    branches: [Vec<f64>; 2],
    unit: Vec<f64>,
    law: [Vec<f64>; 2],
    coth: Vec<f64>,
    elimination: Vec<f64>,
    min_lambda: f64,
}

fn is_diagonal(field: &FieldGrid) -> bool {
    field.values().iter().all(|g| g.g12() == 0.0)
}

fn is_identity(field: &FieldGrid) -> bool {
    field.values().iter().all(|g| *g == SymUnitMatrix::IDENTITY)
}

/// The largest light-cone square inside a lab window, with `count` nodes per side.
fn inscribed_light_cone(grid: &Grid, count: usize) -> CliResult<Grid> {
    let [t, z] = grid.axes;
    let (tc, zc) = (0.5 * (t.min + t.max), 0.5 * (z.min + z.max));
    let half = 0.25 * (t.max - t.min).min(z.max - z.min);
    let (zeta, eta) = (0.5 * (zc + tc), 0.5 * (zc - tc));
    Ok(Grid::light_cone(
        Axis::new(zeta - half, zeta + half, count)?,
        Axis::new(eta - half, eta + half, count)?,
    ))
}

fn flux_defects(setup: &Setup, grid: Grid, density: [Density; 2]) -> CliResult<[f64; 2]> {
    let field = setup.field(grid)?;
    let r = ReducedField::new(&field)?;
    let window = FluxWindow::inset(grid.axes[0].count, tol::FLUX_INSET)?;
    Ok([
        scalar_flux_balance(&r, density[0], window)?.max_defect,
        scalar_flux_balance(&r, density[1], window)?.max_defect,
    ])
}

pub fn run_reduce(args: &ReduceArgs) -> CliResult<ExitCode> {
    let setup = Setup::new(&args.field)?;
    let grids = grid_levels(setup.grid, args.levels)?;
    let mut report = Report::new("reduce");
    report.put("grids", grids.iter().map(format_grid).collect::<Vec<_>>());
    let multi = grids.len() >= 3;
    let mut s = Series {
        min_lambda: f64::INFINITY,
        ..Default::default()
    };
    let mut scalar = true;
    for g in &grids {
        let field = setup.field(*g)?;
        let lp = LambdaPhiField::new(&field);
        s.hs.push(g.spacing()[0]);
        let (r1, r2) = alt_equations_residual(&lp);
        s.alt[0].push(r1.max_abs());
        s.alt[1].push(r2.max_abs());
        let ab = compute_ab(&field)?;
        let (da, db) = det_identities(&lp);
        let cross = da
            .zip(&ab.det_a(), |x, y| x - y)
            .max_abs()
            .max(db.zip(&ab.det_b(), |x, y| x - y).max_abs());
        s.det_cross.push(cross);
        s.round_trip.push(lp.compose_max_error(&field));
        s.min_lambda = s.min_lambda.min(lp.lambda.min_valid());

        if is_diagonal(&field) && !is_identity(&field) {
            scalar = false;
            continue;
        }
        let r = ReducedField::new(&field)?;
        let [p, m] = r.branch_norms()?;
        s.branches[0].push(p);
        s.branches[1].push(m);
        let (u1, u2) = r.unit_constraints();
        s.unit.push(u1.max_abs().max(u2.max_abs()));
        for (k, b) in [Branch::Plus, Branch::Minus].into_iter().enumerate() {
            s.law[k].push(r.conservation_residual(Density::SinhPower(b))?.max_abs());
        }
        s.coth
            .push(r.conservation_residual(Density::Coth)?.max_abs());
        let (ez, ee) = phi_elimination(&r)?;
        let dz = ez.zip(&r.phi_zeta, |a, b| a - b.abs()).max_abs();
        let de = ee.zip(&r.phi_eta, |a, b| a - b.abs()).max_abs();
        s.elimination.push(dz.max(de));
    }

    let converge = |report: &mut Report, name: &str, norms: &[f64]| {
        report.put(name, norms);
        if multi {
            let order = fit_order(&s.hs, norms);
            let (ok, what) = exact_or_order(norms, order, tol::HIERARCHY_ORDER);
            report.check(
                name.replace('_', " "),
                ok,
                format!("{} -> {what}", fmt_list(norms)),
            );
        }
    };
    converge(&mut report, "alt_equation_1", &s.alt[0]);
    converge(&mut report, "alt_equation_2", &s.alt[1]);
    converge(&mut report, "det_identities_vs_A_B", &s.det_cross);
    let rt = s.round_trip.iter().cloned().fold(0.0, f64::max);
    report.check(
        "compose(decompose(g)) = g",
        rt <= tol::ROUND_TRIP,
        format!("max entry error {rt:.3e} (tol {:e})", tol::ROUND_TRIP),
    );
    report.note(format!("min Lambda over the window: {:.6e}", s.min_lambda));
    report.put("min_lambda", s.min_lambda);

    if !scalar {
        report.note("field is diagonal (phi undefined, Lambda = |L|); scalar reduction skipped");
    } else {
        scalar_checks(&setup, &grids, &s, multi, &mut report)?;
    }

    print!("{}", report.render());
    if let Some(path) = &args.json {
        report.write_json(path)?;
        Manifest::new(
            Command::Reduce(args.clone()),
            tolerances(&[
                ("order", tol::HIERARCHY_ORDER),
                ("round_trip", tol::ROUND_TRIP),
                ("losing_branch_order", LOSING_ORDER),
            ]),
            vec![path.display().to_string()],
        )
        .write_beside(path)?;
    }
    Ok(report.exit_code())
}

fn scalar_checks(
    setup: &Setup,
    grids: &[Grid],
    s: &Series,
    multi: bool,
    report: &mut Report,
) -> CliResult<()> {
    let fin = s.branches[0].len() - 1;
    let winner = if s.branches[0][fin] <= s.branches[1][fin] {
        0
    } else {
        1
    };
    let branch = [Branch::Plus, Branch::Minus][winner];
    for (k, b) in [Branch::Plus, Branch::Minus].into_iter().enumerate() {
        report.put(
            &format!("scalar_residual_{}", if k == 0 { "plus" } else { "minus" }),
            &s.branches[k],
        );
        report.note(format!(
            "scalar equation, branch {}: {}",
            b.label(),
            fmt_list(&s.branches[k])
        ));
    }
    if multi {
        let orders = [
            fit_order(&s.hs, &s.branches[0]),
            fit_order(&s.hs, &s.branches[1]),
        ];
        let (win_ok, _) = exact_or_order(&s.branches[winner], orders[winner], tol::HIERARCHY_ORDER);
        let lose_ok = !(orders[1 - winner] >= LOSING_ORDER);
        report.check(
            "exactly one branch satisfies the scalar equation",
            win_ok && lose_ok,
            format!(
                "branch {} order {:.2}, branch {} order {:.2}",
                Branch::Plus.label(),
                orders[0],
                Branch::Minus.label(),
                orders[1]
            ),
        );
    }
    report.put("branch", branch.label());

    let unit_name = "unit constraints";
    report.put("unit_constraints", &s.unit);
    if multi {
        let order = fit_order(&s.hs, &s.unit);
        let (ok, what) = exact_or_order(&s.unit, order, tol::HIERARCHY_ORDER);
        report.check(unit_name, ok, format!("{} -> {what}", fmt_list(&s.unit)));
    }
    let law = &s.law[winner];
    report.put("scalar_conservation", law);
    if multi {
        let order = fit_order(&s.hs, law);
        let (ok, what) = exact_or_order(law, order, tol::HIERARCHY_ORDER);
        report.check(
            format!(
                "scalar conservation law ({} density)",
                Density::SinhPower(branch).label()
            ),
            ok,
            format!("{} -> {what}", fmt_list(law)),
        );
    }
    report.note(format!("coth density (diagnostic): {}", fmt_list(&s.coth)));
    report.put("coth_conservation", &s.coth);
    report.put("phi_elimination", &s.elimination);
    if multi {
        let order = fit_order(&s.hs, &s.elimination);
        let (ok, what) = exact_or_order(&s.elimination, order, tol::HIERARCHY_ORDER);
        report.check(
            "|phi| from the constraints matches phi",
            ok,
            format!("{} -> {what}", fmt_list(&s.elimination)),
        );
    }

    let flux_grids: Vec<Grid> = match setup.grid.frame {
        Frame::LightCone => grids.to_vec(),
        Frame::Lab => grids
            .iter()
            .map(|g| inscribed_light_cone(g, g.axes[0].count))
            .collect::<CliResult<_>>()?,
    };
    if setup.grid.frame == Frame::Lab {
        report.note(format!(
            "first-integral flux evaluated on the inscribed light-cone window {}",
            format_grid(flux_grids.last().expect("levels"))
        ));
    }
    let mut defects = Vec::new();
    let mut hs = Vec::new();
    for g in &flux_grids {
        let d = flux_defects(setup, *g, [Density::SinhPower(branch), Density::Coth])?;
        defects.push(d);
        hs.push(g.spacing()[0]);
    }
    let main: Vec<f64> = defects.iter().map(|d| d[0]).collect();
    let coth: Vec<f64> = defects.iter().map(|d| d[1]).collect();
    report.put("first_integral_flux", &main);
    report.note(format!(
        "first-integral flux with the coth density (diagnostic): {}",
        fmt_list(&coth)
    ));
    if multi {
        let order = fit_order(&hs, &main);
        let (ok, what) = exact_or_order(&main, order, tol::HIERARCHY_ORDER);
        report.check(
            "first-integral flux balance",
            ok,
            format!("{} -> {what}", fmt_list(&main)),
        );
    }
    Ok(())
}
