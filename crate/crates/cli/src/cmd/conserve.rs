use chiral_core::conservation::{
    conservation_residual, integrals, riccati_residual, BarredField, ConservedHierarchy,
    FluxReport, FluxWindow,
};
use chiral_core::fields::Frame;
use chiral_core::numerics::fit_order;

use crate::args::{Command, ConserveArgs};
use crate::error::{CliError, CliResult, ExitCode};
use crate::manifest::{tolerances, Manifest};
use crate::parse::format_grid;
use crate::report::{fmt_list, Report};

use super::{exact_or_order, grid_levels, tol, Setup};

/// Offsets `|lambda - 1|` of the Riccati study.
const RICCATI_EPS: [f64; 3] = [0.2, 0.1, 0.05];

struct Level {
    h: f64,
    residuals: Vec<f64>,
    flux: FluxReport,
    det_defect: f64,
    det_defect_line: f64,
    cross_deviation: f64,
    trivial_exact: bool,
}

fn level(
    setup: &Setup,
    grid: chiral_core::fields::Grid,
    orders: usize,
) -> CliResult<(Level, BarredField, ConservedHierarchy)> {
    let field = setup.field(grid)?;
    let bf = BarredField::new(&field)?;
    let hier = ConservedHierarchy::new(&bf, orders)?;
    let residuals = (0..=orders as i32)
        .map(|n| conservation_residual(&bf, &hier, n).max_abs())
        .collect();
    let window = FluxWindow::inset(grid.axes[0].count, tol::FLUX_INSET)?;
    let flux = integrals(&bf, &hier, window)?;
    let lv = Level {
        h: grid.spacing()[0],
        residuals,
        flux,
        det_defect: bf.max_det_defect(),
        det_defect_line: bf.max_det_defect_line_scaled(),
        cross_deviation: bf.map.zeta_deviation.max(bf.map.eta_deviation),
        trivial_exact: hier.p.get(-1).iter_valid().all(|(_, _, v)| v == 1.0),
    };
    Ok((lv, bf, hier))
}

pub fn run_conserve(args: &ConserveArgs) -> CliResult<ExitCode> {
    let setup = Setup::new(&args.field)?;
    if setup.grid.frame != Frame::LightCone {
        return Err(CliError::Config(
            "conserve works in light-cone coordinates; give the grid as zeta=...,eta=...".into(),
        ));
    }
    let grids = grid_levels(setup.grid, args.levels)?;
    let mut report = Report::new("conserve");
    report.put("grids", grids.iter().map(format_grid).collect::<Vec<_>>());
    let mut levels = Vec::new();
    let mut last = None;
    for g in &grids {
        let (lv, bf, hier) = level(&setup, *g, args.orders)?;
        levels.push(lv);
        last = Some((bf, hier));
    }
    let (bf, _hier) = last.expect("at least one level");
    let hs: Vec<f64> = levels.iter().map(|l| l.h).collect();
    let multi = levels.len() >= 3;

    report.check(
        "P_-1 = 1",
        levels.iter().all(|l| l.trivial_exact),
        "exactly 1 at every node of every level",
    );
    let fin = levels.last().expect("levels");
    report.check(
        "det A_bar = det B_bar = -1",
        fin.det_defect <= tol::BARRED_DET,
        format!(
            "max defect {:.3e} with the local scale (tol {:e}); {:.3e} with the line-averaged map scale",
            fin.det_defect,
            tol::BARRED_DET,
            fin.det_defect_line
        ),
    );
    let dev: Vec<f64> = levels.iter().map(|l| l.cross_deviation).collect();
    report.put("cross_deviation", &dev);
    if multi {
        report.note(format!(
            "cross-line spread of det A / det B: {} (order {:.2})",
            fmt_list(&dev),
            fit_order(&hs, &dev)
        ));
    }

    for n in 0..=args.orders {
        let norms: Vec<f64> = levels.iter().map(|l| l.residuals[n]).collect();
        report.put(&format!("conservation_residual_{n}"), &norms);
        if multi {
            let order = fit_order(&hs, &norms);
            let (ok, what) = exact_or_order(&norms, order, tol::HIERARCHY_ORDER);
            report.check(
                format!("conservation law n = {n}"),
                ok,
                format!("{} -> {what}", fmt_list(&norms)),
            );
        }
    }
    for n in 0..=args.orders as i32 {
        let d: Vec<f64> = levels
            .iter()
            .map(|l| l.flux.order(n).map_or(f64::NAN, |o| o.max_defect))
            .collect();
        report.put(&format!("flux_defect_{n}"), &d);
        if multi {
            let order = fit_order(&hs, &d);
            let (ok, what) = exact_or_order(&d, order, tol::HIERARCHY_ORDER);
            report.check(
                format!("flux balance n = {n}"),
                ok,
                format!("{} -> {what}", fmt_list(&d)),
            );
        }
    }
    let trivial = fin.flux.order(-1).expect("trivial order");
    report.note(format!(
        "n = -1: I = zeta_bar_b - zeta_bar_a = {:.6} on every slice (spread {:.1e}); no flux",
        fin.flux.zeta_bar_span, trivial.max_defect
    ));
    for e in &fin.flux.explicit {
        report.note(format!(
            "{} vs recursion I{}: max deviation {:.3e} (recursion scale {:.3e})",
            e.label, e.order, e.max_deviation, e.max_recursion
        ));
    }
    report.put(
        "explicit_integrals",
        fin.flux
            .explicit
            .iter()
            .map(|e| (e.label.clone(), e.max_deviation, e.max_recursion))
            .collect::<Vec<_>>(),
    );

    if args.riccati_orders >= 2 {
        riccati_study(&bf, args.riccati_orders, &mut report)?;
    }

    print!("{}", report.render());
    if let Some(path) = &args.json {
        report.write_json(path)?;
        Manifest::new(
            Command::Conserve(args.clone()),
            tolerances(&[
                ("hierarchy_order", tol::HIERARCHY_ORDER),
                ("barred_det", tol::BARRED_DET),
                ("flux_inset", tol::FLUX_INSET),
            ]),
            vec![path.display().to_string()],
        )
        .write_beside(path)?;
    }
    Ok(report.exit_code())
}

/// Truncated-series Riccati defect: for each truncation order the slope of
/// log defect against log |lambda - 1| should equal that order.
fn riccati_study(bf: &BarredField, max_order: usize, report: &mut Report) -> CliResult<()> {
    let mut table = Vec::new();
    let mut literal = Vec::new();
    for n in 2..=max_order {
        let h = ConservedHierarchy::new(bf, n)?;
        let norms: Vec<f64> = RICCATI_EPS
            .iter()
            .map(|&e| riccati_residual(bf, &h, 1.0 + e).map(|r| r.max_abs()))
            .collect::<Result<_, _>>()?;
        let slope = fit_order(&RICCATI_EPS, &norms);
        let ok = (slope - n as f64).abs() <= tol::HIERARCHY_ORDER;
        report.check(
            format!("Riccati truncation n_max = {n}"),
            ok,
            format!(
                "defects {} at |lambda - 1| = {RICCATI_EPS:?} -> slope {slope:.2}",
                fmt_list(&norms)
            ),
        );
        literal.push(norms[0]);
        table.push((n, norms, slope));
    }
    let ns: Vec<f64> = (2..=max_order).map(|n| n as f64).collect();
    let lnr: Vec<f64> = literal.iter().map(|r| r.ln()).collect();
    let k = ns.len() as f64;
    let (mn, mr) = (ns.iter().sum::<f64>() / k, lnr.iter().sum::<f64>() / k);
    let slope = ns
        .iter()
        .zip(&lnr)
        .map(|(a, b)| (a - mn) * (b - mr))
        .sum::<f64>()
        / ns.iter().map(|a| (a - mn).powi(2)).sum::<f64>();
    report.note(format!(
        "Riccati at lambda = 1.2: d ln(defect) / d n_max = {slope:.2} (ln 0.2 = {:.2})",
        0.2f64.ln()
    ));
    report.put("riccati", table);
    Ok(())
}
