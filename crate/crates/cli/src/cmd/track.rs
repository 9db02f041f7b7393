use chiral_core::background::BackgroundKind;
use chiral_core::solitons::{
    analyze_interaction, crest_track, kinematics, Interaction, Kinematics,
};

use crate::args::{Command, TrackArgs};
use crate::error::{CliError, CliResult, ExitCode};
use crate::manifest::{tolerances, Manifest};
use crate::parse::format_grid;
use crate::report::Report;

use super::{grid_levels, tol, Setup};

/// Single-soliton crest value tolerance (relative).
const AMPLITUDE: f64 = 0.005;

fn expected(setup: &Setup) -> CliResult<Vec<Option<Kinematics>>> {
    let kind = setup.background.kind();
    let pairs = setup
        .config
        .real_pairs()
        .ok_or_else(|| CliError::Config("crest tracking needs real poles and constants".into()))?;
    Ok(pairs
        .iter()
        .map(|&(mu, c)| match kind {
            BackgroundKind::Custom => None,
            _ => kinematics(mu, kind, c.abs().ln()).ok(),
        })
        .collect())
}

pub fn run_track(args: &TrackArgs) -> CliResult<ExitCode> {
    let setup = Setup::new(&args.field)?;
    let grids = grid_levels(setup.grid, args.levels)?;
    let kin = expected(&setup)?;
    let mut report = Report::new("track");
    report.put("grids", grids.iter().map(format_grid).collect::<Vec<_>>());
    let mut runs: Vec<Interaction> = Vec::new();
    for g in &grids {
        let field = setup.field(*g)?;
        let crests = crest_track(&field)?;
        runs.push(analyze_interaction(
            &crests,
            args.separation,
            args.velocity_tol,
        ));
    }
    let fin = runs.last().expect("levels");
    report.note(format!(
        "{} soliton(s) resolved on {}",
        fin.passages.len(),
        format_grid(&grids[grids.len() - 1])
    ));
    let n = setup.config.len();
    let mut rows = Vec::new();
    for (s, k) in kin.iter().enumerate() {
        let Some(k) = k else {
            report.note(format!("soliton {s}: no kinematics for this background"));
            continue;
        };
        let label = format!("soliton {s} (v = {:.6})", k.v);
        let Some(p) = fin.closest(k.v) else {
            report.check(label, false, "no track found");
            continue;
        };
        let rel = ((p.velocity - k.v) / k.v).abs();
        report.check(
            format!("{label} velocity"),
            rel <= tol::VELOCITY,
            format!(
                "measured {:.6}, relative error {rel:.2e} (tol {})",
                p.velocity,
                tol::VELOCITY
            ),
        );
        let amp_rel = ((p.amplitude.abs() - k.amplitude.abs()) / k.amplitude).abs();
        if n == 1 {
            report.check(
                format!("{label} amplitude"),
                amp_rel <= AMPLITUDE,
                format!(
                    "|g12| at the crest {:.6}, expected {:.6} (tol {AMPLITUDE})",
                    p.amplitude.abs(),
                    k.amplitude.abs()
                ),
            );
        } else {
            report.note(format!(
                "{label}: asymptotic |g12| crest {:.6} (single-soliton value {:.6})",
                p.amplitude.abs(),
                k.amplitude.abs()
            ));
        }
        let shifts: Vec<Option<f64>> = runs
            .iter()
            .map(|r| r.closest(k.v).and_then(|q| q.phase_shift))
            .collect();
        if n >= 2 {
            match shifts.iter().copied().collect::<Option<Vec<f64>>>() {
                Some(v) if v.len() >= 2 => {
                    let mean = v.iter().sum::<f64>() / v.len() as f64;
                    let spread = v.iter().cloned().fold(f64::MIN, f64::max)
                        - v.iter().cloned().fold(f64::MAX, f64::min);
                    let rel = spread / mean.abs();
                    report.check(
                        format!("{label} phase shift stable under refinement"),
                        rel <= tol::PHASE_STABILITY,
                        format!(
                            "shifts {v:.4?}, relative spread {rel:.2e} (tol {})",
                            tol::PHASE_STABILITY
                        ),
                    );
                }
                Some(v) if v.len() == 1 => report.note(format!("{label}: phase shift {:.6}", v[0])),
                _ => report.check(
                    format!("{label} phase shift"),
                    false,
                    "incoming or outgoing segment missing on some level",
                ),
            }
        }
        rows.push(serde_json::json!({
            "soliton": s,
            "expected_velocity": k.v,
            "velocity": p.velocity,
            "amplitude": p.amplitude,
            "expected_amplitude": k.amplitude,
            "phase_shifts": shifts,
            "fragments": p.fragments,
        }));
    }
    report.put("solitons", rows);

    print!("{}", report.render());
    if let Some(path) = &args.json {
        report.write_json(path)?;
        Manifest::new(
            Command::Track(args.clone()),
            tolerances(&[
                ("velocity", tol::VELOCITY),
                ("amplitude", AMPLITUDE),
                ("phase_stability", tol::PHASE_STABILITY),
                ("separation", args.separation),
                ("velocity_grouping", args.velocity_tol),
            ]),
            vec![path.display().to_string()],
        )
        .write_beside(path)?;
    }
    Ok(report.exit_code())
}
