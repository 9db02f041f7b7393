//! Acceptance criteria 1-10, one PASS/FAIL line each.
//!
//! Run with `cargo test -p chiral-cli --test acceptance`; the lines are
//! written straight to stdout so they show up without `--nocapture`.

use std::io::Write;
use std::path::Path;
use std::process::Command;

use chiral_core::background::{Background, BackgroundKind};
use chiral_core::conservation::{
    conservation_residual, integrals, riccati_residual, BarredField, ConservedHierarchy, FluxWindow,
};
use chiral_core::fields::{
    pde_residual, residual_norm, to_hyperboloid, Axis, FieldGrid, Grid, LightconePoint,
};
use chiral_core::numerics::fit_order;
use chiral_core::reduction::{alt_equations_residual, LambdaPhiField, ReducedField};
use chiral_core::solitons::{
    analyze_interaction, crest_track, kinematics, n_soliton, one_soliton, two_soliton,
    SolitonConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEVELS: [usize; 3] = [129, 257, 513];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn within_order(order: f64, tol: f64) -> bool {
    (order - 2.0).abs() <= tol
}

fn field(cfg: &SolitonConfig, bg: &Background, grid: Grid) -> FieldGrid {
    FieldGrid::generate(grid, |p| n_soliton(cfg, bg, p)).expect("field generation")
}

/// A random pole away from 0, +-1 and the pairs already drawn.
fn random_pole(rng: &mut ChaCha8Rng, taken: &[f64]) -> f64 {
    loop {
        let m = if rng.gen_bool(0.5) {
            rng.gen_range(1.5..3.5)
        } else {
            rng.gen_range(0.3..0.7)
        } * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        if taken
            .iter()
            .all(|&t| (t - m).abs() > 0.3 && (t * m - 1.0).abs() > 0.3)
        {
            return m;
        }
    }
}

fn pde_order() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut configs = vec![
        vec![(-2.0, 1.0)],
        vec![(-2.0, 1.0), (3.0, 1.0)],
        vec![(-2.0, 1.0), (3.0, 1.0), (0.5, 2.0)],
    ];
    for n in 1..=3 {
        let mut poles: Vec<f64> = Vec::new();
        for _ in 0..n {
            let m = random_pole(&mut rng, &poles);
            poles.push(m);
        }
        configs.push(
            poles
                .iter()
                .map(|&m| (m, rng.gen_range(0.5..2.0)))
                .collect(),
        );
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for pairs in &configs {
        let cfg = SolitonConfig::real(pairs).expect("valid poles");
        let mut hs = Vec::new();
        let mut norms = Vec::new();
        for n in LEVELS {
            let grid = Grid::lab_square(-5.0, 5.0, n).unwrap();
            let f = field(&cfg, &Background::TimeLike, grid);
            hs.push(grid.spacing()[0]);
            norms.push(residual_norm(&pde_residual(&f).unwrap()));
        }
        let order = fit_order(&hs, &norms);
        ok &= within_order(order, 0.2);
        parts.push(format!("N={} {order:.2}", pairs.len()));
    }
    outcome(
        ok,
        format!("orders {} (target 2.0 +- 0.2)", parts.join(", ")),
    )
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let bg = if k % 2 == 0 {
            Background::TimeLike
        } else {
            Background::SpaceLike
        };
        let p = LightconePoint::from_lab(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let m1 = random_pole(&mut rng, &[]);
        let m2 = random_pole(&mut rng, &[m1]);
        let (c1, c2) = (rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0));
        let one = SolitonConfig::real(&[(m1, c1)]).unwrap();
        let two = SolitonConfig::real(&[(m1, c1), (m2, c2)]).unwrap();
        for (cfg, closed) in [
            (&one, one_soliton(&one, &bg, p)),
            (&two, two_soliton(&two, &bg, p)),
        ] {
            let g = n_soliton(cfg, &bg, p).unwrap();
            let c = closed.unwrap();
            worst = worst.max(g.max_abs_diff(&c) / g.max_abs());
        }
    }
    outcome(
        worst < 1e-9,
        format!("max relative error {worst:.2e} over 1000 points x N=1,2 (tol 1e-9)"),
    )
}

fn unit_determinant() -> Outcome {
    let cfgs = [
        SolitonConfig::real(&[(-2.0, 1.0)]).unwrap(),
        SolitonConfig::real(&[(-2.0, 1.0), (3.0, 1.0)]).unwrap(),
    ];
    let grid = Grid::lab_square(-5.0, 5.0, 129).unwrap();
    let (mut closed, mut det, mut hyper): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for bg in [Background::TimeLike, Background::SpaceLike] {
        for c in &cfgs {
            for i in 0..grid.axes[0].count {
                for j in 0..grid.axes[1].count {
                    let p = grid.point(i, j);
                    let g = match c.len() {
                        1 => one_soliton(c, &bg, p),
                        _ => two_soliton(c, &bg, p),
                    }
                    .unwrap();
                    closed = closed.max((g.det() - 1.0).abs());
                    hyper = hyper.max(to_hyperboloid(&g).constraint_residual().abs());
                    let g = n_soliton(c, &bg, p).unwrap();
                    det = det.max((g.det() - 1.0).abs());
                }
            }
        }
    }
    outcome(
        closed < 1e-12 && det < 1e-9 && hyper < 1e-12,
        format!("closed {closed:.2e} (tol 1e-12), determinant {det:.2e} (tol 1e-9), hyperboloid {hyper:.2e} (tol 1e-12)"),
    )
}

fn single_crest(bg: Background) -> (f64, f64) {
    let cfg = SolitonConfig::real(&[(-2.0, 1.0)]).unwrap();
    let f = field(&cfg, &bg, Grid::lab_square(-5.0, 5.0, 257).unwrap());
    let inter = analyze_interaction(&crest_track(&f).unwrap(), 4.0, 0.05);
    let p = &inter.passages[0];
    (p.velocity, p.amplitude.abs())
}

fn crest_kinematics() -> Outcome {
    let (vt, at) = single_crest(Background::TimeLike);
    let (vs, as_) = single_crest(Background::SpaceLike);
    let kt = kinematics(-2.0, BackgroundKind::TimeLike, 0.0).unwrap();
    let ks = kinematics(-2.0, BackgroundKind::SpaceLike, 0.0).unwrap();
    let ok = ((vt + 1.25) / 1.25).abs() <= 0.01
        && ((vs + 0.8) / 0.8).abs() <= 0.01
        && ((at - 0.75) / 0.75).abs() <= 0.005
        && ((as_ - 0.75) / 0.75).abs() <= 0.005
        && kt.v * ks.v == 1.0;
    outcome(
        ok,
        format!(
            "v_time {vt:.5}, v_space {vs:.5}, |g12| crest {at:.5} / {as_:.5}, v_time v_space = {}",
            kt.v * ks.v
        ),
    )
}

fn interaction() -> Outcome {
    let cfg = SolitonConfig::real(&[(-2.0, 1.0), (3.0, 1.0)]).unwrap();
    let kin: Vec<f64> = [-2.0, 3.0]
        .iter()
        .map(|&m| kinematics(m, BackgroundKind::TimeLike, 0.0).unwrap().v)
        .collect();
    let mut shifts = vec![Vec::new(); 2];
    let mut vel_ok = true;
    let mut vels = [0.0; 2];
    for n in LEVELS {
        let f = field(
            &cfg,
            &Background::TimeLike,
            Grid::lab_square(-10.0, 10.0, n).unwrap(),
        );
        let inter = analyze_interaction(&crest_track(&f).unwrap(), 4.0, 0.05);
        for (s, &v) in kin.iter().enumerate() {
            let Some(p) = inter.closest(v) else {
                return outcome(false, format!("soliton {s} not tracked on {n}^2"));
            };
            vel_ok &= ((p.velocity - v) / v).abs() <= 0.02;
            vels[s] = p.velocity;
            shifts[s].push(p.phase_shift.unwrap_or(f64::NAN));
        }
    }
    let mut ok = vel_ok;
    let mut spread = Vec::new();
    for s in &shifts {
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let rel = (s.iter().cloned().fold(f64::MIN, f64::max)
            - s.iter().cloned().fold(f64::MAX, f64::min))
            / mean.abs();
        ok &= mean.abs() > 1e-3 && rel <= 0.05;
        spread.push(rel);
    }
    outcome(
        ok,
        format!(
            "velocities {:.4} / {:.4} (expected {:.4} / {:.4}), phase shifts {:.4?} / {:.4?}, spreads {:.1e} / {:.1e}",
            vels[0], vels[1], kin[0], kin[1], shifts[0], shifts[1], spread[0], spread[1]
        ),
    )
}

fn conservation_grid(n: usize) -> Grid {
    Grid::light_cone(
        Axis::new(-4.0, 4.0, n).unwrap(),
        Axis::new(-2.0, 2.0, n).unwrap(),
    )
}

fn conservation_field(n: usize) -> FieldGrid {
    let cfg = SolitonConfig::real(&[(3.0, 2.0)]).unwrap();
    field(&cfg, &Background::TimeLike, conservation_grid(n))
}

fn hierarchy() -> Outcome {
    let mut hs = Vec::new();
    let mut res = vec![Vec::new(); 4];
    let mut flux = vec![Vec::new(); 2];
    let mut trivial = true;
    let mut det: f64 = 0.0;
    for n in LEVELS {
        let f = conservation_field(n);
        let bf = BarredField::new(&f).unwrap();
        let h = ConservedHierarchy::new(&bf, 3).unwrap();
        hs.push(bf.spacing()[0]);
        for (k, r) in res.iter_mut().enumerate() {
            r.push(conservation_residual(&bf, &h, k as i32).max_abs());
        }
        let rep = integrals(&bf, &h, FluxWindow::inset(n, 0.125).unwrap()).unwrap();
        for (k, fl) in flux.iter_mut().enumerate() {
            fl.push(rep.order(k as i32).unwrap().max_defect);
        }
        trivial &= h.p.get(-1).iter_valid().all(|(_, _, v)| v == 1.0);
        det = bf.max_det_defect();
    }
    let ro: Vec<f64> = res.iter().map(|r| fit_order(&hs, r)).collect();
    let fo: Vec<f64> = flux.iter().map(|r| fit_order(&hs, r)).collect();
    let ok = ro.iter().chain(&fo).all(|&o| within_order(o, 0.3)) && trivial && det < 1e-6;
    outcome(
        ok,
        format!(
            "residual orders n=0..3 {ro:.2?}, flux orders n=0,1 {fo:.2?}, P_-1 = 1 {trivial}, det A_bar defect {det:.1e}"
        ),
    )
}

fn riccati() -> Outcome {
    let f = conservation_field(257);
    let bf = BarredField::new(&f).unwrap();
    let eps = [0.2, 0.1, 0.05];
    let mut slopes = Vec::new();
    let mut at_12 = Vec::new();
    for n in 2..=6 {
        let h = ConservedHierarchy::new(&bf, n).unwrap();
        let norms: Vec<f64> = eps
            .iter()
            .map(|&e| riccati_residual(&bf, &h, 1.0 + e).unwrap().max_abs())
            .collect();
        at_12.push(norms[0]);
        slopes.push(fit_order(&eps, &norms));
    }
    let ok = slopes
        .iter()
        .zip(2..=6)
        .all(|(s, n)| (s - n as f64).abs() <= 0.3);
    let ns: Vec<f64> = (2..=6).map(f64::from).collect();
    let ln: Vec<f64> = at_12.iter().map(|r| r.ln()).collect();
    let (mn, ml) = (4.0, ln.iter().sum::<f64>() / 5.0);
    let literal = ns
        .iter()
        .zip(&ln)
        .map(|(a, b)| (a - mn) * (b - ml))
        .sum::<f64>()
        / 10.0;
    outcome(
        ok,
        format!(
            "slopes in log|lambda - 1| for n_max = 2..6: {slopes:.2?}; at lambda = 1.2, d ln r / d n_max = {literal:.2}"
        ),
    )
}

fn reduction() -> Outcome {
    let cfg = SolitonConfig::real(&[(-2.0, 1.0)]).unwrap();
    let mut hs = Vec::new();
    let mut q = vec![Vec::new(); 5];
    let mut rt: f64 = 0.0;
    let mut min_l = f64::INFINITY;
    for n in LEVELS {
        let grid = Grid::lab(
            Axis::new(-0.3, 0.3, n).unwrap(),
            Axis::new(-1.0, 1.0, n).unwrap(),
        );
        let f = field(&cfg, &Background::TimeLike, grid);
        let lp = LambdaPhiField::new(&f);
        rt = rt.max(lp.compose_max_error(&f));
        min_l = min_l.min(lp.lambda.min_valid());
        let (r1, r2) = alt_equations_residual(&lp);
        let r = ReducedField::new(&f).unwrap();
        let (u1, u2) = r.unit_constraints();
        let branch = r.winning_branch().unwrap();
        hs.push(grid.spacing()[0]);
        q[0].push(r1.max_abs());
        q[1].push(r2.max_abs());
        q[2].push(u1.max_abs());
        q[3].push(u2.max_abs());
        q[4].push(r.scalar_residual(branch).unwrap().max_abs());
    }
    let orders: Vec<f64> = q.iter().map(|v| fit_order(&hs, v)).collect();
    let ok = min_l > 1e-3 && orders.iter().all(|&o| within_order(o, 0.3)) && rt < 1e-12;
    outcome(
        ok,
        format!("min Lambda {min_l:.3}; orders alt1, alt2, unit_zeta, unit_eta, scalar {orders:.2?}; round trip {rt:.1e}"),
    )
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chiral"))
}

fn degeneracy() -> Outcome {
    let out = bin()
        .args([
            "conserve",
            "--grid",
            "zeta=0:1:65,eta=0:1:65",
            "--levels",
            "1",
        ])
        .output()
        .expect("run binary");
    let code = out.status.code();
    let err = String::from_utf8_lossy(&out.stderr);
    outcome(
        code == Some(3) && err.contains("degenerate"),
        format!(
            "diagonal background: exit {code:?}, stderr '{}'",
            err.trim()
        ),
    )
}

fn run_ok(args: &[&str]) -> bool {
    bin().args(args).output().is_ok_and(|o| o.status.success())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).display().to_string();
    let ok = run_ok(&[
        "gen",
        "--solitons",
        "mu=-2,C=1;mu=3,C=1",
        "--grid",
        "t=-5:5:129,z=-5:5:129",
        "--lambda-phi",
        "-o",
        &p("f.csv"),
    ]) && run_ok(&["heatmap", "--file", &p("f.csv"), "-o", &p("h.pgm")])
        && run_ok(&["replay", &p("f.manifest.json"), "-o", &p("f2.csv")])
        && run_ok(&["replay", &p("h.manifest.json"), "-o", &p("h2.pgm")]);
    if !ok {
        return outcome(false, "a command failed");
    }
    let same = |a: &str, b: &str| {
        std::fs::read(Path::new(&p(a))).unwrap() == std::fs::read(Path::new(&p(b))).unwrap()
    };
    let (csv, pgm) = (same("f.csv", "f2.csv"), same("h.pgm", "h2.pgm"));
    outcome(
        csv && pgm,
        format!("CSV identical {csv}, PGM identical {pgm}"),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("pde residual convergence", pde_order),
        ("oracle equivalence", oracle),
        ("unit determinant", unit_determinant),
        ("kinematics", crest_kinematics),
        ("two-soliton interaction", interaction),
        ("conservation hierarchy", hierarchy),
        ("riccati consistency", riccati),
        ("reduction equivalence", reduction),
        ("degeneracy handling", degeneracy),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        emit(&format!("{tag} criterion {} ({name}): {}", k + 1, o.detail));
        if !o.passed {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
