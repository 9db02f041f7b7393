use crate::error::{Error, Result};
use crate::fields::{FieldGrid, Frame};

/// Refined local extremum of `|g12|` in one time slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrestPoint {
    pub t: f64,
    pub z: f64,
    /// Signed off-diagonal value at the refined crest.
    pub value: f64,
}

/// Crests linked across consecutive slices, with a least-squares line `z = v t + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrestTrack {
    pub points: Vec<CrestPoint>,
    pub velocity: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrestReport {
    /// All crests per time slice, ordered by `z`.
    pub slices: Vec<Vec<CrestPoint>>,
    pub tracks: Vec<CrestTrack>,
}

/// Crests below this fraction of the global peak are ignored.
const FLOOR: f64 = 1e-3;
const MIN_TRACK: usize = 3;
const MIN_FRAGMENT: usize = 5;

fn line_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mz = points.iter().map(|p| p.1).sum::<f64>() / n;
    let stz: f64 = points.iter().map(|p| (p.0 - mt) * (p.1 - mz)).sum();
    let stt: f64 = points.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let v = if stt > 0.0 { stz / stt } else { 0.0 };
    (v, mz - v * mt)
}

fn slice_crests(field: &FieldGrid, i: usize, floor: f64) -> Vec<CrestPoint> {
    let grid = field.grid();
    let t = grid.axes[0].value(i);
    let hz = grid.axes[1].spacing();
    let n = grid.axes[1].count;
    let a: Vec<f64> = (0..n).map(|j| field.get(i, j).g12().abs()).collect();
    let mut out = Vec::new();
    for j in 1..n - 1 {
        if a[j] > a[j - 1] && a[j] >= a[j + 1] && a[j] > floor {
            let (ym, y0, yp) = (a[j - 1], a[j], a[j + 1]);
            let curv = ym - 2.0 * y0 + yp;
            let delta = if curv < 0.0 {
                0.5 * (ym - yp) / curv
            } else {
                0.0
            };
            let peak = y0 - 0.25 * (ym - yp) * delta;
            let sign = field.get(i, j).g12().signum();
            out.push(CrestPoint {
                t,
                z: grid.axes[1].value(j) + delta * hz,
                value: sign * peak,
            });
        }
    }
    out
}

/// Detects crests of `|g12|` slice by slice and links them into tracks.
///
/// Slices without a crest are allowed (a crest may sit outside the window);
/// `NoCrest` is returned only when no slice has one.
pub fn crest_track(field: &FieldGrid) -> Result<CrestReport> {
    let grid = field.grid();
    if grid.frame != Frame::Lab {
        return Err(Error::FrameMismatch {
            expected: Frame::Lab.name(),
            got: grid.frame.name(),
        });
    }
    let peak = field
        .values()
        .iter()
        .fold(0.0f64, |m, g| m.max(g.g12().abs()));
    let floor = FLOOR * peak;
    let slices: Vec<Vec<CrestPoint>> = (0..grid.axes[0].count)
        .map(|i| slice_crests(field, i, floor))
        .collect();
    if slices.iter().all(Vec::is_empty) {
        return Err(Error::NoCrest);
    }
    let hz = grid.axes[1].spacing();
    let ht = grid.axes[0].spacing();

    struct Active {
        points: Vec<CrestPoint>,
    }
    impl Active {
        fn predict(&self, t: f64) -> f64 {
            let n = self.points.len();
            let last = self.points[n - 1];
            if n >= 2 {
                let prev = self.points[n - 2];
                last.z + (last.z - prev.z) / (last.t - prev.t) * (t - last.t)
            } else {
                last.z
            }
        }
    }

    let mut finished: Vec<Vec<CrestPoint>> = Vec::new();
    let mut active: Vec<Active> = Vec::new();
    for crests in &slices {
        let Some(t) = crests.first().map(|c| c.t) else {
            finished.extend(active.drain(..).map(|a| a.points));
            continue;
        };
        let mut claimed = vec![false; crests.len()];
        let mut next: Vec<Active> = Vec::new();
        // closest pairs first, then greedily
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (a, tr) in active.iter().enumerate() {
            let z_pred = tr.predict(t);
            let step = tr.points.len().checked_sub(2).map_or(0.0, |k| {
                let (p, q) = (tr.points[k], tr.points[k + 1]);
                (q.z - p.z).abs() / (q.t - p.t) * ht
            });
            let gate = 5.0 * hz + 2.0 * step;
            for (c, cr) in crests.iter().enumerate() {
                let d = (cr.z - z_pred).abs();
                if d <= gate {
                    pairs.push((d, a, c));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut taken = vec![false; active.len()];
        for (_, a, c) in pairs {
            if !taken[a] && !claimed[c] {
                taken[a] = true;
                claimed[c] = true;
                active[a].points.push(crests[c]);
            }
        }
        for (a, tr) in active.into_iter().enumerate() {
            if taken[a] {
                next.push(tr);
            } else {
                finished.push(tr.points);
            }
        }
        for (c, cr) in crests.iter().enumerate() {
            if !claimed[c] {
                next.push(Active { points: vec![*cr] });
            }
        }
        active = next;
    }
    finished.extend(active.into_iter().map(|a| a.points));
    let mut tracks: Vec<CrestTrack> = finished
        .into_iter()
        .filter(|p| p.len() >= MIN_TRACK)
        .map(|points| {
            let (velocity, intercept) =
                line_fit(&points.iter().map(|p| (p.t, p.z)).collect::<Vec<_>>());
            CrestTrack {
                points,
                velocity,
                intercept,
            }
        })
        .collect();
    tracks.sort_by(|a, b| {
        a.points[0]
            .t
            .total_cmp(&b.points[0].t)
            .then(a.points[0].z.total_cmp(&b.points[0].z))
    });
    Ok(CrestReport { slices, tracks })
}

/// One soliton followed through an interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonPassage {
    /// Asymptotic fragments assigned to this soliton, ordered in time.
    pub fragments: usize,
    /// Common least-squares slope over the asymptotic crests.
    pub velocity: f64,
    /// Mean crest value over the asymptotic crests.
    pub amplitude: f64,
    pub incoming_offset: f64,
    pub outgoing_offset: Option<f64>,
    /// `outgoing_offset - incoming_offset` when both segments were seen.
    pub phase_shift: Option<f64>,
    pub asymptotic_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub passages: Vec<SolitonPassage>,
}

impl Interaction {
    /// Passage whose velocity is closest to `v`.
    pub fn closest(&self, v: f64) -> Option<&SolitonPassage> {
        self.passages
            .iter()
            .min_by(|a, b| (a.velocity - v).abs().total_cmp(&(b.velocity - v).abs()))
    }
}

/// Time slices inside a collision: a slice holding two crests closer than
/// `separation`, or a slice between two such slices that holds fewer crests
/// than both (crests merged).
fn collision_slices(report: &CrestReport, separation: f64) -> Vec<bool> {
    let close: Vec<bool> = report
        .slices
        .iter()
        .map(|s| s.windows(2).any(|w| (w[1].z - w[0].z).abs() <= separation))
        .collect();
    let marked: Vec<usize> = close
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(k, _)| k)
        .collect();
    let mut out = close.clone();
    for w in marked.windows(2) {
        let floor = report.slices[w[0]].len().min(report.slices[w[1]].len());
        if (w[0] + 1..w[1]).all(|k| report.slices[k].len() < floor) {
            out[w[0] + 1..w[1]].iter_mut().for_each(|c| *c = true);
        }
    }
    out
}

/// Groups track fragments by velocity and measures incoming/outgoing offsets.
///
/// Crests in collision slices (see above) are dropped, which splits tracks
/// into asymptotic fragments. Fragments whose velocities agree within
/// `velocity_tol` (relative) are the same soliton; the earliest and latest of
/// them give the incoming and outgoing lines.
pub fn analyze_interaction(
    report: &CrestReport,
    separation: f64,
    velocity_tol: f64,
) -> Interaction {
    let collision = collision_slices(report, separation);
    let slice_of = |t: f64| {
        report
            .slices
            .iter()
            .position(|s| s.first().is_some_and(|c| c.t == t))
    };
    let mut asym: Vec<Vec<CrestPoint>> = Vec::new();
    for tr in &report.tracks {
        let mut run: Vec<CrestPoint> = Vec::new();
        for p in &tr.points {
            if slice_of(p.t).is_some_and(|k| !collision[k]) {
                run.push(*p);
            } else if !run.is_empty() {
                asym.push(std::mem::take(&mut run));
            }
        }
        if !run.is_empty() {
            asym.push(run);
        }
    }
    let mut order: Vec<usize> = (0..asym.len())
        .filter(|&k| asym[k].len() >= MIN_FRAGMENT)
        .collect();
    order.sort_by(|&a, &b| asym[b].len().cmp(&asym[a].len()).then(a.cmp(&b)));
    let fit_v = |k: usize| line_fit(&asym[k].iter().map(|p| (p.t, p.z)).collect::<Vec<_>>()).0;

    let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
    for k in order {
        let v = fit_v(k);
        match clusters
            .iter_mut()
            .find(|(vc, _)| (v - *vc).abs() <= velocity_tol * vc.abs().max(1e-12))
        {
            Some((_, members)) => members.push(k),
            None => clusters.push((v, vec![k])),
        }
    }

    let mean_t = |k: usize| asym[k].iter().map(|p| p.t).sum::<f64>() / asym[k].len() as f64;
    let passages = clusters
        .into_iter()
        .map(|(_, mut members)| {
            members.sort_by(|&a, &b| mean_t(a).total_cmp(&mean_t(b)));
            let first = members[0];
            let last = *members.last().unwrap();
            let segs: Vec<&[CrestPoint]> = if last != first {
                vec![&asym[first], &asym[last]]
            } else {
                vec![&asym[first]]
            };
            let means: Vec<(f64, f64)> = segs
                .iter()
                .map(|s| {
                    let n = s.len() as f64;
                    (
                        s.iter().map(|p| p.t).sum::<f64>() / n,
                        s.iter().map(|p| p.z).sum::<f64>() / n,
                    )
                })
                .collect();
            let (mut num, mut den) = (0.0, 0.0);
            for (s, &(mt, mz)) in segs.iter().zip(&means) {
                for p in s.iter() {
                    num += (p.t - mt) * (p.z - mz);
                    den += (p.t - mt).powi(2);
                }
            }
            let velocity = if den > 0.0 { num / den } else { 0.0 };
            let offsets: Vec<f64> = means.iter().map(|&(mt, mz)| mz - velocity * mt).collect();
            let pts: Vec<&CrestPoint> = segs.iter().flat_map(|s| s.iter()).collect();
            let amplitude = pts.iter().map(|p| p.value).sum::<f64>() / pts.len() as f64;
            let outgoing_offset = offsets.get(1).copied();
            SolitonPassage {
                fragments: members.len(),
                velocity,
                amplitude,
                incoming_offset: offsets[0],
                outgoing_offset,
                phase_shift: outgoing_offset.map(|o| o - offsets[0]),
                asymptotic_points: pts.len(),
            }
        })
        .collect();
    Interaction { passages }
}
