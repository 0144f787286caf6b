//! Vortex detection by plaquette phase winding, frame-to-frame association,
//! and the distance between two center trajectories.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::ComplexField;
use crate::grid::{Grid2D, Point};

/// A vortex found in one cell of a field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectedVortex {
    pub center: Point,
    pub winding: i8,
    pub cell: (usize, usize),
}

/// Winding of the phase around cell `(i, j)`, traversed counter-clockwise.
fn cell_winding(v: &ndarray::Array2<Complex64>, i: usize, j: usize) -> f64 {
    let loop_ = [v[[i, j]], v[[i + 1, j]], v[[i + 1, j + 1]], v[[i, j + 1]]];
    let mut s = 0.0;
    for k in 0..4 {
        s += (loop_[(k + 1) % 4] * loop_[k].conj()).arg();
    }
    s / (2.0 * std::f64::consts::PI)
}

/// Zero of the bilinear interpolants of `Re psi` and `Im psi` on the unit
/// cell, if one exists inside it.
fn bilinear_zero(z: [Complex64; 4]) -> Option<(f64, f64)> {
    // z = [z00, z10, z01, z11]
    let coef = |f: [f64; 4]| (f[0], f[1] - f[0], f[2] - f[0], f[3] - f[1] - f[2] + f[0]);
    let (a, b, c, d) = coef(z.map(|w| w.re));
    let (a2, b2, c2, d2) = coef(z.map(|w| w.im));
    // (a2 + b2 s)(c + d s) - (c2 + d2 s)(a + b s) = 0
    let qa = b2 * d - d2 * b;
    let qb = a2 * d + b2 * c - c2 * b - d2 * a;
    let qc = a2 * c - c2 * a;
    let scale = qa.abs().max(qb.abs()).max(qc.abs());
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let mut roots = Vec::with_capacity(2);
    if qa.abs() <= 1e-12 * scale {
        if qb.abs() > 1e-12 * scale {
            roots.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let q = -0.5 * (qb + qb.signum() * sq);
        roots.push(q / qa);
        if q != 0.0 {
            roots.push(qc / q);
        }
    }
    let slack = 1e-9;
    let mut best: Option<(f64, f64)> = None;
    for s in roots {
        if !(s >= -slack && s <= 1.0 + slack) {
            continue;
        }
        let den1 = c + d * s;
        let den2 = c2 + d2 * s;
        let t = if den1.abs() >= den2.abs() {
            -(a + b * s) / den1
        } else {
            -(a2 + b2 * s) / den2
        };
        if !(t >= -slack && t <= 1.0 + slack) {
            continue;
        }
        let cand = (s.clamp(0.0, 1.0), t.clamp(0.0, 1.0));
        let dist = |p: (f64, f64)| (p.0 - 0.5).powi(2) + (p.1 - 0.5).powi(2);
        if best.map_or(true, |b| dist(cand) < dist(b)) {
            best = Some(cand);
        }
    }
    best
}

/// Finds every cell whose boundary carries a phase winding of `+-1`.
///
/// A cell with winding of magnitude two or more is reported as
/// [`Error::MultiCharge`]. With four wrapped edges this needs every phase
/// jump to sit exactly at `pi`, so in practice a merger shows up as a
/// transient pair of unit windings instead.
pub fn detect_vortices(field: &ComplexField) -> Result<Vec<DetectedVortex>> {
    let g = *field.grid();
    if !field.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    let v = &field.values;
    let rows = exec::map_indexed(g.nx(), |i| {
        let mut found = Vec::new();
        for j in 0..g.ny() {
            let w = cell_winding(v, i, j);
            let n = w.round();
            if n == 0.0 {
                continue;
            }
            if (w - n).abs() > 1e-6 {
                log::warn!("cell ({i}, {j}) winding {w} is not an integer");
            }
            if n.abs() >= 2.0 {
                return Err(Error::MultiCharge {
                    i,
                    j,
                    winding: n as i32,
                });
            }
            let z = [v[[i, j]], v[[i + 1, j]], v[[i, j + 1]], v[[i + 1, j + 1]]];
            let (s, t) = bilinear_zero(z).unwrap_or((0.5, 0.5));
            found.push(DetectedVortex {
                center: Point::new(g.x(i) + s * g.hx(), g.y(j) + t * g.hy()),
                winding: n as i8,
                cell: (i, j),
            });
        }
        Ok(found)
    });
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// Association and lifecycle rules, distances in cells of the field grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackerConfig {
    /// Cell size used to convert the radii below to lengths.
    pub cell: f64,
    pub gate_cells: f64,
    pub annihilation_cells: f64,
    pub exit_cells: f64,
}

impl TrackerConfig {
    pub fn for_grid(grid: &Grid2D) -> Self {
        Self {
            cell: grid.h_max(),
            gate_cells: 5.0,
            annihilation_cells: 3.0,
            exit_cells: 3.0,
        }
    }
}

/// How a trajectory ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lifecycle {
    Annihilated { t: f64, partner: usize },
    Exited { t: f64 },
    /// Disappeared without a partner and away from the boundary.
    Lost { t: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub id: usize,
    pub winding: i8,
    /// Time of the first sample; equal to the first frame time for vortices
    /// present at the start.
    pub born: f64,
    pub samples: Vec<(f64, Point)>,
    pub end: Option<Lifecycle>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, Point) {
        *self.samples.last().expect("trajectories are never empty")
    }

    /// Position at `t` extrapolated linearly from the last two samples.
    pub fn projected(&self, t: f64) -> Point {
        let n = self.samples.len();
        let (t1, p1) = self.samples[n - 1];
        if n < 2 {
            return p1;
        }
        let (t0, p0) = self.samples[n - 2];
        p1 + (p1 - p0) * ((t - t1) / (t1 - t0))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectorySet {
    pub trajectories: Vec<Trajectory>,
}

impl TrajectorySet {
    pub fn annihilations(&self) -> impl Iterator<Item = (&Trajectory, f64, usize)> {
        self.trajectories.iter().filter_map(|tr| match tr.end {
            Some(Lifecycle::Annihilated { t, partner }) => Some((tr, t, partner)),
            _ => None,
        })
    }

    pub fn exits(&self) -> impl Iterator<Item = (&Trajectory, f64)> {
        self.trajectories.iter().filter_map(|tr| match tr.end {
            Some(Lifecycle::Exited { t }) => Some((tr, t)),
            _ => None,
        })
    }

    pub fn alive(&self) -> impl Iterator<Item = &Trajectory> {
        self.trajectories.iter().filter(|tr| tr.end.is_none())
    }

    /// For each of `points`, the trajectory present at the first frame whose
    /// first sample is closest (with matching winding).
    pub fn match_initial(&self, points: &[Point], windings: &[i8]) -> Vec<Option<usize>> {
        let t0 = self
            .trajectories
            .iter()
            .map(|t| t.born)
            .fold(f64::INFINITY, f64::min);
        let mut taken = vec![false; self.trajectories.len()];
        points
            .iter()
            .zip(windings)
            .map(|(p, &n)| {
                let best = self
                    .trajectories
                    .iter()
                    .enumerate()
                    .filter(|(k, tr)| !taken[*k] && tr.born == t0 && tr.winding == n)
                    .min_by(|a, b| {
                        let da = a.1.samples[0].1.dist(*p);
                        let db = b.1.samples[0].1.dist(*p);
                        da.total_cmp(&db)
                    })
                    .map(|(k, _)| k);
                if let Some(k) = best {
                    taken[k] = true;
                }
                best
            })
            .collect()
    }
}

/// Links detections across time-ordered frames.
///
/// Matching is greedy by distance among same-winding pairs inside the gate.
/// Trajectories left unmatched end either in annihilation (an opposite
/// winding partner vanished within the annihilation radius), an exit (within
/// the exit radius of the boundary) or as lost. Both distances are taken
/// along the last segment extrapolated to the frame of disappearance, since
/// vortices speed up sharply just before they merge or leave.
pub fn track(
    frames: &[(f64, Vec<DetectedVortex>)],
    domain: &Grid2D,
    cfg: &TrackerConfig,
) -> Result<TrajectorySet> {
    let mut set = TrajectorySet::default();
    for w in frames.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidParameter("frames are not time-ordered".into()));
        }
    }
    let gate = cfg.gate_cells * cfg.cell;
    let ann = cfg.annihilation_cells * cfg.cell;
    let exit = cfg.exit_cells * cfg.cell;

    for (t, dets) in frames {
        let active: Vec<usize> = set
            .trajectories
            .iter()
            .filter(|tr| tr.end.is_none())
            .map(|tr| tr.id)
            .collect();
        let mut cands: Vec<(f64, usize, usize)> = Vec::new();
        for &a in &active {
            let tr = &set.trajectories[a];
            let last = tr.last().1;
            for (k, d) in dets.iter().enumerate() {
                if d.winding == tr.winding {
                    let dist = last.dist(d.center);
                    if dist <= gate {
                        cands.push((dist, a, k));
                    }
                }
            }
        }
        cands.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut used_tr = vec![false; set.trajectories.len()];
        let mut used_det = vec![false; dets.len()];
        for (k, &(dist, a, d)) in cands.iter().enumerate() {
            if used_tr[a] || used_det[d] {
                continue;
            }
            if let Some(next) = cands[k + 1..]
                .iter()
                .find(|c| !used_tr[c.1] && !used_det[c.2] && (c.1 == a || c.2 == d))
            {
                if next.0 <= dist * 1.1 {
                    log::debug!("ambiguous association at t = {t} for trajectory {a}");
                }
            }
            used_tr[a] = true;
            used_det[d] = true;
            set.trajectories[a].samples.push((*t, dets[d].center));
        }

        let vanished: Vec<usize> = active.iter().copied().filter(|&a| !used_tr[a]).collect();
        let mut closed = vec![false; vanished.len()];
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for x in 0..vanished.len() {
            for y in x + 1..vanished.len() {
                let (p, q) = (&set.trajectories[vanished[x]], &set.trajectories[vanished[y]]);
                if p.winding == -q.winding {
                    let d = closest_approach(p.last().1, p.projected(*t), q.last().1, q.projected(*t));
                    if d <= ann {
                        pairs.push((d, x, y));
                    }
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        for (_, x, y) in pairs {
            if closed[x] || closed[y] {
                continue;
            }
            closed[x] = true;
            closed[y] = true;
            let (a, b) = (vanished[x], vanished[y]);
            set.trajectories[a].end = Some(Lifecycle::Annihilated { t: *t, partner: b });
            set.trajectories[b].end = Some(Lifecycle::Annihilated { t: *t, partner: a });
        }
        for (x, &a) in vanished.iter().enumerate() {
            if closed[x] {
                continue;
            }
            let tr = &set.trajectories[a];
            let clearance = domain
                .distance_to_boundary(tr.last().1)
                .min(domain.distance_to_boundary(tr.projected(*t)));
            set.trajectories[a].end = Some(if clearance <= exit {
                Lifecycle::Exited { t: *t }
            } else {
                log::warn!("trajectory {a} vanished at t = {t} away from the boundary");
                Lifecycle::Lost { t: *t }
            });
        }

        for (k, d) in dets.iter().enumerate() {
            if !used_det[k] {
                let id = set.trajectories.len();
                set.trajectories.push(Trajectory {
                    id,
                    winding: d.winding,
                    born: *t,
                    samples: vec![(*t, d.center)],
                    end: None,
                });
            }
        }
    }
    Ok(set)
}

/// Smallest distance between two points moving linearly from `a0` to `a1`
/// and from `b0` to `b1` over the same interval.
fn closest_approach(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    let r0 = a0 - b0;
    let dr = (a1 - b1) - r0;
    let dd = dr.norm_sqr();
    let s = if dd > 0.0 { (-r0.dot(dr) / dd).clamp(0.0, 1.0) } else { 0.0 };
    (r0 + dr * s).norm()
}

/// `|x_cgle(t) - x_rdl(t)|` at the sample times of `cgle` inside the common
/// time window, with the reduced trajectory interpolated linearly.
pub fn center_discrepancy(cgle: &[(f64, Point)], rdl: &[(f64, Point)]) -> Result<Vec<(f64, f64)>> {
    if cgle.is_empty() || rdl.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    let lo = cgle[0].0.max(rdl[0].0);
    let hi = cgle[cgle.len() - 1].0.min(rdl[rdl.len() - 1].0);
    if lo > hi {
        return Err(Error::EmptyOverlap);
    }
    let out: Vec<(f64, f64)> = cgle
        .iter()
        .filter(|(t, _)| *t >= lo && *t <= hi)
        .map(|&(t, p)| (t, p.dist(interpolate(rdl, t))))
        .collect();
    if out.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    Ok(out)
}

/// Linear interpolation in a time-ordered series.
pub fn interpolate(series: &[(f64, Point)], t: f64) -> Point {
    let k = series.partition_point(|s| s.0 < t);
    if k == 0 {
        return series[0].1;
    }
    if k == series.len() {
        return series[k - 1].1;
    }
    let (t0, p0) = series[k - 1];
    let (t1, p1) = series[k];
    if t1 == t0 {
        return p1;
    }
    let w = (t - t0) / (t1 - t0);
    p0 * (1.0 - w) + p1 * w
}
