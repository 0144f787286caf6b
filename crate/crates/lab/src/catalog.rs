//! Named scenarios: single vortices, pairs, dipoles and lattices under both
//! boundary conditions, on the rectangular domains only.

use crate::config::{Bc, Domain, Phase, ScenarioConfig};

const ROMAN: [&str; 15] = [
    "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII", "XIII", "XIV", "XV",
];

const MODES: [Phase; 6] = [
    Phase::Mode0,
    Phase::Mode1,
    Phase::Mode2,
    Phase::Mode3,
    Phase::Mode4,
    Phase::Mode5,
];

const SHIFTED_NOTE: &str =
    "x1 listed as (0.4, 0), coinciding with x4; corrected to (-0.4, 0)";

fn dir(name: &str, phase: Phase) -> ScenarioConfig {
    ScenarioConfig::new(name, Domain::TypeI, Bc::Dirichlet, phase)
}

fn neu(name: &str) -> ScenarioConfig {
    ScenarioConfig::new(name, Domain::TypeI, Bc::Neumann, Phase::NeumannCompatible)
}

fn dirichlet_singles() -> Vec<ScenarioConfig> {
    use Phase::*;
    let cases: [((f64, f64), Phase, Domain); 14] = [
        ((0.0, 0.0), Mode1, Domain::TypeI),
        ((0.0, 0.0), Mode2, Domain::TypeI),
        ((0.0, 0.0), Mode3, Domain::TypeI),
        ((0.1, 0.0), Mode1, Domain::TypeI),
        ((0.1, 0.0), Mode2, Domain::TypeI),
        ((0.1, 0.0), Mode3, Domain::TypeI),
        ((0.1, 0.0), Mode4, Domain::TypeI),
        ((0.1, 0.0), Mode5, Domain::TypeI),
        ((0.1, 0.2), Mode2, Domain::TypeI),
        ((0.1, 0.2), Mode3, Domain::TypeI),
        ((0.1, 0.2), Mode4, Domain::TypeI),
        ((0.1, 0.2), Mode5, Domain::TypeI),
        ((0.0, 0.0), Mode1, Domain::TypeII),
        ((0.1, 0.2), Mode3, Domain::TypeII),
    ];
    // cases XIV and XVI live on the disk
    let labels = ROMAN[..13].iter().copied().chain(["XV"]);
    let mut out = vec![dir("dir-single-origin-h0", Mode0).with_vortices(&[(0.0, 0.0, 1)])];
    for (label, ((x, y), phase, domain)) in labels.zip(cases) {
        let mut c = dir(&format!("dir-single-{label}"), phase).with_vortices(&[(x, y, 1)]);
        c.domain = domain;
        out.push(c);
    }
    out
}

fn pairs_and_dipoles() -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for (k, &phase) in MODES.iter().enumerate() {
        out.push(dir(&format!("dir-pair-h{k}"), phase).with_vortices(&[(-0.3, 0.0, 1), (0.3, 0.0, 1)]));
    }
    for (k, &phase) in MODES.iter().enumerate() {
        out.push(dir(&format!("dir-dipole-h{k}"), phase).with_vortices(&[(-0.3, 0.0, -1), (0.3, 0.0, 1)]));
    }
    out
}

fn dirichlet_lattices() -> Vec<ScenarioConfig> {
    let r3 = 3f64.sqrt() / 4.0;
    let tri = [(0.5, 0.0), (-0.25, r3), (-0.25, -r3)];
    let line = [(-0.4, 0.0), (0.0, 0.0), (0.4, 0.0)];
    let diag = [(0.0, 0.3), (0.15, 0.15), (0.3, 0.0)];
    let scattered = [(0.2, 0.3), (-0.3, 0.4), (-0.4, -0.2), (0.3, -0.3)];
    let cross = [(0.5, 0.0), (0.0, 0.5), (-0.5, 0.0), (0.0, -0.5)];
    let square = [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)];
    let shifted = [(-0.4, 0.0), (-0.4 / 3.0, 0.0), (0.4 / 3.0, 0.0), (0.4, 0.0)];
    let cases: [(&[(f64, f64)], [i8; 4]); 15] = [
        (&tri, [1, 1, 1, 0]),
        (&line, [1, 1, 1, 0]),
        (&diag, [1, 1, 1, 0]),
        (&tri, [-1, 1, 1, 0]),
        (&line, [1, -1, 1, 0]),
        (&scattered[..3], [-1, 1, 1, 0]),
        (&cross, [1, 1, 1, 1]),
        (&cross, [1, -1, 1, -1]),
        (&cross, [1, -1, -1, 1]),
        (&square, [1, -1, 1, -1]),
        (&square, [1, -1, -1, 1]),
        (&shifted, [-1, 1, -1, 1]),
        (&shifted, [1, -1, -1, 1]),
        (&shifted, [-1, -1, 1, 1]),
        (&scattered, [-1, 1, -1, 1]),
    ];
    let mut out = lattices("dir-lattice", &cases, |name| dir(name, Phase::Mode0), &[11, 12, 13]);
    for m in [8usize, 12, 16, 20] {
        let ring: Vec<(f64, f64, i8)> = (1..=m)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                (0.5 * a.cos(), 0.5 * a.sin(), 1)
            })
            .collect();
        out.push(dir(&format!("dir-ring-M{m}"), Phase::Mode0).with_vortices(&ring));
    }
    out
}

fn neumann_lattices() -> Vec<ScenarioConfig> {
    let r3 = 3f64.sqrt() / 5.0;
    let tri = [(0.4, 0.0), (-0.2, r3), (-0.2, -r3)];
    let raised = [(-0.4, 0.2), (0.0, 0.2), (0.4, 0.2)];
    let line = [(-0.4, 0.0), (0.0, 0.0), (0.4, 0.0)];
    let wide = [(-0.7, 0.0), (0.0, 0.0), (0.7, 0.0)];
    let cross = |r: f64| [(r, 0.0), (0.0, r), (-r, 0.0), (0.0, -r)];
    let (c4, c59, c6, c7) = (cross(0.4), cross(0.59), cross(0.6), cross(0.7));
    let shifted = [(-0.4, 0.0), (-0.4 / 3.0, 0.0), (0.4 / 3.0, 0.0), (0.4, 0.0)];
    let spread = [(-0.6, 0.0), (-0.1, 0.0), (0.1, 0.0), (0.6, 0.0)];
    let cases: [(&[(f64, f64)], [i8; 4]); 15] = [
        (&tri, [1, 1, 1, 0]),
        (&raised, [1, 1, 1, 0]),
        (&line, [1, 1, 1, 0]),
        (&tri, [-1, 1, 1, 0]),
        (&line, [1, -1, 1, 0]),
        (&wide, [1, -1, 1, 0]),
        (&c4, [1, 1, 1, 1]),
        (&c4, [-1, 1, -1, 1]),
        (&c59, [-1, 1, -1, 1]),
        (&c7, [-1, 1, -1, 1]),
        (&c4, [1, -1, -1, 1]),
        (&c6, [1, -1, -1, 1]),
        (&shifted, [-1, 1, -1, 1]),
        (&shifted, [-1, 1, -1, 1]),
        (&spread, [-1, 1, -1, 1]),
    ];
    lattices("neu-lattice", &cases, neu, &[12, 13])
}

/// `corrected` holds zero-based case indices whose first center was fixed.
fn lattices(
    prefix: &str,
    cases: &[(&[(f64, f64)], [i8; 4])],
    make: impl Fn(&str) -> ScenarioConfig,
    corrected: &[usize],
) -> Vec<ScenarioConfig> {
    cases
        .iter()
        .enumerate()
        .map(|(k, (pts, n))| {
            let v: Vec<(f64, f64, i8)> = pts.iter().zip(n).map(|(&(x, y), &n)| (x, y, n)).collect();
            let mut c = make(&format!("{prefix}-{}", ROMAN[k])).with_vortices(&v);
            c.t_end = 2.0;
            if corrected.contains(&k) {
                c = c.with_note(SHIFTED_NOTE);
            }
            c
        })
        .collect()
}

fn neumann_few() -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for (x, y) in [(0.0, 0.0), (0.1, 0.0), (0.1, 0.2)] {
        out.push(neu(&format!("neu-single-({x},{y})")).with_vortices(&[(x, y, 1)]));
    }
    for (d, tag) in [(0.3, "03"), (0.7, "07")] {
        out.push(neu(&format!("neu-pair-d{tag}")).with_vortices(&[(-d, 0.0, 1), (d, 0.0, 1)]));
    }
    for (d, tag) in [(0.3, "03"), (0.7, "07")] {
        out.push(neu(&format!("neu-dipole-d{tag}")).with_vortices(&[(-d, 0.0, -1), (d, 0.0, 1)]));
    }
    out
}

/// Every cataloged scenario at desk scale.
pub fn list_scenarios() -> Vec<ScenarioConfig> {
    let mut out = dirichlet_singles();
    out.extend(pairs_and_dipoles());
    out.extend(dirichlet_lattices());
    out.extend(neumann_few());
    out.extend(neumann_lattices());
    out
}

pub fn find(name: &str) -> Option<ScenarioConfig> {
    list_scenarios().into_iter().find(|c| c.name == name)
}
