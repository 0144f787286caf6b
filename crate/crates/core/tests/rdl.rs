use cgle_core::initial::{BoundaryPhase, PhaseMode, VortexSpec};
use cgle_core::rdl::{RdlBoundary, RdlModel, RdlOptions, RdlState, RhsForm, StopKind};
use cgle_core::{Grid2D, Point};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn square(n: usize) -> Grid2D {
    Grid2D::new(-1.0, 1.0, -1.0, 1.0, n, n).unwrap()
}

fn dirichlet(specs: &[VortexSpec], mode: PhaseMode, n: usize) -> RdlModel {
    let omega = BoundaryPhase::new(mode, specs.to_vec()).unwrap();
    RdlModel::new(square(n), 1.0, 1.0, RdlBoundary::Dirichlet(omega)).unwrap()
}

fn neumann(n: usize) -> RdlModel {
    RdlModel::new(square(n), 1.0, 1.0, RdlBoundary::Neumann).unwrap()
}

fn state(specs: &[VortexSpec]) -> RdlState {
    RdlState::new(
        specs.iter().map(|s| s.center).collect(),
        specs.iter().map(|s| s.winding).collect(),
    )
}

#[test]
fn centered_single_vortex_does_not_move() {
    let specs = [VortexSpec::new(0.0, 0.0, 1)];
    for m in [dirichlet(&specs, PhaseMode::Mode0, 256), neumann(256)] {
        let v = m.velocities(&[Point::new(0.0, 0.0)], &[1]).unwrap();
        assert!(v[0].norm() < 1e-6, "{:?}", v[0]);
    }
}

#[test]
fn like_pair_velocities_are_odd() {
    let specs = [VortexSpec::new(-0.3, 0.0, 1), VortexSpec::new(0.3, 0.0, 1)];
    let m = dirichlet(&specs, PhaseMode::Mode0, 256);
    let c: Vec<Point> = specs.iter().map(|s| s.center).collect();
    let v = m.velocities(&c, &[1, 1]).unwrap();
    assert!((v[0] + v[1]).norm() < 1e-10);
    // repulsion with a rotation component
    assert!(v[1].x > 0.0 && v[1].y != 0.0);
}

#[test]
fn neumann_velocities_mirror_with_the_state() {
    let m = neumann(256);
    let c = [Point::new(0.2, 0.1), Point::new(-0.4, 0.3)];
    let mirrored: Vec<Point> = c.iter().map(|p| Point::new(-p.x, p.y)).collect();
    // reflection reverses orientation, so windings change sign
    let v = m.velocities_with(RhsForm::Q, &c, &[1, 1]).unwrap();
    let w = m.velocities_with(RhsForm::Q, &mirrored, &[-1, -1]).unwrap();
    for (a, b) in v.iter().zip(&w) {
        assert!((a.x + b.x).abs() < 1e-10 && (a.y - b.y).abs() < 1e-10, "{a:?} {b:?}");
    }
}

fn random_state(rng: &mut StdRng, m: usize) -> (Vec<Point>, Vec<i8>) {
    let mut c: Vec<Point> = Vec::new();
    while c.len() < m {
        let p = Point::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
        if c.iter().all(|q| q.dist(p) > 0.25) {
            c.push(p);
        }
    }
    let n = (0..m).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    (c, n)
}

/// `F_j` against central differences of `W` with step `1e-4`.
fn fd_gap(m: &RdlModel, c: &[Point], n: &[i8]) -> f64 {
    let f = m.forces(c, n).unwrap();
    let d = 1e-4;
    let mut worst: f64 = 0.0;
    for j in 0..c.len() {
        let mut g = [0.0; 2];
        for (k, e) in [Point::new(d, 0.0), Point::new(0.0, d)].into_iter().enumerate() {
            let mut plus = c.to_vec();
            plus[j] = plus[j] + e;
            let mut minus = c.to_vec();
            minus[j] = minus[j] - e;
            let wp = m.renormalized_energy(&plus, n).unwrap();
            let wm = m.renormalized_energy(&minus, n).unwrap();
            g[k] = (wp - wm) / (2.0 * d);
        }
        worst = worst.max((f[j] + Point::new(g[0], g[1])).norm());
    }
    worst
}

#[test]
fn forces_are_minus_the_energy_gradient() {
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..3 {
        let (c, n) = random_state(&mut rng, 3);
        let specs: Vec<VortexSpec> = c
            .iter()
            .zip(&n)
            .map(|(p, &w)| VortexSpec::new(p.x * 0.8, p.y * 0.8 + 0.05, w))
            .collect();
        let d = dirichlet(&specs, PhaseMode::Mode4, 256);
        assert!(fd_gap(&d, &c, &n) < 1e-3);
        assert!(fd_gap(&neumann(256), &c, &n) < 1e-3);
    }
}

#[test]
fn all_three_forms_agree() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..4 {
        let (c, n) = random_state(&mut rng, 3);
        let specs: Vec<VortexSpec> = c.iter().zip(&n).map(|(p, &w)| VortexSpec::new(-p.y, p.x, w)).collect();
        for m in [dirichlet(&specs, PhaseMode::Mode3, 256), neumann(256)] {
            let q = m.velocities_with(RhsForm::Q, &c, &n).unwrap();
            for form in [RhsForm::H, RhsForm::R] {
                let o = m.velocities_with(form, &c, &n).unwrap();
                for (a, b) in q.iter().zip(&o) {
                    assert!((*a - *b).norm() < 1e-3, "{form:?}: {a:?} vs {b:?}");
                }
            }
        }
    }
}

#[test]
fn velocities_converge_with_the_auxiliary_grid() {
    let specs = [VortexSpec::new(-0.3, 0.2, 1), VortexSpec::new(0.35, -0.1, -1)];
    let c = [Point::new(-0.25, 0.25), Point::new(0.3, -0.15)];
    let v: Vec<Vec<Point>> = [64, 128, 256, 512]
        .iter()
        .map(|&n| dirichlet(&specs, PhaseMode::Mode1, n).velocities(&c, &[1, -1]).unwrap())
        .collect();
    let gap = |a: &[Point], b: &[Point]| a.iter().zip(b).map(|(p, q)| (*p - *q).norm()).fold(0.0, f64::max);
    let d: Vec<f64> = v.windows(2).map(|w| gap(&w[0], &w[1])).collect();
    for w in d.windows(2) {
        assert!(w[0] / w[1] > 3.0, "{d:?}");
    }
}

#[test]
fn like_pair_stays_point_symmetric() {
    let specs = [VortexSpec::new(-0.3, 0.0, 1), VortexSpec::new(0.3, 0.0, 1)];
    let m = dirichlet(&specs, PhaseMode::Mode0, 256);
    let tr = m.integrate(&state(&specs), 0.3, &RdlOptions::default()).unwrap();
    assert_eq!(tr.stop.kind, StopKind::TimeEnd);
    for (_, c) in tr.step_states() {
        assert!((c[0] + c[1]).norm() < 1e-8);
    }
}

#[test]
fn energy_decreases_along_trajectories() {
    let cases: Vec<(RdlModel, Vec<VortexSpec>)> = vec![
        (
            dirichlet(&[VortexSpec::new(0.1, 0.2, 1)], PhaseMode::Mode4, 128),
            vec![VortexSpec::new(0.1, 0.2, 1)],
        ),
        (neumann(128), vec![VortexSpec::new(-0.3, 0.0, 1), VortexSpec::new(0.3, 0.0, 1)]),
        (neumann(128), vec![VortexSpec::new(-0.3, 0.1, -1), VortexSpec::new(0.3, 0.0, 1)]),
    ];
    for (m, specs) in cases {
        let tr = m.integrate(&state(&specs), 0.5, &RdlOptions::default()).unwrap();
        let states = tr.step_states();
        let w: Vec<f64> = states
            .iter()
            .map(|(_, c)| m.renormalized_energy(c, &tr.windings).unwrap())
            .collect();
        for k in 1..w.len() {
            assert!(w[k] <= w[k - 1] + 1e-6, "step {k}: {} -> {}", w[k - 1], w[k]);
        }
    }
}

#[test]
fn dipole_collides_and_off_center_neumann_vortex_exits() {
    let dip = [VortexSpec::new(-0.3, 0.0, -1), VortexSpec::new(0.3, 0.0, 1)];
    let m = dirichlet(&dip, PhaseMode::Mode0, 128);
    let tr = m.integrate(&state(&dip), 1.0, &RdlOptions::default()).unwrap();
    assert!(matches!(tr.stop.kind, StopKind::Collision { .. }), "{:?}", tr.stop);
    assert!(tr.stop.t_stop < 1.0);

    let one = [VortexSpec::new(0.1, 0.0, 1)];
    let tr = neumann(128).integrate(&state(&one), 10.0, &RdlOptions::default()).unwrap();
    assert!(matches!(tr.stop.kind, StopKind::Exit { j: 0 }), "{:?}", tr.stop);
    let end = tr.centers_at(tr.stop.t_stop)[0];
    let opts = RdlOptions::default();
    let de = opts.effective_exit_distance(&square(128));
    assert!((square(128).distance_to_boundary(end) - de).abs() < 1e-6);
}

#[test]
fn stationary_vortex_runs_to_the_horizon() {
    let one = [VortexSpec::new(0.0, 0.0, 1)];
    let m = dirichlet(&one, PhaseMode::Mode0, 128);
    let tr = m.integrate(&state(&one), 1.0, &RdlOptions::default()).unwrap();
    assert_eq!(tr.stop.kind, StopKind::TimeEnd);
    assert!(tr.centers_at(1.0)[0].norm() < 1e-8);
}
