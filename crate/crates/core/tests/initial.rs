use std::f64::consts::PI;

use cgle_core::initial::{
    compose_initial_data, dirichlet_boundary_values, PhaseMode, RadialProfile, VortexSpec,
};
use cgle_core::tracking::detect_vortices;
use cgle_core::{BcKind, ComplexField, Grid2D};
use num_complex::Complex64;
use proptest::prelude::*;

/// Right-hand side of the core-scale profile equation as a first-order system.
fn profile_rhs(s: f64, y: [f64; 2]) -> [f64; 2] {
    let [f, df] = y;
    [df, -df / s + f / (s * s) - (1.0 - f * f) * f]
}

/// Shoots from the series `f = a s (1 - s^2 / 8)` near the origin; returns
/// the trajectory on a uniform mesh of step `h` until `f` leaves `(0, 1)` or
/// turns back, plus whether the slope `a` overshot.
fn shoot(a: f64, h: f64, s_end: f64) -> (Vec<(f64, f64)>, bool) {
    let s0 = 1e-3;
    let mut y = [a * s0 * (1.0 - s0 * s0 / 8.0), a * (1.0 - 3.0 * s0 * s0 / 8.0)];
    let mut s = s0;
    let mut out = vec![(s, y[0])];
    while s < s_end {
        let add = |y: [f64; 2], k: [f64; 2], c: f64| [y[0] + c * k[0], y[1] + c * k[1]];
        let k1 = profile_rhs(s, y);
        let k2 = profile_rhs(s + 0.5 * h, add(y, k1, 0.5 * h));
        let k3 = profile_rhs(s + 0.5 * h, add(y, k2, 0.5 * h));
        let k4 = profile_rhs(s + h, add(y, k3, h));
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        s += h;
        if y[0] >= 1.0 {
            return (out, true);
        }
        if y[1] < 0.0 {
            return (out, false);
        }
        out.push((s, y[0]));
    }
    (out, false)
}

#[test]
fn relaxed_profile_matches_shooting_oracle() {
    let (mut lo, mut hi) = (0.3, 0.9);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if shoot(mid, 1e-3, 20.0).1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (traj, _) = shoot(0.5 * (lo + hi), 1e-3, 20.0);
    assert!((0.5 * (lo + hi) - 0.5831894958603).abs() < 1e-6);

    let eps = 1.0 / 16.0;
    let prof = RadialProfile::compute(eps, 3.0, 1e-10).unwrap();
    let mut worst: f64 = 0.0;
    for &(s, f) in traj.iter().filter(|(s, _)| *s <= 6.0) {
        worst = worst.max((prof.eval(s * eps) - f).abs());
    }
    assert!(worst < 1e-3, "profile vs shooting: {worst:e}");
}

#[test]
fn profile_scales_with_epsilon() {
    let a = RadialProfile::compute(1.0 / 8.0, 3.0, 1e-10).unwrap();
    let b = RadialProfile::compute(1.0 / 16.0, 3.0, 1e-10).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..=200 {
        let r = 10.0 / 8.0 * k as f64 / 200.0;
        worst = worst.max((a.eval(r) - b.eval(r / 2.0)).abs());
    }
    assert!(worst < 2e-2, "{worst:e}");
}

fn square(n: usize) -> Grid2D {
    Grid2D::new(-1.0, 1.0, -1.0, 1.0, n, n).unwrap()
}

#[test]
fn boundary_data_has_unit_modulus_and_total_winding() {
    let g = square(64);
    let single = dirichlet_boundary_values(&g, &[VortexSpec::new(0.0, 0.0, 1)], PhaseMode::Mode3).unwrap();
    assert!(single.values.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    assert!((single.phase_increase() - 2.0 * PI).abs() < 1e-9);
    let dipole = [VortexSpec::new(-0.3, 0.0, -1), VortexSpec::new(0.3, 0.0, 1)];
    let d = dirichlet_boundary_values(&g, &dipole, PhaseMode::Mode0).unwrap();
    assert!(d.phase_increase().abs() < 1e-9);
}

#[test]
fn detection_recovers_every_composed_vortex() {
    let configs: Vec<Vec<VortexSpec>> = vec![
        vec![VortexSpec::new(0.0, 0.0, 1)],
        vec![VortexSpec::new(0.1, 0.2, 1)],
        vec![VortexSpec::new(-0.3, 0.0, 1), VortexSpec::new(0.3, 0.0, 1)],
        vec![VortexSpec::new(-0.3, 0.0, -1), VortexSpec::new(0.3, 0.0, 1)],
        vec![
            VortexSpec::new(-0.4, 0.0, 1),
            VortexSpec::new(0.0, 0.4, -1),
            VortexSpec::new(0.4, 0.0, 1),
            VortexSpec::new(0.0, -0.4, -1),
        ],
        (0..8)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / 8.0;
                VortexSpec::new(0.5 * a.cos(), 0.5 * a.sin(), 1)
            })
            .collect(),
    ];
    let g = square(128);
    for specs in &configs {
        for mode in [PhaseMode::Mode0, PhaseMode::Mode4, PhaseMode::NeumannCompatible] {
            let f = compose_initial_data(&g, specs, mode, 1.0 / 16.0).unwrap();
            let found = detect_vortices(&f).unwrap();
            assert_eq!(found.len(), specs.len(), "{specs:?} {mode:?}");
            for s in specs {
                let hit = found
                    .iter()
                    .find(|d| d.center.dist(s.center) <= g.h_max() * 2f64.sqrt())
                    .unwrap_or_else(|| panic!("no detection near {:?}", s.center));
                assert_eq!(hit.winding, s.winding);
            }
        }
    }
}

/// Largest normal derivative of the phase over boundary nodes at least 0.25
/// from the corners, by one-sided second-order differences.
fn boundary_phase_flux(f: &ComplexField) -> f64 {
    let g = f.grid();
    let (n, l) = (g.nx(), g.ny());
    let v = &f.values;
    let dphase = |z0: Complex64, z1: Complex64, z2: Complex64, h: f64| {
        let d = (-3.0 * z0 + 4.0 * z1 - z2) / (2.0 * h);
        (z0.conj() * d).im / z0.norm_sqr()
    };
    let (cx, cy) = ((0.25 / g.hx()).ceil() as usize, (0.25 / g.hy()).ceil() as usize);
    let mut m: f64 = 0.0;
    for j in cy..=l - cy {
        m = m.max(dphase(v[[0, j]], v[[1, j]], v[[2, j]], g.hx()).abs());
        m = m.max(dphase(v[[n, j]], v[[n - 1, j]], v[[n - 2, j]], g.hx()).abs());
    }
    for i in cx..=n - cx {
        m = m.max(dphase(v[[i, 0]], v[[i, 1]], v[[i, 2]], g.hy()).abs());
        m = m.max(dphase(v[[i, l]], v[[i, l - 1]], v[[i, l - 2]], g.hy()).abs());
    }
    m
}

#[test]
fn neumann_compatible_phase_has_vanishing_normal_derivative() {
    let specs = [VortexSpec::new(-0.3, 0.0, -1), VortexSpec::new(0.3, 0.0, 1)];
    let e: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let f = compose_initial_data(&square(n), &specs, PhaseMode::NeumannCompatible, 1.0 / 16.0).unwrap();
            assert_eq!(f.bc(), BcKind::Neumann);
            boundary_phase_flux(&f)
        })
        .collect();
    for w in e.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.5, "{e:?}");
    }
    assert!(e[2] < 1e-4, "{e:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn negated_windings_conjugate_the_field(
        pts in proptest::collection::vec((-0.8f64..0.8, -0.8f64..0.8, any::<bool>()), 1..4)
    ) {
        let specs: Vec<VortexSpec> = pts
            .iter()
            .map(|&(x, y, up)| VortexSpec::new(x, y, if up { 1 } else { -1 }))
            .collect();
        let flipped: Vec<VortexSpec> = specs
            .iter()
            .map(|s| VortexSpec::new(s.center.x, s.center.y, -s.winding))
            .collect();
        let g = square(16);
        let a = compose_initial_data(&g, &specs, PhaseMode::Mode0, 0.125);
        prop_assume!(a.is_ok());
        let b = compose_initial_data(&g, &flipped, PhaseMode::Mode0, 0.125).unwrap();
        prop_assert_eq!(a.unwrap().conj().values, b.values);
    }
}
